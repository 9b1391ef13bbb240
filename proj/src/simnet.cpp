#include "swarm/simnet.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>

namespace swarm::simnet {

void Fnv1a::bytes(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h_ ^= p[i];
    h_ *= 1099511628211ull;
  }
}

std::string hex_digest(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

const char* payload_kind(const Payload& p) {
  switch (p.index()) {
    case 0: return "state";
    case 1: return "scale";
    case 2: return "trajectory";
    default: return "measurement";
  }
}

void hash_payload(Fnv1a& h, const Payload& p) {
  h.u64(p.index());
  std::visit(
      [&h](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, StateEstimate>) {
          for (int d = 0; d < 3; ++d) h.f64(v.p(d));
          for (int d = 0; d < 3; ++d) h.f64(v.v(d));
        } else if constexpr (std::is_same_v<T, ScaleEstimate>) {
          h.f64(v.s);
        } else if constexpr (std::is_same_v<T, TrajectoryBlock>) {
          h.i64(v.origin);
          h.i64(v.holder);
          h.u64(v.version);
          for (Eigen::Index i = 0; i < v.accel.size(); ++i) h.f64(v.accel(i));
        } else {
          for (int d = 0; d < 3; ++d) h.f64(v.value(d));
        }
      },
      p);
}

nlohmann::json payload_json(const Payload& p) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, StateEstimate>) {
          return {{"p", {v.p(0), v.p(1), v.p(2)}}, {"v", {v.v(0), v.v(1), v.v(2)}}};
        } else if constexpr (std::is_same_v<T, ScaleEstimate>) {
          return {{"s", v.s}};
        } else if constexpr (std::is_same_v<T, TrajectoryBlock>) {
          return {{"origin", v.origin + 1}, {"holder", v.holder + 1}, {"version", v.version}};
        } else {
          return {{"value", {v.value(0), v.value(1), v.value(2)}}};
        }
      },
      p);
}

}  // namespace

Network::Network(WeightedGraph g_comm, bool record_transcript)
    : graph_(std::move(g_comm)), record_(record_transcript) {
  sealed_.assign(graph_.num_nodes(), false);
  inbox_.assign(graph_.num_nodes(), {});
  Fnv1a h;
  hash_ = h.value();
}

void Network::set_edge_delay(int i, int j, int extra_rounds) {
  if (!graph_.has_edge(i, j)) throw InvalidArgument("Network: delay on a non-edge");
  if (extra_rounds < 0) throw InvalidArgument("Network: delay must be non-negative");
  delay_[{i, j}] = extra_rounds;
  if (!graph_.directed()) delay_[{j, i}] = extra_rounds;
}

void Network::send(int src, int dst, Payload payload) {
  if (src < 0 || src >= num_agents() || dst < 0 || dst >= num_agents())
    throw InvalidArgument("Network: agent id out of range");
  if (!graph_.has_edge(src, dst))
    throw InvalidArgument("Network: agent " + std::to_string(src + 1) + " cannot reach agent " +
                          std::to_string(dst + 1));
  if (sealed_[src]) throw InvalidArgument("Network: agent " + std::to_string(src + 1) + " already sealed this round");
  int extra = 0;
  if (auto it = delay_.find({src, dst}); it != delay_.end()) extra = it->second;
  pending_.push_back({round_ + 1 + extra, Message{src, dst, round_, std::move(payload)}});
}

void Network::broadcast_to_neighbors(int agent, const Payload& payload) {
  for (int j : graph_.neighbors(agent)) send(agent, j, payload);
}

void Network::seal(int agent) { sealed_.at(agent) = true; }

void Network::seal_all() { std::fill(sealed_.begin(), sealed_.end(), true); }

int Network::advance_round() {
  for (int i = 0; i < num_agents(); ++i)
    if (!sealed_[i]) throw InvalidArgument("Network: agent " + std::to_string(i + 1) + " has not sealed its outbox");
  ++round_;
  for (auto& box : inbox_) box.clear();

  std::vector<Pending> later;
  std::vector<Message> due;
  for (auto& p : pending_) {
    if (p.due_round <= round_) due.push_back(std::move(p.msg));
    else later.push_back(std::move(p));
  }
  pending_ = std::move(later);
  // Stable sort keeps per-source send order.
  std::stable_sort(due.begin(), due.end(), [](const Message& a, const Message& b) {
    return std::pair(a.dst, a.src) < std::pair(b.dst, b.src);
  });

  Fnv1a h;
  h.u64(hash_);
  for (auto& m : due) {
    h.i64(m.src);
    h.i64(m.dst);
    h.i64(m.round);
    hash_payload(h, m.payload);
    if (record_) {
      nlohmann::json row = {{"round", m.round},        {"delivered", round_},
                            {"src", m.src + 1},        {"dst", m.dst + 1},
                            {"kind", payload_kind(m.payload)}, {"payload", payload_json(m.payload)}};
      transcript_.push_back(row.dump());
    }
    ++delivered_;
    inbox_[m.dst].push_back(std::move(m));
  }
  h.i64(round_);
  hash_ = h.value();
  std::fill(sealed_.begin(), sealed_.end(), false);
  return round_;
}

void Network::write_transcript(std::ostream& os) const {
  for (const auto& line : transcript_) os << line << '\n';
}

bool VersionStore::offer(const TrajectoryBlock& block) {
  auto& slot = blocks_.at(block.origin);
  if (slot && slot->version >= block.version) return false;
  slot = block;
  return true;
}

}  // namespace swarm::simnet
