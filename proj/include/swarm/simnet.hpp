#pragma once

#include "swarm/graph.hpp"
#include "swarm/numerics.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace swarm::simnet {

struct StateEstimate {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
};

struct ScaleEstimate {
  double s = 0.0;
};

/// Acceleration plan of `origin`, tagged with a per-origin version counter.
/// `holder` is the agent whose copy this is (equals origin for own plans).
struct TrajectoryBlock {
  int origin = 0;
  int holder = 0;
  std::uint64_t version = 0;
  Vector accel;
};

struct Measurement {
  Vec3 value = Vec3::Zero();
};

using Payload = std::variant<StateEstimate, ScaleEstimate, TrajectoryBlock, Measurement>;

struct Message {
  int src = 0;
  int dst = 0;
  int round = 0;  ///< round in which the message was sent
  Payload payload;
};

/// Synchronous-round network over a fixed communication graph.
///
/// Messages sent during round r land in the destination inbox when the round
/// is advanced (after an optional per-edge delay). Every agent must seal its
/// outbox before the round can advance; inboxes are ordered by source id.
class Network {
 public:
  explicit Network(WeightedGraph g_comm, bool record_transcript = true);

  const WeightedGraph& graph() const { return graph_; }
  int num_agents() const { return graph_.num_nodes(); }
  int round() const { return round_; }

  /// Extra rounds of latency on the edge {i, j} (0 = next round).
  void set_edge_delay(int i, int j, int extra_rounds);

  /// Throws InvalidArgument when (src, dst) is not an edge or src is sealed.
  void send(int src, int dst, Payload payload);
  void broadcast_to_neighbors(int agent, const Payload& payload);

  void seal(int agent);
  void seal_all();
  bool sealed(int agent) const { return sealed_.at(agent); }

  /// Delivers due messages and opens the next round. Throws if any agent is unsealed.
  int advance_round();

  std::span<const Message> inbox(int agent) const { return inbox_.at(agent); }

  /// FNV-1a over every delivered message in delivery order.
  std::uint64_t transcript_hash() const { return hash_; }
  std::uint64_t messages_delivered() const { return delivered_; }
  /// JSON-lines transcript (empty unless recording).
  void write_transcript(std::ostream& os) const;

 private:
  struct Pending {
    int due_round;
    Message msg;
  };

  WeightedGraph graph_;
  bool record_;
  int round_ = 0;
  std::vector<bool> sealed_;
  std::vector<Pending> pending_;
  std::vector<std::vector<Message>> inbox_;
  std::map<std::pair<int, int>, int> delay_;
  std::uint64_t hash_;
  std::uint64_t delivered_ = 0;
  std::vector<std::string> transcript_;
};

/// Per-agent store of the most recent copy of every origin's trajectory block.
class VersionStore {
 public:
  explicit VersionStore(int num_agents = 0) : blocks_(num_agents) {}

  /// Keeps `block` if its version is newer than the stored one; returns whether it was adopted.
  bool offer(const TrajectoryBlock& block);
  bool has(int origin) const { return blocks_.at(origin).has_value(); }
  const TrajectoryBlock& get(int origin) const { return *blocks_.at(origin); }
  std::uint64_t version(int origin) const { return has(origin) ? get(origin).version : 0; }

 private:
  std::vector<std::optional<TrajectoryBlock>> blocks_;
};

/// FNV-1a helpers shared by every deterministic digest in the project.
class Fnv1a {
 public:
  void bytes(const void* data, std::size_t n);
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void i64(std::int64_t v) { bytes(&v, sizeof v); }
  void f64(double v) { bytes(&v, sizeof v); }
  void str(const std::string& s) { bytes(s.data(), s.size()); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 14695981039346656037ull;
};

std::string hex_digest(std::uint64_t h);

}  // namespace swarm::simnet
