#include "swarm/tracking.hpp"

#include <limits>

namespace swarm::tracking {

void TrackerGains::validate() const {
  if (!(k_p > 0.0 && k_p <= 1.0)) throw InvalidArgument("tracking.k_p must lie in (0, 1]");
  if (!(k_v >= 0.0)) throw InvalidArgument("tracking.k_v must be non-negative");
}

TrackerState predict(const TrackerState& s, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("predict: dt must be positive");
  TrackerState out = s;
  out.p_hat = s.p_hat + s.v_hat * dt;
  out.phase = Phase::predicted;
  return out;
}

std::optional<Association> associate(const TrackerState& s, const std::vector<Vec3>& z_set) {
  if (z_set.empty()) return std::nullopt;
  Association best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < z_set.size(); ++i) {
    const double d = (z_set[i] - s.p_hat).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = {z_set[i], static_cast<int>(i)};
    }
  }
  return best;
}

TrackerState correct(const TrackerState& s, const Vec3& z, const TrackerGains& g) {
  const Vec3 innov = z - s.p_hat;
  TrackerState out = s;
  out.p_hat = s.p_hat + g.k_p * innov;
  out.v_hat = s.v_hat + g.k_v * innov;
  out.phase = Phase::corrected;
  out.missed_count = 0;
  return out;
}

TrackerState mark_missed(const TrackerState& s) {
  TrackerState out = s;
  ++out.missed_count;
  return out;
}

SwarmUpdate track_swarm(const std::vector<TrackerState>& trackers, const std::vector<Vec3>& z_set,
                        const TrackerGains& g, double dt) {
  SwarmUpdate up;
  up.trackers.reserve(trackers.size());
  up.claimed.assign(trackers.size(), -1);

  // Pool keeps original indices so the claim record refers to the input list.
  std::vector<Vec3> pool = z_set;
  std::vector<int> pool_index(z_set.size());
  for (std::size_t i = 0; i < z_set.size(); ++i) pool_index[i] = static_cast<int>(i);

  for (std::size_t t = 0; t < trackers.size(); ++t) {
    const TrackerState pred = predict(trackers[t], dt);
    const auto hit = associate(pred, pool);
    if (!hit) {
      up.trackers.push_back(mark_missed(pred));
      continue;
    }
    up.trackers.push_back(correct(pred, hit->point, g));
    up.claimed[t] = pool_index[hit->index];
    pool.erase(pool.begin() + hit->index);
    pool_index.erase(pool_index.begin() + hit->index);
  }
  return up;
}

}  // namespace swarm::tracking
