#pragma once

#include "swarm/numerics.hpp"

#include <optional>
#include <vector>

namespace swarm::tracking {

enum class Phase { predicted, corrected };

struct TrackerState {
  Vec3 p_hat = Vec3::Zero();
  Vec3 v_hat = Vec3::Zero();
  Phase phase = Phase::corrected;
  int missed_count = 0;
};

/// Fixed random-walk gains. k_p in (0, 1], k_v >= 0.
struct TrackerGains {
  double k_p = 0.8;
  double k_v = 0.0005;

  void validate() const;
};

/// Ticks without a measurement after which a track counts as lost (1 s at 5 ms).
inline constexpr int kLostThreshold = 200;

TrackerState predict(const TrackerState& s, double dt);

struct Association {
  Vec3 point = Vec3::Zero();
  int index = -1;
};

/// Nearest measurement to the predicted position, lowest index on ties.
/// Returns nullopt when the set is empty (missing measurement).
std::optional<Association> associate(const TrackerState& s, const std::vector<Vec3>& z_set);

TrackerState correct(const TrackerState& s, const Vec3& z, const TrackerGains& g);

/// Skips the correction for a missing measurement.
TrackerState mark_missed(const TrackerState& s);

struct SwarmUpdate {
  std::vector<TrackerState> trackers;
  std::vector<int> claimed;  ///< measurement index per tracker, -1 when missed
};

/// Predict, associate and correct every tracker. Trackers claim measurements
/// greedily in ascending id order; a claimed point is removed from the pool.
SwarmUpdate track_swarm(const std::vector<TrackerState>& trackers, const std::vector<Vec3>& z_set,
                        const TrackerGains& g, double dt);

inline bool lost(const TrackerState& s) { return s.missed_count >= kLostThreshold; }

}  // namespace swarm::tracking
