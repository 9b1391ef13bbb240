#pragma once

#include "swarm/numerics.hpp"

#include <random>

namespace swarm::sensing {

/// Range r >= 0, polar angle theta in [0, pi] from the body z axis, azimuth phi in (-pi, pi].
struct SphericalReading {
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

/// Body-to-global rotation.
struct Attitude {
  Mat3 R = Mat3::Identity();

  static Attitude identity() { return {}; }
  static Attitude from_yaw(double yaw);
  static Attitude from_rotation_vector(const Vec3& w);
  /// Throws when R is not a proper rotation within 1e-10.
  void validate() const;
};

enum class Frame { local, global };

struct RelativeMeasurement {
  int observer = 0;
  int target = 0;
  Vec3 value = Vec3::Zero();
  Frame frame = Frame::global;
};

/// Reading of agent j as seen from agent i. Throws when the positions coincide.
SphericalReading simulate_sensor(const Vec3& p_i, const Vec3& p_j, const Attitude& att_i);

Vec3 spherical_to_local(const SphericalReading& s);
/// Inverse of spherical_to_local; phi = 0 on the z axis.
SphericalReading local_to_spherical(const Vec3& v);
Vec3 local_to_global(const Vec3& v_local, const Attitude& att);
Vec3 global_to_local(const Vec3& v_global, const Attitude& att);

/// True attitude composed with a rotation whose rotation vector has i.i.d.
/// N(0, std^2) components.
Attitude attitude_with_noise(const Attitude& true_att, double angle_noise_std, std::mt19937_64& rng);

struct ReadingNoise {
  double r_std = 0.0;
  double theta_std = 0.0;
  double phi_std = 0.0;

  bool active() const { return r_std > 0.0 || theta_std > 0.0 || phi_std > 0.0; }
};

/// Adds Gaussian noise to each spherical coordinate and folds the result back into range.
SphericalReading add_noise(const SphericalReading& s, const ReadingNoise& noise, std::mt19937_64& rng);

/// Full preprocessing chain: reading -> local Cartesian -> global frame.
inline Vec3 reading_to_global(const SphericalReading& s, const Attitude& att) {
  return local_to_global(spherical_to_local(s), att);
}

}  // namespace swarm::sensing
