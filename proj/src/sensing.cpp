#include "swarm/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace swarm::sensing {

Attitude Attitude::from_yaw(double yaw) {
  Attitude a;
  a.R = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
  return a;
}

Attitude Attitude::from_rotation_vector(const Vec3& w) {
  Attitude a;
  const double angle = w.norm();
  if (angle > 0.0) a.R = Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
  return a;
}

void Attitude::validate() const {
  if (!R.allFinite()) throw InvalidArgument("attitude: non-finite entries");
  if ((R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-10)
    throw InvalidArgument("attitude: matrix is not orthonormal");
  if (std::abs(R.determinant() - 1.0) > 1e-10) throw InvalidArgument("attitude: determinant is not +1");
}

SphericalReading local_to_spherical(const Vec3& v) {
  SphericalReading s;
  s.r = v.norm();
  if (s.r == 0.0) throw InvalidArgument("sensor: zero-length relative vector");
  s.theta = std::acos(std::clamp(v.z() / s.r, -1.0, 1.0));
  s.phi = (v.x() == 0.0 && v.y() == 0.0) ? 0.0 : std::atan2(v.y(), v.x());
  // atan2 returns -pi for (-x, -0); the azimuth range is half-open at -pi.
  if (s.phi <= -std::numbers::pi) s.phi = std::numbers::pi;
  return s;
}

SphericalReading simulate_sensor(const Vec3& p_i, const Vec3& p_j, const Attitude& att_i) {
  if (p_i == p_j) throw InvalidArgument("simulate_sensor: observer and target coincide");
  return local_to_spherical(global_to_local(p_j - p_i, att_i));
}

Vec3 spherical_to_local(const SphericalReading& s) {
  const double st = std::sin(s.theta);
  return {s.r * st * std::cos(s.phi), s.r * st * std::sin(s.phi), s.r * std::cos(s.theta)};
}

Vec3 local_to_global(const Vec3& v_local, const Attitude& att) { return att.R * v_local; }

Vec3 global_to_local(const Vec3& v_global, const Attitude& att) { return att.R.transpose() * v_global; }

Attitude attitude_with_noise(const Attitude& true_att, double angle_noise_std, std::mt19937_64& rng) {
  if (angle_noise_std < 0.0) throw InvalidArgument("attitude noise std must be non-negative");
  if (angle_noise_std == 0.0) return true_att;
  std::normal_distribution<double> n(0.0, angle_noise_std);
  const Vec3 w(n(rng), n(rng), n(rng));
  Attitude out;
  out.R = true_att.R * Attitude::from_rotation_vector(w).R;
  // Re-orthonormalize so repeated composition cannot drift.
  Eigen::JacobiSVD<Mat3> svd(out.R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.R = svd.matrixU() * svd.matrixV().transpose();
  return out;
}

SphericalReading add_noise(const SphericalReading& s, const ReadingNoise& noise, std::mt19937_64& rng) {
  if (!noise.active()) return s;
  auto draw = [&rng](double std) {
    if (std <= 0.0) return 0.0;
    return std::normal_distribution<double>(0.0, std)(rng);
  };
  SphericalReading out = s;
  out.r = std::max(0.0, s.r + draw(noise.r_std));
  out.theta = s.theta + draw(noise.theta_std);
  out.phi = s.phi + draw(noise.phi_std);
  constexpr double pi = std::numbers::pi;
  out.theta = std::fmod(out.theta, 2.0 * pi);
  if (out.theta < 0.0) out.theta += 2.0 * pi;
  if (out.theta > pi) {
    out.theta = 2.0 * pi - out.theta;
    out.phi += pi;
  }
  out.phi = std::remainder(out.phi, 2.0 * pi);
  if (out.phi <= -pi) out.phi += 2.0 * pi;
  return out;
}

}  // namespace swarm::sensing
