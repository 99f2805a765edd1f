#ifndef NETLOC_GEOMETRY_HPP_
#define NETLOC_GEOMETRY_HPP_

// Complex-plane primitives: positions, local frames, relative-position and
// sign-of-direction measurements synthesized from ground truth.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "netloc/errors.hpp"

namespace netloc {

using Complex = std::complex<double>;
/// A position in the plane, p = x + y*i.
using ComplexPoint = Complex;
/// Zero-based agent index. Leaders occupy [0, m), followers [m, n).
using AgentId = std::size_t;

/// Two positions closer than this are treated as collocated.
inline constexpr double kCollocationTol = 1e-9;
/// Normalized cross product below this is reported as colinear.
inline constexpr double kColinearTol = 1e-9;

inline bool is_finite(ComplexPoint p) noexcept {
  return std::isfinite(p.real()) && std::isfinite(p.imag());
}

inline void require_finite(ComplexPoint p, const char* what) {
  if (!is_finite(p)) throw Error(std::string("non-finite value in ") + what);
}

/// a x b = a.re * b.im - b.re * a.im
constexpr double cross_product(ComplexPoint a, ComplexPoint b) noexcept {
  return a.real() * b.imag() - b.real() * a.imag();
}

/// Reduce an angle to [0, 2*pi).
inline double wrap_angle(double theta) noexcept {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(theta, two_pi);
  if (r < 0.0) r += two_pi;
  // fmod of a tiny negative value can round up to exactly 2*pi
  if (r >= two_pi) r = 0.0;
  return r;
}

/// Orientation of an agent's local frame relative to the global frame,
/// theta(t) = theta0 + amplitude * sin(omega * t), reduced mod 2*pi.
class FrameOrientation {
 public:
  FrameOrientation() = default;
  explicit FrameOrientation(double theta0, double amplitude = 0.0, double omega = 0.0)
      : theta0_(wrap_angle(theta0)), amplitude_(amplitude), omega_(omega) {
    if (!std::isfinite(theta0) || !std::isfinite(amplitude) || !std::isfinite(omega))
      throw Error("frame orientation parameters must be finite");
  }

  double at(double t) const noexcept {
    return wrap_angle(theta0_ + amplitude_ * std::sin(omega_ * t));
  }
  /// exp(theta(t) i)
  Complex rotor(double t) const noexcept { return std::polar(1.0, at(t)); }

  double theta0() const noexcept { return theta0_; }
  double amplitude() const noexcept { return amplitude_; }
  double omega() const noexcept { return omega_; }

 private:
  double theta0_ = 0.0;
  double amplitude_ = 0.0;
  double omega_ = 0.0;
};

/// Stacked agent positions. The first `leader_count` entries are leaders.
class Configuration {
 public:
  Configuration(std::vector<ComplexPoint> points, std::size_t leader_count)
      : points_(std::move(points)), leader_count_(leader_count) {
    if (leader_count_ < 2) throw Error("configuration needs at least two leaders");
    if (points_.size() < leader_count_)
      throw Error("configuration has fewer agents than leaders");
    for (auto p : points_) require_finite(p, "configuration");
  }

  std::size_t size() const noexcept { return points_.size(); }
  std::size_t leader_count() const noexcept { return leader_count_; }
  std::size_t follower_count() const noexcept { return points_.size() - leader_count_; }
  bool is_leader(AgentId i) const noexcept { return i < leader_count_; }

  ComplexPoint operator[](AgentId i) const { return points_[i]; }
  ComplexPoint at(AgentId i) const {
    if (i >= points_.size()) throw std::out_of_range("agent index out of range");
    return points_[i];
  }

  std::span<const ComplexPoint> points() const noexcept { return points_; }
  std::span<const ComplexPoint> leaders() const noexcept {
    return std::span(points_).first(leader_count_);
  }
  std::span<const ComplexPoint> followers() const noexcept {
    return std::span(points_).subspan(leader_count_);
  }

 private:
  std::vector<ComplexPoint> points_;
  std::size_t leader_count_;
};

/// Relative position of `target` expressed in the observer's local frame.
struct LocalRelPosMeasurement {
  AgentId observer;
  AgentId target;
  ComplexPoint value;
};

/// Orientation of the triple (observer, first, second): +1 counterclockwise,
/// -1 clockwise, 0 colinear.
struct SignOfDirection {
  AgentId observer;
  AgentId first;
  AgentId second;
  int sign;
};

/// e_ij = p_j - p_i
inline ComplexPoint relative_position(const Configuration& config, AgentId i, AgentId j) {
  if (i >= config.size() || j >= config.size())
    throw std::out_of_range("agent index out of range");
  if (i == j) throw Error("relative position needs two distinct agents");
  return config[j] - config[i];
}

/// e^i_ij = (p_j - p_i) * exp(theta_i(t) i)
inline LocalRelPosMeasurement measure_local(const Configuration& config,
                                            std::span<const FrameOrientation> orientations,
                                            AgentId i, AgentId j, double t = 0.0) {
  const ComplexPoint e = relative_position(config, i, j);
  if (std::abs(e) <= kCollocationTol)
    throw CollocatedAgents("agents " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                           " are collocated");
  if (i >= orientations.size()) throw std::out_of_range("missing frame orientation");
  return {i, j, e * orientations[i].rotor(t)};
}

/// Sign of a x b, with |a x b| / (|a||b|) < kColinearTol reported as 0.
inline int sign_of_cross(ComplexPoint a, ComplexPoint b) noexcept {
  const double c = cross_product(a, b);
  if (std::abs(c) < kColinearTol * std::abs(a) * std::abs(b)) return 0;
  return c > 0.0 ? 1 : -1;
}

inline SignOfDirection measure_sign(const Configuration& config, AgentId i, AgentId j,
                                    AgentId k) {
  if (i == j || j == k || i == k) throw Error("sign of direction needs three distinct agents");
  const ComplexPoint eij = relative_position(config, i, j);
  const ComplexPoint eik = relative_position(config, i, k);
  if (std::abs(eij) <= kCollocationTol || std::abs(eik) <= kCollocationTol)
    throw CollocatedAgents("observer collocated with a target");
  // The sign is frame independent, so the global-frame vectors suffice.
  return {i, j, k, sign_of_cross(eij, eik)};
}

/// Smallest pairwise distance in a point set (infinity for fewer than two points).
inline double min_pairwise_distance(std::span<const ComplexPoint> points) noexcept {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < points.size(); ++a)
    for (std::size_t b = a + 1; b < points.size(); ++b)
      best = std::min(best, std::abs(points[a] - points[b]));
  return best;
}

}  // namespace netloc

#endif  // NETLOC_GEOMETRY_HPP_
