#ifndef NETLOC_MOTION_HPP_
#define NETLOC_MOTION_HPP_

// Piecewise parametric reference paths and rigid bodies carried along them.
//
// A path is a chain of segments, each either a straight line at constant speed
// or a circular arc at constant speed and turn rate. After the last segment
// the path continues straight at the final heading and speed.

#include <cmath>
#include <vector>

#include "netloc/errors.hpp"
#include "netloc/geometry.hpp"

namespace netloc {

struct PathSegment {
  enum class Kind { Line, Arc };
  Kind kind = Kind::Line;
  double duration = 0.0;
  double speed = 0.0;
  /// rad/s, arcs only
  double turn_rate = 0.0;
};

struct PathSample {
  ComplexPoint center;
  Complex velocity;
  double heading = 0.0;
  double heading_rate = 0.0;
};

class ReferencePath {
 public:
  ReferencePath() = default;
  ReferencePath(ComplexPoint start, double heading, std::vector<PathSegment> segments)
      : start_(start), heading_(heading), segments_(std::move(segments)) {
    require_finite(start_, "path start");
    for (const auto& s : segments_)
      if (!(s.duration >= 0.0) || !std::isfinite(s.speed) || !std::isfinite(s.turn_rate))
        throw Error("path segments need a non-negative duration and finite rates");
  }

  PathSample at(double t) const {
    ComplexPoint c = start_;
    double phi = heading_;
    double elapsed = 0.0;
    double speed = 0.0;
    for (const auto& s : segments_) {
      const double tau = std::min(std::max(t - elapsed, 0.0), s.duration);
      const bool inside = t < elapsed + s.duration;
      const bool turning = s.kind == PathSegment::Kind::Arc && s.turn_rate != 0.0;
      if (turning) {
        const Complex u0 = std::polar(1.0, phi);
        const Complex u1 = std::polar(1.0, phi + s.turn_rate * tau);
        c += (s.speed / s.turn_rate) * Complex(0.0, -1.0) * (u1 - u0);
        phi += s.turn_rate * tau;
      } else {
        c += s.speed * tau * std::polar(1.0, phi);
      }
      speed = s.speed;
      if (inside) return {c, s.speed * std::polar(1.0, phi), phi, turning ? s.turn_rate : 0.0};
      elapsed += s.duration;
    }
    const double tail = std::max(t - elapsed, 0.0);
    c += speed * tail * std::polar(1.0, phi);
    return {c, speed * std::polar(1.0, phi), phi, 0.0};
  }

  ComplexPoint start() const noexcept { return start_; }
  double heading() const noexcept { return heading_; }
  const std::vector<PathSegment>& segments() const noexcept { return segments_; }

 private:
  ComplexPoint start_{0.0, 0.0};
  double heading_ = 0.0;
  std::vector<PathSegment> segments_;
};

/// Smooth blend between two shapes, s(t) = (1-b) from + b to, with the cubic
/// smoothstep b over [0, duration]. A zero duration means "already at `to`".
struct ShapeMorph {
  std::vector<ComplexPoint> to;
  double duration = 0.0;
};

/// Point set carried rigidly along a path:
///   p_i(t) = c(t) + R(phi(t) - phi(0)) * s_i(t)
/// where s_i are body offsets relative to the path start (optionally morphing).
class RigidMotion {
 public:
  RigidMotion() = default;
  RigidMotion(std::vector<ComplexPoint> offsets, ReferencePath path, bool rotate_with_heading,
              ShapeMorph morph = {})
      : offsets_(std::move(offsets)), path_(std::move(path)), rotate_(rotate_with_heading),
        morph_(std::move(morph)) {
    if (!morph_.to.empty() && morph_.to.size() != offsets_.size())
      throw Error("morph target has a different number of agents");
    if (!(morph_.duration >= 0.0)) throw Error("morph duration must be non-negative");
  }

  /// Static point set.
  static RigidMotion stationary(std::vector<ComplexPoint> points) {
    return RigidMotion(std::move(points), ReferencePath{}, false);
  }

  std::size_t size() const noexcept { return offsets_.size(); }

  std::vector<ComplexPoint> positions(double t) const {
    std::vector<ComplexPoint> p, v;
    evaluate(t, p, v);
    return p;
  }
  std::vector<ComplexPoint> velocities(double t) const {
    std::vector<ComplexPoint> p, v;
    evaluate(t, p, v);
    return v;
  }

  void evaluate(double t, std::vector<ComplexPoint>& pos, std::vector<ComplexPoint>& vel) const {
    const PathSample s = path_.at(t);
    const Complex rot = rotate_ ? std::polar(1.0, s.heading - path_.heading()) : Complex(1.0);
    const double omega = rotate_ ? s.heading_rate : 0.0;
    double blend = 1.0, blend_rate = 0.0;
    if (!morph_.to.empty()) {
      if (morph_.duration > 0.0 && t < morph_.duration) {
        const double u = std::max(t, 0.0) / morph_.duration;
        blend = u * u * (3.0 - 2.0 * u);
        blend_rate = t >= 0.0 ? 6.0 * u * (1.0 - u) / morph_.duration : 0.0;
      }
    } else {
      blend = 0.0;
    }
    pos.resize(offsets_.size());
    vel.resize(offsets_.size());
    for (std::size_t i = 0; i < offsets_.size(); ++i) {
      const ComplexPoint target = morph_.to.empty() ? offsets_[i] : morph_.to[i];
      const ComplexPoint body = offsets_[i] + blend * (target - offsets_[i]);
      const Complex body_rate = blend_rate * (target - offsets_[i]);
      pos[i] = s.center + rot * body;
      vel[i] = s.velocity + rot * (body_rate + Complex(0.0, omega) * body);
    }
  }

  const std::vector<ComplexPoint>& offsets() const noexcept { return offsets_; }
  const ReferencePath& path() const noexcept { return path_; }
  bool rotates() const noexcept { return rotate_; }
  const ShapeMorph& morph() const noexcept { return morph_; }

 private:
  std::vector<ComplexPoint> offsets_;
  ReferencePath path_;
  bool rotate_ = false;
  ShapeMorph morph_;
};

}  // namespace netloc

#endif  // NETLOC_MOTION_HPP_
