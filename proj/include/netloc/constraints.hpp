#ifndef NETLOC_CONSTRAINTS_HPP_
#define NETLOC_CONSTRAINTS_HPP_

// Complex constraint weights of a follower and its two designated neighbours.
//
// For follower i with neighbours j, k the weights satisfy
//     w_ij * e_ij + w_ik * e_ik = 0,   w_ii = w_ij + w_ik,
// so that w_ii * p_i = w_ij * p_j + w_ik * p_k. The relation is homogeneous:
// multiplying both weights by a common non-zero scalar yields another valid
// constraint. Every builder here returns the representative computed in the
// frame whose real axis points from i towards j. That representative does not
// depend on the observer's (unknown) frame orientation, and it coincides with
// the weights of the congruent triple rebuilt from distances and the sign of
// direction, so both measurement modes produce bit-comparable weights.

#include <algorithm>
#include <cmath>
#include <string>

#include "netloc/errors.hpp"
#include "netloc/geometry.hpp"

namespace netloc {

struct ConstraintTriple {
  AgentId self;
  AgentId nbr_a;  // j
  AgentId nbr_b;  // k
  Complex w_a;    // w_ij
  Complex w_b;    // w_ik
  Complex w_self; // w_ii = w_ij + w_ik
};

/// Triple (q_i, q_j, q_k) congruent to a measured triple, with q_i = 0 and q_j on
/// the positive real axis.
struct CongruentTriple {
  ComplexPoint q_i;
  ComplexPoint q_j;
  ComplexPoint q_k;
};

/// Relative triangle-equality band used to classify distance triples as colinear.
inline constexpr double kTriangleTol = 1e-7;

namespace detail {

inline ConstraintTriple weights_from_vectors(AgentId i, AgentId j, AgentId k, Complex eij,
                                             Complex eik) {
  const double dij2 = std::norm(eij);
  const double dik2 = std::norm(eik);
  const Complex wa = std::conj(eij) / dij2;
  const Complex wb = -std::conj(eik) / dik2;
  return {i, j, k, wa, wb, wa + wb};
}

}  // namespace detail

/// Weights from the literal formula w_ij = conj(e_ij)/|e_ij|^2, w_ik = -conj(e_ik)/|e_ik|^2
/// applied to vectors in the observer's own frame. They satisfy the constraint but
/// carry a factor exp(-theta_i i) relative to global-frame weights.
inline ConstraintTriple local_frame_weights(const LocalRelPosMeasurement& ma,
                                            const LocalRelPosMeasurement& mb) {
  if (ma.observer != mb.observer) throw Error("measurements must share an observer");
  if (ma.target == mb.target || ma.target == ma.observer || mb.target == mb.observer)
    throw Error("constraint needs two distinct neighbours");
  if (!is_finite(ma.value) || !is_finite(mb.value)) throw Error("non-finite measurement");
  if (std::abs(ma.value) <= kCollocationTol || std::abs(mb.value) <= kCollocationTol)
    throw CollocatedAgents("follower " + std::to_string(ma.observer + 1) +
                           " is collocated with a neighbour");
  if (std::abs(ma.value - mb.value) <= kCollocationTol)
    throw DegenerateTriple("neighbours " + std::to_string(ma.target + 1) + " and " +
                           std::to_string(mb.target + 1) + " are collocated");
  return detail::weights_from_vectors(ma.observer, ma.target, mb.target, ma.value, mb.value);
}

/// Frame-independent weights from two local relative-position measurements.
inline ConstraintTriple weights_from_local(const LocalRelPosMeasurement& ma,
                                           const LocalRelPosMeasurement& mb) {
  // validates the inputs
  (void)local_frame_weights(ma, mb);
  // Rotate so that e_ij lies on the positive real axis.
  const double dij = std::abs(ma.value);
  const Complex unit = ma.value / dij;
  return detail::weights_from_vectors(ma.observer, ma.target, mb.target, Complex(dij, 0.0),
                                      mb.value * std::conj(unit));
}

/// Rebuild (q_i, q_j, q_k) from the three pairwise distances and the sign of direction.
inline CongruentTriple reconstruct_congruent(double dij, double dik, double djk, int sign) {
  if (!(std::isfinite(dij) && std::isfinite(dik) && std::isfinite(djk)))
    throw Error("non-finite distance");
  if (dij <= kCollocationTol || dik <= kCollocationTol)
    throw CollocatedAgents("follower is collocated with a neighbour");
  if (djk <= kCollocationTol) throw DegenerateTriple("neighbours are collocated");
  if (sign < -1 || sign > 1) throw Error("sign of direction must be -1, 0 or +1");

  const double tol = kTriangleTol * std::max({dij, dik, djk});
  // Slack of each triangle inequality; zero slack means colinear.
  const double k_beyond_j = dij + djk - dik;   // i, j, k in that order
  const double j_beyond_k = dik + djk - dij;   // i, k, j in that order
  const double i_between = dij + dik - djk;    // j, i, k in that order
  if (std::min({k_beyond_j, j_beyond_k, i_between}) < -tol)
    throw TriangleViolation("distances violate the triangle inequality");

  const ComplexPoint qi{0.0, 0.0};
  const ComplexPoint qj{dij, 0.0};

  if (sign == 0) {
    const double best = std::min({std::abs(k_beyond_j), std::abs(j_beyond_k), std::abs(i_between)});
    if (best > tol)
      throw SignMismatch("colinear sign of direction but distances form a proper triangle");
    if (best == std::abs(i_between)) return {qi, qj, ComplexPoint{-dik, 0.0}};
    return {qi, qj, ComplexPoint{dik, 0.0}};
  }

  const double x = (dij * dij + dik * dik - djk * djk) / (2.0 * dij);
  // Near-colinear triples can round the discriminant slightly negative.
  const double disc = std::max(0.0, (dik - x) * (dik + x));
  const double y = std::sqrt(disc);
  return {qi, qj, ComplexPoint{x, sign > 0 ? y : -y}};
}

/// Weights from distances d_ij, d_ik, d_jk and the sign of direction g_ijk.
inline ConstraintTriple weights_from_distance_sign(double dij, double dik, double djk,
                                                   const SignOfDirection& g) {
  const CongruentTriple q = reconstruct_congruent(dij, dik, djk, g.sign);
  return detail::weights_from_vectors(g.observer, g.first, g.second, q.q_j - q.q_i,
                                      q.q_k - q.q_i);
}

/// |w_a * e_a + w_b * e_b|
inline double constraint_residual(const ConstraintTriple& t, ComplexPoint ea,
                                  ComplexPoint eb) noexcept {
  return std::abs(t.w_a * ea + t.w_b * eb);
}

/// p_i = (w_ij / w_ii) p_j + (w_ik / w_ii) p_k
inline ComplexPoint localize_from_pair(const ConstraintTriple& t, ComplexPoint pj,
                                       ComplexPoint pk) noexcept {
  return (t.w_a * pj + t.w_b * pk) / t.w_self;
}

}  // namespace netloc

#endif  // NETLOC_CONSTRAINTS_HPP_
