#ifndef NETLOC_CONSTRAINT_MATRICES_HPP_
#define NETLOC_CONSTRAINT_MATRICES_HPP_

#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netloc/constraints.hpp"
#include "netloc/errors.hpp"
#include "netloc/geometry.hpp"
#include "netloc/graph.hpp"

namespace netloc {

using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

/// W_ff is treated as singular when sigma_min <= kInvertibilityTol * sigma_max.
inline constexpr double kInvertibilityTol = 1e-10;

inline VectorXc to_vector(std::span<const ComplexPoint> points) {
  VectorXc v(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) v(static_cast<Eigen::Index>(i)) = points[i];
  return v;
}

inline std::vector<ComplexPoint> to_points(const VectorXc& v) {
  return {v.data(), v.data() + v.size()};
}

/// sigma_max / sigma_min, infinite for a singular or empty matrix.
inline double condition_number(const MatrixXc& m) {
  if (m.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::BDCSVD<MatrixXc> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

struct ConstraintMatrices {
  MatrixXc wf;   // (n-m) x n, rows are followers
  MatrixXc wfl;  // leader columns
  MatrixXc wff;  // follower columns
  double condition_number = 0.0;
};

/// Stack one constraint row per follower: w_ii on the follower's own column,
/// -w_ij and -w_ik on its designated neighbours, zero elsewhere.
inline ConstraintMatrices assemble_constraints(const SensingGraph& g,
                                               const std::map<AgentId, ConstraintTriple>& triples) {
  const auto n = static_cast<Eigen::Index>(g.agent_count());
  const auto m = static_cast<Eigen::Index>(g.leader_count());
  ConstraintMatrices cm;
  cm.wf = MatrixXc::Zero(n - m, n);
  for (AgentId i = g.leader_count(); i < g.agent_count(); ++i) {
    auto it = triples.find(i);
    if (it == triples.end())
      throw MissingTriple("no constraint weights for follower " + std::to_string(i + 1));
    const ConstraintTriple& t = it->second;
    const auto [j, k] = g.designated_pair(i);
    const bool same = t.nbr_a == j && t.nbr_b == k;
    const bool swapped = t.nbr_a == k && t.nbr_b == j;
    if (t.self != i || !(same || swapped))
      throw Error("constraint weights of follower " + std::to_string(i + 1) +
                  " do not match its designated pair");
    const auto row = static_cast<Eigen::Index>(i) - m;
    cm.wf(row, static_cast<Eigen::Index>(i)) += t.w_self;
    cm.wf(row, static_cast<Eigen::Index>(t.nbr_a)) -= t.w_a;
    cm.wf(row, static_cast<Eigen::Index>(t.nbr_b)) -= t.w_b;
  }
  cm.wfl = cm.wf.leftCols(m);
  cm.wff = cm.wf.rightCols(n - m);
  cm.condition_number = condition_number(cm.wff);
  return cm;
}

struct LocalizabilityResult {
  bool invertible = false;
  double condition_number = 0.0;
  /// sigma_min / sigma_max
  double sigma_ratio = 0.0;
  Complex determinant{0.0, 0.0};
  double det_magnitude = 0.0;
};

inline LocalizabilityResult localizability_check(const ConstraintMatrices& cm) {
  LocalizabilityResult r;
  if (cm.wff.size() == 0) return r;
  Eigen::BDCSVD<MatrixXc> svd(cm.wff);
  const auto& s = svd.singularValues();
  r.sigma_ratio = s(0) > 0.0 ? s(s.size() - 1) / s(0) : 0.0;
  r.condition_number = r.sigma_ratio > 0.0 ? 1.0 / r.sigma_ratio
                                           : std::numeric_limits<double>::infinity();
  r.invertible = r.sigma_ratio > kInvertibilityTol;
  r.determinant = cm.wff.partialPivLu().determinant();
  r.det_magnitude = std::abs(r.determinant);
  return r;
}

/// p_f = -W_ff^{-1} W_fl p_l
inline VectorXc closed_form_localize(const ConstraintMatrices& cm,
                                     std::span<const ComplexPoint> leaders) {
  if (static_cast<Eigen::Index>(leaders.size()) != cm.wfl.cols())
    throw DimensionMismatch("leader vector does not match W_fl");
  const LocalizabilityResult check = localizability_check(cm);
  if (!check.invertible)
    throw SingularSystem("W_ff is singular; followers are not localizable",
                         check.condition_number);
  return -cm.wff.partialPivLu().solve(cm.wfl * to_vector(leaders));
}

}  // namespace netloc

#endif  // NETLOC_CONSTRAINT_MATRICES_HPP_
