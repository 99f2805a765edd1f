#ifndef NETLOC_PARAMETER_ESTIMATOR_HPP_
#define NETLOC_PARAMETER_ESTIMATOR_HPP_

// Distributed estimation of the full desired-formation vector p*(t) by the
// followers, along leader-rooted chains:
//   dpsi_i = (1/eta_i) sum_j b_ij [dpsi_j - gamma (psi_i - psi_j)]
//          + (1/eta_i) b_il [dp* - gamma (psi_i - p*)]

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netloc/constraint_matrices.hpp"
#include "netloc/errors.hpp"
#include "netloc/formation.hpp"
#include "netloc/geometry.hpp"

namespace netloc {

using FormationVector = std::vector<ComplexPoint>;

/// Disjoint chains [leader, f1, f2, ...]. b_ij = 1 iff j precedes i on its
/// chain. Followers not on any chain copy psi from `copies[follower]`.
class PathStructure {
 public:
  PathStructure() = default;
  PathStructure(std::size_t agent_count, std::size_t leader_count,
                std::vector<std::vector<AgentId>> paths, std::map<AgentId, AgentId> copies = {})
      : n_(agent_count), m_(leader_count), paths_(std::move(paths)), copies_(std::move(copies)),
        pred_(agent_count) {
    std::set<AgentId> on_path;
    for (const auto& p : paths_) {
      if (p.size() < 2) throw ValidationError("a path needs a leader and at least one follower");
      if (p.front() >= m_) throw ValidationError("paths must start at a leader");
      for (std::size_t k = 1; k < p.size(); ++k) {
        const AgentId f = p[k];
        if (f < m_ || f >= n_)
          throw ValidationError("path entry " + std::to_string(f + 1) + " is not a follower");
        if (!on_path.insert(f).second)
          throw ValidationError("follower " + std::to_string(f + 1) + " is on two paths");
        pred_[f] = p[k - 1];
      }
    }
    for (auto [f, src] : copies_) {
      if (f < m_ || f >= n_ || on_path.count(f))
        throw ValidationError("copy target " + std::to_string(f + 1) +
                              " must be an off-path follower");
      if (!on_path.count(src))
        throw ValidationError("copy source " + std::to_string(src + 1) + " is not on a path");
    }
    for (AgentId f = m_; f < n_; ++f)
      if (!on_path.count(f) && !copies_.count(f))
        throw ValidationError("follower " + std::to_string(f + 1) +
                              " is neither on a path nor copies a neighbour");
  }

  std::size_t agent_count() const noexcept { return n_; }
  std::size_t leader_count() const noexcept { return m_; }
  const std::vector<std::vector<AgentId>>& paths() const noexcept { return paths_; }
  const std::map<AgentId, AgentId>& copies() const noexcept { return copies_; }

  int b(AgentId i, AgentId j) const { return pred_.at(i) && *pred_[i] == j ? 1 : 0; }
  int eta(AgentId i) const { return pred_.at(i) ? 1 : 0; }

 private:
  std::size_t n_ = 0, m_ = 0;
  std::vector<std::vector<AgentId>> paths_;
  std::map<AgentId, AgentId> copies_;
  std::vector<std::optional<AgentId>> pred_;
};

struct ParameterEstimatorState {
  std::vector<FormationVector> psi;      // per follower
  std::vector<FormationVector> psi_dot;  // per follower
  PathStructure paths;
  double gamma = 2.0;
  double time = 0.0;
};

/// Solves the coupled system for all dpsi given psi and the current p*, dp*.
inline std::vector<FormationVector> psi_rates(const PathStructure& ps, double gamma,
                                              const std::vector<FormationVector>& psi,
                                              const FormationVector& desired,
                                              const FormationVector& desired_rate) {
  const std::size_t n = ps.agent_count(), m = ps.leader_count();
  if (psi.size() != n - m) throw DimensionMismatch("one parameter estimate per follower");
  if (desired.size() != n || desired_rate.size() != n)
    throw DimensionMismatch("desired formation does not match the path structure");
  if (!(gamma > 0.0)) throw Error("estimator gain gamma must be positive");
  const auto cols = static_cast<Eigen::Index>(n);
  const Eigen::RowVectorXcd pstar = to_vector(desired).transpose();
  const Eigen::RowVectorXcd dpstar = to_vector(desired_rate).transpose();
  auto row_of = [&](AgentId f) -> Eigen::RowVectorXcd { return to_vector(psi[f - m]).transpose(); };

  std::vector<FormationVector> out(n - m);
  for (const auto& path : ps.paths()) {
    const auto k = static_cast<Eigen::Index>(path.size() - 1);
    MatrixXc mat = MatrixXc::Zero(k, k);
    MatrixXc rhs = MatrixXc::Zero(k, cols);
    for (Eigen::Index r = 0; r < k; ++r) {
      const AgentId i = path[static_cast<std::size_t>(r) + 1];
      const double eta = ps.eta(i);
      mat(r, r) = eta;
      const Eigen::RowVectorXcd psi_i = row_of(i);
      for (Eigen::Index c = 0; c < k; ++c) {
        const AgentId j = path[static_cast<std::size_t>(c) + 1];
        if (ps.b(i, j)) {
          mat(r, c) -= 1.0;
          rhs.row(r) -= gamma * (psi_i - row_of(j));
        }
      }
      if (ps.b(i, path.front()))
        rhs.row(r) += dpstar - gamma * (psi_i - pstar);
    }
    const double cond = condition_number(mat);
    if (!(cond < 1.0 / kInvertibilityTol))
      throw SingularCoupling("parameter estimator coupling matrix is singular", cond);
    const MatrixXc sol = mat.partialPivLu().solve(rhs);
    for (Eigen::Index r = 0; r < k; ++r) {
      const AgentId i = path[static_cast<std::size_t>(r) + 1];
      out[i - m] = to_points(sol.row(r).transpose());
    }
  }
  for (auto [f, src] : ps.copies()) out[f - m] = out[src - m];
  return out;
}

/// Off-path followers take their source's psi.
inline void apply_copies(const PathStructure& ps, std::vector<FormationVector>& psi) {
  for (auto [f, src] : ps.copies()) psi[f - ps.leader_count()] = psi[src - ps.leader_count()];
}

/// max_i |psi_i - p*|
inline double psi_error(const std::vector<FormationVector>& psi, const FormationVector& desired) {
  double worst = 0.0;
  for (const auto& p : psi) {
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) s += std::norm(p[k] - desired[k]);
    worst = std::max(worst, std::sqrt(s));
  }
  return worst;
}

/// e_zeta = max over paths of sum over its followers of |psi_i - p*|; also the
/// bound on every |psi_i(t) - p*(t)|.
inline double path_sum_bound(const PathStructure& ps, const std::vector<FormationVector>& psi,
                             const FormationVector& desired) {
  double worst = 0.0;
  for (const auto& path : ps.paths()) {
    double sum = 0.0;
    for (std::size_t k = 1; k < path.size(); ++k) {
      const auto& p = psi[path[k] - ps.leader_count()];
      double s = 0.0;
      for (std::size_t c = 0; c < p.size(); ++c) s += std::norm(p[c] - desired[c]);
      sum += std::sqrt(s);
    }
    worst = std::max(worst, sum);
  }
  return worst;
}

/// One RK4 step of length h; psi_dot is refreshed at the new time.
inline ParameterEstimatorState parameter_estimator_step(const ParameterEstimatorState& state,
                                                        const FormationSpec& spec, double h) {
  if (!(h > 0.0)) throw Error("step size must be positive");
  const double t = state.time;
  auto rates = [&](double tau, const std::vector<FormationVector>& psi) {
    return psi_rates(state.paths, state.gamma, psi, spec.desired(tau), spec.desired_rate(tau));
  };
  auto shifted = [](const std::vector<FormationVector>& psi,
                    const std::vector<FormationVector>& d, double s) {
    auto out = psi;
    for (std::size_t f = 0; f < out.size(); ++f)
      for (std::size_t c = 0; c < out[f].size(); ++c) out[f][c] += s * d[f][c];
    return out;
  };
  const auto k1 = rates(t, state.psi);
  const auto k2 = rates(t + 0.5 * h, shifted(state.psi, k1, 0.5 * h));
  const auto k3 = rates(t + 0.5 * h, shifted(state.psi, k2, 0.5 * h));
  const auto k4 = rates(t + h, shifted(state.psi, k3, h));

  ParameterEstimatorState next = state;
  for (std::size_t f = 0; f < next.psi.size(); ++f)
    for (std::size_t c = 0; c < next.psi[f].size(); ++c)
      next.psi[f][c] += (h / 6.0) * (k1[f][c] + 2.0 * k2[f][c] + 2.0 * k3[f][c] + k4[f][c]);
  apply_copies(next.paths, next.psi);
  next.time = t + h;
  next.psi_dot = rates(next.time, next.psi);
  return next;
}

}  // namespace netloc

#endif  // NETLOC_PARAMETER_ESTIMATOR_HPP_
