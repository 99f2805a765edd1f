#ifndef NETLOC_FORMATION_HPP_
#define NETLOC_FORMATION_HPP_

// Integrated localization and formation control in the virtual frame anchored
// at the first leader.
//
//   leaders    v_i     = -a (p_i - p*_i) + dp*_i
//   followers  v_i     = -a (p_hat_i - p*_i) + dp*_i
//              dp_hat_i = -2a (p_hat_i - p*_i) + dp*_i + consensus terms

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "netloc/constraint_matrices.hpp"
#include "netloc/errors.hpp"
#include "netloc/estimator.hpp"
#include "netloc/geometry.hpp"
#include "netloc/graph.hpp"
#include "netloc/motion.hpp"

namespace netloc {

struct FormationSpec {
  std::function<std::vector<ComplexPoint>(double)> desired;
  std::function<std::vector<ComplexPoint>(double)> desired_rate;
  double gain = 1.0;

  static FormationSpec from_motion(RigidMotion motion, double gain = 1.0) {
    auto shared = std::make_shared<const RigidMotion>(std::move(motion));
    return {[shared](double t) { return shared->positions(t); },
            [shared](double t) { return shared->velocities(t); }, gain};
  }
};

/// Largest |dp*(t) - central difference of p*| over the sampled times.
inline double desired_rate_mismatch(const FormationSpec& spec, std::span<const double> times,
                                    double dt = 1e-5) {
  double worst = 0.0;
  for (double t : times) {
    const auto ahead = spec.desired(t + dt), behind = spec.desired(t - dt);
    const auto rate = spec.desired_rate(t);
    for (std::size_t i = 0; i < rate.size(); ++i)
      worst = std::max(worst, std::abs((ahead[i] - behind[i]) / (2.0 * dt) - rate[i]));
  }
  return worst;
}

/// Frame with origin at the first leader's initial position and the global
/// orientation. Positions in it are p - origin.
class VirtualFrame {
 public:
  VirtualFrame(const Configuration& initial)
      : origin_(initial[0]), leaders_(initial.leaders().begin(), initial.leaders().end()) {
    for (auto& p : leaders_) p -= origin_;
  }

  AgentId origin_agent() const noexcept { return 0; }
  ComplexPoint origin() const noexcept { return origin_; }
  /// Initial leader positions in the frame; the first is always 0.
  const std::vector<ComplexPoint>& leader_positions() const noexcept { return leaders_; }

  ComplexPoint to_virtual(ComplexPoint p) const noexcept { return p - origin_; }
  ComplexPoint to_global(ComplexPoint p) const noexcept { return p + origin_; }
  std::vector<ComplexPoint> to_virtual(std::span<const ComplexPoint> pts) const {
    std::vector<ComplexPoint> out(pts.begin(), pts.end());
    for (auto& p : out) p -= origin_;
    return out;
  }

 private:
  ComplexPoint origin_;
  std::vector<ComplexPoint> leaders_;
};

struct FormationRates {
  std::vector<ComplexPoint> velocities;      // all agents
  std::vector<ComplexPoint> estimate_rates;  // followers
};

/// Controls and estimator derivatives from the current virtual-frame state.
/// `followers_desired` / `followers_desired_rate` are what the followers use
/// as p*_i and dp*_i (true values, or values taken from the parameter estimator).
inline FormationRates formation_rhs(const SensingGraph& g,
                                    const std::map<AgentId, ConstraintTriple>& triples,
                                    const ReverseNeighbors& reverse,
                                    std::span<const ComplexPoint> positions,
                                    std::span<const ComplexPoint> estimates,
                                    std::span<const ComplexPoint> desired,
                                    std::span<const ComplexPoint> desired_rate,
                                    std::span<const ComplexPoint> followers_desired,
                                    std::span<const ComplexPoint> followers_desired_rate,
                                    double gain) {
  const std::size_t n = g.agent_count(), m = g.leader_count(), nf = n - m;
  if (positions.size() != n || estimates.size() != nf || desired.size() != n ||
      desired_rate.size() != n || followers_desired.size() != nf ||
      followers_desired_rate.size() != nf)
    throw DimensionMismatch("formation state does not match the sensing graph");
  if (!(gain > 0.0)) throw Error("formation gain must be positive");

  FormationRates out{std::vector<ComplexPoint>(n), std::vector<ComplexPoint>(nf)};
  for (AgentId i = 0; i < m; ++i)
    out.velocities[i] = -gain * (positions[i] - desired[i]) + desired_rate[i];

  auto estimate = [&](AgentId a) { return a < m ? positions[a] : estimates[a - m]; };
  detail::parallel_for(nf, [&](std::size_t f) {
    const AgentId i = m + f;
    const Complex tracking = estimates[f] - followers_desired[f];
    out.velocities[i] = -gain * tracking + followers_desired_rate[f];
    out.estimate_rates[f] = -2.0 * gain * tracking + followers_desired_rate[f] +
                            distributed_consensus_term(triples, reverse, i, estimate);
  });
  return out;
}

/// Followers use the true desired formation.
inline FormationRates integrated_rhs(const SensingGraph& g,
                                     const std::map<AgentId, ConstraintTriple>& triples,
                                     std::span<const ComplexPoint> positions,
                                     std::span<const ComplexPoint> estimates,
                                     const FormationSpec& spec, double t) {
  const auto d = spec.desired(t), dr = spec.desired_rate(t);
  const std::size_t m = g.leader_count();
  if (d.size() != g.agent_count() || dr.size() != g.agent_count())
    throw DimensionMismatch("desired formation does not match the sensing graph");
  const std::span<const ComplexPoint> ds(d), drs(dr);
  return formation_rhs(g, triples, ReverseNeighbors(g), positions, estimates, ds, drs,
                       ds.subspan(m), drs.subspan(m), spec.gain);
}

/// Followers use p~*_i = psi_i[i] and its rate from the parameter estimator;
/// leaders keep the true desired formation.
inline FormationRates integrated_rhs_estimated(
    const SensingGraph& g, const std::map<AgentId, ConstraintTriple>& triples,
    std::span<const ComplexPoint> positions, std::span<const ComplexPoint> estimates,
    const FormationSpec& spec, double t, const std::vector<std::vector<ComplexPoint>>& psi,
    const std::vector<std::vector<ComplexPoint>>& psi_rate) {
  const std::size_t n = g.agent_count(), m = g.leader_count(), nf = n - m;
  if (psi.size() != nf || psi_rate.size() != nf)
    throw DimensionMismatch("one parameter estimate per follower");
  const auto d = spec.desired(t), dr = spec.desired_rate(t);
  std::vector<ComplexPoint> fd(nf), fdr(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    if (psi[f].size() != n || psi_rate[f].size() != n)
      throw DimensionMismatch("parameter estimates must cover every agent");
    fd[f] = psi[f][m + f];
    fdr[f] = psi_rate[f][m + f];
  }
  return formation_rhs(g, triples, ReverseNeighbors(g), positions, estimates, d, dr, fd, fdr,
                       spec.gain);
}

/// Stacked error e_p = (p_l - p*_l, p_f - p*_f, p_hat_f - p_f).
inline VectorXc stacked_error(std::span<const ComplexPoint> positions,
                              std::span<const ComplexPoint> estimates,
                              std::span<const ComplexPoint> desired, std::size_t leader_count) {
  const std::size_t n = positions.size(), nf = estimates.size();
  VectorXc e(static_cast<Eigen::Index>(n + nf));
  for (std::size_t i = 0; i < n; ++i) e(static_cast<Eigen::Index>(i)) = positions[i] - desired[i];
  for (std::size_t f = 0; f < nf; ++f)
    e(static_cast<Eigen::Index>(n + f)) = estimates[f] - positions[leader_count + f];
  return e;
}

/// L_p = [[a I_m, 0, 0], [0, a I, a I], [0, a I, a I + L_ff]].
inline MatrixXc error_system_matrix(const MatrixXc& lff, std::size_t leader_count, double gain) {
  const auto m = static_cast<Eigen::Index>(leader_count);
  const auto nf = lff.rows();
  MatrixXc lp = MatrixXc::Zero(m + 2 * nf, m + 2 * nf);
  const Complex a(gain, 0.0);
  lp.topLeftCorner(m, m).diagonal().setConstant(a);
  lp.block(m, m, nf, nf).diagonal().setConstant(a);
  lp.block(m, m + nf, nf, nf).diagonal().setConstant(a);
  lp.block(m + nf, m, nf, nf).diagonal().setConstant(a);
  lp.block(m + nf, m + nf, nf, nf) = lff;
  lp.block(m + nf, m + nf, nf, nf).diagonal().array() += a;
  return lp;
}

/// Initial error information for the collision certificate: either measured
/// from the initial state, or a priori bounds.
struct InitialErrors {
  /// Norm (or bound) of the full stacked error e_p(0).
  double ep_norm = 0.0;
  /// Per-agent lambda_i: leaders |p_i - p*_i|, followers |(p_f - p*_f, p_hat_f - p_f)|.
  std::vector<double> lambda;
  /// Path-wise parameter estimator error e_zeta(0); zero when unused.
  double e_zeta = 0.0;

  static InitialErrors from_state(std::span<const ComplexPoint> positions,
                                  std::span<const ComplexPoint> estimates,
                                  std::span<const ComplexPoint> desired,
                                  std::size_t leader_count) {
    const VectorXc e = stacked_error(positions, estimates, desired, leader_count);
    const auto m = static_cast<Eigen::Index>(leader_count);
    const double follower_part = e.tail(e.size() - m).norm();
    InitialErrors out;
    out.ep_norm = e.norm();
    out.lambda.resize(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i)
      out.lambda[i] = i < leader_count ? std::abs(e(static_cast<Eigen::Index>(i))) : follower_part;
    return out;
  }

  /// lambda_i = eps_i for leaders and eps_p for every follower.
  static InitialErrors from_bounds(std::span<const double> leader_bounds, double follower_bound,
                                   std::size_t agent_count) {
    InitialErrors out;
    double sq = follower_bound * follower_bound;
    out.lambda.assign(agent_count, follower_bound);
    for (std::size_t i = 0; i < leader_bounds.size(); ++i) {
      out.lambda[i] = leader_bounds[i];
      sq += leader_bounds[i] * leader_bounds[i];
    }
    out.ep_norm = std::sqrt(sq);
    return out;
  }
};

struct CollisionCertificate {
  double margin_global = 0.0;
  std::vector<double> lambda;
  double relaxed_margin = 0.0;
  double min_desired_separation = 0.0;
  double worst_time = 0.0;
  bool holds = false;
};

/// Evaluates both collision-avoidance margins over the sampled horizon.
inline CollisionCertificate collision_precheck(const FormationSpec& spec, const InitialErrors& init,
                                               std::span<const double> horizon_samples) {
  CollisionCertificate c;
  c.lambda = init.lambda;
  c.min_desired_separation = std::numeric_limits<double>::infinity();
  c.relaxed_margin = std::numeric_limits<double>::infinity();
  for (double t : horizon_samples) {
    const auto d = spec.desired(t);
    if (d.size() != init.lambda.size())
      throw DimensionMismatch("initial error bounds do not match the formation");
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t j = i + 1; j < d.size(); ++j) {
        const double sep = std::abs(d[i] - d[j]);
        if (sep < c.min_desired_separation) {
          c.min_desired_separation = sep;
          c.worst_time = t;
        }
        c.relaxed_margin =
            std::min(c.relaxed_margin, sep - init.lambda[i] - init.lambda[j] - 2.0 * init.e_zeta);
      }
  }
  c.margin_global = c.min_desired_separation - 2.0 * init.ep_norm - 2.0 * init.e_zeta;
  c.holds = c.margin_global > 0.0 || c.relaxed_margin > 0.0;
  return c;
}

}  // namespace netloc

#endif  // NETLOC_FORMATION_HPP_
