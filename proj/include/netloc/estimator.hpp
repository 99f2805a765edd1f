#ifndef NETLOC_ESTIMATOR_HPP_
#define NETLOC_ESTIMATOR_HPP_

// Distributed localization dynamics
//     d/dt p_hat_f = -L_ff p_hat_f - L_fl p_l + v_f,
// with L_ff = W_ff^H W_ff and L_fl = W_ff^H W_fl, and the same law written per
// follower from locally available terms.

#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netloc/constraint_matrices.hpp"
#include "netloc/constraints.hpp"
#include "netloc/detail/parallel.hpp"
#include "netloc/errors.hpp"
#include "netloc/geometry.hpp"
#include "netloc/graph.hpp"
#include "netloc/motion.hpp"
#include "netloc/network_measurement.hpp"
#include "netloc/trajectory_log.hpp"

namespace netloc {

struct LaplacianPair {
  MatrixXc lff;
  MatrixXc lfl;
};

inline LaplacianPair build_laplacians(const ConstraintMatrices& cm) {
  const MatrixXc wff_h = cm.wff.adjoint();
  return {wff_h * cm.wff, wff_h * cm.wfl};
}

struct EstimatorState {
  std::vector<ComplexPoint> estimates;  // one per follower
  double time = 0.0;
};

/// -L_ff p_hat_f - L_fl p_l + v_f
inline VectorXc follower_rhs(const EstimatorState& state, const LaplacianPair& lp,
                             std::span<const ComplexPoint> leaders,
                             std::span<const ComplexPoint> follower_velocities) {
  const auto nf = lp.lff.rows();
  if (static_cast<Eigen::Index>(state.estimates.size()) != nf ||
      static_cast<Eigen::Index>(follower_velocities.size()) != nf ||
      static_cast<Eigen::Index>(leaders.size()) != lp.lfl.cols())
    throw DimensionMismatch("estimator state does not match the Laplacians");
  return -lp.lff * to_vector(state.estimates) - lp.lfl * to_vector(leaders) +
         to_vector(follower_velocities);
}

/// For each follower i, the followers h whose designated pair contains i,
/// together with the other member s of h's pair.
struct ReverseNeighbors {
  std::vector<std::vector<std::pair<AgentId, AgentId>>> of;  // indexed by agent

  explicit ReverseNeighbors(const SensingGraph& g) : of(g.agent_count()) {
    for (auto& [h, pair] : g.designated()) {
      of[pair.first].push_back({h, pair.second});
      of[pair.second].push_back({h, pair.first});
    }
  }
};

namespace detail {

inline Complex weight_to(const ConstraintTriple& t, AgentId nbr) {
  return nbr == t.nbr_a ? t.w_a : t.w_b;
}

}  // namespace detail

/// Consensus part of follower i's update, delta_ijk + sum_h delta_his, using
/// only i's own weights and the weights/estimates of followers that measure i.
/// `estimate` maps an agent to its current estimate (true position for leaders).
template <class EstimateOf>
Complex distributed_consensus_term(const std::map<AgentId, ConstraintTriple>& triples,
                                   const ReverseNeighbors& reverse, AgentId i,
                                   const EstimateOf& estimate) {
  const ConstraintTriple& own = triples.at(i);
  const Complex pi = estimate(i);
  const Complex wii_h = std::conj(own.w_self);
  Complex sum = wii_h * own.w_a * (estimate(own.nbr_a) - pi) +
                wii_h * own.w_b * (estimate(own.nbr_b) - pi);
  for (auto [h, s] : reverse.of[i]) {
    const ConstraintTriple& th = triples.at(h);
    const Complex whi = detail::weight_to(th, i);
    const Complex whs = detail::weight_to(th, s);
    const Complex ph = estimate(h);
    sum += std::conj(whi) * whi * (ph - pi) + std::conj(whi) * whs * (ph - estimate(s));
  }
  return sum;
}

/// Per-follower form of follower_rhs; agrees with the matrix form.
inline VectorXc follower_rhs_distributed(const SensingGraph& g,
                                         const std::map<AgentId, ConstraintTriple>& triples,
                                         const ReverseNeighbors& reverse,
                                         std::span<const ComplexPoint> estimates,
                                         std::span<const ComplexPoint> leaders,
                                         std::span<const ComplexPoint> follower_velocities) {
  const std::size_t m = g.leader_count();
  const std::size_t nf = g.follower_count();
  if (estimates.size() != nf || follower_velocities.size() != nf || leaders.size() != m)
    throw DimensionMismatch("estimator inputs do not match the sensing graph");
  auto estimate = [&](AgentId a) { return a < m ? leaders[a] : estimates[a - m]; };
  VectorXc out(static_cast<Eigen::Index>(nf));
  detail::parallel_for(nf, [&](std::size_t f) {
    const AgentId i = m + f;
    out(static_cast<Eigen::Index>(f)) =
        follower_velocities[f] + distributed_consensus_term(triples, reverse, i, estimate);
  });
  return out;
}

/// Ground-truth network for localization-only runs.
struct LocalizationProblem {
  SensingGraph graph;
  std::vector<FrameOrientation> orientations;
  MeasurementMode mode = MeasurementMode::LocalRelPos;
  RigidMotion truth;
};

struct IntegrationOptions {
  /// Relative growth of the error norm between steps that triggers StepRejected.
  double growth_tol = 1e-6;
  /// Absolute floor added to the growth test so rounding noise near zero is ignored.
  double growth_floor = 1e-12;
  bool check_growth = true;
};

namespace detail {

inline double norm_of(std::span<const ComplexPoint> v) {
  double s = 0.0;
  for (auto z : v) s += std::norm(z);
  return std::sqrt(s);
}

inline double norm_of_difference(std::span<const ComplexPoint> a, std::span<const ComplexPoint> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace detail

/// Integrates the localization protocol with classical RK4, re-measuring the
/// moving ground truth at every stage. Logs every step including t = 0.
inline TrajectoryLog integrate(const EstimatorState& initial, const LocalizationProblem& problem,
                               double duration, double step, IntegrationOptions opts = {}) {
  if (!(step > 0.0)) throw Error("step size must be positive");
  if (!(duration >= 0.0)) throw Error("duration must be non-negative");
  const SensingGraph& g = problem.graph;
  const std::size_t n = g.agent_count(), m = g.leader_count(), nf = g.follower_count();
  if (initial.estimates.size() != nf) throw DimensionMismatch("one estimate per follower");
  if (problem.truth.size() != n) throw DimensionMismatch("ground truth does not match graph");
  if (problem.orientations.size() != n) throw DimensionMismatch("one orientation per agent");
  const ReverseNeighbors reverse(g);

  auto derivative = [&](double t, const VectorXc& y) {
    std::vector<ComplexPoint> pos, vel;
    problem.truth.evaluate(t, pos, vel);
    const Configuration truth(pos, m);
    std::map<AgentId, ConstraintTriple> triples;
    try {
      triples = measure_constraints(g, truth, problem.orientations, problem.mode, t);
    } catch (const CollocatedAgents& e) {
      throw LocalizabilityLost(std::string("agents collided: ") + e.what(), t,
                               std::numeric_limits<double>::infinity());
    } catch (const DegenerateTriple& e) {
      throw LocalizabilityLost(std::string("degenerate triple: ") + e.what(), t,
                               std::numeric_limits<double>::infinity());
    }
    std::span<const ComplexPoint> all(pos);
    return follower_rhs_distributed(g, triples, reverse,
                                    std::span<const ComplexPoint>(y.data(), nf),
                                    all.first(m), std::span<const ComplexPoint>(vel).subspan(m));
  };

  auto record_at = [&](double t, const VectorXc& y) {
    std::vector<ComplexPoint> pos, vel;
    problem.truth.evaluate(t, pos, vel);
    const Configuration truth(pos, m);
    std::map<AgentId, ConstraintTriple> triples;
    try {
      triples = measure_constraints(g, truth, problem.orientations, problem.mode, t);
    } catch (const Error& e) {
      throw LocalizabilityLost(std::string("measurement failed: ") + e.what(), t,
                               std::numeric_limits<double>::infinity());
    }
    const ConstraintMatrices cm = assemble_constraints(g, triples);
    const LocalizabilityResult check = localizability_check(cm);
    if (!check.invertible)
      throw LocalizabilityLost("W_ff became singular", t, check.condition_number);
    TrajectoryRecord r;
    r.t = t;
    r.positions = pos;
    r.estimates = to_points(y);
    r.err_est = detail::norm_of_difference(r.estimates, truth.followers());
    r.min_dist = min_pairwise_distance(pos);
    r.control_magnitudes.reserve(n);
    for (auto v : vel) r.control_magnitudes.push_back(std::abs(v));
    r.cond_wff = check.condition_number;
    return r;
  };

  TrajectoryLog log{n, m, {}};
  VectorXc y = to_vector(initial.estimates);
  double t = initial.time;
  const auto steps = static_cast<long>(std::llround(duration / step));
  log.records.reserve(static_cast<std::size_t>(steps) + 1);
  log.records.push_back(record_at(t, y));

  for (long s = 0; s < steps; ++s) {
    const VectorXc k1 = derivative(t, y);
    const VectorXc k2 = derivative(t + 0.5 * step, y + 0.5 * step * k1);
    const VectorXc k3 = derivative(t + 0.5 * step, y + 0.5 * step * k2);
    const VectorXc k4 = derivative(t + step, y + step * k3);
    y += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = initial.time + static_cast<double>(s + 1) * step;

    TrajectoryRecord r = record_at(t, y);
    const double prev = log.records.back().err_est;
    if (opts.check_growth && r.err_est > prev * (1.0 + opts.growth_tol) + opts.growth_floor)
      throw StepRejected("estimation error grew from " + std::to_string(prev) + " to " +
                             std::to_string(r.err_est) + "; reduce the step size",
                         t);
    log.records.push_back(std::move(r));
  }
  return log;
}

}  // namespace netloc

#endif  // NETLOC_ESTIMATOR_HPP_
