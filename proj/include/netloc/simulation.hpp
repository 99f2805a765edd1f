#ifndef NETLOC_SIMULATION_HPP_
#define NETLOC_SIMULATION_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "netloc/constraint_matrices.hpp"
#include "netloc/errors.hpp"
#include "netloc/estimator.hpp"
#include "netloc/formation.hpp"
#include "netloc/network_measurement.hpp"
#include "netloc/parameter_estimator.hpp"
#include "netloc/scenario.hpp"
#include "netloc/trajectory_log.hpp"

namespace netloc {

struct RunSummary {
  std::size_t steps = 0;
  double final_time = 0.0;
  double final_err_track_leaders = 0.0;
  double final_err_track_followers = 0.0;
  double final_err_est = 0.0;
  std::optional<double> initial_psi_error;
  std::optional<double> final_psi_error;
  double min_distance = std::numeric_limits<double>::infinity();
  double max_condition = 0.0;
  std::optional<CollisionCertificate> certificate;
};

struct RunResult {
  TrajectoryLog log;
  RunSummary summary;
};

inline std::vector<double> horizon_samples(double step, double horizon) {
  const auto steps = static_cast<long>(std::llround(horizon / step));
  std::vector<double> t(static_cast<std::size_t>(steps) + 1);
  for (long s = 0; s <= steps; ++s) t[static_cast<std::size_t>(s)] = static_cast<double>(s) * step;
  return t;
}

inline FormationSpec formation_spec(const Scenario& sc) {
  return FormationSpec::from_motion(sc.desired, sc.gain);
}

/// Initial parameter estimates psi_i(0) = p*(0) + offset_i, with copies applied.
inline std::vector<FormationVector> initial_psi(const Scenario& sc) {
  const auto d0 = sc.desired.positions(0.0);
  std::vector<FormationVector> psi(sc.graph.follower_count(), d0);
  for (std::size_t f = 0; f < psi.size(); ++f)
    for (auto& c : psi[f]) c += sc.estimator->initial_offsets[f];
  apply_copies(sc.estimator->paths, psi);
  return psi;
}

/// Collision certificate for a formation scenario: from the initial state, or
/// from a priori bounds when the scenario supplies them.
inline CollisionCertificate scenario_certificate(const Scenario& sc) {
  const std::size_t m = sc.graph.leader_count();
  const VirtualFrame frame(Configuration(sc.initial_positions, m));
  const FormationSpec spec = formation_spec(sc);
  InitialErrors init;
  if (sc.collision_bounds) {
    init = InitialErrors::from_bounds(sc.collision_bounds->leaders, sc.collision_bounds->followers,
                                      sc.graph.agent_count());
  } else {
    const auto pos = frame.to_virtual(sc.initial_positions);
    std::vector<ComplexPoint> est(pos.begin() + static_cast<long>(m), pos.end());
    for (std::size_t f = 0; f < est.size(); ++f) est[f] += sc.initial_estimate_error[f];
    init = InitialErrors::from_state(pos, est, spec.desired(0.0), m);
  }
  if (sc.estimator)
    init.e_zeta = path_sum_bound(sc.estimator->paths, initial_psi(sc), spec.desired(0.0));
  return collision_precheck(spec, init, horizon_samples(sc.step, sc.horizon));
}

namespace detail {

inline std::map<AgentId, ConstraintTriple> measure_or_lose(const Scenario& sc,
                                                           std::span<const ComplexPoint> pos,
                                                           double t) {
  try {
    return measure_constraints(sc.graph, Configuration({pos.begin(), pos.end()}, sc.graph.leader_count()),
                               sc.orientations, sc.mode, t);
  } catch (const DimensionMismatch&) {
    throw;
  } catch (const Error& e) {
    throw LocalizabilityLost(std::string("measurement failed: ") + e.what(), t,
                             std::numeric_limits<double>::infinity());
  }
}

inline void summarize(RunResult& r) {
  const auto& last = r.log.records.back();
  auto& s = r.summary;
  s.steps = r.log.records.size() - 1;
  s.final_time = last.t;
  s.final_err_track_leaders = last.err_track_leaders;
  s.final_err_track_followers = last.err_track_followers;
  s.final_err_est = last.err_est;
  s.final_psi_error = last.psi_error;
  s.initial_psi_error = r.log.records.front().psi_error;
  for (const auto& rec : r.log.records) {
    s.min_distance = std::min(s.min_distance, rec.min_dist);
    s.max_condition = std::max(s.max_condition, rec.cond_wff);
  }
}

inline RunResult run_localization(const Scenario& sc) {
  LocalizationProblem problem{sc.graph, sc.orientations, sc.mode, sc.truth};
  EstimatorState init;
  const std::size_t m = sc.graph.leader_count();
  const auto p0 = sc.truth.positions(0.0);
  for (std::size_t f = 0; f < sc.graph.follower_count(); ++f)
    init.estimates.push_back(p0[m + f] + sc.initial_estimate_error[f]);
  RunResult r{integrate(init, problem, sc.horizon, sc.step), {}};
  summarize(r);
  return r;
}

struct FormationState {
  std::vector<ComplexPoint> positions;  // virtual frame
  std::vector<ComplexPoint> estimates;  // virtual frame
  std::vector<FormationVector> psi;

  FormationState axpy(double s, const FormationState& d) const {
    FormationState out = *this;
    for (std::size_t i = 0; i < out.positions.size(); ++i) out.positions[i] += s * d.positions[i];
    for (std::size_t i = 0; i < out.estimates.size(); ++i) out.estimates[i] += s * d.estimates[i];
    for (std::size_t f = 0; f < out.psi.size(); ++f)
      for (std::size_t c = 0; c < out.psi[f].size(); ++c) out.psi[f][c] += s * d.psi[f][c];
    return out;
  }
};

inline RunResult run_formation(const Scenario& sc) {
  const SensingGraph& g = sc.graph;
  const std::size_t n = g.agent_count(), m = g.leader_count(), nf = n - m;
  const VirtualFrame frame(Configuration(sc.initial_positions, m));
  const FormationSpec spec = formation_spec(sc);
  const ReverseNeighbors reverse(g);
  const bool estimated = sc.estimator.has_value();

  auto derivative = [&](double t, const FormationState& x) {
    const auto triples = measure_or_lose(sc, x.positions, t);
    const auto d = spec.desired(t), dr = spec.desired_rate(t);
    FormationState dx;
    std::vector<ComplexPoint> fd(nf), fdr(nf);
    if (estimated) {
      dx.psi = psi_rates(sc.estimator->paths, sc.estimator->gamma, x.psi, d, dr);
      for (std::size_t f = 0; f < nf; ++f) {
        fd[f] = x.psi[f][m + f];
        fdr[f] = dx.psi[f][m + f];
      }
    } else {
      std::copy(d.begin() + static_cast<long>(m), d.end(), fd.begin());
      std::copy(dr.begin() + static_cast<long>(m), dr.end(), fdr.begin());
    }
    FormationRates rates =
        formation_rhs(g, triples, reverse, x.positions, x.estimates, d, dr, fd, fdr, spec.gain);
    dx.positions = std::move(rates.velocities);
    dx.estimates = std::move(rates.estimate_rates);
    return dx;
  };

  auto record_at = [&](double t, const FormationState& x) {
    const auto triples = measure_or_lose(sc, x.positions, t);
    const LocalizabilityResult check = localizability_check(assemble_constraints(g, triples));
    if (!check.invertible)
      throw LocalizabilityLost("W_ff became singular", t, check.condition_number);
    const auto d = spec.desired(t);
    const VectorXc e = stacked_error(x.positions, x.estimates, d, m);
    const auto mi = static_cast<Eigen::Index>(m), nfi = static_cast<Eigen::Index>(nf);
    TrajectoryRecord r;
    r.t = t;
    for (auto p : x.positions) r.positions.push_back(frame.to_global(p));
    for (auto p : x.estimates) r.estimates.push_back(frame.to_global(p));
    if (estimated) r.psi_error = psi_error(x.psi, d);
    r.err_track_leaders = e.head(mi).norm();
    r.err_track_followers = e.segment(mi, nfi).norm();
    r.err_est = e.tail(nfi).norm();
    r.min_dist = min_pairwise_distance(x.positions);
    const FormationState dx = derivative(t, x);
    for (auto v : dx.positions) r.control_magnitudes.push_back(std::abs(v));
    r.cond_wff = check.condition_number;
    return r;
  };
  auto ep_norm = [](const TrajectoryRecord& r) {
    return std::sqrt(r.err_track_leaders * r.err_track_leaders +
                     r.err_track_followers * r.err_track_followers + r.err_est * r.err_est);
  };

  FormationState x;
  x.positions = frame.to_virtual(sc.initial_positions);
  for (std::size_t f = 0; f < nf; ++f)
    x.estimates.push_back(x.positions[m + f] + sc.initial_estimate_error[f]);
  if (estimated) x.psi = initial_psi(sc);

  RunResult result;
  result.log = {n, m, {}};
  result.summary.certificate = scenario_certificate(sc);
  const auto steps = static_cast<long>(std::llround(sc.horizon / sc.step));
  const double h = sc.step;
  result.log.records.reserve(static_cast<std::size_t>(steps) + 1);
  result.log.records.push_back(record_at(0.0, x));

  for (long s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) * h;
    const FormationState k1 = derivative(t, x);
    const FormationState k2 = derivative(t + 0.5 * h, x.axpy(0.5 * h, k1));
    const FormationState k3 = derivative(t + 0.5 * h, x.axpy(0.5 * h, k2));
    const FormationState k4 = derivative(t + h, x.axpy(h, k3));
    x = x.axpy(h / 6.0, k1).axpy(h / 3.0, k2).axpy(h / 3.0, k3).axpy(h / 6.0, k4);
    if (estimated) apply_copies(sc.estimator->paths, x.psi);

    const double t1 = static_cast<double>(s + 1) * h;
    TrajectoryRecord r = record_at(t1, x);
    // With exact formation parameters the stacked error norm is non-increasing.
    if (!estimated) {
      const double prev = ep_norm(result.log.records.back()), now = ep_norm(r);
      if (now > prev * (1.0 + 1e-6) + 1e-12)
        throw StepRejected("formation error grew from " + std::to_string(prev) + " to " +
                               std::to_string(now) + "; reduce the step size",
                           t1);
    }
    result.log.records.push_back(std::move(r));
  }
  summarize(result);
  return result;
}

}  // namespace detail

/// Runs a validated scenario; deterministic for a given input.
inline RunResult run(const Scenario& sc) {
  return sc.kind == Scenario::Kind::Localization ? detail::run_localization(sc)
                                                 : detail::run_formation(sc);
}

}  // namespace netloc

#endif  // NETLOC_SIMULATION_HPP_
