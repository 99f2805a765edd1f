#ifndef NETLOC_NETWORK_MEASUREMENT_HPP_
#define NETLOC_NETWORK_MEASUREMENT_HPP_

// Synthesizes every follower's constraint weights from a ground-truth configuration.

#include <map>
#include <span>
#include <string>
#include <string_view>

#include "netloc/constraints.hpp"
#include "netloc/errors.hpp"
#include "netloc/geometry.hpp"
#include "netloc/graph.hpp"

namespace netloc {

enum class MeasurementMode {
  /// Distance and local bearing to each designated neighbour.
  LocalRelPos,
  /// Distances among the triple plus the one-bit sign of direction.
  DistanceSign,
};

inline std::string_view to_string(MeasurementMode mode) {
  return mode == MeasurementMode::LocalRelPos ? "local-relpos" : "distance-sign";
}

inline MeasurementMode parse_measurement_mode(std::string_view s) {
  if (s == "local-relpos") return MeasurementMode::LocalRelPos;
  if (s == "distance-sign") return MeasurementMode::DistanceSign;
  throw Error("unknown measurement mode '" + std::string(s) + "'");
}

/// Constraint weights of follower i at time t, built only from what i can measure.
inline ConstraintTriple measure_constraint(const SensingGraph& g, const Configuration& truth,
                                           std::span<const FrameOrientation> orientations,
                                           MeasurementMode mode, AgentId i, double t) {
  const auto [j, k] = g.designated_pair(i);
  const LocalRelPosMeasurement mj = measure_local(truth, orientations, i, j, t);
  const LocalRelPosMeasurement mk = measure_local(truth, orientations, i, k, t);
  if (mode == MeasurementMode::LocalRelPos) return weights_from_local(mj, mk);

  const double dij = std::abs(mj.value);
  const double dik = std::abs(mk.value);
  // The neighbour-to-neighbour distance is frame independent.
  const double djk = std::abs(mk.value - mj.value);
  const SignOfDirection sign{i, j, k, sign_of_cross(mj.value, mk.value)};
  return weights_from_distance_sign(dij, dik, djk, sign);
}

inline std::map<AgentId, ConstraintTriple> measure_constraints(
    const SensingGraph& g, const Configuration& truth,
    std::span<const FrameOrientation> orientations, MeasurementMode mode, double t) {
  if (truth.size() != g.agent_count() || truth.leader_count() != g.leader_count())
    throw DimensionMismatch("configuration does not match the sensing graph");
  std::map<AgentId, ConstraintTriple> triples;
  for (AgentId i = g.leader_count(); i < g.agent_count(); ++i)
    triples.emplace(i, measure_constraint(g, truth, orientations, mode, i, t));
  return triples;
}

}  // namespace netloc

#endif  // NETLOC_NETWORK_MEASUREMENT_HPP_
