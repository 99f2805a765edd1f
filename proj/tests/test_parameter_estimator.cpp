#include <cmath>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace netloc;
using namespace netloc::testing;

namespace {

FormationSpec moving_spec() {
  return FormationSpec::from_motion(
      RigidMotion({{0, 0}, {1, 0}, {0.5, 1}, {1.5, 1}}, ReferencePath({0, 0}, 0.2, {{PathSegment::Kind::Arc, 10, 0.7, 0.3}}),
                  true));
}

std::vector<FormationVector> offset(const FormationVector& base, std::vector<Complex> d) {
  std::vector<FormationVector> out;
  for (auto off : d) {
    auto v = base;
    for (auto& c : v) c += off;
    out.push_back(v);
  }
  return out;
}

}  // namespace

TEST(PathStructure, Validation) {
  EXPECT_NO_THROW(PathStructure(5, 2, {{0, 2, 3}, {1, 4}}));
  EXPECT_THROW(PathStructure(5, 2, {{2, 3}}), ValidationError);
  EXPECT_THROW(PathStructure(5, 2, {{0}}), ValidationError);
  EXPECT_THROW(PathStructure(5, 2, {{0, 2, 3}, {1, 3, 4}}), ValidationError);
  EXPECT_THROW(PathStructure(5, 2, {{0, 2, 1}}), ValidationError);
  EXPECT_THROW(PathStructure(5, 2, {{0, 2, 3}}), ValidationError);
  EXPECT_NO_THROW(PathStructure(5, 2, {{0, 2, 3}}, {{4, 3}}));
  EXPECT_THROW(PathStructure(5, 2, {{0, 2, 3}}, {{4, 1}}), ValidationError);
  const PathStructure ps(5, 2, {{0, 2, 3}, {1, 4}});
  EXPECT_EQ(ps.b(2, 0), 1);
  EXPECT_EQ(ps.b(3, 2), 1);
  EXPECT_EQ(ps.b(3, 0), 0);
  EXPECT_EQ(ps.eta(3), 1);
}

TEST(ParameterEstimator, SingleFollowerDecaysAtGamma) {
  const auto spec = moving_spec();
  const PathStructure ps(4, 2, {{0, 2}, {1, 3}});
  const double gamma = 2.0;
  ParameterEstimatorState s{offset(spec.desired(0), {{0.3, 0}, {0, -0.2}}), {}, ps, gamma, 0.0};
  const double e0 = psi_error({s.psi[0]}, spec.desired(0));
  for (int k = 0; k < 1000; ++k) s = parameter_estimator_step(s, spec, 1e-3);
  const double e1 = psi_error({s.psi[0]}, spec.desired(s.time));
  EXPECT_NEAR(e1, e0 * std::exp(-gamma * 1.0), 1e-9);
}

TEST(ParameterEstimator, ExactStartTracksExactly) {
  const auto spec = moving_spec();
  const PathStructure ps(4, 2, {{0, 2, 3}});
  ParameterEstimatorState s{{spec.desired(0), spec.desired(0)}, {}, ps, 2.0, 0.0};
  for (int k = 0; k < 500; ++k) s = parameter_estimator_step(s, spec, 1e-2);
  EXPECT_LT(psi_error(s.psi, spec.desired(s.time)), 1e-9);
  const auto rate = spec.desired_rate(s.time);
  for (const auto& pd : s.psi_dot)
    for (std::size_t c = 0; c < rate.size(); ++c) EXPECT_LT(std::abs(pd[c] - rate[c]), 1e-9);
}

TEST(ParameterEstimator, ChainRespectsPathSumBound) {
  const auto spec = moving_spec();
  const PathStructure ps(4, 2, {{0, 2, 3}});
  ParameterEstimatorState s{offset(spec.desired(0), {{0.3, 0.1}, {-0.5, 0.2}}), {}, ps, 1.0, 0.0};
  const double bound = path_sum_bound(ps, s.psi, spec.desired(0));
  const double initial = psi_error(s.psi, spec.desired(0));
  for (int k = 0; k < 5000; ++k) {
    s = parameter_estimator_step(s, spec, 2e-3);
    ASSERT_LE(psi_error(s.psi, spec.desired(s.time)), bound);
  }
  EXPECT_LT(psi_error(s.psi, spec.desired(s.time)), initial / 10);
}

TEST(ParameterEstimator, OffPathFollowerCopiesSource) {
  const auto spec = moving_spec();
  const PathStructure ps(4, 2, {{0, 2}}, {{3, 2}});
  ParameterEstimatorState s{offset(spec.desired(0), {{0.3, 0}, {9, 9}}), {}, ps, 2.0, 0.0};
  s = parameter_estimator_step(s, spec, 1e-2);
  EXPECT_EQ(s.psi[1], s.psi[0]);
  EXPECT_EQ(s.psi_dot[1], s.psi_dot[0]);
}

TEST(ParameterEstimator, RejectsBadInput) {
  const auto spec = moving_spec();
  const PathStructure ps(4, 2, {{0, 2, 3}});
  EXPECT_THROW(psi_rates(ps, 1.0, {spec.desired(0)}, spec.desired(0), spec.desired_rate(0)),
               DimensionMismatch);
  EXPECT_THROW(psi_rates(ps, 0.0, {spec.desired(0), spec.desired(0)}, spec.desired(0),
                         spec.desired_rate(0)),
               Error);
}

TEST(ParameterEstimator, EstimatedRhsIsTransparentWithExactParameters) {
  const auto pos = fig3_positions();
  const auto g = fig3_graph();
  std::vector<ComplexPoint> d(pos), dr(6, ComplexPoint{0.1, -0.2}), est;
  for (auto& p : d) p += Complex(0.3, 0.1);
  for (std::size_t f = 0; f < 4; ++f) est.push_back(pos[2 + f] + Complex(0.05, 0));
  const FormationSpec spec{[d](double) { return d; }, [dr](double) { return dr; }, 1.0};
  const auto triples =
      measure_constraints(g, Configuration(pos, 2), identity_frames(6), MeasurementMode::LocalRelPos, 0);
  const std::vector<FormationVector> psi(4, d), psi_dot(4, dr);
  const auto a = integrated_rhs(g, triples, pos, est, spec, 0.0);
  const auto b = integrated_rhs_estimated(g, triples, pos, est, spec, 0.0, psi, psi_dot);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_LT(std::abs(a.velocities[i] - b.velocities[i]), 1e-15);
  for (std::size_t f = 0; f < 4; ++f)
    EXPECT_LT(std::abs(a.estimate_rates[f] - b.estimate_rates[f]), 1e-15);
}
