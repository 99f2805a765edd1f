#include <cmath>
#include <cstdlib>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace netloc;
using namespace netloc::testing;

namespace {

std::vector<ComplexPoint> sample_positions() {
  return {{0, 0}, {3, 0}, {1, 0.2}, {2.5, -0.9}, {1.5, -1}, {2, 0.3}};
}

}  // namespace

TEST(Laplacians, ScalarCase) {
  ConstraintMatrices cm;
  cm.wff = MatrixXc::Constant(1, 1, Complex(1, 2));
  cm.wfl = MatrixXc(1, 2);
  cm.wfl << Complex(0.5, 0), Complex(0, -1);
  const auto lp = build_laplacians(cm);
  EXPECT_NEAR(std::abs(lp.lff(0, 0) - 5.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(lp.lfl(0, 0) - Complex(1, -2) * 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(lp.lfl(0, 1) - Complex(1, -2) * Complex(0, -1)), 0.0, 1e-15);
}

TEST(Laplacians, HermitianPositiveDefiniteAndAnnihilating) {
  const auto pts = fig3_positions();
  const auto lp = build_laplacians(matrices_at(fig3_graph(), pts, identity_frames(6)));
  EXPECT_LT((lp.lff - lp.lff.adjoint()).norm(), 1e-12);
  const MatrixXc lx = lp.lff.real().cast<Complex>(), ly = lp.lff.imag().cast<Complex>();
  EXPECT_LT((lx - lx.transpose()).norm(), 1e-12);
  EXPECT_LT((ly + ly.transpose()).norm(), 1e-12);
  Eigen::SelfAdjointEigenSolver<MatrixXc> eig(lp.lff);
  const double lmin = eig.eigenvalues()(0);
  EXPECT_GT(lmin, 0.0);
  EXPECT_NEAR(lmin, oracle().at("fig3").at("lambda_min_lff").get<double>(), 1e-12);
  const VectorXc r = lp.lff * to_vector(std::span(pts).subspan(2)) +
                     lp.lfl * to_vector(std::span(pts).first(2));
  EXPECT_LT(r.norm(), 1e-12);
}

TEST(FollowerRhs, TruthIsEquilibrium) {
  const auto pts = fig3_positions();
  const auto lp = build_laplacians(matrices_at(fig3_graph(), pts, identity_frames(6)));
  const std::vector<ComplexPoint> v{{0.1, 0}, {0, 0.2}, {-0.3, 0}, {0, 0}};
  EstimatorState s{{pts.begin() + 2, pts.end()}, 0.0};
  const VectorXc d = follower_rhs(s, lp, std::span(pts).first(2), v);
  EXPECT_LT((d - to_vector(v)).norm(), 1e-12);
}

TEST(FollowerRhs, ScalarErrorDecay) {
  LaplacianPair lp{MatrixXc::Constant(1, 1, 1.0), MatrixXc::Zero(1, 2)};
  // truth p_f = 0 with L_fl = 0; estimate error 1
  EstimatorState s{{{1.0, 0.0}}, 0.0};
  const std::vector<ComplexPoint> leaders{{0, 0}, {1, 0}}, v{{0, 0}};
  EXPECT_NEAR(std::abs(follower_rhs(s, lp, leaders, v)(0) - Complex(-1, 0)), 0.0, 1e-15);
  EXPECT_THROW(follower_rhs(s, lp, leaders, std::vector<ComplexPoint>{}), DimensionMismatch);
}

TEST(FollowerRhs, DistributedFormMatchesMatrixForm) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const bool example = trial == 0;
    const auto net = example ? RandomNetwork{fig3_graph(), fig3_layers()}
                             : constructive_layered(rng, 4 + trial % 9, 2 + trial % 3);
    const auto& g = net.graph;
    const std::size_t n = g.agent_count(), m = g.leader_count();
    const auto pts = example ? fig3_positions() : random_points(rng, n, 5.0, 0.2);
    const auto frames = random_frames(rng, n);
    const Configuration c(pts, m);
    const auto triples = measure_constraints(g, c, frames, MeasurementMode::LocalRelPos, 0.3);
    const auto lp = build_laplacians(assemble_constraints(g, triples));
    std::vector<ComplexPoint> est, vel;
    for (std::size_t f = 0; f < n - m; ++f) {
      est.push_back(random_point(rng, 5.0));
      vel.push_back(random_point(rng, 1.0));
    }
    const VectorXc a = follower_rhs({est, 0.0}, lp, c.leaders(), vel);
    const VectorXc b = follower_rhs_distributed(g, triples, ReverseNeighbors(g), est, c.leaders(), vel);
    EXPECT_LT((a - b).norm(), 1e-10);
  }
}

TEST(Integrate, ExactStartStaysExact) {
  const auto pts = fig3_positions();
  LocalizationProblem p{fig3_graph(), identity_frames(6), MeasurementMode::LocalRelPos,
                        RigidMotion::stationary(pts)};
  const auto log = integrate({{pts.begin() + 2, pts.end()}, 0.0}, p, 1.0, 1e-3);
  ASSERT_EQ(log.records.size(), 1001u);
  for (const auto& r : log.records) EXPECT_LT(r.err_est, 1e-13);
}

TEST(Integrate, StaticTruthMatchesOracleSolution) {
  const auto pts = sample_positions();
  std::mt19937_64 rng(2);
  LocalizationProblem p{fig3_graph(), random_frames(rng, 6), MeasurementMode::LocalRelPos,
                        RigidMotion::stationary(pts)};
  const auto& o = oracle().at("static_localization");
  const double horizon = o.at("horizon").get<double>();
  const auto log = integrate({std::vector<ComplexPoint>(4), 0.0}, p, horizon, 1e-3);
  ASSERT_DOUBLE_EQ(log.records.back().t, horizon);
  for (std::size_t f = 0; f < 4; ++f)
    EXPECT_LT(std::abs(log.records.back().estimates[f] - as_complex(o.at("estimates").at(f))), 1e-9);
}

TEST(Integrate, ConvergesBelowBound) {
  const auto pts = sample_positions();
  LocalizationProblem p{fig3_graph(), identity_frames(6), MeasurementMode::LocalRelPos,
                        RigidMotion::stationary(pts)};
  const double lmin = oracle().at("static_localization").at("lambda_min_lff").get<double>();
  std::vector<ComplexPoint> est{{1, 1}, {-1, 0}, {0, 2}, {0.5, 0.5}};
  double e0 = 0.0;
  for (std::size_t f = 0; f < 4; ++f) e0 += std::norm(est[f] - pts[2 + f]);
  e0 = std::sqrt(e0);
  const double horizon = std::ceil(std::log(e0 / 1e-7) / lmin);
  const auto log = integrate({est, 0.0}, p, horizon, 1e-2);
  EXPECT_LE(log.records.back().err_est, 1e-6);
}

TEST(Integrate, MovingTruthIsTracked) {
  // rotation rate must stay continuous over the run for RK4 to keep its order
  ReferencePath path({0, 0}, 0.3, {{PathSegment::Kind::Arc, 30.0, 0.5, 0.4}});
  LocalizationProblem p{fig3_graph(),
                        {FrameOrientation(0.1, 0.3, 1.0), FrameOrientation(1.0), FrameOrientation(2.0, 0.2, 2.0),
                         FrameOrientation(3.0), FrameOrientation(4.0, 0.5, 0.5), FrameOrientation(5.0)},
                        MeasurementMode::LocalRelPos,
                        RigidMotion(sample_positions(), path, true)};
  const auto start = p.truth.positions(0.0);
  std::vector<ComplexPoint> est(start.begin() + 2, start.end());
  for (auto& e : est) e += Complex(0.2, -0.1);
  const auto log = integrate({est, 0.0}, p, 20.0, 1e-3);
  EXPECT_LT(log.records.back().err_est, 0.2 * log.records.front().err_est);
  for (std::size_t s = 1; s < log.records.size(); ++s)
    EXPECT_LE(log.records[s].err_est, log.records[s - 1].err_est * (1 + 1e-6) + 1e-12);
}

TEST(Integrate, LargeStepIsRejected) {
  const auto pts = fig3_positions();
  LocalizationProblem p{fig3_graph(), identity_frames(6), MeasurementMode::LocalRelPos,
                        RigidMotion::stationary(pts)};
  std::vector<ComplexPoint> est(4, ComplexPoint{});
  EXPECT_THROW(integrate({est, 0.0}, p, 20.0, 5.0), StepRejected);
  EXPECT_THROW(integrate({est, 0.0}, p, 1.0, 0.0), Error);
}

TEST(Integrate, CollisionLosesLocalizability) {
  // follower 3 moves straight through leader 1
  const std::vector<ComplexPoint> pts{{0, 0}, {3, 0}, {-1, 0}, {1, 2}};
  const auto g = SensingGraph::from_designated(4, 2, {{2, {0, 1}}, {3, {0, 2}}});
  LocalizationProblem p{g, identity_frames(4), MeasurementMode::LocalRelPos,
                        RigidMotion(pts, ReferencePath({0, 0}, 0.0, {}), false,
                                    ShapeMorph{{{0, 0}, {3, 0}, {1, 0}, {1, 2}}, 2.0})};
  try {
    integrate({{{-1, 0}, {1, 2}}, 0.0}, p, 2.0, 1e-3, {.check_growth = false});
    FAIL() << "expected LocalizabilityLost";
  } catch (const LocalizabilityLost& e) {
    EXPECT_GT(e.time(), 0.5);
    EXPECT_LT(e.time(), 1.5);
  }
}

TEST(Integrate, ResultIndependentOfThreadCount) {
  std::mt19937_64 rng(4);
  const auto net = constructive_layered(rng, 150, 3);
  const auto pts = random_points(rng, 150, 40.0, 0.5);
  LocalizationProblem p{net.graph, random_frames(rng, 150), MeasurementMode::LocalRelPos,
                        RigidMotion::stationary(pts)};
  std::vector<ComplexPoint> est(147, ComplexPoint{1, 1});
  setenv("NETLOC_THREADS", "1", 1);
  const auto a = integrate({est, 0.0}, p, 0.05, 1e-3, {.check_growth = false});
  setenv("NETLOC_THREADS", "4", 1);
  const auto b = integrate({est, 0.0}, p, 0.05, 1e-3, {.check_growth = false});
  unsetenv("NETLOC_THREADS");
  EXPECT_TRUE(a == b);
}
