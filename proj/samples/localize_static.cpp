// Localize four followers of a static network from two leaders, once in
// closed form and once with the distributed estimator.

#include <cstdio>
#include <vector>

#include "netloc/netloc.hpp"

int main() {
  using netloc::ComplexPoint;
  const std::vector<ComplexPoint> truth{{0, 0}, {3, 0}, {1, 0.2}, {2.5, -0.9}, {1.5, -1}, {2, 0.3}};
  // followers 3..6 (zero-based 2..5) with their designated neighbour pairs
  const auto g = netloc::SensingGraph::from_designated(
      6, 2, {{2, {0, 5}}, {3, {5, 4}}, {4, {2, 5}}, {5, {1, 2}}});
  const std::vector<netloc::FrameOrientation> frames{
      netloc::FrameOrientation(0.3), netloc::FrameOrientation(1.1), netloc::FrameOrientation(2.0),
      netloc::FrameOrientation(4.0), netloc::FrameOrientation(5.5), netloc::FrameOrientation(0.7)};

  const netloc::Configuration config(truth, 2);
  const auto triples =
      netloc::measure_constraints(g, config, frames, netloc::MeasurementMode::LocalRelPos, 0.0);
  const auto cm = netloc::assemble_constraints(g, triples);
  const auto closed = netloc::closed_form_localize(cm, config.leaders());

  netloc::LocalizationProblem problem{g, frames, netloc::MeasurementMode::LocalRelPos,
                                      netloc::RigidMotion::stationary(truth)};
  netloc::EstimatorState start{{{0, 0}, {0, 0}, {0, 0}, {0, 0}}, 0.0};
  const auto log = netloc::integrate(start, problem, 150.0, 0.01);

  std::printf("agent  true            closed form     estimator\n");
  for (std::size_t f = 0; f < 4; ++f) {
    const auto p = truth[2 + f], c = closed(static_cast<Eigen::Index>(f));
    const auto e = log.records.back().estimates[f];
    std::printf("%zu      (%6.3f,%6.3f) (%6.3f,%6.3f) (%6.3f,%6.3f)\n", f + 3, p.real(), p.imag(),
                c.real(), c.imag(), e.real(), e.imag());
  }
  std::printf("final estimation error %.3e\n", log.records.back().err_est);
}
