// netloc-sim: validate scenario graphs, run localization or integrated
// formation simulations, and export trajectory logs.
//
// Exit codes: 0 ok, 2 validation failure, 3 runtime divergence.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "netloc/netloc.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kDivergence = 3;

struct Options {
  std::string scenario;
  std::string format;
  std::string out;
};

void print_summary(const netloc::RunSummary& s) {
  std::printf("steps                 %zu\n", s.steps);
  std::printf("final time            %.6g\n", s.final_time);
  std::printf("err_track_leaders     %.6e\n", s.final_err_track_leaders);
  std::printf("err_track_followers   %.6e\n", s.final_err_track_followers);
  std::printf("err_est               %.6e\n", s.final_err_est);
  if (s.final_psi_error)
    std::printf("psi error             %.6e (initial %.6e)\n", *s.final_psi_error,
                s.initial_psi_error.value_or(0.0));
  std::printf("min pairwise distance %.6e\n", s.min_distance);
  std::printf("max cond(W_ff)        %.6e\n", s.max_condition);
  if (s.certificate)
    std::printf("collision certificate %s (margin %.6e, relaxed %.6e)\n",
                s.certificate->holds ? "holds" : "fails", s.certificate->margin_global,
                s.certificate->relaxed_margin);
}

int export_if_requested(const netloc::Scenario& sc, const netloc::TrajectoryLog& log,
                        const Options& opt) {
  std::optional<std::string> path = sc.output_path;
  if (!opt.out.empty()) path = opt.out;
  if (!path) return kOk;
  netloc::ExportFormat fmt = sc.output_format;
  if (!opt.format.empty()) fmt = netloc::parse_export_format(opt.format);
  netloc::export_log(log, fmt, *path);
  std::printf("wrote %s\n", path->c_str());
  return kOk;
}

int finish_run(const netloc::Scenario& sc, const netloc::RunResult& r, const Options& opt) {
  print_summary(r.summary);
  export_if_requested(sc, r.log, opt);
  if (!(r.summary.min_distance > 0.0) || !std::isfinite(r.summary.max_condition) ||
      r.summary.max_condition >= 1.0 / netloc::kInvertibilityTol) {
    std::fprintf(stderr, "run violated a safety invariant\n");
    return kDivergence;
  }
  return kOk;
}

int check_graph(const Options& opt) {
  netloc::Scenario sc = netloc::load_scenario(opt.scenario);
  const auto report = netloc::validate_kappa_layer(sc.graph, sc.layers);
  std::cout << report.describe();
  const auto truth = netloc::Configuration(sc.initial_positions, sc.graph.leader_count());
  const auto triples = netloc::measure_constraints(sc.graph, truth, sc.orientations, sc.mode, 0.0);
  const auto check = netloc::localizability_check(netloc::assemble_constraints(sc.graph, triples));
  std::printf("initial configuration: %s (cond(W_ff) = %.6e)\n",
              check.invertible ? "localizable" : "not localizable", check.condition_number);
  return check.invertible ? kOk : kValidation;
}

/// Localization only. A formation scenario is localized along its desired
/// trajectory, placed in the global frame.
int localize(const Options& opt) {
  netloc::Scenario sc = netloc::load_scenario(opt.scenario);
  if (sc.kind == netloc::Scenario::Kind::Formation) {
    const auto& d = sc.desired;
    const netloc::ReferencePath& p = d.path();
    netloc::ReferencePath global(p.start() + sc.initial_positions[0], p.heading(), p.segments());
    sc.truth = netloc::RigidMotion(d.offsets(), global, d.rotates(), d.morph());
    sc.kind = netloc::Scenario::Kind::Localization;
    sc.estimator.reset();
  }
  return finish_run(sc, netloc::run(sc), opt);
}

int simulate(const Options& opt) {
  netloc::Scenario sc = netloc::load_scenario(opt.scenario);
  return finish_run(sc, netloc::run(sc), opt);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed localization and formation control simulator"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub, bool with_output) {
    sub->add_option("scenario", opt.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
    if (with_output) {
      sub->add_option("--format", opt.format, "Export format")->check(CLI::IsMember({"csv", "json"}));
      sub->add_option("--out", opt.out, "Write the trajectory log to this file");
    }
  };
  CLI::App* cg = app.add_subcommand("check-graph", "Validate the layered sensing graph");
  add_common(cg, false);
  CLI::App* lo = app.add_subcommand("localize", "Run distributed localization only");
  add_common(lo, true);
  CLI::App* si = app.add_subcommand("simulate", "Run the scenario (formation control if given)");
  add_common(si, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (cg->parsed()) return check_graph(opt);
    if (lo->parsed()) return localize(opt);
    return simulate(opt);
  } catch (const netloc::KappaLayerViolation& e) {
    std::cerr << "validation failed: " << e.what() << '\n' << e.report().describe();
    return kValidation;
  } catch (const netloc::ParseError& e) {
    std::cerr << "scenario error";
    if (!e.field().empty()) std::cerr << " in '" << e.field() << "'";
    if (e.line() > 0) std::cerr << " (line " << e.line() << ")";
    std::cerr << ": " << e.what() << '\n';
    return kValidation;
  } catch (const netloc::ValidationError& e) {
    std::cerr << "validation failed: " << e.what() << '\n';
    return kValidation;
  } catch (const netloc::LocalizabilityLost& e) {
    std::cerr << "localizability lost at t = " << e.time() << " (cond " << e.condition()
              << "): " << e.what() << '\n';
    return kDivergence;
  } catch (const netloc::StepRejected& e) {
    std::cerr << "step rejected at t = " << e.time() << ": " << e.what() << '\n';
    return kDivergence;
  } catch (const netloc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDivergence;
  }
}
