#ifndef NETLOC_SCENARIO_HPP_
#define NETLOC_SCENARIO_HPP_

// YAML scenario files. Agents are labelled 1..n in the file, leaders first.
// See docs/scenario_format.md for the schema.

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "netloc/errors.hpp"
#include "netloc/geometry.hpp"
#include "netloc/graph.hpp"
#include "netloc/motion.hpp"
#include "netloc/network_measurement.hpp"
#include "netloc/parameter_estimator.hpp"
#include "netloc/trajectory_log.hpp"

namespace netloc {

struct ParameterEstimatorSetup {
  PathStructure paths;
  double gamma = 2.0;
  /// Added to every entry of psi_i(0) = p*(0); one per follower.
  std::vector<Complex> initial_offsets;
};

struct CollisionBounds {
  std::vector<double> leaders;  // eps_i
  double followers = 0.0;       // eps_p
};

struct Scenario {
  enum class Kind { Localization, Formation };

  std::string name;
  Kind kind = Kind::Formation;
  SensingGraph graph;
  LayerAssignment layers;
  std::vector<ComplexPoint> initial_positions;
  MeasurementMode mode = MeasurementMode::LocalRelPos;
  std::vector<FrameOrientation> orientations;
  /// Initial p_hat_f - p_f, one per follower.
  std::vector<Complex> initial_estimate_error;

  /// Localization only: ground-truth motion in the global frame.
  RigidMotion truth{};

  /// Formation only: desired formation in the virtual frame.
  RigidMotion desired{};
  double gain = 1.0;
  std::optional<ParameterEstimatorSetup> estimator{};
  std::optional<CollisionBounds> collision_bounds{};

  double step = 1e-3;
  double horizon = 10.0;
  std::optional<std::string> output_path{};
  ExportFormat output_format = ExportFormat::Csv;
};

namespace detail {

class ScenarioReader {
 public:
  explicit ScenarioReader(YAML::Node root) : root_(std::move(root)) {}

  [[noreturn]] static void fail(const std::string& what, const std::string& field,
                                const YAML::Node& at) {
    const int line = at.IsDefined() && at.Mark().line >= 0 ? at.Mark().line + 1 : 0;
    throw ParseError(what, field, line);
  }

  static YAML::Node require(const YAML::Node& parent, const std::string& key,
                            const std::string& field) {
    if (!parent.IsMap()) fail("expected a mapping", field, parent);
    YAML::Node n = parent[key];
    if (!n) fail("missing required field", field.empty() ? key : field + "." + key, parent);
    return n;
  }

  template <class T>
  static T scalar(const YAML::Node& n, const std::string& field) {
    if (!n.IsScalar()) fail("expected a scalar", field, n);
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail("cannot convert '" + n.Scalar() + "'", field, n);
    }
  }

  static double number(const YAML::Node& n, const std::string& field) {
    const double v = scalar<double>(n, field);
    if (!std::isfinite(v)) fail("value must be finite", field, n);
    return v;
  }

  static double positive(const YAML::Node& n, const std::string& field) {
    const double v = number(n, field);
    if (!(v > 0.0)) fail("value must be positive", field, n);
    return v;
  }

  static Complex point(const YAML::Node& n, const std::string& field) {
    if (!n.IsSequence() || n.size() != 2) fail("expected [x, y]", field, n);
    return {number(n[0], field), number(n[1], field)};
  }

  static std::vector<Complex> points(const YAML::Node& n, const std::string& field) {
    if (!n.IsSequence()) fail("expected a list of [x, y] points", field, n);
    std::vector<Complex> out;
    for (std::size_t i = 0; i < n.size(); ++i)
      out.push_back(point(n[i], field + "[" + std::to_string(i) + "]"));
    return out;
  }

  AgentId agent(const YAML::Node& n, const std::string& field) const {
    const long v = scalar<long>(n, field);
    if (v < 1 || static_cast<std::size_t>(v) > n_)
      fail("agent label " + std::to_string(v) + " is undefined", field, n);
    return static_cast<AgentId>(v - 1);
  }

  std::vector<AgentId> agents(const YAML::Node& n, const std::string& field) const {
    if (!n.IsSequence()) fail("expected a list of agent labels", field, n);
    std::vector<AgentId> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(agent(n[i], field));
    return out;
  }

  static ReferencePath path(const YAML::Node& n, const std::string& field) {
    if (!n) return {};
    const ComplexPoint start = n["start"] ? point(n["start"], field + ".start") : ComplexPoint{};
    const double heading =
        n["heading_deg"] ? number(n["heading_deg"], field + ".heading_deg") * std::numbers::pi / 180.0
                         : 0.0;
    std::vector<PathSegment> segs;
    if (YAML::Node s = n["segments"]) {
      if (!s.IsSequence()) fail("expected a list of segments", field + ".segments", s);
      for (std::size_t i = 0; i < s.size(); ++i) {
        const std::string f = field + ".segments[" + std::to_string(i) + "]";
        PathSegment seg;
        const std::string kind = scalar<std::string>(require(s[i], "kind", f), f + ".kind");
        if (kind == "line")
          seg.kind = PathSegment::Kind::Line;
        else if (kind == "arc")
          seg.kind = PathSegment::Kind::Arc;
        else
          fail("segment kind must be line or arc", f + ".kind", s[i]["kind"]);
        seg.duration = number(require(s[i], "duration", f), f + ".duration");
        if (seg.duration < 0.0) fail("duration must be non-negative", f + ".duration", s[i]);
        seg.speed = number(require(s[i], "speed", f), f + ".speed");
        if (seg.kind == PathSegment::Kind::Arc)
          seg.turn_rate = number(require(s[i], "turn_rate", f), f + ".turn_rate");
        segs.push_back(seg);
      }
    }
    return ReferencePath(start, heading, std::move(segs));
  }

  Scenario read() {
    const std::string name = root_["name"] ? scalar<std::string>(root_["name"], "name") : "";
    const long n = scalar<long>(require(root_, "agents", ""), "agents");
    const long m = scalar<long>(require(root_, "leaders", ""), "leaders");
    if (n < 1) fail("agent count must be positive", "agents", root_["agents"]);
    if (m < 0 || m > n) fail("leader count out of range", "leaders", root_["leaders"]);
    n_ = static_cast<std::size_t>(n);
    m_ = static_cast<std::size_t>(m);
    const std::size_t nf = n_ - m_;

    auto positions = points(require(root_, "initial_positions", ""), "initial_positions");
    if (positions.size() != n_)
      fail("expected one position per agent", "initial_positions", root_["initial_positions"]);

    MeasurementMode mode = MeasurementMode::LocalRelPos;
    if (YAML::Node mm = root_["measurement"]) {
      try {
        mode = parse_measurement_mode(scalar<std::string>(mm, "measurement"));
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        fail(e.what(), "measurement", mm);
      }
    }

    // Sensing graph
    const YAML::Node sensing = require(root_, "sensing", "");
    const YAML::Node des = require(sensing, "designated", "sensing");
    if (!des.IsMap()) fail("expected follower: [j, k] entries", "sensing.designated", des);
    std::map<AgentId, NeighborPair> designated;
    std::set<Edge> edges;
    for (auto it = des.begin(); it != des.end(); ++it) {
      const AgentId i = agent(it->first, "sensing.designated");
      const auto pair = agents(it->second, "sensing.designated." + std::to_string(i + 1));
      if (pair.size() != 2)
        fail("a designated pair has exactly two agents",
             "sensing.designated." + std::to_string(i + 1), it->second);
      designated[i] = {pair[0], pair[1]};
      edges.insert({i, pair[0]});
      edges.insert({i, pair[1]});
    }
    if (YAML::Node extra = sensing["extra_edges"]) {
      if (!extra.IsSequence()) fail("expected a list of [i, j] edges", "sensing.extra_edges", extra);
      for (std::size_t e = 0; e < extra.size(); ++e) {
        const auto ij = agents(extra[e], "sensing.extra_edges");
        if (ij.size() != 2) fail("an edge has two endpoints", "sensing.extra_edges", extra[e]);
        edges.insert({ij[0], ij[1]});
      }
    }
    SensingGraph graph(n_, m_, std::move(edges), std::move(designated));

    const YAML::Node lay = require(root_, "layers", "");
    if (!lay.IsSequence()) fail("expected a list of layers", "layers", lay);
    std::vector<std::vector<AgentId>> layer_lists;
    for (std::size_t h = 0; h < lay.size(); ++h)
      layer_lists.push_back(agents(lay[h], "layers[" + std::to_string(h) + "]"));
    LayerAssignment layers = LayerAssignment::from_layers(n_, layer_lists);
    ValidationReport report = validate_kappa_layer(graph, layers);
    if (!report.accepted) throw KappaLayerViolation(std::move(report));

    std::vector<FrameOrientation> orientations(n_);
    if (YAML::Node ori = root_["orientations"]) {
      if (!ori.IsMap()) fail("expected agent: {theta0_deg, ...} entries", "orientations", ori);
      for (auto it = ori.begin(); it != ori.end(); ++it) {
        const AgentId i = agent(it->first, "orientations");
        const std::string f = "orientations." + std::to_string(i + 1);
        const YAML::Node o = it->second;
        const double deg = std::numbers::pi / 180.0;
        const double th = o["theta0_deg"] ? number(o["theta0_deg"], f + ".theta0_deg") * deg : 0.0;
        const double amp =
            o["amplitude_deg"] ? number(o["amplitude_deg"], f + ".amplitude_deg") * deg : 0.0;
        const double om = o["omega"] ? number(o["omega"], f + ".omega") : 0.0;
        orientations[i] = FrameOrientation(th, amp, om);
      }
    }

    std::vector<Complex> est_err(nf, Complex{});
    if (YAML::Node e = root_["initial_estimate_error"]) {
      est_err = points(e, "initial_estimate_error");
      if (est_err.size() != nf)
        fail("expected one offset per follower", "initial_estimate_error", e);
    }

    Scenario sc{.name = name,
                .kind = Scenario::Kind::Formation,
                .graph = std::move(graph),
                .layers = std::move(layers),
                .initial_positions = positions,
                .mode = mode,
                .orientations = std::move(orientations),
                .initial_estimate_error = std::move(est_err)};

    const YAML::Node loc = root_["localization"];
    const YAML::Node form = root_["formation"];
    if (loc && form) fail("give either localization or formation, not both", "formation", form);
    if (!loc && !form) fail("missing localization or formation section", "", root_);

    if (loc) {
      sc.kind = Scenario::Kind::Localization;
      const bool rotate = loc["rotate_with_heading"] &&
                          scalar<bool>(loc["rotate_with_heading"], "localization.rotate_with_heading");
      sc.truth = RigidMotion(positions, path(loc["path"], "localization.path"), rotate);
    } else {
      read_formation(form, sc);
    }

    if (YAML::Node sim = root_["simulation"]) {
      if (sim["step"]) sc.step = positive(sim["step"], "simulation.step");
      if (sim["horizon"]) sc.horizon = positive(sim["horizon"], "simulation.horizon");
    }
    if (YAML::Node out = root_["output"]) {
      if (out["path"]) sc.output_path = scalar<std::string>(out["path"], "output.path");
      if (out["format"]) {
        try {
          sc.output_format = parse_export_format(scalar<std::string>(out["format"], "output.format"));
        } catch (const ParseError&) {
          throw;
        } catch (const Error& e) {
          fail(e.what(), "output.format", out["format"]);
        }
      }
    }
    return sc;
  }

 private:
  void read_formation(const YAML::Node& form, Scenario& sc) {
    const std::size_t nf = n_ - m_;
    if (form["gain"]) sc.gain = positive(form["gain"], "formation.gain");
    const YAML::Node d = require(form, "desired", "formation");

    // Desired shape in the virtual frame, relative to the path start.
    std::vector<ComplexPoint> shape;
    const YAML::Node sh = require(d, "shape", "formation.desired");
    if (sh.IsScalar()) {
      if (sh.Scalar() != "initial") fail("shape must be 'initial' or a point list",
                                         "formation.desired.shape", sh);
      for (auto p : sc.initial_positions) shape.push_back(p - sc.initial_positions[0]);
    } else {
      shape = points(sh, "formation.desired.shape");
      if (shape.size() != n_) fail("expected one point per agent", "formation.desired.shape", sh);
    }

    ShapeMorph morph;
    if (YAML::Node mo = d["morph"]) {
      morph.to = points(require(mo, "to", "formation.desired.morph"), "formation.desired.morph.to");
      if (morph.to.size() != n_)
        fail("expected one point per agent", "formation.desired.morph.to", mo["to"]);
      const double scale = mo["scale"] ? positive(mo["scale"], "formation.desired.morph.scale") : 1.0;
      const double rot = mo["rotate_deg"]
                             ? number(mo["rotate_deg"], "formation.desired.morph.rotate_deg")
                             : 0.0;
      const Complex r = scale * std::polar(1.0, rot * std::numbers::pi / 180.0);
      for (auto& p : morph.to) p *= r;
      morph.duration = number(require(mo, "duration", "formation.desired.morph"),
                              "formation.desired.morph.duration");
      if (morph.duration < 0.0)
        fail("duration must be non-negative", "formation.desired.morph.duration", mo["duration"]);
    }
    const bool rotate = d["rotate_with_heading"] &&
                        scalar<bool>(d["rotate_with_heading"], "formation.desired.rotate_with_heading");
    sc.desired = RigidMotion(std::move(shape), path(d["path"], "formation.desired.path"), rotate,
                             std::move(morph));

    if (YAML::Node pe = form["parameter_estimator"]) {
      const std::string f = "formation.parameter_estimator";
      ParameterEstimatorSetup setup;
      if (pe["gamma"]) setup.gamma = positive(pe["gamma"], f + ".gamma");
      const YAML::Node ps = require(pe, "paths", f);
      if (!ps.IsSequence()) fail("expected a list of paths", f + ".paths", ps);
      std::vector<std::vector<AgentId>> paths;
      for (std::size_t i = 0; i < ps.size(); ++i) paths.push_back(agents(ps[i], f + ".paths"));
      std::map<AgentId, AgentId> copies;
      if (YAML::Node cp = pe["copies"]) {
        if (!cp.IsMap()) fail("expected follower: source entries", f + ".copies", cp);
        for (auto it = cp.begin(); it != cp.end(); ++it)
          copies[agent(it->first, f + ".copies")] = agent(it->second, f + ".copies");
      }
      setup.paths = PathStructure(n_, m_, std::move(paths), std::move(copies));
      setup.initial_offsets.assign(nf, Complex{});
      if (YAML::Node off = pe["initial_offset"]) {
        setup.initial_offsets = points(off, f + ".initial_offset");
        if (setup.initial_offsets.size() != nf)
          fail("expected one offset per follower", f + ".initial_offset", off);
      }
      sc.estimator = std::move(setup);
    }

    if (YAML::Node cb = form["collision_bounds"]) {
      const std::string f = "formation.collision_bounds";
      CollisionBounds b;
      const YAML::Node l = require(cb, "leaders", f);
      if (!l.IsSequence() || l.size() != m_) fail("expected one bound per leader", f + ".leaders", l);
      for (std::size_t i = 0; i < l.size(); ++i) b.leaders.push_back(number(l[i], f + ".leaders"));
      b.followers = number(require(cb, "followers", f), f + ".followers");
      sc.collision_bounds = std::move(b);
    }
  }

  YAML::Node root_;
  std::size_t n_ = 0, m_ = 0;
};

}  // namespace detail

inline Scenario parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, "", e.mark.line >= 0 ? e.mark.line + 1 : 0);
  }
  if (!root.IsMap()) throw ParseError("scenario must be a mapping", "", 1);
  return detail::ScenarioReader(root).read();
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'", "", 0);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

}  // namespace netloc

#endif  // NETLOC_SCENARIO_HPP_
