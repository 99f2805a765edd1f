#ifndef NETLOC_TRAJECTORY_LOG_HPP_
#define NETLOC_TRAJECTORY_LOG_HPP_

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "netloc/errors.hpp"
#include "netloc/geometry.hpp"

namespace netloc {

struct TrajectoryRecord {
  double t = 0.0;
  std::vector<ComplexPoint> positions;   // all agents
  std::vector<ComplexPoint> estimates;   // followers
  std::optional<double> psi_error;       // max_i |psi_i - p*|, parameter estimator only
  double err_track_leaders = 0.0;        // |p_l - p*_l|
  double err_track_followers = 0.0;      // |p_f - p*_f|
  double err_est = 0.0;                  // |p_hat_f - p_f|
  double min_dist = 0.0;
  std::vector<double> control_magnitudes;  // |v_i| for all agents
  double cond_wff = 0.0;

  bool operator==(const TrajectoryRecord&) const = default;
};

struct TrajectoryLog {
  std::size_t agent_count = 0;
  std::size_t leader_count = 0;
  std::vector<TrajectoryRecord> records;

  bool operator==(const TrajectoryLog&) const = default;
};

enum class ExportFormat { Csv, Json };

inline ExportFormat parse_export_format(const std::string& s) {
  if (s == "csv") return ExportFormat::Csv;
  if (s == "json") return ExportFormat::Json;
  throw Error("unknown export format '" + s + "' (expected csv or json)");
}

inline void write_csv(const TrajectoryLog& log, std::ostream& os) {
  os << "t";
  for (std::size_t i = 1; i <= log.agent_count; ++i) os << ",x" << i << ",y" << i;
  for (std::size_t i = log.leader_count + 1; i <= log.agent_count; ++i)
    os << ",xhat" << i << ",yhat" << i;
  os << ",err_track_leaders,err_track_followers,err_est,min_dist,cond_Wff\n";

  os << std::setprecision(17);
  for (const auto& r : log.records) {
    os << r.t;
    for (auto p : r.positions) os << ',' << p.real() << ',' << p.imag();
    for (auto p : r.estimates) os << ',' << p.real() << ',' << p.imag();
    os << ',' << r.err_track_leaders << ',' << r.err_track_followers << ',' << r.err_est << ','
       << r.min_dist << ',' << r.cond_wff << '\n';
  }
}

namespace detail {

inline nlohmann::json points_to_json(const std::vector<ComplexPoint>& pts) {
  auto arr = nlohmann::json::array();
  for (auto p : pts) arr.push_back({p.real(), p.imag()});
  return arr;
}

inline std::vector<ComplexPoint> points_from_json(const nlohmann::json& j) {
  std::vector<ComplexPoint> pts;
  for (const auto& p : j) pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  return pts;
}

}  // namespace detail

inline nlohmann::json to_json(const TrajectoryLog& log) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : log.records) {
    nlohmann::json j;
    j["t"] = r.t;
    j["positions"] = detail::points_to_json(r.positions);
    j["estimates"] = detail::points_to_json(r.estimates);
    j["psi_error"] = r.psi_error ? nlohmann::json(*r.psi_error) : nlohmann::json(nullptr);
    j["err_track_leaders"] = r.err_track_leaders;
    j["err_track_followers"] = r.err_track_followers;
    j["err_est"] = r.err_est;
    j["min_dist"] = r.min_dist;
    j["control_magnitudes"] = r.control_magnitudes;
    j["cond_Wff"] = r.cond_wff;
    records.push_back(std::move(j));
  }
  return {{"agent_count", log.agent_count},
          {"leader_count", log.leader_count},
          {"records", std::move(records)}};
}

inline TrajectoryLog trajectory_log_from_json(const nlohmann::json& j) {
  TrajectoryLog log;
  log.agent_count = j.at("agent_count").get<std::size_t>();
  log.leader_count = j.at("leader_count").get<std::size_t>();
  for (const auto& jr : j.at("records")) {
    TrajectoryRecord r;
    r.t = jr.at("t").get<double>();
    r.positions = detail::points_from_json(jr.at("positions"));
    r.estimates = detail::points_from_json(jr.at("estimates"));
    if (!jr.at("psi_error").is_null()) r.psi_error = jr.at("psi_error").get<double>();
    r.err_track_leaders = jr.at("err_track_leaders").get<double>();
    r.err_track_followers = jr.at("err_track_followers").get<double>();
    r.err_est = jr.at("err_est").get<double>();
    r.min_dist = jr.at("min_dist").get<double>();
    r.control_magnitudes = jr.at("control_magnitudes").get<std::vector<double>>();
    r.cond_wff = jr.at("cond_Wff").get<double>();
    log.records.push_back(std::move(r));
  }
  return log;
}

inline void write_json(const TrajectoryLog& log, std::ostream& os) { os << to_json(log).dump(1); }

inline void export_log(const TrajectoryLog& log, ExportFormat format, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  if (format == ExportFormat::Csv)
    write_csv(log, out);
  else
    write_json(log, out);
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace netloc

#endif  // NETLOC_TRAJECTORY_LOG_HPP_
