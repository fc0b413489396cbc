#include "mmot/report.hpp"

#include <cmath>
#include <cstdio>

namespace mmot {

namespace {

void dump(const Json& j, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) { out += "{}"; return; }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(key).dump() + ": ";
        dump(value, indent + 2, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) { out += "[]"; return; }
      // arrays of scalars stay on one line; they are long residual series
      bool flat = true;
      for (const auto& v : j) flat = flat && !v.is_structured();
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad;
        dump(v, indent + 2, out);
      }
      out += flat ? "]" : "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) { out += "null"; return; }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const Json& j) {
  std::string out;
  dump(j, 0, out);
  out += '\n';
  return out;
}

Json mask_timing(const Json& j) {
  if (j.is_object()) {
    Json out = Json::object();
    for (const auto& [key, value] : j.items())
      if (key != "timing") out[key] = mask_timing(value);
    return out;
  }
  if (j.is_array()) {
    Json out = Json::array();
    for (const auto& v : j) out.push_back(mask_timing(v));
    return out;
  }
  return j;
}

Json config_to_json(const SinkhornConfig& config) {
  return Json{{"epsilon", config.epsilon},
              {"tol", config.tol},
              {"max_iter", config.itr_max},
              {"stabilize", config.stabilize},
              {"tau", config.tau},
              {"residual_mode", std::string(to_string(config.residual_mode))}};
}

Json report_to_json(const SolveReport& report) {
  Json j;
  j["solver"] = report.solver;
  j["distance"] = report.distance;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  j["final_residual"] = report.final_residual();
  j["residuals"] = report.trace.residuals;
  j["absorptions"] = report.trace.absorptions;
  j["config"] = config_to_json(report.config);
  j["warnings"] = report.warnings;
  j["timing"] = Json{{"elapsed_s", report.elapsed_s}, {"iteration_elapsed_s", report.trace.elapsed_s}};
  return j;
}

Json report_header(const std::string& command) {
  return Json{{"schema", kReportSchema}, {"command", command}};
}

}  // namespace mmot
