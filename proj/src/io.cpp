#include "mgcc/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mgcc/errors.hpp"

namespace mgcc::io {

using nlohmann::json;

namespace {

double number_field(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  if (!j.at(key).is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

std::optional<double> optional_number(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return number_field(j, key);
}

json rounded_array(std::span<const double> v) {
  json arr = json::array();
  for (double x : v) arr.push_back(round12(x));
  return arr;
}

json rounded_matrix(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(rounded_array(m.row(r)));
  return rows;
}

json optional_value(const std::optional<double>& v) {
  return v ? json(round12(*v)) : json(nullptr);
}

}  // namespace

FundamentalDiagram parse_section(const json& j) {
  if (!j.is_object()) throw ConfigError("section spec must be a JSON object");
  const SectionParams params(number_field(j, "length_km"), number_field(j, "free_speed_kmh"),
                             number_field(j, "jam_density_veh_per_km"));
  const std::optional<double> q_override = optional_number(j, "q_max_override_veh_per_h");

  if (!j.contains("model") || j.at("model") == "linear") {
    return FundamentalDiagram::linear(params, q_override);
  }
  const json& model = j.at("model");
  if (model.is_object() && model.contains("exponential") && model.at("exponential").is_object()) {
    if (q_override) throw ConfigError("q_max override applies to the linear model only");
    const json& e = model.at("exponential");
    return FundamentalDiagram::exponential(params, {number_field(e, "beta"), number_field(e, "gamma")});
  }
  throw ConfigError("model must be \"linear\" or {\"exponential\": {\"beta\", \"gamma\"}}");
}

std::vector<double> LambdaSweep::points() const {
  std::vector<double> out;
  const auto count = static_cast<long long>(std::floor((to - from) / step + 1e-9));
  for (long long k = 0; k <= count; ++k) out.push_back(from + static_cast<double>(k) * step);
  return out;
}

RunConfig parse_run_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  RunConfig cfg;
  cfg.config_hash = hex64(fnv1a(text));
  if (!j.contains("sections") || !j.at("sections").is_array() || j.at("sections").empty()) {
    throw ConfigError("config needs a non-empty 'sections' array");
  }
  for (const json& s : j.at("sections")) cfg.sections.push_back(s);

  cfg.lambda = optional_number(j, "lambda");
  if (j.contains("lambda_sweep")) {
    const json& s = j.at("lambda_sweep");
    if (!s.is_object()) throw ConfigError("'lambda_sweep' must be an object");
    cfg.sweep = LambdaSweep{number_field(s, "from"), number_field(s, "to"), number_field(s, "step")};
    if (!(cfg.sweep->step > 0.0)) throw ConfigError("sweep step must be > 0");
    if (cfg.sweep->from > cfg.sweep->to) throw ConfigError("sweep needs from <= to");
    if (cfg.sweep->from < 0.0) throw ConfigError("sweep rates must be >= 0");
  }
  if (cfg.lambda && cfg.sweep) throw ConfigError("give either 'lambda' or 'lambda_sweep', not both");

  if (j.contains("solver")) {
    const std::string s = j.at("solver").is_string() ? j.at("solver").get<std::string>() : "";
    if (s == "bisection") cfg.solver = SolverKind::Bisection;
    else if (s == "iteration") cfg.solver = SolverKind::Iteration;
    else throw ConfigError("solver must be \"bisection\" or \"iteration\"");
  }
  if (j.contains("form")) {
    const std::string f = j.at("form").is_string() ? j.at("form").get<std::string>() : "";
    if (f == "flow") cfg.form = DistributionForm::Flow;
    else if (f == "speed") cfg.form = DistributionForm::Speed;
    else throw ConfigError("form must be \"flow\" or \"speed\"");
  }
  cfg.tol = optional_number(j, "tol");
  if (cfg.tol && !(*cfg.tol > 0.0)) throw ConfigError("tol must be > 0");
  cfg.theta0 = optional_number(j, "theta0");
  if (j.contains("max_iter")) {
    if (!j.at("max_iter").is_number_integer() || j.at("max_iter").get<long long>() < 1) {
      throw ConfigError("max_iter must be a positive integer");
    }
    cfg.max_iter = j.at("max_iter").get<int>();
  }
  if (j.contains("threads")) {
    if (!j.at("threads").is_number_unsigned()) throw ConfigError("threads must be a non-negative integer");
    cfg.threads = j.at("threads").get<unsigned>();
  }

  if (!j.contains("output") || !j.at("output").is_object()) throw ConfigError("config needs an 'output' object");
  const json& out = j.at("output");
  if (!out.contains("path") || !out.at("path").is_string() || out.at("path").get<std::string>().empty()) {
    throw ConfigError("output.path must be a non-empty string");
  }
  cfg.output_path = out.at("path").get<std::string>();
  if (out.contains("format")) {
    const std::string f = out.at("format").is_string() ? out.at("format").get<std::string>() : "";
    if (f == "csv") cfg.format = OutputFormat::Csv;
    else if (f == "json") cfg.format = OutputFormat::Json;
    else throw ConfigError("output.format must be \"csv\" or \"json\"");
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format12(double v) {
  if (v == 0.0) return "0";  // also folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double round12(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format12(v).c_str(), nullptr);
}

json to_json(const StationaryDistribution& d, double lambda) {
  json j;
  j["capacity"] = d.capacity();
  j["lambda"] = round12(lambda);
  j["probs"] = rounded_array(d.probs());
  j["source"] = to_string(d.source());
  if (d.conditioned_on()) j["conditioned_on_n2"] = *d.conditioned_on();
  return j;
}

json to_json(const PerformanceReport& r) {
  json j;
  j["arrival_rate"] = round12(r.arrival_rate);
  j["blocking_probability"] = round12(r.blocking_probability);
  j["throughput"] = round12(r.throughput);
  j["expected_count"] = round12(r.expected_count);
  j["expected_time_hours"] = optional_value(r.expected_time);
  j["expected_time_defined"] = r.expected_time_defined();
  return j;
}

json to_json(const TandemSolution& s) {
  json j;
  j["lambda"] = round12(s.lambda);
  j["theta"] = round12(s.theta);
  j["fixed_point"] = round12(s.fixed_point);
  j["residual"] = round12(s.residual);
  j["delta"] = round12(s.delta);
  j["mode"] = to_string(s.mode);
  j["adherence"] = s.adherence ? json::array({round12(s.adherence->first), round12(s.adherence->second)})
                               : json(nullptr);
  j["trace"] = rounded_array(s.trace);
  j["p1"] = to_json(s.p1, s.lambda);
  j["p2"] = to_json(s.p2, s.fixed_point);
  j["p1_given_2"] = rounded_matrix(s.p1_given_2);
  j["joint"] = rounded_matrix(s.joint);
  j["reports"] = {{"section1", to_json(s.section1)}, {"section2", to_json(s.section2)}};
  return j;
}

json to_json(const OracleComparison& c) {
  json j;
  j["lambda"] = round12(c.lambda);
  j["tv_p1"] = round12(c.tv_p1);
  j["tv_p2"] = round12(c.tv_p2);
  j["theta_decomposition"] = round12(c.theta_decomposition);
  j["theta_joint"] = round12(c.theta_joint);
  j["joint_residual"] = round12(c.joint_residual);
  return j;
}

std::string distribution_csv(const StationaryDistribution& d) {
  std::string out = "n,prob\n";
  for (int n = 0; n <= d.capacity(); ++n) {
    out += std::to_string(n) + "," + format12(d[static_cast<std::size_t>(n)]) + "\n";
  }
  return out;
}

std::string sweep_row(const TandemSolution& s) {
  auto opt = [](const std::optional<double>& v) { return v ? format12(*v) : std::string(); };
  std::string row;
  row += format12(s.lambda) + ",";
  row += format12(s.theta) + ",";
  row += format12(s.delta) + ",";
  row += to_string(s.mode) + ",";
  row += format12(s.p1.blocking()) + ",";
  row += format12(s.p2.blocking()) + ",";
  row += format12(s.section1.expected_count) + ",";
  row += format12(s.section2.expected_count) + ",";
  row += opt(s.section1.expected_time) + ",";
  row += opt(s.section2.expected_time) + ",";
  row += format12(s.residual);
  return row;
}

void write_file(const std::string& path, std::string_view text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace mgcc::io
