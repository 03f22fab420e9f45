#pragma once

// Config ingestion and result serialization (JSON via nlohmann::json, CSV).
//
// Numbers in emitted files are rounded to 12 significant digits so that
// identical inputs give byte-identical files.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mgcc/diagram.hpp"
#include "mgcc/distribution.hpp"
#include "mgcc/oracle.hpp"
#include "mgcc/section.hpp"
#include "mgcc/tandem.hpp"

namespace mgcc::io {

/// {"length_km", "free_speed_kmh", "jam_density_veh_per_km",
///  "q_max_override_veh_per_h"?, "model": "linear" | {"exponential": {"beta", "gamma"}}}
/// Missing/mistyped fields raise ConfigError; bad values raise DomainError.
FundamentalDiagram parse_section(const nlohmann::json& j);

struct LambdaSweep {
  double from = 0.0;
  double to = 0.0;
  double step = 0.0;
  std::vector<double> points() const;
};

enum class SolverKind { Bisection, Iteration };
enum class OutputFormat { Csv, Json };
enum class DistributionForm { Flow, Speed };

struct RunConfig {
  std::vector<nlohmann::json> sections;
  std::optional<double> lambda;
  std::optional<LambdaSweep> sweep;
  SolverKind solver = SolverKind::Bisection;
  DistributionForm form = DistributionForm::Flow;
  std::optional<double> tol;
  int max_iter = 10000;
  std::optional<double> theta0;
  unsigned threads = 0;  // 0: hardware concurrency
  std::string output_path;
  OutputFormat format = OutputFormat::Json;
  /// FNV-1a of the raw config text, hex.
  std::string config_hash;
};

RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::string& path);

std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// Round to 12 significant digits (the precision written to disk).
double round12(double v);
std::string format12(double v);

nlohmann::json to_json(const StationaryDistribution& d, double lambda);
nlohmann::json to_json(const PerformanceReport& r);
nlohmann::json to_json(const TandemSolution& s);
nlohmann::json to_json(const OracleComparison& c);

std::string distribution_csv(const StationaryDistribution& d);

inline constexpr std::string_view kSweepHeader =
    "lambda,theta,delta,mode,p1_block,p2_block,n1_mean,n2_mean,w1_hours,w2_hours,residual";

/// One sweep row matching kSweepHeader (no trailing newline).
std::string sweep_row(const TandemSolution& s);

/// Writes text to path, creating parent directories.
void write_file(const std::string& path, std::string_view text);

}  // namespace mgcc::io
