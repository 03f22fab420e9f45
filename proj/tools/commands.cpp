#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <iostream>
#include <thread>
#include <vector>

#include "mgcc/errors.hpp"
#include "mgcc/io.hpp"
#include "mgcc/oracle.hpp"
#include "mgcc/section.hpp"
#include "mgcc/tandem.hpp"

namespace mgcc::cli {

using nlohmann::json;

namespace {

std::string csv_provenance(const io::RunConfig& cfg) { return "# config_hash: " + cfg.config_hash + "\n"; }

void require_sections(const io::RunConfig& cfg, std::size_t n, const char* command) {
  if (cfg.sections.size() != n) {
    throw ConfigError(std::string(command) + " needs exactly " + std::to_string(n) + " section(s), got " +
                      std::to_string(cfg.sections.size()));
  }
}

double require_single_lambda(const io::RunConfig& cfg, const char* command) {
  if (!cfg.lambda) throw ConfigError(std::string(command) + " needs 'lambda'");
  return *cfg.lambda;
}

std::vector<double> lambda_points(const io::RunConfig& cfg) {
  if (cfg.sweep) return cfg.sweep->points();
  if (cfg.lambda) return {*cfg.lambda};
  throw ConfigError("config needs 'lambda' or 'lambda_sweep'");
}

TandemConfig tandem_config(const io::RunConfig& cfg, double lambda) {
  return TandemConfig(io::parse_section(cfg.sections[0]), io::parse_section(cfg.sections[1]), lambda);
}

// Evaluates f(i) for i in [0, n) on a small worker pool; results keep index
// order. The first exception thrown by any worker is rethrown.
template <typename T>
std::vector<T> parallel_map(std::size_t n, unsigned threads, const std::function<T(std::size_t)>& f) {
  std::vector<std::optional<T>> slots(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  unsigned count = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  count = static_cast<unsigned>(std::min<std::size_t>(count, std::max<std::size_t>(n, 1)));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

IterationOptions iteration_options(const io::RunConfig& cfg) {
  IterationOptions o;
  o.theta0 = cfg.theta0;
  o.max_iter = cfg.max_iter;
  o.tol = cfg.tol;
  return o;
}

TandemSolution solve(const TandemConfig& tc, const io::RunConfig& cfg) {
  if (cfg.solver == io::SolverKind::Iteration) return solve_iteration(tc, iteration_options(cfg));
  return solve_bisection(tc, cfg.tol.value_or(tc.default_tolerance()));
}

json theorem2_json(const TandemSolution& sol, const TandemConfig& tc) {
  if (!(sol.lambda > 0.0) || !(sol.fixed_point > 0.0)) return nullptr;
  const Theorem2Report r = theorem2_condition(sol.fixed_point, tc);
  return {{"evaluated_at_theta", io::round12(sol.fixed_point)},
          {"s", io::round12(r.s)},
          {"bound", io::round12(r.bound)},
          {"satisfied", r.satisfied}};
}

json sweep_row_json(const TandemSolution& s) {
  auto opt = [](const std::optional<double>& v) { return v ? json(io::round12(*v)) : json(nullptr); };
  return {{"lambda", io::round12(s.lambda)},
          {"theta", io::round12(s.theta)},
          {"delta", io::round12(s.delta)},
          {"mode", to_string(s.mode)},
          {"p1_block", io::round12(s.p1.blocking())},
          {"p2_block", io::round12(s.p2.blocking())},
          {"n1_mean", io::round12(s.section1.expected_count)},
          {"n2_mean", io::round12(s.section2.expected_count)},
          {"w1_hours", opt(s.section1.expected_time)},
          {"w2_hours", opt(s.section2.expected_time)},
          {"residual", io::round12(s.residual)}};
}

}  // namespace

int section_analyze(const std::string& config_path) {
  const io::RunConfig cfg = io::load_run_config(config_path);
  require_sections(cfg, 1, "section analyze");
  if (cfg.sweep) throw ConfigError("section analyze takes a single 'lambda'");
  const double lambda = require_single_lambda(cfg, "section analyze");
  const FundamentalDiagram d = io::parse_section(cfg.sections[0]);

  const StationaryDistribution dist = cfg.form == io::DistributionForm::Speed
                                          ? stationary_speed_form(lambda, d.params(), d.speed_profile())
                                          : stationary_flow_form(lambda, d);
  const PerformanceReport report = performance_measures(lambda, dist);

  if (cfg.format == io::OutputFormat::Json) {
    json j = io::to_json(dist, lambda);
    j["config_hash"] = cfg.config_hash;
    j["report"] = io::to_json(report);
    io::write_file(cfg.output_path, j.dump(2) + "\n");
  } else {
    io::write_file(cfg.output_path, csv_provenance(cfg) + io::distribution_csv(dist));
    json r = io::to_json(report);
    r["config_hash"] = cfg.config_hash;
    io::write_file(cfg.output_path + ".report.json", r.dump(2) + "\n");
  }
  return kOk;
}

int tandem_solve(const std::string& config_path) {
  const io::RunConfig cfg = io::load_run_config(config_path);
  require_sections(cfg, 2, "tandem solve");
  if (cfg.sweep) throw ConfigError("tandem solve takes a single 'lambda'; use tandem sweep");
  const TandemConfig tc = tandem_config(cfg, require_single_lambda(cfg, "tandem solve"));

  TandemSolution sol;
  try {
    sol = solve(tc, cfg);
  } catch (const NonConvergenceError& e) {
    json j{{"config_hash", cfg.config_hash},
           {"lambda", io::round12(tc.lambda())},
           {"error", e.what()},
           {"trace", json::array()}};
    for (double t : e.trace()) j["trace"].push_back(io::round12(t));
    io::write_file(cfg.output_path, j.dump(2) + "\n");
    std::cerr << "mgcc: " << e.what() << "\n";
    return kNonConvergence;
  }

  if (cfg.format == io::OutputFormat::Json) {
    json j = io::to_json(sol);
    j["config_hash"] = cfg.config_hash;
    j["theorem2"] = theorem2_json(sol, tc);
    io::write_file(cfg.output_path, j.dump(2) + "\n");
  } else {
    io::write_file(cfg.output_path,
                   csv_provenance(cfg) + std::string(io::kSweepHeader) + "\n" + io::sweep_row(sol) + "\n");
  }
  return kOk;
}

int tandem_sweep(const std::string& config_path) {
  const io::RunConfig cfg = io::load_run_config(config_path);
  require_sections(cfg, 2, "tandem sweep");
  const std::vector<double> lambdas = lambda_points(cfg);
  const TandemConfig base = tandem_config(cfg, 0.0);

  struct Point {
    TandemSolution sol;
    std::optional<std::vector<double>> failed_trace;
  };
  const std::vector<Point> points = parallel_map<Point>(lambdas.size(), cfg.threads, [&](std::size_t i) {
    const TandemConfig tc = base.with_lambda(lambdas[i]);
    try {
      return Point{solve(tc, cfg), std::nullopt};
    } catch (const NonConvergenceError& e) {
      return Point{solve_bisection(tc, cfg.tol.value_or(tc.default_tolerance())), e.trace()};
    }
  });

  bool any_failed = false;
  json failures = json::array();
  for (const Point& p : points) {
    if (!p.failed_trace) continue;
    any_failed = true;
    json f{{"lambda", io::round12(p.sol.lambda)}, {"trace", json::array()}};
    for (double t : *p.failed_trace) f["trace"].push_back(io::round12(t));
    failures.push_back(std::move(f));
  }

  if (cfg.format == io::OutputFormat::Csv) {
    std::string text = csv_provenance(cfg) + std::string(io::kSweepHeader) + "\n";
    for (const Point& p : points) {
      std::string row = io::sweep_row(p.sol);
      if (p.failed_trace) {
        const std::string mode = to_string(p.sol.mode);
        row.replace(row.find(mode), mode.size(), "NonConverged");
      }
      text += row + "\n";
    }
    io::write_file(cfg.output_path, text);
  } else {
    json rows = json::array();
    for (const Point& p : points) {
      json r = sweep_row_json(p.sol);
      if (p.failed_trace) r["mode"] = "NonConverged";
      rows.push_back(std::move(r));
    }
    io::write_file(cfg.output_path, json{{"config_hash", cfg.config_hash}, {"rows", rows}}.dump(2) + "\n");
  }
  if (any_failed) {
    io::write_file(cfg.output_path + ".nonconvergence.json",
                   json{{"config_hash", cfg.config_hash}, {"failures", failures}}.dump(2) + "\n");
    std::cerr << "mgcc: fixed-point iteration did not converge for " << failures.size() << " sweep point(s)\n";
    return kNonConvergence;
  }
  return kOk;
}

int oracle_compare(const std::string& config_path) {
  const io::RunConfig cfg = io::load_run_config(config_path);
  require_sections(cfg, 2, "oracle compare");
  const std::vector<double> lambdas = lambda_points(cfg);
  const TandemConfig base = tandem_config(cfg, 0.0);
  const std::size_t states = static_cast<std::size_t>(base.c1() + 1) * static_cast<std::size_t>(base.c2() + 1);
  if (states > kMaxJointStates) {
    throw SizeError("joint chain has " + std::to_string(states) + " states; limit is " +
                    std::to_string(kMaxJointStates));
  }

  const std::vector<OracleComparison> results = parallel_map<OracleComparison>(
      lambdas.size(), cfg.threads, [&](std::size_t i) { return compare_with_oracle(base.with_lambda(lambdas[i])); });

  if (cfg.format == io::OutputFormat::Csv) {
    std::string text = csv_provenance(cfg) + "lambda,tv_p1,tv_p2,theta_decomposition,theta_joint,joint_residual\n";
    for (const OracleComparison& c : results) {
      text += io::format12(c.lambda) + "," + io::format12(c.tv_p1) + "," + io::format12(c.tv_p2) + "," +
              io::format12(c.theta_decomposition) + "," + io::format12(c.theta_joint) + "," +
              io::format12(c.joint_residual) + "\n";
    }
    io::write_file(cfg.output_path, text);
  } else if (!cfg.sweep) {
    json j = io::to_json(results.front());
    j["config_hash"] = cfg.config_hash;
    io::write_file(cfg.output_path, j.dump(2) + "\n");
  } else {
    json rows = json::array();
    for (const OracleComparison& c : results) rows.push_back(io::to_json(c));
    io::write_file(cfg.output_path, json{{"config_hash", cfg.config_hash}, {"rows", rows}}.dump(2) + "\n");
  }
  return kOk;
}

int guarded(int (*command)(const std::string&), const std::string& config_path) {
  try {
    return command(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "mgcc: config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "mgcc: config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NonConvergenceError& e) {
    std::cerr << "mgcc: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "mgcc: " << e.what() << "\n";
    return kDomainError;
  }
}

}  // namespace mgcc::cli
