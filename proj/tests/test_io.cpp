#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mgcc/errors.hpp"
#include "mgcc/io.hpp"
#include "support.hpp"

using namespace mgcc;
using nlohmann::json;

namespace {

std::string minimal_config(const std::string& extra = "", const std::string& rate = R"("lambda": 1000)") {
  return R"({"sections": [{"length_km": 0.1, "free_speed_kmh": 100, "jam_density_veh_per_km": 180}], )" + rate +
         R"(, "output": {"path": "out.json"})" + extra + "}";
}

}  // namespace

TEST_CASE("section parsing") {
  const auto lin = io::parse_section(json::parse(R"({"length_km":0.1,"free_speed_kmh":50,"jam_density_veh_per_km":180})"));
  CHECK(lin.capacity() == 18);
  CHECK(lin.model() == SpeedModel::LinearQuadratic);

  const auto over = io::parse_section(json::parse(
      R"({"length_km":0.1,"free_speed_kmh":50,"jam_density_veh_per_km":180,"q_max_override_veh_per_h":2500})"));
  CHECK(over.q_max() == 2500.0);
  CHECK(over.q_max_overridden());

  const auto ex = io::parse_section(json::parse(
      R"({"length_km":0.1,"free_speed_kmh":50,"jam_density_veh_per_km":180,"model":{"exponential":{"beta":10,"gamma":2}}})"));
  CHECK(ex.model() == SpeedModel::Exponential);

  CHECK_THROWS_AS(io::parse_section(json::parse(R"({"length_km":0.1,"free_speed_kmh":50})")), ConfigError);
  CHECK_THROWS_AS(io::parse_section(json::parse(R"({"length_km":"x","free_speed_kmh":50,"jam_density_veh_per_km":1})")),
                  ConfigError);
  CHECK_THROWS_AS(io::parse_section(json::parse(
                      R"({"length_km":0.1,"free_speed_kmh":50,"jam_density_veh_per_km":180,"model":"cubic"})")),
                  ConfigError);
  CHECK_THROWS_AS(io::parse_section(json::parse(R"({"length_km":-0.1,"free_speed_kmh":50,"jam_density_veh_per_km":180})")),
                  DomainError);
  CHECK_THROWS_AS(io::parse_section(json::parse("[1,2]")), ConfigError);
}

TEST_CASE("run config parsing") {
  const io::RunConfig cfg = io::parse_run_config(minimal_config());
  CHECK(cfg.sections.size() == 1);
  CHECK(cfg.lambda == 1000.0);
  CHECK(cfg.solver == io::SolverKind::Bisection);
  CHECK(cfg.format == io::OutputFormat::Json);
  CHECK(cfg.form == io::DistributionForm::Flow);
  CHECK(cfg.max_iter == 10000);
  CHECK(cfg.config_hash == io::hex64(io::fnv1a(minimal_config())));
  CHECK(cfg.config_hash.size() == 16);

  const io::RunConfig s = io::parse_run_config(
      minimal_config(R"(, "solver": "iteration", "form": "speed", "threads": 2, "tol": 0.01, "max_iter": 50,
                        "theta0": 10)",
                     R"("lambda_sweep": {"from": 100, "to": 3000, "step": 100})"));
  REQUIRE(s.sweep);
  CHECK(s.sweep->points().size() == 30);
  CHECK(s.sweep->points().back() == 3000.0);
  CHECK(s.solver == io::SolverKind::Iteration);
  CHECK(s.form == io::DistributionForm::Speed);
  CHECK(s.threads == 2);
  CHECK(s.tol == 0.01);
  CHECK(s.max_iter == 50);
  CHECK(s.theta0 == 10.0);

  CHECK_FALSE(s.lambda);
  CHECK_THROWS_AS(io::parse_run_config(minimal_config(R"(, "lambda_sweep": {"from": 1, "to": 2, "step": 1})")),
                  ConfigError);
  CHECK_THROWS_AS(io::parse_run_config("{not json"), ConfigError);
  CHECK_THROWS_AS(io::parse_run_config("[]"), ConfigError);
  CHECK_THROWS_AS(io::parse_run_config(R"({"sections": [], "output": {"path": "x"}})"), ConfigError);
  CHECK_THROWS_AS(io::parse_run_config(minimal_config(R"(, "solver": "newton")")), ConfigError);
  CHECK_THROWS_AS(io::parse_run_config(minimal_config(R"(, "max_iter": 0)")), ConfigError);
  CHECK_THROWS_AS(io::parse_run_config(minimal_config(R"(, "threads": -1)")), ConfigError);
  CHECK_THROWS_AS(io::parse_run_config(R"({"sections": [{}], "lambda": 1})"), ConfigError);
  CHECK_THROWS_AS(io::load_run_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("number formatting") {
  CHECK(io::format12(0.0) == "0");
  CHECK(io::format12(-0.0) == "0");
  CHECK(io::format12(1.0 / 3.0) == "0.333333333333");
  CHECK(io::format12(1783.2149178220422) == "1783.21491782");
  CHECK(io::round12(1783.2149178220422) == 1783.21491782);
  CHECK(io::round12(io::round12(0.1 + 0.2)) == io::round12(0.1 + 0.2));
  CHECK(io::hex64(0) == "0000000000000000");
  CHECK(io::fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(io::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("serialization") {
  const auto d = stationary_flow_form(1000.0, test::reference_section1());
  const json j = io::to_json(d, 1000.0);
  CHECK(j.at("capacity") == 18);
  CHECK(j.at("probs").size() == 19);
  CHECK(j.at("source") == "FlowForm");

  const json r = io::to_json(performance_measures(0.0, stationary_flow_form(0.0, test::reference_section1())));
  CHECK(r.at("expected_time_hours").is_null());
  CHECK(r.at("expected_time_defined") == false);

  const std::string csv = io::distribution_csv(d);
  CHECK(csv.rfind("n,prob\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 20);

  const TandemSolution s = solve_bisection(test::reference_tandem(0.0));
  const std::string row = io::sweep_row(s);
  CHECK(std::count(row.begin(), row.end(), ',') == 10);
  CHECK(row.find(",,") != std::string::npos);

  const json sj = io::to_json(solve_bisection(test::reference_tandem(2000.0)));
  CHECK(sj.at("mode") == "BisectionRoot");
  CHECK(sj.at("joint").size() == 19);
  CHECK(sj.at("adherence").is_null());
}

TEST_CASE("write_file creates directories") {
  const auto dir = std::filesystem::temp_directory_path() / "mgcc_io_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  const std::string path = (dir / "out.txt").string();
  io::write_file(path, "hello\n");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "hello\n");
  std::filesystem::remove_all(dir.parent_path());
}
