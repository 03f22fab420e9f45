#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kSection1 = R"({"length_km": 0.1, "free_speed_kmh": 100, "jam_density_veh_per_km": 180})";
const char* kSection2 = R"({"length_km": 0.1, "free_speed_kmh": 50, "jam_density_veh_per_km": 180})";

struct Workdir {
  fs::path root;
  Workdir() : root(fs::temp_directory_path() / "mgcc_cli_test") {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Workdir() { fs::remove_all(root); }

  std::string path(const std::string& name) const { return (root / name).string(); }

  std::string write_config(const std::string& name, const std::string& body) const {
    std::ofstream(path(name)) << body;
    return path(name);
  }
};

int run(const std::string& args) {
  const std::string cmd = std::string(MGCC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tandem_config(const std::string& out, const std::string& extra, const std::string& format = "json") {
  return std::string(R"({"sections": [)") + kSection1 + ", " + kSection2 + R"(], "output": {"path": ")" + out +
         R"(", "format": ")" + format + "\"}" + extra + "}";
}

// Backends may differ in the last rounding; compare every numeric field
// relative to its column's magnitude.
bool sweep_values_close(const std::string& a, const std::string& b) {
  std::istringstream sa(a), sb(b);
  std::string la, lb;
  while (std::getline(sa, la)) {
    if (!std::getline(sb, lb)) return false;
    if (la == lb) continue;
    std::istringstream fa(la), fb(lb);
    std::string xa, xb;
    while (std::getline(fa, xa, ',')) {
      if (!std::getline(fb, xb, ',')) return false;
      if (xa == xb) continue;
      const double va = std::stod(xa), vb = std::stod(xb);
      if (std::fabs(va - vb) > 1e-9 * std::max(1.0, std::fabs(va))) return false;
    }
  }
  return !std::getline(sb, lb);
}

}  // namespace

TEST_CASE("section analyze") {
  Workdir w;
  const std::string out = w.path("s.json");
  const std::string cfg = w.write_config(
      "s.json.cfg", std::string(R"({"sections": [)") + kSection1 + R"(], "lambda": 1000, "output": {"path": ")" +
                        out + R"("}})");
  REQUIRE(run("section analyze --config " + cfg) == 0);
  const json j = json::parse(slurp(out));
  CHECK(j.at("probs").size() == 19);
  CHECK(j.at("config_hash").get<std::string>().size() == 16);
  CHECK(j.at("report").at("expected_time_defined") == true);

  SUBCASE("speed form matches flow form") {
    const std::string out2 = w.path("speed.json");
    const std::string cfg2 = w.write_config(
        "speed.cfg", std::string(R"({"sections": [)") + kSection1 + R"(], "lambda": 1000, "form": "speed",
          "output": {"path": ")" + out2 + R"("}})");
    REQUIRE(run("section analyze --config " + cfg2) == 0);
    const json k = json::parse(slurp(out2));
    for (std::size_t n = 0; n < 19; ++n) {
      const double a = j["probs"][n], b = k["probs"][n];
      CHECK(std::fabs(a - b) <= 1e-12);
    }
  }
  SUBCASE("csv output carries provenance and a report") {
    const std::string out3 = w.path("s.csv");
    const std::string cfg3 = w.write_config(
        "csv.cfg", std::string(R"({"sections": [)") + kSection1 + R"(], "lambda": 1000,
          "output": {"path": ")" + out3 + R"(", "format": "csv"}})");
    REQUIRE(run("section analyze --config " + cfg3) == 0);
    const std::string text = slurp(out3);
    CHECK(text.rfind("# config_hash: ", 0) == 0);
    CHECK(text.find("n,prob\n") != std::string::npos);
    CHECK(fs::exists(out3 + ".report.json"));
  }
}

TEST_CASE("tandem solve") {
  Workdir w;
  const std::string out = w.path("t.json");
  const std::string cfg = w.write_config("t.cfg", tandem_config(out, R"(, "lambda": 2000)"));
  REQUIRE(run("tandem solve --config " + cfg) == 0);
  const json j = json::parse(slurp(out));
  // default tolerance 1e-6 · q_max1 ≈ 0.005 veh/h
  CHECK(std::fabs(j.at("theta").get<double>() - 1783.2149178220422) < 0.006);
  CHECK(j.at("mode") == "BisectionRoot");
  CHECK(j.at("theorem2").at("satisfied") == false);

  SUBCASE("iteration cycles at heavy load") {
    const std::string cfg2 =
        w.write_config("it.cfg", tandem_config(out, R"(, "lambda": 3000, "solver": "iteration")"));
    REQUIRE(run("tandem solve --config " + cfg2) == 0);
    const json k = json::parse(slurp(out));
    CHECK(k.at("mode") == "OscillatoryAveraged");
    CHECK(k.at("adherence").size() == 2);
  }
  SUBCASE("iteration budget exhausted") {
    const std::string cfg3 =
        w.write_config("nc.cfg", tandem_config(out, R"(, "lambda": 3000, "solver": "iteration", "max_iter": 2)"));
    CHECK(run("tandem solve --config " + cfg3) == 3);
    const json k = json::parse(slurp(out));
    CHECK(k.at("trace").size() == 3);
    CHECK(k.contains("error"));
  }
}

TEST_CASE("tandem sweep") {
  Workdir w;
  const std::string out = w.path("sweep.csv");
  const std::string body =
      tandem_config(out, R"(, "lambda_sweep": {"from": 100, "to": 3000, "step": 100}, "threads": 3)", "csv");
  const std::string cfg = w.write_config("sw.cfg", body);
  REQUIRE(run("tandem sweep --config " + cfg) == 0);
  const std::string first = slurp(out);
  CHECK(std::count(first.begin(), first.end(), '\n') == 32);
  REQUIRE(run("tandem sweep --config " + cfg) == 0);
  CHECK(slurp(out) == first);
  REQUIRE(run("--kernels scalar tandem sweep --config " + cfg) == 0);
  CHECK(sweep_values_close(slurp(out), first));

  SUBCASE("non-converged points are flagged") {
    const std::string cfg2 = w.write_config(
        "nc.cfg", tandem_config(out, R"(, "lambda_sweep": {"from": 1000, "to": 3000, "step": 1000},
          "solver": "iteration", "max_iter": 3)", "csv"));
    CHECK(run("tandem sweep --config " + cfg2) == 3);
    CHECK(slurp(out).find("NonConverged") != std::string::npos);
    CHECK(fs::exists(out + ".nonconvergence.json"));
  }
}

TEST_CASE("oracle compare") {
  Workdir w;
  const std::string out = w.path("o.json");
  const std::string cfg = w.write_config("o.cfg", tandem_config(out, R"(, "lambda": 1000)"));
  REQUIRE(run("oracle compare --config " + cfg) == 0);
  const json j = json::parse(slurp(out));
  CHECK(j.at("tv_p1").get<double>() < 1e-3);
  CHECK(j.at("tv_p2").get<double>() < 1e-3);

  const std::string big = R"({"length_km": 1, "free_speed_kmh": 100, "jam_density_veh_per_km": 250})";
  const std::string cfg2 = w.write_config(
      "big.cfg", std::string(R"({"sections": [)") + big + ", " + big + R"(], "lambda": 10, "output": {"path": ")" +
                     out + R"("}})");
  CHECK(run("oracle compare --config " + cfg2) == 1);
}

TEST_CASE("exit codes") {
  Workdir w;
  const std::string out = w.path("x.json");
  CHECK(run("") == 2);
  CHECK(run("tandem solve") == 2);
  CHECK(run("tandem solve --config " + w.path("missing.cfg")) == 2);
  CHECK(run("tandem solve --config " + w.write_config("bad.cfg", "{oops")) == 2);
  CHECK(run("--kernels vax tandem solve --config " + w.write_config("k.cfg", tandem_config(out, R"(, "lambda": 1)"))) ==
        2);
  const std::string neg = R"({"sections": [{"length_km": -1, "free_speed_kmh": 100, "jam_density_veh_per_km": 180}],
      "lambda": 10, "output": {"path": ")" + out + R"("}})";
  CHECK(run("section analyze --config " + w.write_config("neg.cfg", neg)) == 1);
  CHECK(run("section analyze --config " + w.write_config("neg2.cfg", tandem_config(out, R"(, "lambda": -5)"))) == 2);
  CHECK(run("tandem solve --config " + w.write_config("neg3.cfg", tandem_config(out, R"(, "lambda": -5)"))) == 1);
}
