// mgcc: stationary analysis of state-dependent M/G/c/c road sections.
//
//   mgcc section analyze --config run.json
//   mgcc tandem solve    --config run.json
//   mgcc tandem sweep    --config run.json
//   mgcc oracle compare  --config run.json

#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"
#include "mgcc/kernels.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stationary analysis of M/G/c/c state-dependent road sections"};
  app.require_subcommand(1);

  std::string kernel_backend;
  app.add_option("--kernels", kernel_backend, "Force a kernel backend (scalar, avx2, neon)");

  std::string config;
  auto add_leaf = [&config](CLI::App* parent, const std::string& name, const std::string& help) {
    CLI::App* leaf = parent->add_subcommand(name, help);
    leaf->add_option("--config", config, "RunConfig JSON file")->required();
    return leaf;
  };

  CLI::App* section = app.add_subcommand("section", "Single-section analysis");
  section->require_subcommand(1);
  CLI::App* analyze = add_leaf(section, "analyze", "Stationary distribution and performance report");

  CLI::App* tandem = app.add_subcommand("tandem", "Two sections in tandem");
  tandem->require_subcommand(1);
  CLI::App* solve = add_leaf(tandem, "solve", "Solve the transfer fixed point at one arrival rate");
  CLI::App* sweep = add_leaf(tandem, "sweep", "Throughput/travel-time curves over an arrival-rate sweep");

  CLI::App* oracle = app.add_subcommand("oracle", "Exact joint-chain comparison");
  oracle->require_subcommand(1);
  CLI::App* compare = add_leaf(oracle, "compare", "Decomposition versus exact joint chain");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : mgcc::cli::kConfigError;
  }

  if (!kernel_backend.empty()) {
    bool found = false;
    for (auto b : mgcc::kernels::available_backends()) {
      if (mgcc::kernels::backend_name(b) == kernel_backend) {
        mgcc::kernels::set_backend(b);
        found = true;
      }
    }
    if (!found) {
      std::cerr << "mgcc: kernel backend '" << kernel_backend << "' is not available\n";
      return mgcc::cli::kConfigError;
    }
  }

  using mgcc::cli::guarded;
  if (analyze->parsed()) return guarded(mgcc::cli::section_analyze, config);
  if (solve->parsed()) return guarded(mgcc::cli::tandem_solve, config);
  if (sweep->parsed()) return guarded(mgcc::cli::tandem_sweep, config);
  if (compare->parsed()) return guarded(mgcc::cli::oracle_compare, config);
  return mgcc::cli::kConfigError;
}
