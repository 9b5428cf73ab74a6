// jade: run, sweep, attack and audit experiments with the JADE MAC protocol.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jade/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Round-based simulator for the JADE jamming-resistant MAC protocol"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "Override the master seed")->configurable(false);
  app.fallthrough();

  // run
  auto* run = app.add_subcommand("run", "Run one experiment (config path or preset name)");
  std::string run_config;
  std::string run_out;
  bool force = false;
  run->add_option("config", run_config, "Config JSON path or preset name")->required();
  run->add_option("--out", run_out, "Output directory (default out/<name>)");
  run->add_flag("--force", force, "Overwrite an existing output directory");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run one experiment per node count");
  std::string sweep_config;
  std::vector<std::size_t> ns;
  std::string sweep_out;
  unsigned jobs = 1;
  sweep->add_option("config", sweep_config, "Config JSON path or preset name")->required();
  sweep->add_option("--ns", ns, "Node counts, comma separated")->required()->delimiter(',');
  sweep->add_option("--out", sweep_out, "CSV output file (default stdout)");
  sweep->add_option("--jobs", jobs, "Experiments to run in parallel")->check(CLI::PositiveNumber);

  // attack
  auto* attack = app.add_subcommand("attack", "Run an attack preset and its no-jamming control");
  std::string attack_preset;
  attack->add_option("preset", attack_preset, "attack-split2u or attack-lowdensity")->required();

  // audit
  auto* audit = app.add_subcommand("audit", "Audit the jamming budget of a run directory");
  std::string audit_dir;
  audit->add_option("dir", audit_dir, "Run directory with config.json, positions.csv, jam.csv")->required();

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Exact idle/single-sender probabilities");
  std::vector<double> pv;
  double p_hat = 1.0 / 24.0;
  std::uint64_t trials = 0;
  oracle->add_option("--pv", pv, "Neighbor send probabilities, comma separated")->delimiter(',');
  oracle->add_option("--p-hat", p_hat, "Probability cap used for the bracket check");
  oracle->add_option("--trials", trials, "Monte Carlo trials (0 to skip)");

  // presets
  auto* presets = app.add_subcommand("presets", "List built-in presets, or print one as JSON");
  std::string preset_name;
  presets->add_option("name", preset_name, "Preset to print");

  CLI11_PARSE(app, argc, argv);

  using namespace jade::cli;
  if (*run) {
    RunOptions opts;
    if (!run_out.empty()) opts.out = run_out;
    opts.force = force;
    opts.seed = seed;
    return cmd_run(run_config, opts, std::cout, std::cerr);
  }
  if (*sweep) {
    SweepOptions opts;
    if (!sweep_out.empty()) opts.out = sweep_out;
    opts.seed = seed;
    opts.jobs = jobs;
    return cmd_sweep(sweep_config, ns, opts, std::cout, std::cerr);
  }
  if (*attack) return cmd_attack(attack_preset, seed, std::cout, std::cerr);
  if (*audit) return cmd_audit(audit_dir, std::cout, std::cerr);
  if (*oracle) return cmd_oracle(pv, p_hat, trials, seed.value_or(1), std::cout, std::cerr);
  if (*presets) {
    if (preset_name.empty()) {
      for (const auto& name : jade::preset_names()) std::cout << name << '\n';
      return kOk;
    }
    auto spec = jade::preset(preset_name);
    if (!spec) {
      std::cerr << "unknown preset '" << preset_name << "'\n";
      return kConfigError;
    }
    std::cout << jade::to_json(*spec).dump(2) << '\n';
    return kOk;
  }
  return kOk;
}
