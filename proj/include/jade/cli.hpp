#pragma once

// Command implementations behind the `jade` executable. Each command writes
// its report to the given stream and returns the process exit code.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "jade/adversary.hpp"
#include "jade/config_json.hpp"
#include "jade/engine.hpp"
#include "jade/io.hpp"
#include "jade/metrics.hpp"
#include "jade/oracle.hpp"

namespace jade::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kConfigError = 1, kAuditFailure = 2, kIoError = 3 };

/// A config file path, or the name of a built-in preset.
inline RunSpec load_run_spec(const std::string& ref) {
  std::ifstream in(ref);
  if (!in) {
    if (auto p = preset(ref)) return *p;
    throw IoError("cannot open config '" + ref + "'");
  }
  std::stringstream text;
  text << in.rdbuf();
  return parse_run_spec_text(text.str());
}

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

/// Deterministic run summary: a pure function of the config.
inline json make_summary(const Trace& trace) {
  const ExperimentConfig& c = trace.config;
  const IntervalStats stats = interval_stats(trace);
  const auto regime = validate_regime(trace.topology, c.adversary.budget.epsilon);
  const auto rep = audit(trace, c.adversary.budget);

  const std::size_t R = trace.per_round.size();
  const std::size_t tail = std::max<std::size_t>(1, (R + 9) / 10);
  double tail_min = 0.0;
  double tail_max = 0.0;
  if (R > 0) {
    tail_min = tail_max = trace.per_round[R - tail].mean_threshold;
    for (std::size_t r = R - tail; r < R; ++r) {
      tail_min = std::min(tail_min, trace.per_round[r].mean_threshold);
      tail_max = std::max(tail_max, trace.per_round[r].mean_threshold);
    }
  }
  const auto startup = first_round_mean_p_below(trace, 0.5 * c.protocol.p_hat);

  return json{
      {"name", c.name},
      {"seed", c.seed},
      {"nodes", trace.nodes()},
      {"rounds", trace.rounds},
      {"adversary", to_string(c.adversary.kind)},
      {"competitiveness", optional_number(competitiveness(stats))},
      {"total_received", stats.total_received()},
      {"total_nonjammed", stats.total_nonjammed()},
      {"mean_T_tail", tail_mean_threshold(trace, 0.1)},
      {"mean_T_tail_min", tail_min},
      {"mean_T_tail_max", tail_max},
      {"startup_round_half_p_hat", startup ? json(*startup) : json(nullptr)},
      {"regime",
       {{"connected", regime.connected},
        {"min_disk", regime.min_disk},
        {"required_disk", regime.required_disk},
        {"density_ok", regime.density_ok}}},
      {"audit",
       {{"allowance", rep.allowance},
        {"max_jam_fraction", rep.max_jam_fraction},
        {"min_open_fraction", rep.min_open_fraction},
        {"violating_nodes", rep.violators.size()},
        {"ok", rep.ok()}}},
  };
}

inline json make_stats(const Trace& trace) {
  const IntervalStats stats = interval_stats(trace);
  json nodes = json::array();
  for (const auto& c : stats.nodes) {
    nodes.push_back({{"f", c.nonjammed}, {"s", c.received}, {"o", c.open}, {"jammed", c.jammed}});
  }
  return json{{"interval", {stats.begin, stats.end}},
              {"competitiveness", optional_number(competitiveness(stats))},
              {"total_nonjammed", stats.total_nonjammed()},
              {"total_received", stats.total_received()},
              {"nodes", std::move(nodes)}};
}

namespace detail {

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

template <class Fn>
void write_with(const fs::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  fn(out);
  if (!out) throw IoError("write failed for " + path.string());
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const TraceError& e) {
    err << "trace error: " << e.what() << '\n';
    return kIoError;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
}

inline double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace detail

struct RunOptions {
  std::optional<fs::path> out;  // experiment directory; default out/<name>
  bool force = false;
  std::optional<std::uint64_t> seed;
};

/// Runs one experiment and writes config.json, summary.json, stats.json,
/// metrics.csv, positions.csv and timing.json, plus the optional
/// outcomes/snapshots/jam/sectors files the config asks for.
inline int cmd_run(const std::string& config_ref, const RunOptions& opts, std::ostream& out,
                   std::ostream& err) {
  return detail::guarded(err, [&] {
    RunSpec spec = load_run_spec(config_ref);
    if (opts.seed) spec.experiment.seed = *opts.seed;
    if (spec.output.outcomes) spec.experiment.detail = TraceDetail::full;

    const fs::path dir = opts.out.value_or(fs::path("out") / spec.experiment.name);
    if (fs::exists(dir) && !opts.force) {
      err << "output directory " << dir.string() << " exists; pass --force to overwrite\n";
      return static_cast<int>(kIoError);
    }
    fs::create_directories(dir);

    const auto start = std::chrono::steady_clock::now();
    const Trace trace = run(spec.experiment);
    const double runtime = detail::elapsed_ms(start);

    const json summary = make_summary(trace);
    detail::write_text(dir / "config.json", to_json(spec).dump(2) + "\n");
    detail::write_text(dir / "summary.json", summary.dump(2) + "\n");
    detail::write_text(dir / "stats.json", make_stats(trace).dump(2) + "\n");
    detail::write_text(dir / "timing.json", json{{"runtime_ms", runtime}}.dump(2) + "\n");
    detail::write_with(dir / "metrics.csv", [&](std::ostream& o) { write_metrics_csv(o, trace); });
    detail::write_with(dir / "positions.csv",
                       [&](std::ostream& o) { write_positions_csv(o, trace.topology.positions()); });
    if (spec.output.outcomes) {
      detail::write_with(dir / "outcomes.csv", [&](std::ostream& o) { write_outcomes_csv(o, trace); });
    }
    if (spec.output.snapshots) {
      detail::write_with(dir / "snapshots.csv", [&](std::ostream& o) { write_snapshots_csv(o, trace); });
    }
    if (spec.output.jam_masks) {
      detail::write_with(dir / "jam.csv", [&](std::ostream& o) { write_jam_csv(o, trace.jams); });
    }
    if (spec.output.sector_center) {
      detail::write_with(dir / "sectors.csv",
                         [&](std::ostream& o) { write_sectors_csv(o, trace, *spec.output.sector_center); });
    }

    out << summary.dump(2) << "\n";
    out << "runtime_ms: " << runtime << "\n";
    out << "wrote " << dir.string() << "\n";
    return static_cast<int>(kOk);
  });
}

struct SweepRow {
  std::size_t n = 0;
  std::optional<double> competitiveness;
  double mean_threshold = 0.0;
  double runtime_ms = 0.0;
};

/// Seed used for the sweep point with `n` nodes.
inline std::uint64_t sweep_seed(std::uint64_t master, std::size_t n) {
  return stream_key(master, StreamPurpose::sweep, static_cast<NodeId>(n));
}

inline std::vector<SweepRow> sweep(const ExperimentConfig& base, const std::vector<std::size_t>& ns,
                                   unsigned jobs = 1) {
  if (ns.empty()) throw ConfigError("sweep: the list of node counts is empty");
  if (base.topology.kind == PlacementKind::explicit_coords) {
    throw ConfigError("sweep: topology.kind must be uniform or gaussian");
  }
  auto one = [&base](std::size_t n) {
    ExperimentConfig c = base;
    c.topology.n = n;
    c.seed = sweep_seed(base.seed, n);
    const auto start = std::chrono::steady_clock::now();
    const Trace trace = run(c);
    SweepRow row;
    row.n = n;
    row.competitiveness = competitiveness(interval_stats(trace));
    row.mean_threshold = tail_mean_threshold(trace, 0.1);
    row.runtime_ms = detail::elapsed_ms(start);
    return row;
  };
  std::vector<SweepRow> rows(ns.size());
  jobs = std::max(1u, jobs);
  for (std::size_t i = 0; i < ns.size(); i += jobs) {
    std::vector<std::future<SweepRow>> batch;
    for (std::size_t j = i; j < std::min(ns.size(), i + jobs); ++j) {
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, one, ns[j]));
    }
    for (std::size_t j = 0; j < batch.size(); ++j) rows[i + j] = batch[j].get();
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "n,competitiveness,mean_T,runtime_ms\n";
  for (const auto& r : rows) {
    out << r.n << ',' << (r.competitiveness ? format_double(*r.competitiveness) : std::string{}) << ','
        << format_double(r.mean_threshold) << ',' << static_cast<long long>(r.runtime_ms + 0.5) << '\n';
  }
}

struct SweepOptions {
  std::optional<fs::path> out;  // CSV file; stdout when absent
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
};

inline int cmd_sweep(const std::string& config_ref, const std::vector<std::size_t>& ns,
                     const SweepOptions& opts, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    RunSpec spec = load_run_spec(config_ref);
    if (opts.seed) spec.experiment.seed = *opts.seed;
    for (std::size_t n : ns) {
      if (n == 0) throw ConfigError("sweep: node counts must be >= 1");
    }
    const auto rows = sweep(spec.experiment, ns, opts.jobs);
    if (opts.out) {
      detail::write_with(*opts.out, [&](std::ostream& o) { write_sweep_csv(o, rows); });
    } else {
      write_sweep_csv(out, rows);
    }
    return static_cast<int>(kOk);
  });
}

struct AttackOutcome {
  std::optional<double> victim_ratio;   // s_v / f_v
  std::optional<double> group_ratio;    // sum over U of s / sum over U of f
  std::optional<double> network_ratio;  // all nodes
  double receptions_per_interval = 0.0;
  double nonjammed_per_interval = 0.0;
};

struct AttackReport {
  std::string preset;
  AdversaryBudget budget;
  Round rounds = 0;
  AttackOutcome attack;
  AttackOutcome control;  // same preset, no jamming
};

inline AttackOutcome measure_attack(const ExperimentConfig& c) {
  const Trace trace = run(c);
  const IntervalStats stats = interval_stats(trace);
  AttackOutcome o;
  const NodeId victim = c.adversary.victim.value();
  o.victim_ratio = competitiveness(stats, std::span<const NodeId>(&victim, 1));
  o.group_ratio = competitiveness(stats, c.adversary.group);
  o.network_ratio = competitiveness(stats);
  const double intervals = static_cast<double>(trace.rounds) / c.adversary.budget.window;
  o.receptions_per_interval = static_cast<double>(stats.total_received()) / intervals;
  o.nonjammed_per_interval = static_cast<double>(stats.total_nonjammed()) / intervals;
  return o;
}

inline AttackReport attack(const std::string& preset_name, std::optional<std::uint64_t> seed = {}) {
  auto spec = preset(preset_name);
  if (!spec || (spec->experiment.adversary.kind != AdversaryKind::split2u &&
                spec->experiment.adversary.kind != AdversaryKind::lowdensity)) {
    throw ConfigError("attack: unknown attack preset '" + preset_name + "'");
  }
  ExperimentConfig c = spec->experiment;
  if (seed) c.seed = *seed;
  AttackReport rep;
  rep.preset = preset_name;
  rep.budget = c.adversary.budget;
  rep.rounds = round_count(c);
  rep.attack = measure_attack(c);
  c.adversary.kind = AdversaryKind::nojam;
  rep.control = measure_attack(c);
  return rep;
}

inline json to_json(const AttackOutcome& o) {
  return json{{"victim_ratio", optional_number(o.victim_ratio)},
              {"group_ratio", optional_number(o.group_ratio)},
              {"network_ratio", optional_number(o.network_ratio)},
              {"receptions_per_interval", o.receptions_per_interval},
              {"nonjammed_per_interval", o.nonjammed_per_interval}};
}

inline int cmd_attack(const std::string& preset_name, std::optional<std::uint64_t> seed, std::ostream& out,
                      std::ostream& err) {
  return detail::guarded(err, [&] {
    const AttackReport rep = attack(preset_name, seed);
    out << json{{"preset", rep.preset},
                {"T", rep.budget.window},
                {"epsilon", rep.budget.epsilon},
                {"rounds", rep.rounds},
                {"attack", to_json(rep.attack)},
                {"control_nojam", to_json(rep.control)}}
               .dump(2)
        << "\n";
    return static_cast<int>(kOk);
  });
}

/// Audits a run directory holding config.json, positions.csv and jam.csv.
inline int cmd_audit(const fs::path& dir, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    auto open = [&](const char* name) {
      std::ifstream in(dir / name);
      if (!in) throw IoError("missing " + (dir / name).string());
      return in;
    };
    std::ifstream cfg_in = open("config.json");
    std::stringstream text;
    text << cfg_in.rdbuf();
    const RunSpec spec = parse_run_spec_text(text.str());
    std::ifstream pos_in = open("positions.csv");
    const Topology topo = build_udg(read_positions_csv(pos_in));
    std::ifstream jam_in = open("jam.csv");
    JamHistory jams = read_jam_csv(jam_in, topo.size());
    const Round expected = round_count(spec.experiment);
    if (static_cast<Round>(jams.rounds()) != expected) {
      throw IoError("jam.csv covers " + std::to_string(jams.rounds()) + " rounds, config says " +
                    std::to_string(expected));
    }

    const AuditReport rep = audit(jams, topo, spec.experiment.adversary.budget);
    out << "node_id,worst_window_jams,worst_window_fraction,open_fraction\n";
    for (NodeId v = 0; v < rep.nodes.size(); ++v) {
      const NodeAudit& a = rep.nodes[v];
      out << v << ',' << a.worst_window_jams << ',' << format_double(a.worst_window_fraction) << ','
          << format_double(a.open_fraction) << '\n';
    }
    out << "T=" << rep.budget.window << " epsilon=" << format_double(rep.budget.epsilon)
        << " allowance=" << rep.allowance << " max_jam_fraction=" << format_double(rep.max_jam_fraction) << '\n';
    if (rep.ok()) {
      out << "PASS\n";
      return static_cast<int>(kOk);
    }
    out << "FAIL: budget exceeded at node(s)";
    for (NodeId v : rep.violators) out << ' ' << v;
    out << '\n';
    return static_cast<int>(kAuditFailure);
  });
}

inline int cmd_oracle(const std::vector<double>& pv, double p_hat, std::uint64_t trials, std::uint64_t seed,
                      std::ostream& out, std::ostream& err) {
  try {
    const auto exact = exact_q0_q1(pv);
    double p = 0.0;
    for (double x : pv) p += x;
    json doc{{"p", p}, {"q0", exact.q0}, {"q1", exact.q1}};
    if (pv.size() <= 16) {
      const auto e = enumerate_q0_q1(pv);
      doc["enumerated"] = {{"q0", e.q0}, {"q1", e.q1}};
    }
    if (std::all_of(pv.begin(), pv.end(), [&](double x) { return x <= p_hat; })) {
      doc["bracket"] = {{"lower", exact.q0 * p},
                       {"upper", exact.q0 * p / (1.0 - p_hat)},
                       {"holds", check_bracket(pv, p_hat)}};
    }
    if (trials > 0) {
      const auto rep = empirical_vs_exact(pv, trials, seed);
      doc["monte_carlo"] = {{"trials", rep.trials},
                            {"q0", rep.simulated.q0},
                            {"q1", rep.simulated.q1},
                            {"q0_stderr", rep.q0_stderr},
                            {"q1_stderr", rep.q1_stderr},
                            {"within_3_stderr", rep.within(3.0)}};
    }
    out << doc.dump(2) << "\n";
    return kOk;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace jade::cli
