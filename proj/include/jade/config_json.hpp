#pragma once

// JSON form of experiment configs, plus the built-in presets.
//
//   {
//     "name": "...",
//     "topology": {"kind": "uniform", "n": 500, "side": 4},
//                 {"kind": "gaussian", "n": 500, "sigma": 1, "center": [2, 2]},
//                 {"kind": "explicit", "coords": [[x, y], ...]},
//     "protocol": {"p_hat": 0.0416.., "gamma": 0.1},
//     "adversary": {"kind": "nojam|bernoulli|burst1u|split2u|lowdensity|greedy",
//                   "budget": {"T": 200, "epsilon": 0.3},
//                   "params": {"U": [...], "v": 24, "min_receive_prob": 0.2},
//                   "enforce": true},
//     "rounds": 200000 | "auto",
//     "seed": 1, "snapshot_stride": 100, "detail": "metrics|full",
//     "adapt": true, "frame": {"alpha": 1},
//     "output": {"outcomes": false, "snapshots": false, "jam_masks": false,
//                "sector_center": null}
//   }

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "jade/errors.hpp"
#include "jade/experiment.hpp"

namespace jade {

using json = nlohmann::json;

struct OutputOptions {
  bool outcomes = false;
  bool snapshots = false;
  bool jam_masks = false;
  std::optional<NodeId> sector_center;
};

struct RunSpec {
  ExperimentConfig experiment;
  OutputOptions output;
};

namespace detail {

inline const json* field(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

inline double number_at(const json& obj, const char* key, const std::string& path, double fallback) {
  const json* v = field(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) throw ConfigError(path + "." + key + ": expected a number");
  return v->get<double>();
}

inline std::uint64_t count_at(const json& obj, const char* key, const std::string& path,
                              std::uint64_t fallback) {
  const json* v = field(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer() || v->get<std::int64_t>() < 0) {
    throw ConfigError(path + "." + key + ": expected a non-negative integer");
  }
  return v->get<std::uint64_t>();
}

inline bool flag_at(const json& obj, const char* key, const std::string& path, bool fallback) {
  const json* v = field(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ConfigError(path + "." + key + ": expected true or false");
  return v->get<bool>();
}

inline Point point_from(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(path + ": expected [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

inline const std::map<std::string, AdversaryKind>& adversary_names() {
  static const std::map<std::string, AdversaryKind> names{
      {"nojam", AdversaryKind::nojam},     {"bernoulli", AdversaryKind::bernoulli},
      {"burst1u", AdversaryKind::burst1u}, {"split2u", AdversaryKind::split2u},
      {"lowdensity", AdversaryKind::lowdensity}, {"greedy", AdversaryKind::greedy}};
  return names;
}

}  // namespace detail

inline std::string to_string(AdversaryKind k) {
  for (const auto& [name, kind] : detail::adversary_names()) {
    if (kind == k) return name;
  }
  return "?";
}

inline std::string to_string(PlacementKind k) {
  switch (k) {
    case PlacementKind::uniform: return "uniform";
    case PlacementKind::gaussian: return "gaussian";
    case PlacementKind::explicit_coords: return "explicit";
  }
  return "?";
}

/// Parses and validates a config document. Errors name the offending field.
inline RunSpec parse_run_spec(const json& doc) {
  using namespace detail;
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  RunSpec spec;
  ExperimentConfig& c = spec.experiment;

  if (const json* v = field(doc, "name")) {
    if (!v->is_string()) throw ConfigError("name: expected a string");
    c.name = v->get<std::string>();
    if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos) {
      throw ConfigError("name: must be a non-empty plain file name");
    }
  }

  if (const json* t = field(doc, "topology")) {
    if (!t->is_object()) throw ConfigError("topology: expected an object");
    const std::string kind = t->value("kind", std::string{"uniform"});
    TopologySpec& ts = c.topology;
    if (kind == "uniform") {
      ts.kind = PlacementKind::uniform;
    } else if (kind == "gaussian") {
      ts.kind = PlacementKind::gaussian;
    } else if (kind == "explicit") {
      ts.kind = PlacementKind::explicit_coords;
    } else {
      throw ConfigError("topology.kind: unknown placement '" + kind + "'");
    }
    ts.n = count_at(*t, "n", "topology", ts.n);
    ts.side = number_at(*t, "side", "topology", ts.side);
    ts.sigma = number_at(*t, "sigma", "topology", ts.sigma);
    if (const json* ctr = field(*t, "center")) ts.center = point_from(*ctr, "topology.center");
    if (ts.kind == PlacementKind::explicit_coords) {
      const json* coords = field(*t, "coords");
      if (!coords || !coords->is_array()) throw ConfigError("topology.coords: expected a list of [x, y]");
      ts.coords.clear();
      for (std::size_t i = 0; i < coords->size(); ++i) {
        ts.coords.push_back(point_from((*coords)[i], "topology.coords[" + std::to_string(i) + "]"));
      }
      ts.n = ts.coords.size();
      for (const Point& p : ts.coords) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ConfigError("topology.coords: non-finite value");
      }
    }
  }

  if (const json* p = field(doc, "protocol")) {
    if (!p->is_object()) throw ConfigError("protocol: expected an object");
    const double p_hat = number_at(*p, "p_hat", "protocol", c.protocol.p_hat);
    const double gamma = number_at(*p, "gamma", "protocol", c.protocol.gamma);
    c.protocol = ProtocolParams::make(p_hat, gamma);
  }

  if (const json* a = field(doc, "adversary")) {
    if (!a->is_object()) throw ConfigError("adversary: expected an object");
    AdversarySpec& as = c.adversary;
    const std::string kind = a->value("kind", std::string{"bernoulli"});
    auto it = adversary_names().find(kind);
    if (it == adversary_names().end()) throw ConfigError("adversary.kind: unknown strategy '" + kind + "'");
    as.kind = it->second;
    as.enforce = flag_at(*a, "enforce", "adversary", as.enforce);
    if (const json* b = field(*a, "budget")) {
      if (!b->is_object()) throw ConfigError("adversary.budget: expected an object");
      const auto T = count_at(*b, "T", "adversary.budget", as.budget.window);
      if (T < 1 || T > (1u << 24)) throw ConfigError("adversary.budget.T must be in [1, 2^24]");
      as.budget.window = static_cast<std::uint32_t>(T);
      as.budget.epsilon = number_at(*b, "epsilon", "adversary.budget", as.budget.epsilon);
    }
    if (const json* params = field(*a, "params")) {
      if (!params->is_object()) throw ConfigError("adversary.params: expected an object");
      if (const json* u = field(*params, "U")) {
        if (!u->is_array()) throw ConfigError("adversary.params.U: expected a list of node ids");
        as.group.clear();
        for (const auto& id : *u) {
          if (!id.is_number_unsigned()) throw ConfigError("adversary.params.U: expected node ids");
          as.group.push_back(id.get<NodeId>());
        }
      }
      if (const json* v = field(*params, "v")) {
        if (!v->is_number_unsigned()) throw ConfigError("adversary.params.v: expected a node id");
        as.victim = v->get<NodeId>();
      }
      as.min_receive_prob = number_at(*params, "min_receive_prob", "adversary.params", as.min_receive_prob);
    }
  }

  if (const json* r = field(doc, "rounds")) {
    if (r->is_string() && r->get<std::string>() == "auto") {
      c.rounds.reset();
    } else if (r->is_number_integer()) {
      c.rounds = r->get<std::int64_t>();
    } else {
      throw ConfigError("rounds: expected a positive integer or \"auto\"");
    }
  }
  c.seed = count_at(doc, "seed", "config", c.seed);
  const auto stride = count_at(doc, "snapshot_stride", "config", c.snapshot_stride);
  if (stride < 1 || stride > 0xffffffffULL) throw ConfigError("snapshot_stride must be >= 1");
  c.snapshot_stride = static_cast<std::uint32_t>(stride);
  if (const json* d = field(doc, "detail")) {
    const std::string level = d->is_string() ? d->get<std::string>() : "";
    if (level == "metrics") {
      c.detail = TraceDetail::metrics;
    } else if (level == "full") {
      c.detail = TraceDetail::full;
    } else {
      throw ConfigError("detail: expected \"metrics\" or \"full\"");
    }
  }
  c.adapt = flag_at(doc, "adapt", "config", c.adapt);
  if (const json* f = field(doc, "frame")) c.frame_alpha = number_at(*f, "alpha", "frame", c.frame_alpha);

  if (const json* o = field(doc, "output")) {
    if (!o->is_object()) throw ConfigError("output: expected an object");
    spec.output.outcomes = flag_at(*o, "outcomes", "output", false);
    spec.output.snapshots = flag_at(*o, "snapshots", "output", false);
    spec.output.jam_masks = flag_at(*o, "jam_masks", "output", false);
    if (const json* sc = field(*o, "sector_center")) {
      if (!sc->is_number_unsigned()) throw ConfigError("output.sector_center: expected a node id");
      spec.output.sector_center = sc->get<NodeId>();
    }
  }

  c.validate();
  if (spec.output.sector_center && *spec.output.sector_center >= c.topology.node_count()) {
    throw ConfigError("output.sector_center: not a node id");
  }
  return spec;
}

inline RunSpec parse_run_spec_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  return parse_run_spec(doc);
}

inline json to_json(const RunSpec& spec) {
  const ExperimentConfig& c = spec.experiment;
  json topo{{"kind", to_string(c.topology.kind)}};
  switch (c.topology.kind) {
    case PlacementKind::uniform:
      topo["n"] = c.topology.n;
      topo["side"] = c.topology.side;
      break;
    case PlacementKind::gaussian: {
      const Point ctr = c.topology.gaussian_center();
      topo["n"] = c.topology.n;
      topo["sigma"] = c.topology.sigma;
      topo["side"] = c.topology.side;
      topo["center"] = {ctr.x, ctr.y};
      break;
    }
    case PlacementKind::explicit_coords: {
      json coords = json::array();
      for (const Point& p : c.topology.coords) coords.push_back({p.x, p.y});
      topo["coords"] = std::move(coords);
      break;
    }
  }
  json params = json::object();
  if (!c.adversary.group.empty()) params["U"] = c.adversary.group;
  if (c.adversary.victim) params["v"] = *c.adversary.victim;
  if (c.adversary.kind == AdversaryKind::greedy) params["min_receive_prob"] = c.adversary.min_receive_prob;

  json doc{
      {"name", c.name},
      {"topology", std::move(topo)},
      {"protocol", {{"p_hat", c.protocol.p_hat}, {"gamma", c.protocol.gamma}}},
      {"adversary",
       {{"kind", to_string(c.adversary.kind)},
        {"budget", {{"T", c.adversary.budget.window}, {"epsilon", c.adversary.budget.epsilon}}},
        {"params", std::move(params)},
        {"enforce", c.adversary.enforce}}},
      {"seed", c.seed},
      {"snapshot_stride", c.snapshot_stride},
      {"detail", c.detail == TraceDetail::full ? "full" : "metrics"},
      {"adapt", c.adapt},
      {"frame", {{"alpha", c.frame_alpha}}},
      {"output",
       {{"outcomes", spec.output.outcomes},
        {"snapshots", spec.output.snapshots},
        {"jam_masks", spec.output.jam_masks}}},
  };
  if (c.rounds) {
    doc["rounds"] = *c.rounds;
  } else {
    doc["rounds"] = "auto";
  }
  if (spec.output.sector_center) doc["output"]["sector_center"] = *spec.output.sector_center;
  return doc;
}

// Presets ---------------------------------------------------------------

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig-throughput-uniform", "fig-throughput-gaussian",
                                              "fig-convergence", "attack-split2u", "attack-lowdensity"};
  return names;
}

namespace detail {

/// Simulation regime of the throughput experiments: 4x4 plane, eps = 0.3,
/// T = 200, gamma = 0.1, p_hat = 1/24, Bernoulli jamming.
inline RunSpec throughput_base(std::string name) {
  RunSpec s;
  ExperimentConfig& c = s.experiment;
  c.name = std::move(name);
  c.topology.kind = PlacementKind::uniform;
  c.topology.n = 500;
  c.topology.side = 4.0;
  c.protocol = ProtocolParams::make(1.0 / 24.0, 0.1);
  c.adversary.kind = AdversaryKind::bernoulli;
  c.adversary.budget = {200, 0.3};
  c.adversary.enforce = true;
  c.rounds = 200000;
  c.seed = 1;
  c.snapshot_stride = 100;
  return s;
}

/// A tight cluster U of `group` nodes on a ring of radius 0.2 around (2, 2)
/// with the target node v at distance 0.6 from the ring's center.
inline RunSpec cluster_attack(std::string name, AdversaryKind kind, std::size_t group,
                              AdversaryBudget budget, std::int64_t rounds) {
  RunSpec s;
  ExperimentConfig& c = s.experiment;
  c.name = std::move(name);
  c.topology.kind = PlacementKind::explicit_coords;
  c.topology.coords.clear();
  for (std::size_t i = 0; i < group; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(group);
    c.topology.coords.push_back({2.0 + 0.2 * std::cos(a), 2.0 + 0.2 * std::sin(a)});
  }
  c.topology.coords.push_back({2.6, 2.0});
  c.topology.n = c.topology.coords.size();
  c.adversary.kind = kind;
  c.adversary.budget = budget;
  c.adversary.enforce = true;
  c.adversary.group.clear();
  for (std::size_t i = 0; i < group; ++i) c.adversary.group.push_back(static_cast<NodeId>(i));
  c.adversary.victim = static_cast<NodeId>(group);
  c.rounds = rounds;
  c.seed = 1;
  c.snapshot_stride = 10;
  s.output.jam_masks = true;
  return s;
}

}  // namespace detail

inline std::optional<RunSpec> preset(const std::string& name) {
  if (name == "fig-throughput-uniform") return detail::throughput_base(name);
  if (name == "fig-throughput-gaussian") {
    RunSpec s = detail::throughput_base(name);
    s.experiment.topology.kind = PlacementKind::gaussian;
    s.experiment.topology.sigma = 1.0;
    s.experiment.topology.center = Point{2.0, 2.0};
    return s;
  }
  if (name == "fig-convergence") {
    RunSpec s = detail::throughput_base(name);
    s.experiment.rounds = 2000;
    s.experiment.snapshot_stride = 1;
    s.output.sector_center = 0;
    return s;
  }
  // |U| = 24 = 1/p_hat; T large enough that U's probabilities collapse
  // between the two groups' clear windows.
  if (name == "attack-split2u") {
    return detail::cluster_attack(name, AdversaryKind::split2u, 24, {1000, 0.3}, 30000);
  }
  if (name == "attack-lowdensity") {
    return detail::cluster_attack(name, AdversaryKind::lowdensity, 2, {2000, 0.05}, 40000);
  }
  return std::nullopt;
}

}  // namespace jade
