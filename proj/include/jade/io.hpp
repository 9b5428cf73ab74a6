#pragma once

// CSV emitters and readers for traces and their derived series. Every file
// starts with a header row; fields are numeric or fixed keywords, so no
// quoting is ever needed.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "jade/errors.hpp"
#include "jade/metrics.hpp"
#include "jade/topology.hpp"
#include "jade/trace.hpp"

namespace jade {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-tripping decimal form.
inline std::string format_double(double v) {
  char buf[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline void write_positions_csv(std::ostream& out, const Positions& pos) {
  out << "node_id,x,y\n";
  for (NodeId v = 0; v < pos.size(); ++v) {
    out << v << ',' << format_double(pos[v].x) << ',' << format_double(pos[v].y) << '\n';
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) fields.push_back(cur);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

inline void expect_header(std::istream& in, const std::string& header, const std::string& what) {
  std::string line;
  if (!std::getline(in, line)) throw IoError(what + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw IoError(what + ": expected header '" + header + "'");
}

inline double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw IoError(what + ": bad number '" + s + "'");
  }
  if (used != s.size()) throw IoError(what + ": bad number '" + s + "'");
  return v;
}

inline long long parse_int(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw IoError(what + ": bad integer '" + s + "'");
  }
  if (used != s.size()) throw IoError(what + ": bad integer '" + s + "'");
  return v;
}

}  // namespace detail

inline Positions read_positions_csv(std::istream& in) {
  detail::expect_header(in, "node_id,x,y", "positions.csv");
  std::vector<Point> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = detail::split_csv_line(line);
    if (f.size() != 3) throw IoError("positions.csv: expected 3 fields in '" + line + "'");
    if (detail::parse_int(f[0], "positions.csv") != static_cast<long long>(pts.size())) {
      throw IoError("positions.csv: node ids must be 0..n-1 in order");
    }
    pts.push_back({detail::parse_double(f[1], "positions.csv"), detail::parse_double(f[2], "positions.csv")});
  }
  try {
    return Positions{std::move(pts)};
  } catch (const ConfigError& e) {
    throw IoError(std::string("positions.csv: ") + e.what());
  }
}

/// `round,node_id,event,peer`; peer is the sender for receive events and
/// empty otherwise. Requires full per-round records.
inline void write_outcomes_csv(std::ostream& out, const Trace& trace) {
  if (!trace.has_records()) throw TraceError("outcomes.csv needs a trace recorded at full detail");
  out << "round,node_id,event,peer\n";
  for (const auto& rec : trace.records) {
    for (NodeId v = 0; v < rec.observations.size(); ++v) {
      const Observation& o = rec.observations[v];
      out << rec.round << ',' << v << ',' << to_string(o.kind) << ',';
      if (o.kind == ObservationKind::received) out << o.sender;
      out << '\n';
    }
  }
}

/// `round,node_id,k,p_v,T_v,c_v` for every snapshot.
inline void write_snapshots_csv(std::ostream& out, const Trace& trace) {
  out << "round,node_id,k,p_v,T_v,c_v\n";
  for (const Snapshot& s : trace.snapshots) {
    for (NodeId v = 0; v < s.states.size(); ++v) {
      const NodeState& st = s.states[v];
      out << s.round << ',' << v << ',' << st.k << ',' << format_double(current_p(st, trace.params())) << ','
          << st.threshold << ',' << st.counter << '\n';
    }
  }
}

/// `round,mean_p,mean_T,successes`, one row per snapshot round.
inline void write_metrics_csv(std::ostream& out, const Trace& trace) {
  out << "round,mean_p,mean_T,successes\n";
  for (const auto& row : convergence_summary(trace)) {
    out << row.round << ',' << format_double(row.mean_p) << ',' << format_double(row.mean_threshold) << ','
        << row.successes << '\n';
  }
}

/// `round,center_node,sector,p_S` for all six sectors of `center`.
inline void write_sectors_csv(std::ostream& out, const Trace& trace, NodeId center) {
  out << "round,center_node,sector,p_S\n";
  std::vector<std::vector<SectorPoint>> series;
  for (int s = 0; s < kSectors; ++s) series.push_back(sector_series(trace, center, s));
  for (std::size_t i = 0; i < trace.snapshots.size(); ++i) {
    for (int s = 0; s < kSectors; ++s) {
      const SectorPoint& pt = series[static_cast<std::size_t>(s)][i];
      out << pt.round << ',' << center << ',' << s << ',' << format_double(pt.p_sum) << '\n';
    }
  }
}

/// `round,node_id,jammed` with one row per node per round.
inline void write_jam_csv(std::ostream& out, const JamHistory& jams) {
  out << "round,node_id,jammed\n";
  for (Round r = 0; r < static_cast<Round>(jams.rounds()); ++r) {
    for (NodeId v = 0; v < jams.nodes(); ++v) out << r << ',' << v << ',' << (jams.jammed(r, v) ? 1 : 0) << '\n';
  }
}

/// Reads a jam CSV for `n` nodes. Rows must be grouped by round in
/// ascending order; nodes absent from a round are taken as not jammed.
inline JamHistory read_jam_csv(std::istream& in, std::size_t n) {
  detail::expect_header(in, "round,node_id,jammed", "jam.csv");
  JamHistory hist(n);
  JamMask cur(n);
  long long round = 0;
  bool any = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = detail::split_csv_line(line);
    if (f.size() != 3) throw IoError("jam.csv: expected 3 fields in '" + line + "'");
    const long long r = detail::parse_int(f[0], "jam.csv");
    const long long v = detail::parse_int(f[1], "jam.csv");
    const long long j = detail::parse_int(f[2], "jam.csv");
    if (r < round) throw IoError("jam.csv: rounds must be ascending");
    if (v < 0 || static_cast<std::size_t>(v) >= n) throw IoError("jam.csv: unknown node " + f[1]);
    if (j != 0 && j != 1) throw IoError("jam.csv: jammed must be 0 or 1");
    while (round < r) {
      hist.push(cur);
      cur = JamMask(n);
      ++round;
    }
    any = true;
    cur.set(static_cast<NodeId>(v), j == 1);
  }
  if (any) hist.push(cur);
  return hist;
}

}  // namespace jade
