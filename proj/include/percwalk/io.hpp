#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "estimation.hpp"
#include "evolution.hpp"
#include "observables.hpp"
#include "twowalker.hpp"

namespace percwalk::io {

using nlohmann::json;

/// Shortest decimal form with 17 significant digits; round-trips exactly.
inline std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string distribution_csv(const PositionDistribution& d) {
  std::ostringstream out;
  out << "position,probability\n";
  for (int x = -d.window_radius; x <= d.window_radius; ++x) out << x << ',' << format_double(d.at(x)) << '\n';
  return out.str();
}

inline std::string joint_csv(const JointDistribution& d) {
  std::ostringstream out;
  out << "i,j,probability\n";
  for (int i = -d.window_radius; i <= d.window_radius; ++i) {
    for (int j = -d.window_radius; j <= d.window_radius; ++j) {
      out << i << ',' << j << ',' << format_double(d.at(i, j)) << '\n';
    }
  }
  return out.str();
}

inline std::string curve_csv(const ObservableCurve& c) {
  std::ostringstream out;
  out << "p,mean,stderr\n";
  for (std::size_t k = 0; k < c.p_grid.size(); ++k) {
    out << format_double(c.p_grid[k]) << ',' << format_double(c.means[k]) << ',' << format_double(c.stderrs[k]) << '\n';
  }
  return out.str();
}

inline std::string estimation_csv(const EstimationReport& r) {
  std::ostringstream out;
  out << "p,P_sim,stderr,P_fit,dP_dp,n_min,unreliable\n";
  for (std::size_t k = 0; k < r.curve.p_grid.size(); ++k) {
    out << format_double(r.curve.p_grid[k]) << ',' << format_double(r.curve.means[k]) << ','
        << format_double(r.curve.stderrs[k]) << ',' << format_double(r.fitted[k]) << ','
        << format_double(r.derivative[k]) << ',' << format_double(r.nmin[k].value) << ','
        << (r.nmin[k].unreliable ? 1 : 0) << '\n';
  }
  return out.str();
}

inline json to_json(const EstimationReport& r) {
  json j;
  j["input"] = r.label;
  j["event"] = std::string(to_string(r.event.kind));
  j["steps"] = r.event.steps;
  j["regime"] = std::string(to_string(r.event.regime));
  j["averages"] = r.curve.averages;
  j["master_seed"] = r.master_seed;
  j["epsilon"] = r.epsilon;
  j["variance_estimate"] = r.variance_estimate;
  j["fit"] = {{"degree", r.fit.degree()},
              {"coefficients", r.fit.coeffs},
              {"domain", {r.fit.lo, r.fit.hi}},
              {"variable", "t = (2p - lo - hi) / (hi - lo)"},
              {"max_abs_residual", r.max_abs_residual}};
  json pts = json::array();
  for (std::size_t k = 0; k < r.curve.p_grid.size(); ++k) {
    json nm = r.nmin[k].unbounded ? json("unbounded") : json(r.nmin[k].value);
    pts.push_back({{"p", r.curve.p_grid[k]},
                   {"P_sim", r.curve.means[k]},
                   {"stderr", r.curve.stderrs[k]},
                   {"P_fit", r.fitted[k]},
                   {"residual", r.residuals[k]},
                   {"dP_dp", r.derivative[k]},
                   {"n_min", nm},
                   {"unreliable", r.nmin[k].unreliable}});
  }
  j["points"] = std::move(pts);
  return j;
}

inline json to_json(const OptimalityResult& r) {
  json w = json::array();
  const double step = r.p_grid.size() > 1 ? r.p_grid[1] - r.p_grid[0] : 0.0;
  for (const auto& win : r.windows) {
    w.push_back({{"input", win.label}, {"p_lo", win.p_lo}, {"p_hi", win.p_hi}, {"uncertainty", step}});
  }
  return {{"best_per_point", r.best}, {"windows", w}};
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Sidecar path for a data file: "out.csv" -> "out.json".
inline std::filesystem::path metadata_path(std::filesystem::path data) { return data.replace_extension(".json"); }

/// Parses a CSV with a header row into numeric columns.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline Table parse_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (first) {
      t.header = std::move(cells);
      first = false;
      continue;
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(std::stod(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace percwalk::io
