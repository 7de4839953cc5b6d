#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "evolution.hpp"
#include "inputs.hpp"
#include "lattice.hpp"
#include "montecarlo.hpp"
#include "observables.hpp"
#include "twowalker.hpp"

namespace percwalk {

enum class EventKind { BothAtOrigin, SingleAtOrigin, BothSameSite };

inline std::string_view to_string(EventKind e) {
  switch (e) {
    case EventKind::BothAtOrigin: return "both_at_origin";
    case EventKind::SingleAtOrigin: return "single_at_origin";
    case EventKind::BothSameSite: return "both_same_site";
  }
  return "?";
}

struct EventSpec {
  EventKind kind = EventKind::BothAtOrigin;
  InputSpec input;
  int steps = 7;
  Regime regime = Regime::Statical;

  // Origin events only sweep the full [0, 1] range for odd N.
  bool parity_warning() const { return kind != EventKind::BothSameSite && steps % 2 == 0; }
};

/// Origin event matching the input: single walker at the origin, or both walkers there.
inline EventSpec origin_event(const InputSpec& input, int steps, Regime regime) {
  return {input.is_single() ? EventKind::SingleAtOrigin : EventKind::BothAtOrigin, input, steps, regime};
}

/// Exact probability of the event on one lattice realization.
inline double event_probability(const EventSpec& ev, const LatticeSequence& seq) {
  const int r = seq.steps;
  switch (ev.kind) {
    case EventKind::SingleAtOrigin: {
      if (!ev.input.is_single()) throw std::invalid_argument("single_at_origin needs a single-walker input");
      return position_distribution(evolve(ev.input.single_state(r), seq)).at(0);
    }
    case EventKind::BothAtOrigin:
    case EventKind::BothSameSite: {
      if (ev.input.is_single()) throw std::invalid_argument("two-walker event needs a two-walker input");
      const auto joint = joint_distribution(ev.input.pair_state(r), seq);
      const double v = ev.kind == EventKind::BothAtOrigin ? origin_probability(joint) : meeting_probability(joint);
      return std::clamp(v, 0.0, 1.0);
    }
  }
  throw std::logic_error("unreachable");
}

struct EventCurve {
  std::vector<double> p_grid, means, stderrs;
  std::size_t averages = 0;
};

inline EventCurve event_probability_sweep(const EventSpec& ev, std::span<const double> p_grid, std::size_t averages,
                                          std::uint64_t master_seed, unsigned workers = 0) {
  if (p_grid.empty()) throw std::invalid_argument("empty percolation grid");
  if (averages < 2) throw std::invalid_argument("event sweep needs at least two realizations per point");
  EventCurve c;
  c.averages = averages;
  for (double p : p_grid) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("percolation parameter must lie in [0, 1]");
    const auto samples = collect_samples(averages, workers, [&](std::size_t a) {
      return event_probability(ev, sample_sequence(ev.regime, p, ev.steps, master_seed, a));
    });
    const auto ms = mean_and_stderr(samples);
    c.p_grid.push_back(p);
    c.means.push_back(ms.mean);
    c.stderrs.push_back(ms.std_error);
  }
  return c;
}

/// Least-squares polynomial in the rescaled variable t = (2x - lo - hi) / (hi - lo).
struct Polynomial {
  std::vector<double> coeffs;  // in powers of t, constant first
  double lo = -1.0, hi = 1.0;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  double to_unit(double x) const { return (2.0 * x - lo - hi) / (hi - lo); }

  double operator()(double x) const {
    const double t = to_unit(x);
    double v = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * t + *it;
    return v;
  }

  double derivative(double x) const {
    const double t = to_unit(x);
    double v = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 1;) v = v * t + static_cast<double>(k) * coeffs[k];
    return v * 2.0 / (hi - lo);
  }
};

inline Polynomial polynomial_fit(std::span<const double> xs, std::span<const double> ys, int degree) {
  if (degree < 0) throw std::invalid_argument("polynomial degree must be non-negative");
  if (xs.size() != ys.size()) throw std::invalid_argument("x and y sizes differ");
  if (xs.size() <= static_cast<std::size_t>(degree)) {
    throw std::invalid_argument("underdetermined fit: need more points than the degree");
  }
  Polynomial poly;
  poly.lo = *std::min_element(xs.begin(), xs.end());
  poly.hi = *std::max_element(xs.begin(), xs.end());
  if (poly.hi == poly.lo) {
    if (degree > 0) throw std::invalid_argument("underdetermined fit: all abscissae coincide");
    poly.lo -= 1.0;
    poly.hi += 1.0;
  }
  const auto rows = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd vander(rows, degree + 1);
  Eigen::VectorXd rhs(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double t = poly.to_unit(xs[static_cast<std::size_t>(i)]);
    double pw = 1.0;
    for (int k = 0; k <= degree; ++k) {
      vander(i, k) = pw;
      pw *= t;
    }
    rhs(i) = ys[static_cast<std::size_t>(i)];
  }
  const auto qr = vander.colPivHouseholderQr();
  if (qr.rank() < degree + 1) throw std::invalid_argument("underdetermined fit: rank-deficient design matrix");
  const Eigen::VectorXd c = qr.solve(rhs);
  poly.coeffs.assign(c.data(), c.data() + c.size());
  return poly;
}

/// Variance P(1 - P)/n of the frequency estimator after n runs.
inline double estimator_variance(double p_event, long long runs) {
  if (!(p_event >= 0.0 && p_event <= 1.0)) throw std::invalid_argument("event probability must lie in [0, 1]");
  if (runs < 1) throw std::invalid_argument("number of runs must be positive");
  return p_event * (1.0 - p_event) / static_cast<double>(runs);
}

struct NMin {
  double value = 0.0;  // +inf when unbounded
  bool unbounded = false;
  bool unreliable = false;  // near-0/1 event probability or nearly flat curve
};

// Thresholds for flagging n_min as outside the regime where error propagation holds.
inline constexpr double kReliableEventMargin = 0.01;
inline constexpr double kReliableSlope = 1e-3;

/// Runs needed for delta p <= epsilon: P(1 - P) / (epsilon^2 (dP/dp)^2).
inline NMin n_min(double p_event, double slope, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  NMin out;
  const double var = std::max(0.0, p_event * (1.0 - p_event));
  if (slope == 0.0) {
    out.value = std::numeric_limits<double>::infinity();
    out.unbounded = true;
    out.unreliable = true;
    return out;
  }
  out.value = var / (epsilon * epsilon * slope * slope);
  out.unreliable = p_event <= kReliableEventMargin || p_event >= 1.0 - kReliableEventMargin ||
                   std::abs(slope) <= kReliableSlope;
  return out;
}

struct EstimationReport {
  std::string label;
  EventSpec event;
  std::uint64_t master_seed = 0;
  double epsilon = 0.01;
  EventCurve curve;
  Polynomial fit;
  std::vector<double> fitted, residuals, derivative;
  std::vector<NMin> nmin;
  double max_abs_residual = 0.0;
  // P(1 - P) uses the simulated P directly: biased for finite A, consistent as A grows.
  std::string variance_estimate = "plug-in P_sim(1-P_sim)";
};

inline EstimationReport estimate(const EventSpec& ev, std::span<const double> p_grid, std::size_t averages,
                                 std::uint64_t master_seed, double epsilon = 0.01, int degree = 5,
                                 unsigned workers = 0) {
  EstimationReport rep;
  rep.label = ev.input.label;
  rep.event = ev;
  rep.master_seed = master_seed;
  rep.epsilon = epsilon;
  rep.curve = event_probability_sweep(ev, p_grid, averages, master_seed, workers);
  rep.fit = polynomial_fit(rep.curve.p_grid, rep.curve.means, degree);
  for (std::size_t k = 0; k < rep.curve.p_grid.size(); ++k) {
    const double p = rep.curve.p_grid[k];
    const double f = rep.fit(p);
    rep.fitted.push_back(f);
    rep.residuals.push_back(rep.curve.means[k] - f);
    rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(rep.residuals.back()));
    rep.derivative.push_back(rep.fit.derivative(p));
    rep.nmin.push_back(n_min(rep.curve.means[k], rep.derivative.back(), epsilon));
  }
  return rep;
}

struct OptimalityWindow {
  std::string label;
  double p_lo = 0.0, p_hi = 0.0;
  std::size_t first_index = 0, last_index = 0;
};

struct OptimalityResult {
  std::vector<double> p_grid;
  std::vector<std::string> best;  // per grid point; empty when undecided
  std::vector<OptimalityWindow> windows;
};

/// Per grid point, the input whose n_min is smallest among those flagged reliable;
/// points with no reliable candidate stay undecided. Runs of equal winners form windows.
inline OptimalityResult optimality_windows(std::span<const EstimationReport> reports) {
  if (reports.empty()) throw std::invalid_argument("no estimation reports");
  OptimalityResult out;
  out.p_grid = reports.front().curve.p_grid;
  for (const auto& r : reports) {
    if (r.curve.p_grid != out.p_grid || r.nmin.size() != out.p_grid.size()) {
      throw std::invalid_argument("estimation reports use different grids");
    }
  }
  bool open = false;
  for (std::size_t k = 0; k < out.p_grid.size(); ++k) {
    const EstimationReport* winner = nullptr;
    for (const auto& r : reports) {
      if (r.nmin[k].unreliable) continue;
      if (!winner || r.nmin[k].value < winner->nmin[k].value) winner = &r;
    }
    if (!winner) {
      out.best.emplace_back();
      open = false;
      continue;
    }
    out.best.push_back(winner->label);
    if (open && out.windows.back().label == winner->label) {
      out.windows.back().p_hi = out.p_grid[k];
      out.windows.back().last_index = k;
    } else {
      out.windows.push_back({winner->label, out.p_grid[k], out.p_grid[k], k, k});
      open = true;
    }
  }
  return out;
}

}  // namespace percwalk
