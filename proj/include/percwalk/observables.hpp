#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "evolution.hpp"
#include "inputs.hpp"
#include "lattice.hpp"
#include "montecarlo.hpp"
#include "twowalker.hpp"

namespace percwalk {

enum class Quantity { D, M, C, V1, V2 };

inline std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::D: return "D";
    case Quantity::M: return "M";
    case Quantity::C: return "C";
    case Quantity::V1: return "V1";
    case Quantity::V2: return "V2";
  }
  return "?";
}

// "V" resolves to V1 or V2 later depending on the input.
inline Quantity parse_quantity(std::string_view s) {
  if (s == "D") return Quantity::D;
  if (s == "M") return Quantity::M;
  if (s == "C") return Quantity::C;
  if (s == "V" || s == "V2") return Quantity::V2;
  if (s == "V1") return Quantity::V1;
  throw std::invalid_argument("unknown quantity '" + std::string(s) + "'");
}

/// Mean distance sum_ij |j - i| P2(i, j).
inline double avg_distance(const JointDistribution& d) {
  const int r = d.window_radius;
  double s = 0.0;
  for (int i = -r; i <= r; ++i) {
    for (int j = -r; j <= r; ++j) s += std::abs(j - i) * d.at(i, j);
  }
  return s;
}

/// Probability that both walkers are found on the same site.
inline double meeting_probability(const JointDistribution& d) {
  double s = 0.0;
  for (int j = -d.window_radius; j <= d.window_radius; ++j) s += d.at(j, j);
  return s;
}

/// Probability that both walkers are found at the origin.
inline double origin_probability(const JointDistribution& d) { return d.at(0, 0); }

inline double spread_single(const PositionDistribution& d, int origin = 0) {
  double s = 0.0;
  for (int x = -d.window_radius; x <= d.window_radius; ++x) {
    const double dx = x - origin;
    s += dx * dx * d.at(x);
  }
  return s;
}

/// (1/2) sum_ij (i^2 + j^2) P2(i, j), for walkers launched from the origin.
inline double spread_two(const JointDistribution& d) {
  const int r = d.window_radius;
  double s = 0.0;
  for (int i = -r; i <= r; ++i) {
    for (int j = -r; j <= r; ++j) s += 0.5 * static_cast<double>(i * i + j * j) * d.at(i, j);
  }
  return s;
}

/// Spectral decomposition of the one-walker coin state left after tracing out
/// the other walker. Eigenvalues are sorted, largest first.
struct ReducedCoinDecomposition {
  std::array<double, 2> eigenvalues{};
  std::array<CoinState, 2> eigenvectors{};
};

/// Closed-form eigensystem of the Hermitian matrix [[a, b], [conj(b), d]].
inline ReducedCoinDecomposition hermitian_eigen_2x2(double a, Complex b, double d) {
  const double mean = 0.5 * (a + d);
  const double half_gap = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b));
  ReducedCoinDecomposition out;
  out.eigenvalues = {mean + half_gap, mean - half_gap};

  CoinState v1;
  if (std::abs(b) <= 1e-300) {
    v1 = a >= d ? CoinState::spin_up() : CoinState::spin_down();
  } else {
    // Two equivalent forms of the top eigenvector; keep the better-conditioned one.
    const double l = out.eigenvalues[0];
    const CoinState u{b, l - a};
    const CoinState w{l - d, std::conj(b)};
    v1 = u.norm_sq() >= w.norm_sq() ? u : w;
    const double n = std::sqrt(v1.norm_sq());
    v1.up /= n;
    v1.down /= n;
  }
  out.eigenvectors[0] = v1;
  out.eigenvectors[1] = {-std::conj(v1.down), std::conj(v1.up)};
  return out;
}

/// Reduced coin operator <0| Tr_2 rho |0> for a pair launched from the origin.
/// For separable inputs the exchange-symmetric measurement makes the relevant
/// operator the equal mixture of the two coin projectors.
inline std::array<Complex, 4> reduced_coin_matrix(const TwoWalkerInput& in) {
  if (!in.psi1.localized_at(0) || !in.psi2.localized_at(0)) {
    throw std::invalid_argument("reduced coin decomposition needs both factors localized at the origin");
  }
  const CoinState c1 = in.psi1.coin_at(0);
  const CoinState c2 = in.psi2.coin_at(0);
  const std::array<Complex, 2> u{c1.up, c1.down};
  const std::array<Complex, 2> v{c2.up, c2.down};
  std::array<Complex, 4> rho{};
  if (in.kind == PairKind::ClassicalSeparable) {
    for (int c = 0; c < 2; ++c) {
      for (int e = 0; e < 2; ++e) rho[2 * c + e] = 0.5 * (u[c] * std::conj(u[e]) + v[c] * std::conj(v[e]));
    }
    return rho;
  }
  const double sign = exchange_sign(in.kind);
  const double scale = 1.0 / std::sqrt(in.normalization());
  Complex chi[2][2];
  for (int c = 0; c < 2; ++c) {
    for (int d = 0; d < 2; ++d) chi[c][d] = scale * (u[c] * v[d] + sign * v[c] * u[d]);
  }
  for (int c = 0; c < 2; ++c) {
    for (int e = 0; e < 2; ++e) {
      for (int d = 0; d < 2; ++d) rho[2 * c + e] += chi[c][d] * std::conj(chi[e][d]);
    }
  }
  return rho;
}

inline ReducedCoinDecomposition reduced_coin_decomposition(const TwoWalkerInput& in) {
  const auto rho = reduced_coin_matrix(in);
  return hermitian_eigen_2x2(rho[0].real(), rho[1], rho[3].real());
}

struct SpreadIdentityReport {
  double two_walker_spread = 0.0;   // V2 from the joint distribution
  double eigen_weighted_sum = 0.0;  // sum_k lambda_k V1(c~_k)
  double abs_difference = 0.0;
  bool passed = false;
};

/// Compares V2 of the pair with the eigenvalue-weighted single-walker spreads.
inline SpreadIdentityReport marginal_spread_identity_check(const TwoWalkerInput& in, const LatticeSequence& seq,
                                                           double tol = 1e-10) {
  const auto dec = reduced_coin_decomposition(in);
  SpreadIdentityReport rep;
  rep.two_walker_spread = spread_two(joint_distribution(in, seq));
  for (int k = 0; k < 2; ++k) {
    const auto psi = make_localized(0, dec.eigenvectors[k], in.window_radius());
    rep.eigen_weighted_sum += dec.eigenvalues[k] * spread_single(position_distribution(evolve(psi, seq)));
  }
  rep.abs_difference = std::abs(rep.two_walker_spread - rep.eigen_weighted_sum);
  rep.passed = rep.abs_difference <= tol;
  return rep;
}

/// Value of `q` for one lattice realization.
inline double sample_quantity(Quantity q, const InputSpec& input, const LatticeSequence& seq) {
  const int r = seq.steps;
  if (input.is_single()) {
    if (q != Quantity::V1 && q != Quantity::V2) {
      throw std::invalid_argument("quantity " + std::string(to_string(q)) + " needs a two-walker input");
    }
    return spread_single(position_distribution(evolve(input.single_state(r), seq)));
  }
  const auto joint = joint_distribution(input.pair_state(r), seq);
  switch (q) {
    case Quantity::D: return avg_distance(joint);
    case Quantity::M: return meeting_probability(joint);
    case Quantity::C: return origin_probability(joint);
    case Quantity::V2: return spread_two(joint);
    case Quantity::V1: throw std::invalid_argument("V1 needs a single-walker input");
  }
  throw std::logic_error("unreachable");
}

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sample mean and standard error sqrt(sum (x - mean)^2 / (A - 1)) / sqrt(A),
/// accumulated in index order.
inline MeanStderr mean_and_stderr(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("standard error needs at least two samples");
  // Deviations from the first sample, so equal samples give exactly zero error.
  const double n = static_cast<double>(xs.size());
  const double shift = xs[0];
  double s = 0.0;
  for (double x : xs) s += x - shift;
  const double dmean = s / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - shift - dmean) * (x - shift - dmean);
  return {shift + dmean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

struct ObservableCurve {
  Quantity quantity = Quantity::M;
  std::vector<double> p_grid, means, stderrs;
  std::size_t averages = 0;
  int steps = 0;
  Regime regime = Regime::Dynamical;
  std::string input_label;
  std::uint64_t master_seed = 0;
};

/// `count` equally spaced values from lo to hi inclusive.
inline std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
  if (count == 0) throw std::invalid_argument("grid must have at least one point");
  if (count == 1) return {lo};
  std::vector<double> g(count);
  for (std::size_t k = 0; k < count; ++k) {
    g[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  g.back() = hi;
  return g;
}

/// Monte Carlo mean and standard error of `q` at each p. Realization a uses the
/// lattice seeded by (master_seed, a) at every grid point.
inline ObservableCurve sweep(Quantity q, const InputSpec& input, Regime regime, std::span<const double> p_grid,
                             int steps, std::size_t averages, std::uint64_t master_seed, unsigned workers = 0) {
  if (p_grid.empty()) throw std::invalid_argument("empty percolation grid");
  if (averages < 2) throw std::invalid_argument("a sweep needs at least two realizations per point");
  for (double p : p_grid) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("percolation parameter must lie in [0, 1]");
  }
  if (input.is_single() && q == Quantity::V2) q = Quantity::V1;

  ObservableCurve curve;
  curve.quantity = q;
  curve.p_grid.assign(p_grid.begin(), p_grid.end());
  curve.averages = averages;
  curve.steps = steps;
  curve.regime = regime;
  curve.input_label = input.label;
  curve.master_seed = master_seed;
  for (double p : p_grid) {
    const auto samples = collect_samples(averages, workers, [&](std::size_t a) {
      return sample_quantity(q, input, sample_sequence(regime, p, steps, master_seed, a));
    });
    const auto ms = mean_and_stderr(samples);
    curve.means.push_back(ms.mean);
    curve.stderrs.push_back(ms.std_error);
  }
  return curve;
}

}  // namespace percwalk
