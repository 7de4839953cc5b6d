#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "evolution.hpp"
#include "lattice.hpp"
#include "state.hpp"

namespace percwalk {

enum class PairKind { BosonSym, FermionSym, ClassicalSeparable };

inline std::string_view to_string(PairKind k) {
  switch (k) {
    case PairKind::BosonSym: return "boson";
    case PairKind::FermionSym: return "fermion";
    case PairKind::ClassicalSeparable: return "classical";
  }
  return "?";
}

inline double exchange_sign(PairKind k) { return k == PairKind::FermionSym ? -1.0 : 1.0; }

/// Two walkers as single-particle factors. Symmetrized kinds stand for
/// (psi1 (x) psi2 +/- psi2 (x) psi1) / sqrt(2 (1 +/- |<psi1|psi2>|^2)); the separable
/// kind is psi1 (x) psi2 measured with exchange-symmetric projectors.
struct TwoWalkerInput {
  PairKind kind = PairKind::ClassicalSeparable;
  WalkerState psi1;
  WalkerState psi2;
  Complex overlap{};  // <psi1|psi2>

  int window_radius() const { return psi1.window_radius(); }

  // 2 (1 +/- |<psi1|psi2>|^2); only meaningful for symmetrized kinds.
  double normalization() const { return 2.0 * (1.0 + exchange_sign(kind) * std::norm(overlap)); }
};

// 1 - |<psi1|psi2>|^2 below this marks psi1 and psi2 as parallel.
inline constexpr double kDegenerateTol = 1e-12;

inline TwoWalkerInput make_two_walker(PairKind kind, WalkerState psi1, WalkerState psi2) {
  if (psi1.window_radius() != psi2.window_radius()) {
    throw std::invalid_argument("two-walker factors must share a window");
  }
  for (const auto* s : {&psi1, &psi2}) {
    if (std::abs(s->norm_sq() - 1.0) > kInputTol) throw std::invalid_argument("two-walker factor not normalized");
  }
  TwoWalkerInput in{kind, std::move(psi1), std::move(psi2), {}};
  in.overlap = inner_product(in.psi1, in.psi2);
  if (kind == PairKind::FermionSym && 1.0 - std::norm(in.overlap) < kDegenerateTol) {
    throw std::invalid_argument("antisymmetrization of parallel states vanishes");
  }
  return in;
}

enum class CanonicalPair { PhiPlus, PsiMinus, PsiS };

inline CanonicalPair parse_canonical_pair(std::string_view s) {
  if (s == "phi_plus") return CanonicalPair::PhiPlus;
  if (s == "psi_minus") return CanonicalPair::PsiMinus;
  if (s == "psi_s" || s == "psi_S") return CanonicalPair::PsiS;
  throw std::invalid_argument("unknown two-walker input '" + std::string(s) + "'");
}

/// The three reference pairs built from |0>phi+ and |0>phi-.
inline TwoWalkerInput canonical_input(CanonicalPair name, int window_radius) {
  auto a = make_localized(0, CoinState::phi_plus(), window_radius);
  auto b = make_localized(0, CoinState::phi_minus(), window_radius);
  switch (name) {
    case CanonicalPair::PhiPlus: return make_two_walker(PairKind::BosonSym, std::move(a), std::move(b));
    case CanonicalPair::PsiMinus: return make_two_walker(PairKind::FermionSym, std::move(a), std::move(b));
    case CanonicalPair::PsiS: return make_two_walker(PairKind::ClassicalSeparable, std::move(a), std::move(b));
  }
  throw std::logic_error("unreachable");
}

/// Exchange-symmetric two-walker output, normalized over the whole (i, j) plane:
/// the physical probability of one walker at i and the other at j != i is 2 * at(i, j).
struct JointDistribution {
  int window_radius = 0;
  std::vector<double> probs;  // row-major, (i + R) * (2R + 1) + (j + R)

  JointDistribution() = default;
  explicit JointDistribution(int r)
      : window_radius(r), probs(static_cast<std::size_t>(2 * r + 1) * static_cast<std::size_t>(2 * r + 1), 0.0) {}

  int num_sites() const { return 2 * window_radius + 1; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i + window_radius) * static_cast<std::size_t>(num_sites()) +
           static_cast<std::size_t>(j + window_radius);
  }
  double at(int i, int j) const { return probs[index(i, j)]; }
  double& at(int i, int j) { return probs[index(i, j)]; }

  double total() const {
    double s = 0.0;
    for (double v : probs) s += v;
    return s;
  }
};

/// Symmetrized classical combination (P_a(i) P_b(j) + P_b(i) P_a(j)) / 2.
inline JointDistribution classical_joint(const PositionDistribution& pa, const PositionDistribution& pb) {
  const int r = pa.window_radius;
  JointDistribution out(r);
  for (int i = -r; i <= r; ++i) {
    for (int j = i; j <= r; ++j) {
      const double v = 0.5 * (pa.at(i) * pb.at(j) + pb.at(i) * pa.at(j));
      out.at(i, j) = v;
      out.at(j, i) = v;
    }
  }
  return out;
}

/// Joint output for already-evolved factors a = U psi1, b = U psi2.
inline JointDistribution joint_from_evolved(PairKind kind, const WalkerState& a, const WalkerState& b,
                                            double normalization) {
  const auto pa = position_distribution(a);
  const auto pb = position_distribution(b);
  if (kind == PairKind::ClassicalSeparable) return classical_joint(pa, pb);

  // sum_{c,d} |a_ic b_jd +/- b_ic a_jd|^2
  //   = Pa(i) Pb(j) + Pb(i) Pa(j) +/- 2 Re[g(i) conj(g(j))],  g(x) = sum_c a_xc conj(b_xc)
  const int r = a.window_radius();
  std::vector<Complex> g(static_cast<std::size_t>(2 * r + 1));
  for (int x = -r; x <= r; ++x) {
    g[static_cast<std::size_t>(x + r)] =
        a.at(x, Coin::Up) * std::conj(b.at(x, Coin::Up)) + a.at(x, Coin::Down) * std::conj(b.at(x, Coin::Down));
  }
  const double sign = exchange_sign(kind);
  JointDistribution out(r);
  for (int i = -r; i <= r; ++i) {
    const Complex gi = g[static_cast<std::size_t>(i + r)];
    for (int j = i; j <= r; ++j) {
      const Complex gj = g[static_cast<std::size_t>(j + r)];
      const double cross = gi.real() * gj.real() + gi.imag() * gj.imag();
      double v = (pa.at(i) * pb.at(j) + pb.at(i) * pa.at(j) + sign * 2.0 * cross) / normalization;
      if (v < 0.0 && v >= -1e-14) v = 0.0;
      out.at(i, j) = v;
      out.at(j, i) = v;
    }
  }
  return out;
}

/// Evolves each factor once on the shared lattice and forms P2(i, j).
inline JointDistribution joint_distribution(const TwoWalkerInput& in, const LatticeSequence& seq) {
  const auto a = evolve(in.psi1, seq);
  const auto b = evolve(in.psi2, seq);
  return joint_from_evolved(in.kind, a, b, in.normalization());
}

/// Per-site split of the bunching probability into the classical part and the
/// exchange-interference part, both divided by (1 +/- |<psi1|psi2>|^2).
struct DiagonalDecomposition {
  int window_radius = 0;
  std::vector<double> classical;  // P2cl(j, j)
  std::vector<double> cross;      // |<psi1|U^dag|j><j|U|psi2>|^2
  std::vector<double> boson;      // (classical + cross) / (1 + |o|^2)
  std::optional<std::vector<double>> fermion;  // (classical - cross) / (1 - |o|^2); empty when undefined
  double overlap_sq = 0.0;
};

inline DiagonalDecomposition diagonal_decomposition(const WalkerState& psi1, const WalkerState& psi2,
                                                    const LatticeSequence& seq) {
  const auto a = evolve(psi1, seq);
  const auto b = evolve(psi2, seq);
  const int r = a.window_radius();
  DiagonalDecomposition d;
  d.window_radius = r;
  d.overlap_sq = std::norm(inner_product(psi1, psi2));
  const bool fermion_ok = 1.0 - d.overlap_sq >= kDegenerateTol;
  std::vector<double> ferm;
  for (int j = -r; j <= r; ++j) {
    const double pa = std::norm(a.at(j, Coin::Up)) + std::norm(a.at(j, Coin::Down));
    const double pb = std::norm(b.at(j, Coin::Up)) + std::norm(b.at(j, Coin::Down));
    const Complex amp = std::conj(a.at(j, Coin::Up)) * b.at(j, Coin::Up) +
                        std::conj(a.at(j, Coin::Down)) * b.at(j, Coin::Down);
    const double cl = pa * pb;
    const double x = std::norm(amp);
    d.classical.push_back(cl);
    d.cross.push_back(x);
    d.boson.push_back((cl + x) / (1.0 + d.overlap_sq));
    if (fermion_ok) ferm.push_back(std::max(0.0, (cl - x) / (1.0 - d.overlap_sq)));
  }
  if (fermion_ok) d.fermion = std::move(ferm);
  return d;
}

/// Averaged classical joint split into the symmetrized product of mean marginals
/// plus the symmetrized mean of residual products.
struct FluctuationDecomposition {
  int window_radius = 0;
  std::size_t realizations = 0;
  PositionDistribution mean1, mean2;
  JointDistribution product_of_means;
  JointDistribution fluctuation;
  JointDistribution direct_average;
  double max_reconstruction_error = 0.0;
  double max_residual_sum = 0.0;  // max_j |sum_a delta^(a)(j)|, both walkers
};

inline FluctuationDecomposition fluctuation_identity(const std::vector<PositionDistribution>& samples1,
                                                     const std::vector<PositionDistribution>& samples2) {
  const std::size_t count = samples1.size();
  if (count < 2) throw std::invalid_argument("fluctuation analysis needs at least two realizations");
  if (samples2.size() != count) throw std::invalid_argument("sample lists differ in length");
  const int r = samples1.front().window_radius;
  const std::size_t n = static_cast<std::size_t>(2 * r + 1);
  const double inv = 1.0 / static_cast<double>(count);

  auto mean_of = [&](const std::vector<PositionDistribution>& s) {
    PositionDistribution m{r, std::vector<double>(n, 0.0)};
    for (const auto& d : s) {
      if (d.window_radius != r) throw std::invalid_argument("samples with mismatched windows");
      for (std::size_t x = 0; x < n; ++x) m.probs[x] += d.probs[x];
    }
    for (auto& v : m.probs) v *= inv;
    return m;
  };

  FluctuationDecomposition out;
  out.window_radius = r;
  out.realizations = count;
  out.mean1 = mean_of(samples1);
  out.mean2 = mean_of(samples2);
  out.product_of_means = classical_joint(out.mean1, out.mean2);
  out.fluctuation = JointDistribution(r);
  out.direct_average = JointDistribution(r);

  std::vector<double> d1(n), d2(n), res1(n, 0.0), res2(n, 0.0);
  for (std::size_t a = 0; a < count; ++a) {
    for (std::size_t x = 0; x < n; ++x) {
      d1[x] = samples1[a].probs[x] - out.mean1.probs[x];
      d2[x] = samples2[a].probs[x] - out.mean2.probs[x];
      res1[x] += d1[x];
      res2[x] += d2[x];
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = i * n + j;
        out.fluctuation.probs[k] += 0.5 * (d1[i] * d2[j] + d1[j] * d2[i]);
        out.direct_average.probs[k] +=
            0.5 * (samples1[a].probs[i] * samples2[a].probs[j] + samples2[a].probs[i] * samples1[a].probs[j]);
      }
    }
  }
  for (auto& v : out.fluctuation.probs) v *= inv;
  for (auto& v : out.direct_average.probs) v *= inv;

  for (std::size_t k = 0; k < out.direct_average.probs.size(); ++k) {
    const double recon = out.product_of_means.probs[k] + out.fluctuation.probs[k];
    out.max_reconstruction_error = std::max(out.max_reconstruction_error, std::abs(recon - out.direct_average.probs[k]));
  }
  for (std::size_t x = 0; x < n; ++x) {
    out.max_residual_sum = std::max({out.max_residual_sum, std::abs(res1[x]), std::abs(res2[x])});
  }
  return out;
}

}  // namespace percwalk
