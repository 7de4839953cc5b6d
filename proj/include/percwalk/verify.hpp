#pragma once

// Self-checks run by `percwalk verify`: dense-matrix and full-tensor oracles,
// the spread identity, and the fluctuation identity.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "evolution.hpp"
#include "lattice.hpp"
#include "observables.hpp"
#include "oracle.hpp"
#include "twowalker.hpp"

namespace percwalk::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  double max_deviation = 0.0;
  double tolerance = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 20240601;
  int sequences = 20;
  // Flip one bond on the oracle side only; the oracle comparison must then fail.
  bool inject_fault = false;
};

namespace detail {

inline LatticeSequence random_sequence(std::mt19937_64& rng, int max_steps, std::uint64_t seed, std::uint64_t index) {
  std::uniform_int_distribution<int> steps(1, max_steps);
  std::uniform_int_distribution<int> pick(0, 4);
  const double ps[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  const Regime regimes[] = {Regime::Statical, Regime::Dynamical};
  return sample_sequence(regimes[index % 2], ps[pick(rng)], steps(rng), seed, index);
}

inline CoinState random_coin(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CoinState c{{g(rng), g(rng)}, {g(rng), g(rng)}};
  const double n = std::sqrt(c.norm_sq());
  c.up /= n;
  c.down /= n;
  return c;
}

inline void corrupt(LatticeSequence& seq) {
  auto& cfg = seq.configs.front();
  cfg.set(0, !cfg.present(0));
}

}  // namespace detail

inline CheckResult check_unitarity(const VerifyOptions& opt) {
  CheckResult res{"unitarity (norm preserved, N<=31)", true, 0.0, 1e-12};
  std::mt19937_64 rng(opt.seed);
  for (int s = 0; s < opt.sequences; ++s) {
    const auto seq = detail::random_sequence(rng, 31, opt.seed, static_cast<std::uint64_t>(s));
    const auto psi = make_localized(0, detail::random_coin(rng), seq.steps);
    res.max_deviation = std::max(res.max_deviation, std::abs(evolve(psi, seq).norm_sq() - 1.0));
  }
  res.passed = res.max_deviation <= res.tolerance;
  return res;
}

inline CheckResult check_dense_oracle(const VerifyOptions& opt) {
  CheckResult res{"single walker vs dense step matrices (N<=8)", true, 0.0, 1e-12};
  std::mt19937_64 rng(opt.seed + 1);
  for (int s = 0; s < opt.sequences; ++s) {
    const auto seq = detail::random_sequence(rng, 8, opt.seed + 1, static_cast<std::uint64_t>(s));
    const auto psi = make_localized(0, detail::random_coin(rng), seq.steps);
    auto oracle_seq = seq;
    if (opt.inject_fault) detail::corrupt(oracle_seq);
    const auto fast = evolve(psi, seq);
    const auto slow = oracle::dense_evolve(psi, oracle_seq);
    for (std::size_t k = 0; k < fast.size(); ++k) {
      res.max_deviation = std::max(res.max_deviation, std::abs(fast.amplitudes()[k] - slow.amplitudes()[k]));
    }
  }
  res.passed = res.max_deviation <= res.tolerance;
  return res;
}

inline CheckResult check_tensor_oracle(const VerifyOptions& opt) {
  CheckResult res{"two walkers vs full U(x)U tensor evolution (N<=6)", true, 0.0, 1e-12};
  std::mt19937_64 rng(opt.seed + 2);
  const int count = std::max(3, opt.sequences / 4);
  for (int s = 0; s < count; ++s) {
    const auto seq = detail::random_sequence(rng, 6, opt.seed + 2, static_cast<std::uint64_t>(s));
    auto oracle_seq = seq;
    if (opt.inject_fault) detail::corrupt(oracle_seq);
    for (auto name : {CanonicalPair::PhiPlus, CanonicalPair::PsiMinus, CanonicalPair::PsiS}) {
      const auto in = canonical_input(name, seq.steps);
      const auto fast = joint_distribution(in, seq);
      const auto slow = oracle::dense_joint_distribution(in, oracle_seq);
      for (std::size_t k = 0; k < fast.probs.size(); ++k) {
        res.max_deviation = std::max(res.max_deviation, std::abs(fast.probs[k] - slow.probs[k]));
      }
    }
  }
  res.passed = res.max_deviation <= res.tolerance;
  return res;
}

inline CheckResult check_spread_identity(const VerifyOptions& opt) {
  CheckResult res{"two-walker spread equals eigen-weighted single spreads", true, 0.0, 1e-10};
  std::mt19937_64 rng(opt.seed + 3);
  for (int s = 0; s < opt.sequences; ++s) {
    const auto seq = detail::random_sequence(rng, 15, opt.seed + 3, static_cast<std::uint64_t>(s));
    const CoinState c1 = detail::random_coin(rng);
    const CoinState c2 = detail::random_coin(rng);
    for (auto kind : {PairKind::BosonSym, PairKind::FermionSym, PairKind::ClassicalSeparable}) {
      const auto in = make_two_walker(kind, make_localized(0, c1, seq.steps), make_localized(0, c2, seq.steps));
      res.max_deviation = std::max(res.max_deviation, marginal_spread_identity_check(in, seq).abs_difference);
    }
  }
  res.passed = res.max_deviation <= res.tolerance;
  return res;
}

inline CheckResult check_fluctuation_identity(const VerifyOptions& opt) {
  CheckResult res{"averaged classical joint = product of means + fluctuation term", true, 0.0, 1e-12};
  const int steps = 10;
  const auto a = make_localized(0, CoinState::phi_plus(), steps);
  const auto b = make_localized(0, CoinState::phi_minus(), steps);
  std::vector<PositionDistribution> s1, s2;
  for (int k = 0; k < 100; ++k) {
    const auto seq = sample_sequence(Regime::Dynamical, 0.75, steps, opt.seed + 4, static_cast<std::uint64_t>(k));
    s1.push_back(position_distribution(evolve(a, seq)));
    s2.push_back(position_distribution(evolve(b, seq)));
  }
  const auto dec = fluctuation_identity(s1, s2);
  res.max_deviation = std::max(dec.max_reconstruction_error, dec.max_residual_sum);
  res.passed = res.max_deviation <= res.tolerance;
  return res;
}

inline std::vector<CheckResult> run_all(const VerifyOptions& opt) {
  return {check_unitarity(opt), check_dense_oracle(opt), check_tensor_oracle(opt), check_spread_identity(opt),
          check_fluctuation_identity(opt)};
}

}  // namespace percwalk::verify
