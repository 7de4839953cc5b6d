#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "evolution.hpp"
#include "inputs.hpp"
#include "lattice.hpp"
#include "twowalker.hpp"

namespace percwalk {

inline unsigned default_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

/// Runs fn(k) for k in [0, count) on up to `workers` threads. Each index is
/// handled exactly once; callers write results into per-index slots.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    try {
      for (std::size_t k; (k = next.fetch_add(1, std::memory_order_relaxed)) < count;) fn(k);
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next.store(count);
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  pool.clear();
  if (error) std::rethrow_exception(error);
}

/// Per-realization values in realization order; independent of `workers`.
template <typename Fn>
std::vector<double> collect_samples(std::size_t count, unsigned workers, Fn&& fn) {
  std::vector<double> out(count);
  parallel_for(count, workers, [&](std::size_t a) { out[a] = fn(a); });
  return out;
}

struct EnsembleSpec {
  std::size_t averages = 1;  // A
  int steps = 1;             // N
  Regime regime = Regime::Perfect;
  double p = 1.0;
  InputSpec input;
  std::uint64_t master_seed = 0;
  std::uint64_t first_realization = 0;  // realizations first .. first + A - 1
};

struct EnsembleOptions {
  unsigned workers = 0;  // 0: hardware concurrency
  bool retain_marginals = false;
};

struct AveragedJoint {
  JointDistribution mean;
  std::size_t realizations = 0;
  // Per-realization single-walker marginals of psi1 and psi2 (only when retained).
  std::vector<PositionDistribution> marginals1, marginals2;
  PositionDistribution mean_marginal1, mean_marginal2;
};

namespace detail {

inline constexpr std::size_t kReductionBlock = 32;

inline void validate(const EnsembleSpec& spec) {
  if (spec.averages < 1) throw std::invalid_argument("ensemble needs at least one realization");
  if (spec.steps < 1) throw std::invalid_argument("number of steps must be at least 1");
  if (!(spec.p >= 0.0 && spec.p <= 1.0)) throw std::invalid_argument("percolation parameter must lie in [0, 1]");
}

// Sums per-realization vectors in fixed blocks of realization indices, then the
// block sums in block order: the result does not depend on the thread count.
template <typename Fn>
std::vector<double> blocked_sum(std::size_t count, std::size_t width, unsigned workers, Fn&& add_realization) {
  const std::size_t blocks = (count + kReductionBlock - 1) / kReductionBlock;
  std::vector<std::vector<double>> partial(blocks);
  parallel_for(blocks, workers, [&](std::size_t b) {
    std::vector<double> acc(width, 0.0);
    const std::size_t end = std::min(count, (b + 1) * kReductionBlock);
    for (std::size_t a = b * kReductionBlock; a < end; ++a) add_realization(a, acc);
    partial[b] = std::move(acc);
  });
  std::vector<double> total(width, 0.0);
  for (const auto& p : partial) {
    for (std::size_t k = 0; k < width; ++k) total[k] += p[k];
  }
  return total;
}

}  // namespace detail

/// Mean two-walker output over A lattice realizations.
inline AveragedJoint run_ensemble(const EnsembleSpec& spec, const EnsembleOptions& opt = {}) {
  detail::validate(spec);
  if (spec.input.is_single()) throw std::invalid_argument("run_ensemble needs a two-walker input");
  const int r = spec.steps;
  const auto input = spec.input.pair_state(r);
  const std::size_t sites = static_cast<std::size_t>(2 * r + 1);

  AveragedJoint out;
  out.realizations = spec.averages;
  if (opt.retain_marginals) {
    out.marginals1.resize(spec.averages);
    out.marginals2.resize(spec.averages);
  }

  auto total = detail::blocked_sum(spec.averages, sites * sites, opt.workers, [&](std::size_t a, std::vector<double>& acc) {
    const auto seq = sample_sequence(spec.regime, spec.p, spec.steps, spec.master_seed, spec.first_realization + a);
    const auto ea = evolve(input.psi1, seq);
    const auto eb = evolve(input.psi2, seq);
    const auto joint = joint_from_evolved(input.kind, ea, eb, input.normalization());
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += joint.probs[k];
    if (opt.retain_marginals) {
      out.marginals1[a] = position_distribution(ea);
      out.marginals2[a] = position_distribution(eb);
    }
  });

  const double inv = 1.0 / static_cast<double>(spec.averages);
  out.mean = JointDistribution(r);
  for (std::size_t k = 0; k < total.size(); ++k) out.mean.probs[k] = total[k] * inv;

  if (opt.retain_marginals) {
    out.mean_marginal1 = {r, std::vector<double>(sites, 0.0)};
    out.mean_marginal2 = {r, std::vector<double>(sites, 0.0)};
    for (std::size_t a = 0; a < spec.averages; ++a) {
      for (std::size_t x = 0; x < sites; ++x) {
        out.mean_marginal1.probs[x] += out.marginals1[a].probs[x];
        out.mean_marginal2.probs[x] += out.marginals2[a].probs[x];
      }
    }
    for (auto& v : out.mean_marginal1.probs) v *= inv;
    for (auto& v : out.mean_marginal2.probs) v *= inv;
  }
  return out;
}

/// Mean single-walker position distribution over A realizations.
inline PositionDistribution run_single_ensemble(const EnsembleSpec& spec, unsigned workers = 0) {
  detail::validate(spec);
  const int r = spec.steps;
  const auto psi = spec.input.single_state(r);
  const std::size_t sites = static_cast<std::size_t>(2 * r + 1);
  auto total = detail::blocked_sum(spec.averages, sites, workers, [&](std::size_t a, std::vector<double>& acc) {
    const auto seq = sample_sequence(spec.regime, spec.p, spec.steps, spec.master_seed, spec.first_realization + a);
    const auto d = position_distribution(evolve(psi, seq));
    for (std::size_t x = 0; x < sites; ++x) acc[x] += d.probs[x];
  });
  PositionDistribution out{r, std::move(total)};
  for (auto& v : out.probs) v /= static_cast<double>(spec.averages);
  return out;
}

}  // namespace percwalk
