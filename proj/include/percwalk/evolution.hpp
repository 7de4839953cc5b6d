#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lattice.hpp"
#include "state.hpp"

namespace percwalk {

struct PositionDistribution {
  int window_radius = 0;
  std::vector<double> probs;  // index x + R

  double at(int x) const {
    if (x < -window_radius || x > window_radius) return 0.0;
    return probs[static_cast<std::size_t>(x + window_radius)];
  }
  double total() const {
    double s = 0.0;
    for (double v : probs) s += v;
    return s;
  }
};

/// Hadamard toss on every site.
inline void apply_coin_in_place(WalkerState& s) {
  auto a = s.amplitudes();
  for (std::size_t k = 0; k < a.size(); k += 2) {
    const Complex u = a[k];
    const Complex d = a[k + 1];
    a[k] = (u + d) * M_SQRT1_2;
    a[k + 1] = (u - d) * M_SQRT1_2;
  }
}

inline WalkerState apply_coin(WalkerState s) {
  apply_coin_in_place(s);
  return s;
}

namespace detail {

inline void check_shift_preconditions(const WalkerState& s, const BondConfig& c) {
  if (c.window_radius() != s.window_radius()) {
    throw std::invalid_argument("bond configuration and state windows differ");
  }
  const int r = s.window_radius();
  if (s.at(r, Coin::Up) != Complex{} || s.at(-r, Coin::Down) != Complex{}) {
    throw std::out_of_range("walker support reaches the window edge; enlarge the window");
  }
}

// Gather form of the percolated shift:
//   out(x, up)   = bond(x-1, x) ? in(x-1, up)   : in(x, down)
//   out(x, down) = bond(x, x+1) ? in(x+1, down) : in(x, up)
inline void shift_gather(const WalkerState& in, WalkerState& out, const BondConfig& c) {
  const int r = in.window_radius();
  auto src = in.amplitudes();
  auto dst = out.amplitudes();
  for (int x = -r; x <= r; ++x) {
    const std::size_t k = 2 * static_cast<std::size_t>(x + r);
    dst[k] = c.present(x - 1) ? src[k - 2] : src[k + 1];
    dst[k + 1] = c.present(x) ? src[k + 3] : src[k];
  }
}

}  // namespace detail

/// Moves up-components right and down-components left across present bonds; a
/// component facing a missing bond stays put and has its coin flipped.
inline WalkerState apply_shift(const WalkerState& s, const BondConfig& c) {
  detail::check_shift_preconditions(s, c);
  WalkerState out(s.window_radius());
  detail::shift_gather(s, out, c);
  return out;
}

/// N steps of (shift o coin), one configuration per step from `seq`.
inline WalkerState evolve(WalkerState s, const LatticeSequence& seq) {
  if (seq.steps > s.window_radius()) {
    throw std::invalid_argument("window radius smaller than the number of steps");
  }
  WalkerState scratch(s.window_radius());
  for (int k = 0; k < seq.steps; ++k) {
    const BondConfig& c = seq.config_for_step(k);
    apply_coin_in_place(s);
    detail::check_shift_preconditions(s, c);
    detail::shift_gather(s, scratch, c);
    std::swap(s, scratch);
  }
  return s;
}

inline PositionDistribution position_distribution(const WalkerState& s) {
  PositionDistribution d;
  d.window_radius = s.window_radius();
  d.probs.resize(static_cast<std::size_t>(s.num_sites()));
  auto a = s.amplitudes();
  for (std::size_t x = 0; x < d.probs.size(); ++x) {
    double v = std::norm(a[2 * x]) + std::norm(a[2 * x + 1]);
    if (v < 0.0 && v >= -1e-14) v = 0.0;
    d.probs[x] = v;
  }
  return d;
}

}  // namespace percwalk
