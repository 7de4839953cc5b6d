#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace percwalk {

using Complex = std::complex<double>;

enum class Coin : int { Up = 0, Down = 1 };

// Tolerances for normalization checks.
inline constexpr double kInternalTol = 1e-12;
inline constexpr double kInputTol = 1e-9;

struct CoinState {
  Complex up{1.0, 0.0};
  Complex down{0.0, 0.0};

  double norm_sq() const { return std::norm(up) + std::norm(down); }
  bool is_normalized(double tol = kInputTol) const { return std::abs(norm_sq() - 1.0) <= tol; }

  static CoinState spin_up() { return {{1.0, 0.0}, {0.0, 0.0}}; }
  static CoinState spin_down() { return {{0.0, 0.0}, {1.0, 0.0}}; }
  // (|up> + i|down>)/sqrt(2)
  static CoinState phi_plus() { return {{M_SQRT1_2, 0.0}, {0.0, M_SQRT1_2}}; }
  // (|up> - i|down>)/sqrt(2)
  static CoinState phi_minus() { return {{M_SQRT1_2, 0.0}, {0.0, -M_SQRT1_2}}; }
};

inline Complex inner_product(const CoinState& a, const CoinState& b) {
  return std::conj(a.up) * b.up + std::conj(a.down) * b.down;
}

/// Amplitudes of one walker over positions [-R, R] and the two coin states.
///
/// Storage is position-major, coin-minor: index 2*(x + R) + coin.
class WalkerState {
 public:
  WalkerState() = default;
  explicit WalkerState(int window_radius)
      : radius_(window_radius), amps_(2 * static_cast<std::size_t>(2 * window_radius + 1)) {
    if (window_radius < 0) throw std::invalid_argument("window radius must be non-negative");
  }

  int window_radius() const { return radius_; }
  int num_sites() const { return 2 * radius_ + 1; }
  std::size_t size() const { return amps_.size(); }

  bool in_window(int x) const { return x >= -radius_ && x <= radius_; }

  std::size_t index(int x, Coin c) const {
    return 2 * static_cast<std::size_t>(x + radius_) + static_cast<std::size_t>(c);
  }

  Complex& at(int x, Coin c) { return amps_[index(x, c)]; }
  const Complex& at(int x, Coin c) const { return amps_[index(x, c)]; }

  std::span<Complex> amplitudes() { return amps_; }
  std::span<const Complex> amplitudes() const { return amps_; }

  double norm_sq() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }

  // Coin amplitudes at a single site.
  CoinState coin_at(int x) const { return {at(x, Coin::Up), at(x, Coin::Down)}; }

  // True if all amplitude sits on `x`.
  bool localized_at(int x) const {
    for (int y = -radius_; y <= radius_; ++y) {
      if (y == x) continue;
      if (at(y, Coin::Up) != Complex{} || at(y, Coin::Down) != Complex{}) return false;
    }
    return true;
  }

 private:
  int radius_ = 0;
  std::vector<Complex> amps_;
};

inline WalkerState make_localized(int position, const CoinState& coin, int window_radius) {
  if (window_radius < 0) throw std::invalid_argument("window radius must be non-negative");
  if (position < -window_radius || position > window_radius) {
    throw std::out_of_range("position " + std::to_string(position) + " outside window of radius " +
                            std::to_string(window_radius));
  }
  if (!coin.is_normalized(kInputTol)) {
    throw std::invalid_argument("coin state is not normalized (|up|^2+|down|^2 = " +
                                std::to_string(coin.norm_sq()) + ")");
  }
  WalkerState s(window_radius);
  s.at(position, Coin::Up) = coin.up;
  s.at(position, Coin::Down) = coin.down;
  return s;
}

/// <a|b>, conjugate-linear in `a`.
inline Complex inner_product(const WalkerState& a, const WalkerState& b) {
  if (a.window_radius() != b.window_radius()) {
    throw std::invalid_argument("inner_product: mismatched window radii");
  }
  Complex s{};
  auto x = a.amplitudes();
  auto y = b.amplitudes();
  for (std::size_t k = 0; k < x.size(); ++k) s += std::conj(x[k]) * y[k];
  return s;
}

inline WalkerState conjugate(WalkerState a) {
  for (auto& v : a.amplitudes()) v = std::conj(v);
  return a;
}

}  // namespace percwalk
