#pragma once

#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "state.hpp"
#include "twowalker.hpp"

namespace percwalk {

/// What gets launched from the origin: one walker with `coin1`, or a pair built
/// from `coin1` and `coin2`.
struct InputSpec {
  std::optional<PairKind> pair;
  CoinState coin1 = CoinState::phi_plus();
  CoinState coin2 = CoinState::phi_minus();
  std::string label = "single:phi+";

  bool is_single() const { return !pair.has_value(); }

  WalkerState single_state(int window_radius) const { return make_localized(0, coin1, window_radius); }

  TwoWalkerInput pair_state(int window_radius) const {
    if (!pair) throw std::logic_error("input '" + label + "' is a single walker");
    return make_two_walker(*pair, make_localized(0, coin1, window_radius), make_localized(0, coin2, window_radius));
  }

  static InputSpec single(CoinState c, std::string label) { return {std::nullopt, c, c, std::move(label)}; }
  static InputSpec two(PairKind k, CoinState a, CoinState b, std::string label) { return {k, a, b, std::move(label)}; }
  static InputSpec canonical(CanonicalPair p) {
    switch (p) {
      case CanonicalPair::PhiPlus: return two(PairKind::BosonSym, CoinState::phi_plus(), CoinState::phi_minus(), "phi_plus");
      case CanonicalPair::PsiMinus:
        return two(PairKind::FermionSym, CoinState::phi_plus(), CoinState::phi_minus(), "psi_minus");
      case CanonicalPair::PsiS:
        return two(PairKind::ClassicalSeparable, CoinState::phi_plus(), CoinState::phi_minus(), "psi_s");
    }
    throw std::logic_error("unreachable");
  }
};

namespace detail {

inline double parse_real(std::string_view s) {
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size()) throw std::invalid_argument("bad number '" + tmp + "'");
  return v;
}

// Accepts "a", "bi", "a+bi", "a-bi" (also 'j' for the imaginary unit).
inline Complex parse_complex(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("empty complex component");
  const char last = s.back();
  if (last != 'i' && last != 'j') return {parse_real(s), 0.0};
  std::string_view body = s.substr(0, s.size() - 1);
  // Split at the last sign that is not the leading one or part of an exponent.
  std::size_t split = std::string_view::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_of = [](std::string_view t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return parse_real(t);
  };
  if (split == std::string_view::npos) return {0.0, imag_of(body)};
  return {parse_real(body.substr(0, split)), imag_of(body.substr(split))};
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline CoinState named_coin(std::string_view s) {
  if (s == "up") return CoinState::spin_up();
  if (s == "down") return CoinState::spin_down();
  if (s == "phi+") return CoinState::phi_plus();
  if (s == "phi-") return CoinState::phi_minus();
  throw std::invalid_argument("unknown coin '" + std::string(s) + "'");
}

}  // namespace detail

/// Parses the input names used on the command line:
///   phi_plus | psi_minus | psi_s
///   single:up|down|phi+|phi-
///   custom:boson|fermion|classical:<c1 up>,<c1 down>,<c2 up>,<c2 down>
///   custom:single:<up>,<down>
inline InputSpec parse_input(std::string_view text) {
  const std::string label(text);
  if (text == "phi_plus" || text == "psi_minus" || text == "psi_s" || text == "psi_S") {
    return InputSpec::canonical(parse_canonical_pair(text));
  }
  if (text.starts_with("single:")) return InputSpec::single(detail::named_coin(text.substr(7)), label);
  if (text.starts_with("custom:")) {
    const auto parts = detail::split(text.substr(7), ':');
    if (parts.size() != 2) throw std::invalid_argument("custom input must look like custom:<kind>:<components>");
    const auto comps = detail::split(parts[1], ',');
    std::vector<Complex> z;
    for (auto c : comps) z.push_back(detail::parse_complex(c));
    auto check = [&](const CoinState& c) {
      if (!c.is_normalized(kInputTol)) throw std::invalid_argument("custom coin is not normalized");
      return c;
    };
    if (parts[0] == "single") {
      if (z.size() != 2) throw std::invalid_argument("custom:single needs two complex components");
      return InputSpec::single(check({z[0], z[1]}), label);
    }
    PairKind kind;
    if (parts[0] == "boson") kind = PairKind::BosonSym;
    else if (parts[0] == "fermion") kind = PairKind::FermionSym;
    else if (parts[0] == "classical") kind = PairKind::ClassicalSeparable;
    else throw std::invalid_argument("unknown custom kind '" + std::string(parts[0]) + "'");
    if (z.size() != 4) throw std::invalid_argument("custom pair needs four complex components");
    return InputSpec::two(kind, check({z[0], z[1]}), check({z[2], z[3]}), label);
  }
  throw std::invalid_argument("unknown input '" + label + "'");
}

}  // namespace percwalk
