#pragma once

#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace percwalk {

enum class Regime { Perfect, Statical, Dynamical };

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Perfect: return "perfect";
    case Regime::Statical: return "static";
    case Regime::Dynamical: return "dynamic";
  }
  return "?";
}

inline Regime parse_regime(std::string_view s) {
  if (s == "perfect") return Regime::Perfect;
  if (s == "static" || s == "statical") return Regime::Statical;
  if (s == "dynamic" || s == "dynamical") return Regime::Dynamical;
  throw std::invalid_argument("unknown regime '" + std::string(s) + "'");
}

/// Presence flags for the bonds (i, i+1), i = -R .. R-1, of a window of radius R.
class BondConfig {
 public:
  BondConfig() = default;
  BondConfig(int window_radius, bool all_present)
      : radius_(window_radius), present_(2 * static_cast<std::size_t>(window_radius), all_present ? 1 : 0) {
    if (window_radius < 0) throw std::invalid_argument("window radius must be non-negative");
  }

  int window_radius() const { return radius_; }
  std::size_t num_bonds() const { return present_.size(); }

  // Bond between sites i and i+1. Bonds leaving the window are reported absent.
  bool present(int i) const {
    if (i < -radius_ || i >= radius_) return false;
    return present_[static_cast<std::size_t>(i + radius_)] != 0;
  }
  void set(int i, bool v) {
    if (i < -radius_ || i >= radius_) throw std::out_of_range("bond index outside window");
    present_[static_cast<std::size_t>(i + radius_)] = v ? 1 : 0;
  }

  std::size_t count_present() const {
    std::size_t n = 0;
    for (auto b : present_) n += b;
    return n;
  }

  bool operator==(const BondConfig&) const = default;

 private:
  int radius_ = 0;
  std::vector<std::uint8_t> present_;
};

struct SeedTag {
  std::uint64_t master_seed = 0;
  std::uint64_t realization_index = 0;
  bool operator==(const SeedTag&) const = default;
};

/// Bond configurations realizing one walk. Perfect and statical sequences hold a
/// single configuration reused at every step; dynamical ones hold one per step.
struct LatticeSequence {
  int steps = 0;
  Regime regime = Regime::Perfect;
  double percolation_p = 1.0;
  SeedTag seed_tag;
  std::vector<BondConfig> configs;

  const BondConfig& config_for_step(int step) const {
    return configs.size() == 1 ? configs.front() : configs.at(static_cast<std::size_t>(step));
  }
  int window_radius() const { return configs.empty() ? 0 : configs.front().window_radius(); }

  bool operator==(const LatticeSequence&) const = default;
};

// splitmix64 finalizer. The per-bond stream is
//   h = mix(mix(mix(mix(seed) ^ realization) ^ step) ^ bond)
// with bond counted from 0 at i = -R; the top 53 bits give a uniform in [0, 1).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double bond_uniform(std::uint64_t master_seed, std::uint64_t realization, std::uint64_t step,
                           std::uint64_t bond) {
  std::uint64_t h = mix64(master_seed);
  h = mix64(h ^ realization);
  h = mix64(h ^ step);
  h = mix64(h ^ bond);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

inline BondConfig sample_config(double p, int window_radius, std::uint64_t master_seed, std::uint64_t realization,
                                std::uint64_t step) {
  BondConfig c(window_radius, false);
  for (int i = -window_radius; i < window_radius; ++i) {
    auto bond = static_cast<std::uint64_t>(i + window_radius);
    c.set(i, bond_uniform(master_seed, realization, step, bond) < p);
  }
  return c;
}

/// Lattice sequence for one realization. The window radius equals `steps`.
///
/// Bond presence depends only on (master_seed, realization_index, step, bond), so the
/// same uniforms are shared across different `p` (bonds present at p stay present at
/// any larger p).
inline LatticeSequence sample_sequence(Regime regime, double p, int steps, std::uint64_t master_seed,
                                       std::uint64_t realization_index) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("percolation parameter must lie in [0, 1]");
  if (steps < 1) throw std::invalid_argument("number of steps must be at least 1");

  LatticeSequence seq;
  seq.steps = steps;
  seq.regime = regime;
  seq.percolation_p = p;
  seq.seed_tag = {master_seed, realization_index};
  switch (regime) {
    case Regime::Perfect:
      seq.percolation_p = 1.0;
      seq.configs.emplace_back(steps, true);
      break;
    case Regime::Statical:
      seq.configs.push_back(sample_config(p, steps, master_seed, realization_index, 0));
      break;
    case Regime::Dynamical:
      seq.configs.reserve(static_cast<std::size_t>(steps));
      for (int k = 0; k < steps; ++k) {
        seq.configs.push_back(sample_config(p, steps, master_seed, realization_index, static_cast<std::uint64_t>(k)));
      }
      break;
  }
  return seq;
}

/// Mean length p/(1-p) of a connected segment; infinite at p = 1.
inline double avg_segment_length(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("percolation parameter must lie in [0, 1]");
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  return p / (1.0 - p);
}

// Dump format: one line per stored configuration, '1'/'0' per bond from i = -R to R-1.
inline std::string format_config(const BondConfig& c) {
  std::string s;
  s.reserve(c.num_bonds());
  for (int i = -c.window_radius(); i < c.window_radius(); ++i) s.push_back(c.present(i) ? '1' : '0');
  return s;
}

inline std::string format_sequence(const LatticeSequence& seq) {
  std::string out;
  for (const auto& c : seq.configs) {
    out += format_config(c);
    out.push_back('\n');
  }
  return out;
}

inline BondConfig parse_config(std::string_view line) {
  if (line.size() % 2 != 0) throw std::invalid_argument("bond line must have even length");
  const int radius = static_cast<int>(line.size() / 2);
  BondConfig c(radius, false);
  for (std::size_t k = 0; k < line.size(); ++k) {
    if (line[k] != '0' && line[k] != '1') throw std::invalid_argument("bond line may only contain '0' and '1'");
    c.set(static_cast<int>(k) - radius, line[k] == '1');
  }
  return c;
}

inline std::vector<BondConfig> parse_sequence(std::string_view text) {
  std::vector<BondConfig> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out.push_back(parse_config(line));
  }
  return out;
}

}  // namespace percwalk
