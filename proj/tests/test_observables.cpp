#include <gtest/gtest.h>

#include <random>

#include "percwalk/inputs.hpp"
#include "percwalk/observables.hpp"

using namespace percwalk;

namespace {

CoinState random_coin(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CoinState c{{g(rng), g(rng)}, {g(rng), g(rng)}};
  const double n = std::sqrt(c.norm_sq());
  c.up /= n;
  c.down /= n;
  return c;
}

JointDistribution two_point(int r, int i, int j) {
  JointDistribution d(r);
  d.at(i, j) = 0.5;
  d.at(j, i) = 0.5;
  return d;
}

double v1(const CoinState& c, const LatticeSequence& seq) {
  return spread_single(position_distribution(evolve(make_localized(0, c, seq.steps), seq)));
}

}  // namespace

TEST(Observables, FrozenWalkers) {
  const auto seq = sample_sequence(Regime::Statical, 0.0, 9, 1, 0);
  for (auto pair : {CanonicalPair::PhiPlus, CanonicalPair::PsiMinus, CanonicalPair::PsiS}) {
    const auto j = joint_distribution(canonical_input(pair, 9), seq);
    EXPECT_NEAR(j.total(), 1.0, 1e-12);
    EXPECT_NEAR(avg_distance(j), 0.0, 1e-14);
    EXPECT_NEAR(meeting_probability(j), 1.0, 1e-14);
    EXPECT_NEAR(origin_probability(j), 1.0, 1e-14);
    EXPECT_NEAR(spread_two(j), 0.0, 1e-14);
  }
}

TEST(Observables, HandComputedValues) {
  EXPECT_DOUBLE_EQ(avg_distance(two_point(3, 0, 2)), 2.0);
  EXPECT_DOUBLE_EQ(meeting_probability(two_point(3, 0, 2)), 0.0);
  EXPECT_DOUBLE_EQ(spread_two(two_point(3, 0, 2)), 2.0);

  PositionDistribution d{2, std::vector<double>(5, 0.0)};
  d.probs[2] = 1.0;
  EXPECT_EQ(spread_single(d), 0.0);
  d.probs[2] = 0.0;
  d.probs[1] = d.probs[3] = 0.5;
  EXPECT_DOUBLE_EQ(spread_single(d), 1.0);
  EXPECT_DOUBLE_EQ(spread_single(d, 1), 0.5 * 4.0);
}

TEST(Observables, ClassicalMeetingIsSumOfSquares) {
  const int n = 11;
  const auto seq = sample_sequence(Regime::Dynamical, 0.6, n, 3, 7);
  const auto j = joint_distribution(canonical_input(CanonicalPair::PsiS, n), seq);
  const auto p1 = position_distribution(evolve(make_localized(0, CoinState::phi_plus(), n), seq));
  double s = 0.0;
  for (double v : p1.probs) s += v * v;
  EXPECT_NEAR(meeting_probability(j), s, 1e-12);
}

TEST(Observables, FermionMeetsLessOnPerfectLattice) {
  for (int n = 1; n <= 15; ++n) {
    const auto seq = sample_sequence(Regime::Perfect, 1.0, n, 0, 0);
    const double mf = meeting_probability(joint_distribution(canonical_input(CanonicalPair::PsiMinus, n), seq));
    const double mc = meeting_probability(joint_distribution(canonical_input(CanonicalPair::PsiS, n), seq));
    EXPECT_LT(mf, mc) << "n=" << n;
  }
}

TEST(Observables, OriginProbabilityParityOnPerfectLattice) {
  bool some_even_nonzero = false;
  for (int n = 1; n <= 14; ++n) {
    const auto seq = sample_sequence(Regime::Perfect, 1.0, n, 0, 0);
    for (auto pair : {CanonicalPair::PhiPlus, CanonicalPair::PsiMinus, CanonicalPair::PsiS}) {
      const auto j = joint_distribution(canonical_input(pair, n), seq);
      const double c = origin_probability(j);
      EXPECT_LE(c, meeting_probability(j) + 1e-15);
      if (n % 2) EXPECT_EQ(c, 0.0) << "n=" << n;
      else if (c > 1e-6) some_even_nonzero = true;
    }
  }
  EXPECT_TRUE(some_even_nonzero);
}

TEST(Observables, DistanceOrderingOnPerfectLattice) {
  const int n = 15;
  const auto seq = sample_sequence(Regime::Perfect, 1.0, n, 0, 0);
  const double df = avg_distance(joint_distribution(canonical_input(CanonicalPair::PsiMinus, n), seq));
  const double dc = avg_distance(joint_distribution(canonical_input(CanonicalPair::PsiS, n), seq));
  const double db = avg_distance(joint_distribution(canonical_input(CanonicalPair::PhiPlus, n), seq));
  EXPECT_GT(df, dc);
  EXPECT_GT(dc, db);
}

// Least-squares slope of log V1 against log N.
TEST(Observables, PerfectSpreadIsBallistic) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (int n = 10; n <= 40; n += 2) {
    const auto seq = sample_sequence(Regime::Perfect, 1.0, n, 0, 0);
    const double x = std::log(n), y = std::log(v1(CoinState::phi_plus(), seq));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  EXPECT_NEAR(slope, 2.0, 0.1);
}

TEST(ReducedCoin, KnownSpectra) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = make_localized(0, random_coin(rng), 3);
    const auto b = make_localized(0, random_coin(rng), 3);
    const auto f = reduced_coin_decomposition(make_two_walker(PairKind::FermionSym, a, b));
    EXPECT_NEAR(f.eigenvalues[0], 0.5, 1e-12);
    EXPECT_NEAR(f.eigenvalues[1], 0.5, 1e-12);

    const auto same = reduced_coin_decomposition(make_two_walker(PairKind::BosonSym, a, a));
    EXPECT_NEAR(same.eigenvalues[0], 1.0, 1e-12);
    EXPECT_NEAR(same.eigenvalues[1], 0.0, 1e-12);
    EXPECT_NEAR(std::abs(inner_product(same.eigenvectors[0], a.coin_at(0))), 1.0, 1e-12);

    const auto bd = reduced_coin_decomposition(make_two_walker(PairKind::BosonSym, a, b));
    EXPECT_NEAR(bd.eigenvalues[0] + bd.eigenvalues[1], 1.0, 1e-12);
    EXPECT_GE(bd.eigenvalues[1], -1e-12);
    EXPECT_NEAR(std::abs(inner_product(bd.eigenvectors[0], bd.eigenvectors[1])), 0.0, 1e-12);
    EXPECT_NEAR(bd.eigenvectors[0].norm_sq(), 1.0, 1e-12);
    EXPECT_NEAR(bd.eigenvectors[1].norm_sq(), 1.0, 1e-12);
  }
  const auto orth = reduced_coin_decomposition(canonical_input(CanonicalPair::PhiPlus, 2));
  EXPECT_NEAR(orth.eigenvalues[0], 0.5, 1e-12);
  EXPECT_NEAR(orth.eigenvalues[1], 0.5, 1e-12);
  EXPECT_THROW(reduced_coin_decomposition(make_two_walker(PairKind::BosonSym,
                                                          make_localized(1, CoinState::spin_up(), 3),
                                                          make_localized(0, CoinState::spin_down(), 3))),
               std::invalid_argument);
}

TEST(ReducedCoin, ClosedFormEigenpairsHaveSmallResidual) {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    const double a = g(rng), d = trial % 10 == 0 ? a : g(rng);
    const Complex b = trial % 7 == 0 ? Complex{} : Complex{g(rng), g(rng)};
    const auto dec = hermitian_eigen_2x2(a, b, d);
    for (int k = 0; k < 2; ++k) {
      const auto& v = dec.eigenvectors[k];
      const Complex r0 = a * v.up + b * v.down - dec.eigenvalues[k] * v.up;
      const Complex r1 = std::conj(b) * v.up + d * v.down - dec.eigenvalues[k] * v.down;
      EXPECT_LE(std::abs(r0) + std::abs(r1), 1e-12);
    }
    EXPECT_GE(dec.eigenvalues[0], dec.eigenvalues[1]);
  }
}

TEST(Spread, CanonicalInputsShareSingleWalkerSpread) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto regime : {Regime::Statical, Regime::Dynamical}) {
    for (int trial = 0; trial < 40; ++trial) {
      const int n = 1 + trial % 15;
      const auto seq = sample_sequence(regime, u(rng), n, 44, static_cast<std::uint64_t>(trial));
      const double ref = v1(CoinState::phi_plus(), seq);
      EXPECT_NEAR(ref, v1(CoinState::phi_minus(), seq), 1e-10);
      for (auto pair : {CanonicalPair::PhiPlus, CanonicalPair::PsiMinus, CanonicalPair::PsiS}) {
        EXPECT_NEAR(spread_two(joint_distribution(canonical_input(pair, n), seq)), ref, 1e-10);
      }
    }
  }
}

TEST(Spread, ClassicalSpreadIsAverageOfSingles) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 10;
    const auto seq = sample_sequence(Regime::Dynamical, 0.5 + 0.02 * trial, n, 45, static_cast<std::uint64_t>(trial));
    const CoinState c1 = random_coin(rng), c2 = random_coin(rng);
    const auto in = make_two_walker(PairKind::ClassicalSeparable, make_localized(0, c1, n), make_localized(0, c2, n));
    EXPECT_NEAR(spread_two(joint_distribution(in, seq)), 0.5 * (v1(c1, seq) + v1(c2, seq)), 1e-10);
  }
}

TEST(Spread, EigenWeightedIdentity) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 12;
    const auto seq = sample_sequence(trial % 2 ? Regime::Dynamical : Regime::Statical, u(rng), n, 46,
                                     static_cast<std::uint64_t>(trial));
    const auto a = make_localized(0, random_coin(rng), n);
    const auto b = make_localized(0, random_coin(rng), n);
    for (auto kind : {PairKind::BosonSym, PairKind::FermionSym, PairKind::ClassicalSeparable}) {
      const auto rep = marginal_spread_identity_check(make_two_walker(kind, a, b), seq);
      EXPECT_TRUE(rep.passed) << rep.abs_difference;
    }
    // Boson spread never exceeds the best eigen-coin spread.
    const auto in = make_two_walker(PairKind::BosonSym, a, b);
    const auto dec = reduced_coin_decomposition(in);
    const double best = std::max(v1(dec.eigenvectors[0], seq), v1(dec.eigenvectors[1], seq));
    EXPECT_LE(spread_two(joint_distribution(in, seq)), best + 1e-10);
  }
}

TEST(Spread, OrthogonalPairsMatchSingleWalker) {
  const int n = 10;
  const auto seq = sample_sequence(Regime::Dynamical, 0.8, n, 47, 0);
  const auto a = make_localized(0, CoinState{{0.6, 0.0}, {0.0, 0.8}}, n);
  const auto b = make_localized(0, CoinState{{0.0, 0.8}, {0.6, 0.0}}, n);
  ASSERT_NEAR(std::abs(inner_product(a, b)), 0.0, 1e-15);
  const double ref = v1(CoinState::phi_plus(), seq);
  for (auto kind : {PairKind::BosonSym, PairKind::ClassicalSeparable}) {
    EXPECT_NEAR(spread_two(joint_distribution(make_two_walker(kind, a, b), seq)), ref, 1e-10);
  }
}

TEST(Sample, QuantityDispatch) {
  const auto seq = sample_sequence(Regime::Perfect, 1.0, 5, 0, 0);
  EXPECT_THROW(sample_quantity(Quantity::D, parse_input("single:up"), seq), std::invalid_argument);
  EXPECT_THROW(sample_quantity(Quantity::V1, parse_input("phi_plus"), seq), std::invalid_argument);
  EXPECT_EQ(sample_quantity(Quantity::C, parse_input("psi_s"), seq), 0.0);
  EXPECT_EQ(parse_quantity("V"), Quantity::V2);
  EXPECT_THROW(parse_quantity("Q"), std::invalid_argument);
}

TEST(Sweep, MeanAndStderr) {
  const std::vector<double> same(10, 0.3);
  const auto ms = mean_and_stderr(same);
  EXPECT_DOUBLE_EQ(ms.mean, 0.3);
  EXPECT_EQ(ms.std_error, 0.0);
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};  // stderr = sqrt(5/3)/2
  const auto m2 = mean_and_stderr(xs);
  EXPECT_DOUBLE_EQ(m2.mean, 2.5);
  EXPECT_NEAR(m2.std_error, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
  EXPECT_THROW(mean_and_stderr(std::vector<double>{1.0}), std::invalid_argument);
}

TEST(Sweep, PerfectRegimeHasZeroStderr) {
  const auto grid = linear_grid(0.0, 1.0, 5);
  const auto c = sweep(Quantity::M, parse_input("psi_s"), Regime::Perfect, grid, 7, 4, 1, 1);
  ASSERT_EQ(c.means.size(), 5u);
  for (double s : c.stderrs) EXPECT_EQ(s, 0.0);
  for (double m : c.means) EXPECT_EQ(m, c.means[0]);
}

TEST(Sweep, TrappedEndpointAndErrors) {
  const auto grid = linear_grid(0.0, 1.0, 3);
  const auto c = sweep(Quantity::C, parse_input("phi_plus"), Regime::Statical, grid, 5, 8, 2, 1);
  EXPECT_NEAR(c.means[0], 1.0, 1e-14);
  EXPECT_EQ(c.stderrs[0], 0.0);
  EXPECT_EQ(c.means[2], 0.0);
  EXPECT_THROW(sweep(Quantity::C, parse_input("phi_plus"), Regime::Statical, grid, 5, 1, 2, 1), std::invalid_argument);
  EXPECT_THROW(sweep(Quantity::C, parse_input("phi_plus"), Regime::Statical, std::vector<double>{}, 5, 8, 2, 1),
               std::invalid_argument);
  EXPECT_THROW(sweep(Quantity::C, parse_input("phi_plus"), Regime::Statical, std::vector<double>{1.2}, 5, 8, 2, 1),
               std::invalid_argument);
}

TEST(Sweep, SingleInputUsesSingleSpread) {
  const std::vector<double> grid{0.5};
  const auto c = sweep(Quantity::V2, parse_input("single:phi+"), Regime::Dynamical, grid, 6, 4, 3, 1);
  EXPECT_EQ(c.quantity, Quantity::V1);
  double s = 0.0;
  for (std::uint64_t a = 0; a < 4; ++a) s += v1(CoinState::phi_plus(), sample_sequence(Regime::Dynamical, 0.5, 6, 3, a));
  EXPECT_NEAR(c.means[0], s / 4.0, 1e-12);
}

TEST(Sweep, LinearGrid) {
  const auto g = linear_grid(0.0, 1.0, 41);
  EXPECT_EQ(g.size(), 41u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_NEAR(g[1], 0.025, 1e-16);
  EXPECT_EQ(linear_grid(0.3, 0.9, 1), std::vector<double>{0.3});
  EXPECT_THROW(linear_grid(0.0, 1.0, 0), std::invalid_argument);
}
