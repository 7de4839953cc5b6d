#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "percwalk/lattice.hpp"

using namespace percwalk;

TEST(Lattice, StaticalFullPercolationHasAllBonds) {
  const auto seq = sample_sequence(Regime::Statical, 1.0, 15, 42, 3);
  ASSERT_EQ(seq.configs.size(), 1u);
  EXPECT_EQ(seq.configs[0].num_bonds(), 30u);
  EXPECT_EQ(seq.configs[0].count_present(), 30u);
}

TEST(Lattice, DynamicalZeroPercolationHasNoBonds) {
  const auto seq = sample_sequence(Regime::Dynamical, 0.0, 15, 42, 3);
  ASSERT_EQ(seq.configs.size(), 15u);
  for (const auto& c : seq.configs) EXPECT_EQ(c.count_present(), 0u);
}

TEST(Lattice, PerfectRegimeIgnoresP) {
  const auto seq = sample_sequence(Regime::Perfect, 0.1, 9, 1, 0);
  ASSERT_EQ(seq.configs.size(), 1u);
  EXPECT_EQ(seq.configs[0].count_present(), 18u);
}

TEST(Lattice, RejectsInvalidArguments) {
  EXPECT_THROW(sample_sequence(Regime::Statical, -0.1, 5, 0, 0), std::invalid_argument);
  EXPECT_THROW(sample_sequence(Regime::Statical, 1.1, 5, 0, 0), std::invalid_argument);
  EXPECT_THROW(sample_sequence(Regime::Dynamical, std::nan(""), 5, 0, 0), std::invalid_argument);
  EXPECT_THROW(sample_sequence(Regime::Dynamical, 0.5, 0, 0, 0), std::invalid_argument);
}

// Binomial count: over N * 2N * steps bonds the presence fraction stays within 3 sigma.
TEST(Lattice, DynamicalPresenceFractionMatchesP) {
  const double p = 0.75;
  const auto seq = sample_sequence(Regime::Dynamical, p, 300, 2024, 0);
  double present = 0.0, total = 0.0;
  for (const auto& c : seq.configs) {
    present += static_cast<double>(c.count_present());
    total += static_cast<double>(c.num_bonds());
  }
  const double sigma = std::sqrt(p * (1.0 - p) / total);
  EXPECT_NEAR(present / total, p, 3.0 * sigma);
}

TEST(Lattice, PresenceFractionWithinFourSigmaAcrossP) {
  for (double p : {0.05, 0.3, 0.5, 0.9}) {
    double present = 0.0, total = 0.0;
    for (std::uint64_t a = 0; a < 400; ++a) {
      const auto seq = sample_sequence(Regime::Statical, p, 15, 77, a);
      present += static_cast<double>(seq.configs[0].count_present());
      total += 30.0;
    }
    ASSERT_GE(total, 1e4);
    EXPECT_NEAR(present / total, p, 4.0 * std::sqrt(p * (1.0 - p) / total)) << "p=" << p;
  }
}

TEST(Lattice, ReproducibleRegardlessOfOtherDraws) {
  const auto first = sample_sequence(Regime::Dynamical, 0.6, 12, 555, 17);
  for (std::uint64_t a = 0; a < 40; ++a) (void)sample_sequence(Regime::Dynamical, 0.6, 12, 555, a);
  const auto again = sample_sequence(Regime::Dynamical, 0.6, 12, 555, 17);
  EXPECT_EQ(first, again);
  EXPECT_NE(first.configs, sample_sequence(Regime::Dynamical, 0.6, 12, 555, 18).configs);
  EXPECT_NE(first.configs, sample_sequence(Regime::Dynamical, 0.6, 12, 556, 17).configs);
}

TEST(Lattice, BondsPresentAtLowerPStayPresentAtHigherP) {
  const auto lo = sample_sequence(Regime::Statical, 0.3, 20, 9, 4);
  const auto hi = sample_sequence(Regime::Statical, 0.8, 20, 9, 4);
  for (int i = -20; i < 20; ++i) {
    if (lo.configs[0].present(i)) {
      EXPECT_TRUE(hi.configs[0].present(i));
    }
  }
}

TEST(Lattice, AvgSegmentLength) {
  EXPECT_EQ(avg_segment_length(0.75), 3.0);
  EXPECT_EQ(avg_segment_length(0.5), 1.0);
  EXPECT_EQ(avg_segment_length(0.0), 0.0);
  EXPECT_EQ(avg_segment_length(1.0), std::numeric_limits<double>::infinity());
  EXPECT_THROW(avg_segment_length(1.5), std::invalid_argument);
}

TEST(Lattice, EdgeBondsReportAbsent) {
  BondConfig c(3, true);
  EXPECT_TRUE(c.present(-3));
  EXPECT_TRUE(c.present(2));
  EXPECT_FALSE(c.present(-4));
  EXPECT_FALSE(c.present(3));
  EXPECT_THROW(c.set(3, true), std::out_of_range);
}

TEST(Lattice, DumpFormatRoundTrip) {
  BondConfig c(2, false);
  c.set(-2, true);
  c.set(1, true);
  EXPECT_EQ(format_config(c), "1001");

  const auto seq = sample_sequence(Regime::Dynamical, 0.5, 6, 3, 1);
  const auto text = format_sequence(seq);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
  EXPECT_EQ(parse_sequence(text), seq.configs);
  EXPECT_THROW(parse_config("10x1"), std::invalid_argument);
  EXPECT_THROW(parse_config("101"), std::invalid_argument);
}

TEST(Lattice, RegimeNames) {
  EXPECT_EQ(parse_regime("static"), Regime::Statical);
  EXPECT_EQ(parse_regime("dynamic"), Regime::Dynamical);
  EXPECT_EQ(parse_regime("perfect"), Regime::Perfect);
  EXPECT_THROW(parse_regime("wobbly"), std::invalid_argument);
  EXPECT_EQ(to_string(Regime::Dynamical), "dynamic");
}
