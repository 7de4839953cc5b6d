#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include "percwalk/inputs.hpp"
#include "percwalk/io.hpp"

using namespace percwalk;

TEST(Format, SeventeenDigitsRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 2.5e-300, -7.0, 0.0, 0.70710678118654752}) {
    const auto s = io::format_double(x);
    EXPECT_EQ(std::stod(s), x) << s;
  }
  EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(io::format_double(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Csv, DistributionAndJointRoundTrip) {
  const auto seq = sample_sequence(Regime::Dynamical, 0.7, 5, 1, 2);
  const auto d = position_distribution(evolve(make_localized(0, CoinState::phi_plus(), 5), seq));
  const auto t = io::parse_csv(io::distribution_csv(d));
  EXPECT_EQ(t.header, (std::vector<std::string>{"position", "probability"}));
  ASSERT_EQ(t.rows.size(), 11u);
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    EXPECT_EQ(t.rows[k][0], static_cast<double>(static_cast<int>(k) - 5));
    EXPECT_EQ(t.rows[k][1], d.probs[k]);
  }

  const auto j = joint_distribution(canonical_input(CanonicalPair::PhiPlus, 5), seq);
  const auto tj = io::parse_csv(io::joint_csv(j));
  EXPECT_EQ(tj.header, (std::vector<std::string>{"i", "j", "probability"}));
  ASSERT_EQ(tj.rows.size(), 121u);
  for (const auto& row : tj.rows) EXPECT_EQ(row[2], j.at(static_cast<int>(row[0]), static_cast<int>(row[1])));
}

TEST(Csv, CurveHasStderrColumn) {
  ObservableCurve c;
  c.p_grid = {0.0, 0.5};
  c.means = {1.0, 0.25};
  c.stderrs = {0.0, 0.01};
  const auto t = io::parse_csv(io::curve_csv(c));
  EXPECT_EQ(t.header, (std::vector<std::string>{"p", "mean", "stderr"}));
  EXPECT_EQ(t.rows[1][2], 0.01);
}

TEST(Json, EstimationReportFields) {
  const auto grid = linear_grid(0.0, 1.0, 9);
  const auto rep = estimate(origin_event(parse_input("phi_plus"), 5, Regime::Statical), grid, 20, 3, 0.01, 3, 1);
  const auto j = io::to_json(rep);
  EXPECT_EQ(j["input"], "phi_plus");
  EXPECT_EQ(j["event"], "both_at_origin");
  EXPECT_EQ(j["averages"], 20);
  EXPECT_EQ(j["points"].size(), 9u);
  EXPECT_EQ(j["fit"]["coefficients"].size(), 4u);
  const auto parsed = nlohmann::json::parse(j.dump());
  EXPECT_EQ(parsed["points"][4]["P_sim"].get<double>(), rep.curve.means[4]);
  const auto csv = io::parse_csv(io::estimation_csv(rep));
  EXPECT_EQ(csv.header.size(), 7u);
  EXPECT_EQ(csv.rows.size(), 9u);
}

TEST(Files, WriteReadAndSidecar) {
  const auto dir = std::filesystem::temp_directory_path() / "percwalk_io_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  const auto path = dir / "out.csv";
  io::write_text(path, "a,b\n1,2\n");
  EXPECT_EQ(io::read_text(path), "a,b\n1,2\n");
  EXPECT_EQ(io::metadata_path(path), dir / "out.json");
  EXPECT_THROW(io::read_text(dir / "missing.csv"), std::runtime_error);
  std::filesystem::remove_all(dir.parent_path());
}

TEST(Inputs, NamedInputs) {
  const auto phi = parse_input("phi_plus");
  ASSERT_FALSE(phi.is_single());
  EXPECT_EQ(*phi.pair, PairKind::BosonSym);
  EXPECT_EQ(*parse_input("psi_minus").pair, PairKind::FermionSym);
  EXPECT_EQ(*parse_input("psi_s").pair, PairKind::ClassicalSeparable);
  const auto up = parse_input("single:up");
  EXPECT_TRUE(up.is_single());
  EXPECT_EQ(up.coin1.up, Complex(1.0, 0.0));
  EXPECT_EQ(parse_input("single:phi-").coin1.down, CoinState::phi_minus().down);
  EXPECT_THROW(parse_input("single:sideways"), std::invalid_argument);
  EXPECT_THROW(parse_input("triplet"), std::invalid_argument);
}

TEST(Inputs, CustomComponents) {
  const auto in = parse_input("custom:boson:0.6,0.8i,0.8,-0.6i");
  EXPECT_EQ(*in.pair, PairKind::BosonSym);
  EXPECT_EQ(in.coin1.down, Complex(0.0, 0.8));
  EXPECT_EQ(in.coin2.down, Complex(0.0, -0.6));
  const auto s = parse_input("custom:single:0.6+0i,0-0.8j");
  EXPECT_TRUE(s.is_single());
  EXPECT_EQ(s.coin1.down, Complex(0.0, -0.8));
  EXPECT_EQ(detail::parse_complex("1e-3+2.5e+1i"), Complex(1e-3, 25.0));
  EXPECT_EQ(detail::parse_complex("-i"), Complex(0.0, -1.0));
  EXPECT_THROW(parse_input("custom:boson:1,0,1"), std::invalid_argument);
  EXPECT_THROW(parse_input("custom:boson:1,1,1,0"), std::invalid_argument);
  EXPECT_THROW(parse_input("custom:anyon:1,0,0,1"), std::invalid_argument);
  EXPECT_THROW(parse_input("custom:fermion:1,0,1,0").pair_state(3), std::invalid_argument);
}
