#include <gtest/gtest.h>

#include <random>

#include "nashcont/game.hpp"
#include "nashcont/start_system.hpp"

using namespace nashcont;

namespace {

Game random_game(const GameFormat& f, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> p(static_cast<std::size_t>(f.players()), std::vector<double>(f.outcomes()));
  for (auto& row : p)
    for (auto& x : row) x = u(rng);
  return Game(f, p);
}

MixedProfile random_profile(const GameFormat& f, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MixedProfile m;
  for (int i = 0; i < f.players(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(f.strategies(i)));
    double s = 0;
    for (auto& x : row) s += (x = u(rng) + 0.01);
    for (auto& x : row) x /= s;
    m.sigma.push_back(row);
  }
  return m;
}

}  // namespace

TEST(GameFormat, RejectsDegenerateShapes) {
  EXPECT_THROW(GameFormat({2}), std::invalid_argument);
  EXPECT_THROW(GameFormat({1, 0}), std::invalid_argument);
  const auto f = GameFormat::from_strategy_counts({3, 2, 4});
  EXPECT_EQ(f.ds(), (std::vector<int>{2, 1, 3}));
  EXPECT_EQ(f.total(), 6);
  EXPECT_EQ(f.outcomes(), 24u);
  EXPECT_EQ(f.to_string(), "3:3,2,4");
}

TEST(GameFormat, OutcomeIndexPlayerOneFastest) {
  const GameFormat f({1, 2});
  EXPECT_EQ(f.outcome_index(std::vector<int>{1, 0}), 1u);
  EXPECT_EQ(f.outcome_index(std::vector<int>{0, 1}), 2u);
  EXPECT_EQ(f.outcome_index(std::vector<int>{1, 2}), 5u);
  for (std::size_t o = 0; o < f.outcomes(); ++o) EXPECT_EQ(f.outcome_index(f.pure_profile(o)), o);
  EXPECT_THROW(f.outcome_index(std::vector<int>{2, 0}), std::out_of_range);
}

TEST(FlatIndex, SmallFormatValues) {
  const GameFormat f({2, 2, 2});
  EXPECT_EQ(flat_index(f, 0, 1) + 1, 1);
  EXPECT_EQ(flat_index(f, 1, 2) + 1, 4);
  EXPECT_EQ(flat_index(f, 2, 2) + 1, 6);
  EXPECT_THROW(flat_index(f, 0, 0), std::out_of_range);
  EXPECT_THROW(flat_index(f, 0, 3), std::out_of_range);
  EXPECT_THROW(flat_index(f, 3, 1), std::out_of_range);
}

TEST(FlatIndex, IsABijection) {
  for (const auto& d : std::vector<std::vector<int>>{{1, 1}, {2, 3}, {1, 2, 3}, {3, 1, 1, 2}}) {
    const GameFormat f(d);
    std::vector<int> hits(static_cast<std::size_t>(f.total()), 0);
    for (int i = 0; i < f.players(); ++i)
      for (int j = 1; j <= f.d(i); ++j) {
        const int n = flat_index(f, i, j);
        ASSERT_GE(n, 0);
        ASSERT_LT(n, f.total());
        ++hits[static_cast<std::size_t>(n)];
        EXPECT_EQ(flat_coordinate(f, n), std::make_pair(i, j));
      }
    for (int h : hits) EXPECT_EQ(h, 1);
  }
}

TEST(Game, ValidatesPayoffTable) {
  const GameFormat f({1, 1});
  EXPECT_THROW(Game(f, {{0, 0, 0, 0}}), std::invalid_argument);
  EXPECT_THROW(Game(f, {{0, 0, 0}, {0, 0, 0, 0}}), std::invalid_argument);
  EXPECT_THROW(Game(f, {{0, 0, 0, NAN}, {0, 0, 0, 0}}), std::invalid_argument);
}

TEST(ExpectedPayoff, PureProfileGivesTableEntry) {
  std::mt19937_64 rng(1);
  const GameFormat f({2, 1, 2});
  const Game g = random_game(f, rng);
  for (std::size_t o = 0; o < f.outcomes(); ++o) {
    const auto s = f.pure_profile(o);
    const auto p = MixedProfile::pure(f, s);
    for (int i = 0; i < f.players(); ++i) EXPECT_DOUBLE_EQ(expected_payoff(g, i, p), g.payoff(i, o));
  }
}

TEST(ExpectedPayoff, ConstantGame) {
  const GameFormat f({2, 2});
  const Game g(f, {std::vector<double>(9, 3.5), std::vector<double>(9, 3.5)});
  std::mt19937_64 rng(2);
  EXPECT_NEAR(expected_payoff(g, 0, random_profile(f, rng)), 3.5, 1e-14);
  EXPECT_NEAR(expected_payoff(g, 1, MixedProfile::uniform(f)), 3.5, 1e-14);
}

TEST(ExpectedPayoff, DimensionMismatchThrows) {
  const GameFormat f({1, 1});
  const Game g(f, {{0, 0, 0, 0}, {0, 0, 0, 0}});
  MixedProfile bad{{{0.5, 0.5}, {1.0}}};
  EXPECT_THROW(expected_payoff(g, 0, bad), std::invalid_argument);
  EXPECT_THROW(pure_strategy_payoff(g, 0, 0, bad), std::invalid_argument);
}

TEST(ExpectedPayoff, IsMultilinear) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ua(0.0, 1.0);
  const GameFormat f({2, 1, 2});
  for (int trial = 0; trial < 50; ++trial) {
    const Game g = random_game(f, rng);
    const auto base = random_profile(f, rng);
    const auto other = random_profile(f, rng);
    const int slot = trial % f.players();
    const double alpha = ua(rng);
    auto a = base, b = base, mix = base;
    b.sigma[static_cast<std::size_t>(slot)] = other.sigma[static_cast<std::size_t>(slot)];
    for (std::size_t j = 0; j < mix.sigma[static_cast<std::size_t>(slot)].size(); ++j)
      mix.sigma[static_cast<std::size_t>(slot)][j] = alpha * a.sigma[static_cast<std::size_t>(slot)][j] +
                                                    (1 - alpha) * b.sigma[static_cast<std::size_t>(slot)][j];
    for (int i = 0; i < f.players(); ++i)
      EXPECT_NEAR(expected_payoff(g, i, mix), alpha * expected_payoff(g, i, a) + (1 - alpha) * expected_payoff(g, i, b),
                  1e-12);
  }
}

TEST(PayoffDifferences, ZeroWhenOwnStrategyIsBase) {
  std::mt19937_64 rng(4);
  const GameFormat f({2, 2, 1});
  const Game g = random_game(f, rng);
  const auto t = payoff_differences(g);
  for (std::size_t o = 0; o < f.outcomes(); ++o) {
    const auto s = f.pure_profile(o);
    for (int i = 0; i < f.players(); ++i)
      if (s[static_cast<std::size_t>(i)] == 0) {
        EXPECT_EQ(t(i, o), 0.0);
      }
  }
}

TEST(PayoffDifferences, ZeroWhenPayoffIgnoresOwnStrategy) {
  const GameFormat f({1, 2});
  std::vector<double> u0(f.outcomes()), u1(f.outcomes());
  for (std::size_t o = 0; o < f.outcomes(); ++o) {
    const auto s = f.pure_profile(o);
    u0[o] = 10.0 * s[1];  // player 1 depends only on player 2
    u1[o] = static_cast<double>(o);
  }
  const auto t = payoff_differences(Game(f, {u0, u1}));
  for (std::size_t o = 0; o < f.outcomes(); ++o) EXPECT_EQ(t(0, o), 0.0);
}

TEST(PayoffDifferences, AgreeWithExpectedPayoffAtPureProfiles) {
  std::mt19937_64 rng(5);
  for (const auto& d : std::vector<std::vector<int>>{{1, 1}, {2, 2}, {1, 1, 1}, {3, 3}, {1, 2, 1}, {1, 1, 1, 1, 1}}) {
    const GameFormat f(d);
    ASSERT_LE(f.outcomes(), 64u);
    const Game g = random_game(f, rng);
    const auto t = payoff_differences(g);
    for (std::size_t o = 0; o < f.outcomes(); ++o) {
      const auto s = f.pure_profile(o);
      const auto p = MixedProfile::pure(f, s);
      for (int i = 0; i < f.players(); ++i) {
        const double want = pure_strategy_payoff(g, i, s[static_cast<std::size_t>(i)], p) - pure_strategy_payoff(g, i, 0, p);
        EXPECT_NEAR(t(i, o), want, 1e-14);
      }
    }
  }
}

// The factorizable game built from the 6x6 totally nonsingular matrix:
// u_i(s_ij, s_-i) is a product over opponents of (m_{n(i,j), s_k} - 1), with
// -1 for an opponent's base strategy.
TEST(PayoffDifferences, FactorizableThreePlayerGameCoefficients) {
  const GameFormat f({2, 2, 2});
  const auto start = build_start_system(f, build_tn_matrix(6));
  const auto t = payoff_differences(start_game(start));
  // Equation of (player 1, strategy 2) uses row 2 = (2, -4, ...): the
  // coefficient of sigma22 sigma31 is (-4 - 1) * (2 - 1).
  EXPECT_EQ(t(0, std::vector<int>{2, 2, 1}), -5.0);
  // Both opponents on their base strategy: (-1) * (-1).
  EXPECT_EQ(t(0, std::vector<int>{2, 0, 0}), 1.0);
}

TEST(ExpectedPayoff, TwoByTwoByTwoFactorizableDifferenceVanishes) {
  const GameFormat f({1, 1, 1});
  const Game g = start_game(build_start_system(f, build_tn_matrix(3)));
  // (sigma21 - 1)(sigma31 - 1) at sigma21 = 1, sigma31 = 1/2.
  const MixedProfile p{{{0.5, 0.5}, {0.0, 1.0}, {0.5, 0.5}}};
  EXPECT_NEAR(pure_strategy_payoff(g, 0, 1, p) - pure_strategy_payoff(g, 0, 0, p), 0.0, 1e-15);
  const MixedProfile q{{{0.5, 0.5}, {0.5, 0.5}, {0.75, 0.25}}};
  EXPECT_NEAR(pure_strategy_payoff(g, 0, 1, q) - pure_strategy_payoff(g, 0, 0, q), (0.5 - 1) * (0.25 - 1), 1e-15);
}
