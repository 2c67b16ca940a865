#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "retro/error.hpp"
#include "retro/phantoms.hpp"
#include "retro/rules.hpp"
#include "test_support.hpp"

namespace retro {
namespace {

using testing::max_abs_diff;
using testing::thrown_code;

constexpr std::array<PhantomFamily, 2> kFamilies = {PhantomFamily::independent_markets,
                                                    PhantomFamily::majoritarian};

bool is_majoritarian(PhantomFamily f) { return f == PhantomFamily::majoritarian; }

TEST(PhantomValue, IndependentMarkets) {
  const PhantomSystem im(PhantomFamily::independent_markets, 3);
  for (double t : {0.0, 0.3, 0.9, 1.0}) EXPECT_EQ(phantom_value(im, 3, t), 0.0);
  EXPECT_NEAR(phantom_value(im, 1, 0.4), 0.8, 1e-15);
  EXPECT_EQ(phantom_value(im, 0, 0.5), 1.0);
}

TEST(PhantomValue, Majoritarian) {
  const PhantomSystem maj(PhantomFamily::majoritarian, 2);
  EXPECT_NEAR(phantom_value(maj, 1, 0.5), 0.5, 1e-15);
  EXPECT_EQ(phantom_value(maj, 1, 0.3), 0.0);
  EXPECT_EQ(phantom_value(maj, 1, 0.7), 1.0);
}

TEST(PhantomValue, MatchesClampOracleAndIsOrdered) {
  auto rng = CounterRng::derive(31, {});
  for (auto f : kFamilies) {
    for (int trial = 0; trial < 500; ++trial) {
      const std::size_t n = 1 + rng.below(8);
      const double t = rng.next_unit();
      const PhantomSystem sys(f, n);
      for (std::size_t k = 0; k <= n; ++k) {
        EXPECT_NEAR(sys.value(k, t), testing::oracle_phantom(is_majoritarian(f), n, k, t), 1e-15);
        if (k > 0) EXPECT_GE(sys.value(k - 1, t), sys.value(k, t));
      }
    }
  }
}

TEST(PhantomValue, RejectsBadArguments) {
  const PhantomSystem sys(PhantomFamily::majoritarian, 2);
  EXPECT_EQ(thrown_code([&] { (void)sys.value(3, 0.5); }), ErrorCode::index_out_of_range);
  EXPECT_EQ(thrown_code([&] { (void)sys.value(1, 1.5); }), ErrorCode::invalid_argument);
  EXPECT_EQ(thrown_code([&] { (void)sys.value(1, -0.1); }), ErrorCode::invalid_argument);
}

TEST(SolvePhantoms, UnanimityReturnsTheBallot) {
  auto rng = CounterRng::derive(32, {});
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = testing::uniform_simplex(rng, 2 + rng.below(5));
    const Profile::Rows rows(1 + rng.below(6), x);
    const auto sol = solve_phantoms(Profile::from_rows(rows), PhantomFamily::majoritarian);
    EXPECT_LE(max_abs_diff(sol.allocation.shares(), x), 1e-9);
  }
}

TEST(SolvePhantoms, SingleVoterIsReproduced) {
  const Profile::Rows rows{{0.6, 0.4}};
  for (auto f : kFamilies) {
    const auto sol = solve_phantoms(Profile::from_rows(rows), f);
    EXPECT_NEAR(sol.allocation[0], 0.6, 1e-9);
    EXPECT_NEAR(sol.allocation[1], 0.4, 1e-9);
    const auto oracle = testing::oracle_phantom_outcome(rows, is_majoritarian(f));
    EXPECT_LE(max_abs_diff(sol.allocation.shares(), oracle), 1e-5);
  }
}

TEST(SolvePhantoms, MajorityExampleMatchesOracle) {
  const Profile::Rows rows{{1, 0}, {1, 0}, {0, 1}};
  const auto sol = solve_phantoms(Profile::from_rows(rows), PhantomFamily::majoritarian);
  const auto oracle = testing::oracle_phantom_outcome(rows, true);
  EXPECT_LE(max_abs_diff(sol.allocation.shares(), oracle), 1e-5);
  EXPECT_LE(sol.residual, 1e-9);
}

TEST(SolvePhantoms, OffSimplexInputIsNormalizedFirst) {
  const auto raw = solve_phantoms(Profile::as_cast({{3, 1}, {1, 1}}), PhantomFamily::majoritarian);
  const auto norm =
      solve_phantoms(Profile::from_rows({{0.75, 0.25}, {0.5, 0.5}}), PhantomFamily::majoritarian);
  EXPECT_EQ(raw.allocation, norm.allocation);
}

TEST(SolvePhantoms, MatchesGridOracleOnRandomInstances) {
  auto rng = CounterRng::derive(33, {});
  for (int trial = 0; trial < 60; ++trial) {
    const auto rows =
        Profile::from_rows(testing::random_rows(rng, 1 + rng.below(6), 2 + rng.below(4))).rows();
    for (auto f : kFamilies) {
      const auto sol = solve_phantoms(Profile::from_rows(rows), f);
      const auto oracle = testing::oracle_phantom_outcome(rows, is_majoritarian(f));
      EXPECT_LE(max_abs_diff(sol.allocation.shares(), oracle), 1e-5)
          << to_string(f) << " trial " << trial;
      EXPECT_LE(sol.residual, 1e-9);
    }
  }
}

TEST(SolvePhantoms, ObjectiveIsNonDecreasingInT) {
  auto rng = CounterRng::derive(34, {});
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = testing::random_profile(rng, 1 + rng.below(6), 2 + rng.below(4));
    for (auto f : kFamilies) {
      const PhantomMedians med(p, f);
      double prev = med.total(0.0);
      for (int i = 1; i <= 100; ++i) {
        const double cur = med.total(static_cast<double>(i) / 100.0);
        EXPECT_GE(cur, prev - 1e-15);
        prev = cur;
      }
      EXPECT_LE(med.total(0.0), 1.0 + 1e-12);
      EXPECT_GE(med.total(1.0), 1.0 - 1e-12);
    }
  }
}

TEST(SolvePhantoms, ResidualWithinToleranceOnLargeProfiles) {
  auto rng = CounterRng::derive(35, {});
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = testing::random_profile(rng, 40, 145);
    for (auto f : kFamilies) {
      const auto sol = solve_phantoms(p, f);
      EXPECT_LE(sol.residual, 1e-9);
      EXPECT_NEAR(sol.allocation.total(), 1.0, 1e-9);
    }
  }
}

// Deviations along the segment from the truthful ballot toward every vertex
// and every other voter's ballot, in steps of 1e-2.
std::vector<std::vector<double>> line_deviations(const Profile& p, std::size_t voter) {
  const auto truth = p.ballot(voter);
  const std::size_t m = p.project_count();
  std::vector<std::vector<double>> targets;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> e(m, 0.0);
    e[j] = 1.0;
    targets.push_back(e);
  }
  for (std::size_t i = 0; i < p.voter_count(); ++i) {
    if (i != voter) targets.emplace_back(p.ballot(i).begin(), p.ballot(i).end());
  }
  std::vector<std::vector<double>> out;
  for (const auto& target : targets) {
    for (int s = 1; s <= 100; ++s) {
      const double w = s / 100.0;
      std::vector<double> b(m);
      for (std::size_t j = 0; j < m; ++j) b[j] = (1.0 - w) * truth[j] + w * target[j];
      out.push_back(b);
    }
  }
  return out;
}

TEST(SolvePhantoms, NoBeneficialLineDeviationForMoreThanTwoProjects) {
  auto rng = CounterRng::derive(36, {});
  for (int trial = 0; trial < 150; ++trial) {
    const auto p = testing::random_profile(rng, 1 + rng.below(5), 3 + rng.below(2));
    for (auto f : kFamilies) {
      const auto truthful = solve_phantoms(p, f).allocation;
      for (std::size_t v = 0; v < p.voter_count(); ++v) {
        const double base = testing::l1(p.ballot(v), truthful.shares());
        for (const auto& dev : line_deviations(p, v)) {
          const auto out = solve_phantoms(p.replace_ballot(v, dev), f).allocation;
          const double gain = base - testing::l1(p.ballot(v), out.shares());
          ASSERT_LE(gain, 1e-9) << to_string(f) << " trial " << trial << " voter " << v;
        }
      }
    }
  }
}

TEST(SolvePhantoms, MajoritarianIsWelfareOptimalOnSmallGrids) {
  auto rng = CounterRng::derive(37, {});
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = testing::random_profile(rng, 1 + rng.below(6), 2 + rng.below(2));
    const auto rows = p.rows();
    const auto sol = solve_phantoms(p, PhantomFamily::majoritarian);
    const double mech = testing::total_distance(rows, sol.allocation.shares());
    // Slack of four grid steps, as for the finer grid in the acceptance run.
    EXPECT_LE(mech, testing::grid_welfare_optimum(rows, 100) + 4e-2) << "trial " << trial;
  }
}

TEST(SolvePhantoms, IndependentMarketsCanLoseWelfare) {
  // Two voters favour the first project; the linear phantoms pull the outcome
  // toward the middle and away from the welfare-optimal corner.
  const Profile::Rows rows{{1, 0, 0}, {1, 0, 0}, {0, 0.5, 0.5}};
  const auto sol = solve_phantoms(Profile::from_rows(rows), PhantomFamily::independent_markets);
  const double mech = testing::total_distance(rows, sol.allocation.shares());
  EXPECT_GT(mech, testing::grid_welfare_optimum(rows, 1000) + 1e-2);
}

}  // namespace
}  // namespace retro
