#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "retro/csv.hpp"
#include "retro/error.hpp"
#include "retro/profile.hpp"
#include "retro/rng.hpp"
#include "test_support.hpp"

namespace retro {
namespace {

using testing::thrown_code;

TEST(ValidateProfile, NormalizesTokenRows) {
  const auto p = validate_profile(Profile::Rows{{2.0, 2.0}});
  EXPECT_EQ(p.ballot(0)[0], 0.5);
  EXPECT_EQ(p.ballot(0)[1], 0.5);
  EXPECT_TRUE(p.normalized());
}

TEST(ValidateProfile, RejectsNegativeWeight) {
  EXPECT_EQ(thrown_code([] { (void)validate_profile(Profile::Rows{{-0.1, 1.1}}); }),
            ErrorCode::negative_weight);
}

TEST(ValidateProfile, RejectsEmptyBallot) {
  EXPECT_EQ(thrown_code([] { (void)validate_profile(Profile::Rows{{0.0, 0.0}}); }),
            ErrorCode::empty_ballot);
}

TEST(ValidateProfile, RejectsRaggedRows) {
  EXPECT_EQ(thrown_code([] { (void)Profile::from_rows({{1.0, 0.0}, {1.0}}); }),
            ErrorCode::shape_mismatch);
}

TEST(ValidateProfile, IsIdempotent) {
  auto rng = CounterRng::derive(11, {});
  for (int trial = 0; trial < 200; ++trial) {
    Profile::Rows rows;
    const std::size_t n = 1 + rng.below(6);
    const std::size_t m = 1 + rng.below(6);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> r(m);
      for (auto& v : r) v = 1000.0 * rng.next_unit();
      r[0] += 1.0;
      rows.push_back(r);
    }
    const auto once = validate_profile(rows, 8e6);
    EXPECT_EQ(validate_profile(once), once);
  }
}

TEST(ValidateProfile, AsCastKeepsEntries) {
  const auto p = Profile::as_cast({{0.1, 1.0}});
  EXPECT_FALSE(p.normalized());
  EXPECT_EQ(p.ballot(0)[1], 1.0);
  const auto v = validate_profile(p);
  EXPECT_TRUE(v.normalized());
  EXPECT_NEAR(v.ballot(0)[0], 0.1 / 1.1, 1e-15);
}

TEST(BallotCsv, ParsesAndNormalizesRows) {
  const auto p = parse_ballots_csv("p1,p2\n3,1\n0,4\n", 8.0);
  ASSERT_EQ(p.voter_count(), 2u);
  ASSERT_EQ(p.project_count(), 2u);
  EXPECT_EQ(p.budget_tokens(), 8.0);
  EXPECT_EQ(p.ballot(0)[0], 0.75);
  EXPECT_EQ(p.ballot(0)[1], 0.25);
  EXPECT_EQ(p.ballot(1)[0], 0.0);
  EXPECT_EQ(p.ballot(1)[1], 1.0);
  EXPECT_EQ(p.project_ids(), (std::vector<std::string>{"p1", "p2"}));
}

TEST(BallotCsv, RejectsNonNumericCell) {
  EXPECT_EQ(thrown_code([] { (void)parse_ballots_csv("a,b\n1,x\n", 1.0); }),
            ErrorCode::parse_error);
}

TEST(BallotCsv, RejectsWrongRowLength) {
  EXPECT_EQ(thrown_code([] { (void)parse_ballots_csv("a,b\n1,2,3\n", 1.0); }),
            ErrorCode::shape_mismatch);
}

TEST(BallotCsv, MissingFileIsIoError) {
  EXPECT_EQ(thrown_code([] { (void)load_ballots_csv("/nonexistent/ballots.csv", 1.0); }),
            ErrorCode::io_error);
}

TEST(BallotCsv, RoundTripsLargeSyntheticShape) {
  auto rng = CounterRng::derive(5, {});
  const auto p = Profile::from_rows(testing::random_rows(rng, 108, 229), 8e6);
  std::ostringstream out;
  write_ballots_csv(out, p);
  const auto back = parse_ballots_csv(out.str(), 8e6);
  ASSERT_EQ(back.voter_count(), 108u);
  ASSERT_EQ(back.project_count(), 229u);
  EXPECT_LE(testing::max_abs_diff(back.data(), p.data()), 1e-12);
}

TEST(FormatDouble, RoundTripsExactly) {
  auto rng = CounterRng::derive(9, {});
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.next_unit() * std::pow(10.0, static_cast<double>(rng.below(20)) - 10.0);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(L1Distance, MatchesWorkedValues) {
  const std::vector<double> a{1.0, 0.0};
  EXPECT_EQ(l1_distance(a, a), 0.0);
  EXPECT_NEAR(l1_distance(std::vector<double>{0.75, 0.25}, std::vector<double>{0.375, 0.625}),
              0.75, 1e-15);
  EXPECT_NEAR(l1_distance(std::vector<double>{0.9, 0.1}, std::vector<double>{0.4, 0.6}), 1.0,
              1e-15);
}

TEST(L1Distance, RejectsLengthMismatch) {
  EXPECT_EQ(thrown_code([] {
              (void)l1_distance(std::vector<double>{1.0}, std::vector<double>{1.0, 0.0});
            }),
            ErrorCode::shape_mismatch);
}

TEST(L1Distance, IsAMetric) {
  auto rng = CounterRng::derive(3, {});
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = 1 + rng.below(8);
    const auto a = testing::uniform_simplex(rng, m);
    const auto b = testing::uniform_simplex(rng, m);
    const auto c = testing::uniform_simplex(rng, m);
    EXPECT_EQ(l1_distance(a, b), l1_distance(b, a));
    EXPECT_LE(l1_distance(a, a), 1e-12);
    EXPECT_LE(l1_distance(a, c), l1_distance(a, b) + l1_distance(b, c) + 1e-12);
    EXPECT_GE(l1_distance(a, b), 0.0);
  }
}

TEST(Allocation, RejectsInvalidShares) {
  EXPECT_EQ(thrown_code([] { Allocation a({0.5, -0.1}); }), ErrorCode::invalid_argument);
  EXPECT_EQ(thrown_code([] { Allocation a({0.7, 0.7}); }), ErrorCode::invalid_argument);
}

TEST(ProfileEditing, JoinPermuteAndRemove) {
  const auto a = Profile::from_rows({{1.0, 0.0}, {0.25, 0.75}});
  const auto b = Profile::from_rows({{0.5, 0.5}});
  const auto j = a.join(b);
  EXPECT_EQ(j.voter_count(), 3u);
  EXPECT_EQ(j.ballot(2)[0], 0.5);
  const std::vector<std::size_t> order{2, 0, 1};
  const auto perm = j.permute_voters(order);
  EXPECT_EQ(perm.ballot(0)[0], 0.5);
  EXPECT_EQ(perm.ballot(1)[0], 1.0);
  EXPECT_EQ(j.remove_voter(0).ballot(0)[1], 0.75);
  EXPECT_EQ(thrown_code([&] { (void)b.remove_voter(0); }), ErrorCode::degenerate_profile);
}

TEST(CounterRng, StreamsAreReproducibleAndDistinct) {
  auto a = CounterRng::derive(42, {1, 2});
  auto b = CounterRng::derive(42, {1, 2});
  auto c = CounterRng::derive(42, {2, 1});
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    seen.insert(x);
    seen.insert(c.next_u64());
  }
  EXPECT_EQ(seen.size(), 200u);
}

TEST(CounterRng, BelowStaysInRangeAndCoversIt) {
  auto rng = CounterRng::derive(7, {});
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    ++hits[v];
  }
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(CounterRng, UnitDrawHasUniformMoments) {
  auto rng = CounterRng::derive(8, {});
  double s = 0.0;
  double s2 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_unit();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
    s2 += u * u;
  }
  EXPECT_NEAR(s / n, 0.5, 3.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(s2 / n, 1.0 / 3.0, 0.005);
}

TEST(ErrorCodes, NamesAndExitStatusesAreDistinct) {
  std::set<std::string> names;
  std::set<int> statuses;
  for (int c = 0; c <= static_cast<int>(ErrorCode::invalid_argument); ++c) {
    const auto code = static_cast<ErrorCode>(c);
    names.emplace(to_string(code));
    statuses.insert(exit_status(code));
    EXPECT_NE(exit_status(code), 0);
  }
  EXPECT_EQ(names.size(), statuses.size());
  EXPECT_EQ(std::string(to_string(ErrorCode::parse_error)), "ParseError");
}

}  // namespace
}  // namespace retro
