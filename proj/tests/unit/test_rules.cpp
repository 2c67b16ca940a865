#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "retro/error.hpp"
#include "retro/rules.hpp"
#include "test_support.hpp"

namespace retro {
namespace {

using testing::max_abs_diff;
using testing::thrown_code;

std::vector<double> shares(const Allocation& a) { return {a.shares().begin(), a.shares().end()}; }

// Independent reference implementations, straight from the definitions.
std::vector<double> oracle_mean(const Profile::Rows& rows) {
  std::vector<double> out(rows.front().size(), 0.0);
  double total = 0.0;
  for (const auto& r : rows) {
    for (std::size_t p = 0; p < r.size(); ++p) {
      out[p] += r[p];
      total += r[p];
    }
  }
  for (auto& v : out) v /= total;
  return out;
}

std::vector<double> oracle_quadratic(const Profile::Rows& rows) {
  std::vector<double> out(rows.front().size(), 0.0);
  for (const auto& r : rows) {
    for (std::size_t p = 0; p < r.size(); ++p) out[p] += std::sqrt(r[p]);
  }
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  for (auto& v : out) v /= total;
  return out;
}

std::vector<double> oracle_normalized_median(const Profile::Rows& rows) {
  std::vector<double> out(rows.front().size());
  for (std::size_t p = 0; p < out.size(); ++p) {
    std::vector<double> col;
    for (const auto& r : rows) col.push_back(r[p]);
    out[p] = testing::plain_median(col);
  }
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  for (auto& v : out) v /= total;
  return out;
}

std::vector<double> oracle_midpoint(const Profile::Rows& rows) {
  std::size_t best = 0;
  double best_score = INFINITY;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double score = testing::total_distance(rows, rows[i]);
    if (score < best_score - 1e-12) {
      best_score = score;
      best = i;
    }
  }
  return rows[best];
}

RuleSpec spec_of(RuleKind k) { return RuleSpec::of(k); }

// ---- worked examples ----

TEST(QuadraticRule, WorkedExamples) {
  auto a = quadratic_rule(Profile::from_rows({{0.01, 0.99}, {0.01, 0.99}, {0.99, 0.01}}));
  EXPECT_NEAR(a[0], 0.364, 1e-3);
  EXPECT_NEAR(a[1], 0.636, 1e-3);
  a = quadratic_rule(Profile::from_rows({{0.7, 0.3}, {0.4, 0.6}, {0.3, 0.7}}));
  EXPECT_NEAR(a[0], 0.483, 1e-3);
  EXPECT_NEAR(a[1], 0.517, 1e-3);
  a = quadratic_rule(Profile::from_rows({{0.25, 0.25, 0.25, 0.25}}));
  for (double v : a.shares()) EXPECT_NEAR(v, 0.25, 1e-15);
}

TEST(MeanRule, WorkedExamples) {
  auto a = mean_rule(Profile::from_rows({{0.75, 0.25}, {0.0, 1.0}}));
  EXPECT_NEAR(a[0], 0.375, 1e-15);
  EXPECT_NEAR(a[1], 0.625, 1e-15);
  a = mean_rule(Profile::from_rows({{1, 0}, {1, 0}, {0.2, 0.8}}));
  EXPECT_NEAR(a[0], 0.733, 1e-3);
  EXPECT_NEAR(a[1], 0.267, 1e-3);
  const std::vector<double> x{0.1, 0.6, 0.3};
  a = mean_rule(Profile::from_rows({x, x, x, x}));
  EXPECT_LE(max_abs_diff(a.shares(), x), 1e-15);
}

TEST(MedianSummary, AllVotesMedians) {
  const auto s = median_summary(
      Profile::as_cast({{0.57, 0.24, 0.19}, {0.39, 0.48, 0.13}, {0.44, 0.09, 0.48}}), false);
  EXPECT_NEAR(s.raw_medians[0], 0.44, 1e-15);
  EXPECT_NEAR(s.raw_medians[1], 0.24, 1e-15);
  EXPECT_NEAR(s.raw_medians[2], 0.19, 1e-15);
}

TEST(MedianSummary, PositiveOnlyMediansAndSupporters) {
  auto s = median_summary(Profile::from_rows({{1, 0}, {0, 1}}), true);
  EXPECT_EQ(s.raw_medians, (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(s.supporter_counts, (std::vector<std::size_t>{1, 1}));
  s = median_summary(Profile::from_rows({{0, 1}, {0, 1}}), true);
  EXPECT_EQ(s.raw_medians, (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(s.supporter_counts, (std::vector<std::size_t>{0, 2}));
}

TEST(MedianOf, EvenCountAveragesMiddlePair) {
  EXPECT_EQ(median_of({}), 0.0);
  EXPECT_EQ(median_of({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median_of({4.0, 1.0, 3.0, 2.0}), 2.5);
}

TEST(NormalizedMedianRule, WorkedExamples) {
  // The third ballot is cast as written; it sums to 1.01.
  auto a = normalized_median_rule(
      Profile::as_cast({{0.57, 0.24, 0.19}, {0.39, 0.48, 0.13}, {0.44, 0.09, 0.48}}));
  EXPECT_NEAR(a[0], 0.506, 1e-3);
  EXPECT_NEAR(a[1], 0.276, 1e-3);
  EXPECT_NEAR(a[2], 0.218, 1e-3);
  a = normalized_median_rule(Profile::as_cast({{0.1, 0.9}, {0.4, 0.2}, {0.6, 0.1}}));
  EXPECT_NEAR(a[0], 0.667, 1e-3);
  EXPECT_NEAR(a[1], 0.333, 1e-3);
  const std::vector<double> x{0.2, 0.8};
  a = normalized_median_rule(Profile::from_rows({x, x, x}));
  EXPECT_LE(max_abs_diff(a.shares(), x), 1e-15);
}

TEST(NormalizedMedianRule, AllZeroMediansAreDegenerate) {
  EXPECT_EQ(thrown_code([] {
              (void)normalized_median_rule(Profile::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
            }),
            ErrorCode::degenerate_profile);
}

TEST(QuorumMedianRule, WorkedExample) {
  const auto a = quorum_median_rule(Profile::from_rows({{0.2, 0.8}, {0.1, 0.9}, {0.5, 0.5}}), 0.3, 2);
  EXPECT_NEAR(a[0], 0.0, 1e-12);
  EXPECT_NEAR(a[1], 1.0, 1e-12);
}

TEST(QuorumMedianRule, DisabledQuorumIsPositiveOnlyMedian) {
  auto rng = CounterRng::derive(21, {});
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = testing::random_profile(rng, 1 + rng.below(6), 2 + rng.below(4));
    const auto s = median_summary(p, true);
    std::vector<double> expect = s.raw_medians;
    const double total = std::accumulate(expect.begin(), expect.end(), 0.0);
    for (auto& v : expect) v /= total;
    EXPECT_LE(max_abs_diff(quorum_median_rule(p, 0.0, 0).shares(), expect), 1e-12);
  }
}

TEST(QuorumMedianRule, UnreachableQuorumIsDegenerate) {
  const auto p = Profile::from_rows({{0.1, 0.9}, {0.1, 0.9}});
  EXPECT_EQ(thrown_code([&] { (void)quorum_median_rule(p, 0.5, 3); }),
            ErrorCode::degenerate_profile);
  EXPECT_EQ(thrown_code([&] { (void)quorum_median_rule(p, 0.95, 3); }),
            ErrorCode::degenerate_profile);
  // With the supporter bar met, only the second project clears q1 = 0.5.
  const auto a = quorum_median_rule(p, 0.5, 2);
  EXPECT_EQ(shares(a), (std::vector<double>{0.0, 1.0}));
}

TEST(CappedMedianRule, NoCapEqualsNormalizedMedian) {
  auto rng = CounterRng::derive(22, {});
  int compared = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = testing::random_profile(rng, 1 + rng.below(6), 2 + rng.below(4));
    try {
      const auto expect = normalized_median_rule(p);
      EXPECT_LE(max_abs_diff(capped_median_rule(p, 1.0, 0.0).shares(), expect.shares()), 1e-15);
      ++compared;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::degenerate_profile);
    }
  }
  EXPECT_GT(compared, 200);
}

TEST(CappedMedianRule, SinglePassCap) {
  const std::vector<double> x{0.8, 0.1, 0.1};
  const auto a = capped_median_rule(Profile::from_rows({x, x, x}), 0.5, 0.0);
  EXPECT_NEAR(a[0], 0.74, 1e-12);
  EXPECT_NEAR(a[1], 0.13, 1e-12);
  EXPECT_NEAR(a[2], 0.13, 1e-12);
  EXPECT_NEAR(a.total(), 1.0, 1e-12);
}

TEST(CappedMedianRule, EliminationThenRenormalize) {
  const std::vector<double> x{0.8, 0.1, 0.1};
  const auto a = capped_median_rule(Profile::from_rows({x, x, x}), 1.0, 0.15);
  EXPECT_EQ(shares(a), (std::vector<double>{1.0, 0.0, 0.0}));
}

TEST(CappedMedianRule, RejectsBadCaps) {
  const auto p = Profile::from_rows({{0.5, 0.5}});
  EXPECT_EQ(thrown_code([&] { (void)capped_median_rule(p, 0.0, 0.0); }),
            ErrorCode::invalid_argument);
  EXPECT_EQ(thrown_code([&] { (void)capped_median_rule(p, 0.3, 0.3); }),
            ErrorCode::invalid_argument);
}

TEST(MidpointRule, WorkedExamples) {
  auto a = midpoint_rule(Profile::from_rows({{0.9, 0.1}, {0.4, 0.6}, {0.2, 0.8}}));
  EXPECT_EQ(shares(a), (std::vector<double>{0.4, 0.6}));
  a = midpoint_rule(Profile::from_rows({{1, 0}, {1, 0}, {0, 1}}));
  EXPECT_EQ(shares(a), (std::vector<double>{1.0, 0.0}));
  const std::vector<double> x{0.3, 0.3, 0.4};
  a = midpoint_rule(Profile::from_rows({x}));
  EXPECT_EQ(shares(a), x);
}

TEST(MidpointRule, TiesGoToLowestVoter) {
  EXPECT_EQ(midpoint_voter(Profile::from_rows({{1, 0}, {0, 1}})), 0u);
}

// ---- oracle agreement ----

TEST(RuleOracles, AgreeOnRandomProfiles) {
  auto rng = CounterRng::derive(23, {});
  for (int trial = 0; trial < 500; ++trial) {
    const auto rows = testing::random_rows(rng, 1 + rng.below(7), 2 + rng.below(5));
    const auto p = Profile::from_rows(rows);
    const auto normalized_rows = p.rows();
    EXPECT_LE(max_abs_diff(mean_rule(p).shares(), oracle_mean(normalized_rows)), 1e-12);
    EXPECT_LE(max_abs_diff(quadratic_rule(p).shares(), oracle_quadratic(normalized_rows)), 1e-12);
    EXPECT_LE(max_abs_diff(midpoint_rule(p).shares(), oracle_midpoint(normalized_rows)), 1e-12);
    try {
      const auto expect = oracle_normalized_median(normalized_rows);
      EXPECT_LE(max_abs_diff(normalized_median_rule(p).shares(), expect), 1e-12);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::degenerate_profile);
    }
  }
}

// ---- properties ----

std::vector<RuleSpec> every_rule() {
  std::vector<RuleSpec> out;
  for (auto k : kAllRules) out.push_back(spec_of(k));
  out.push_back(RuleSpec::quorum(0.05, 1));
  out.push_back(RuleSpec::capped(0.4, 0.05));
  return out;
}

TEST(RuleProperties, OutputsSumToOne) {
  auto rng = CounterRng::derive(24, {});
  std::size_t checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto p = testing::random_profile(rng, 1 + rng.below(8), 2 + rng.below(6));
    for (const auto& r : every_rule()) {
      try {
        const auto a = allocate(p, r);
        EXPECT_NEAR(a.total(), 1.0, 1e-9) << r.label();
        for (double v : a.shares()) EXPECT_GE(v, 0.0);
        ++checked;
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::degenerate_profile) << r.label();
      }
    }
  }
  EXPECT_GT(checked, 8000u);
}

TEST(RuleProperties, AnonymityIsExact) {
  auto rng = CounterRng::derive(25, {});
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.below(7);
    const auto p = testing::random_profile(rng, n, 2 + rng.below(5));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const auto q = p.permute_voters(order);
    for (const auto& r : every_rule()) {
      if (r.kind == RuleKind::midpoint) continue;  // ties resolve by index
      try {
        EXPECT_EQ(shares(allocate(p, r)), shares(allocate(q, r))) << r.label();
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::degenerate_profile);
      }
    }
  }
}

TEST(RuleProperties, MidpointAnonymousUpToTies) {
  auto rng = CounterRng::derive(26, {});
  std::size_t strict = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.below(7);
    Profile::Rows rows;
    for (std::size_t i = 0; i < n; ++i) rows.push_back(testing::uniform_simplex(rng, 3));
    const auto p = Profile::from_rows(rows);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const auto a = shares(midpoint_rule(p));
    const auto b = shares(midpoint_rule(p.permute_voters(order)));
    // l1 betweenness makes exact ties common; only a strict winner must be
    // the same ballot, otherwise both picks must score the same.
    std::vector<double> scores;
    for (const auto& r : p.rows()) scores.push_back(testing::total_distance(p.rows(), r));
    std::sort(scores.begin(), scores.end());
    if (n == 1 || scores[1] - scores[0] > 1e-9) {
      EXPECT_EQ(a, b);
      ++strict;
    } else {
      EXPECT_NEAR(testing::total_distance(p.rows(), a), testing::total_distance(p.rows(), b), 1e-12);
    }
  }
  EXPECT_GT(strict, 100u);
}

TEST(RuleProperties, NeutralityPermutesOutputs) {
  auto rng = CounterRng::derive(27, {});
  const std::vector<RuleSpec> neutral = {
      spec_of(RuleKind::quadratic), spec_of(RuleKind::mean), spec_of(RuleKind::normalized_median),
      spec_of(RuleKind::midpoint),  RuleSpec::quorum(0.05, 2), RuleSpec::capped(0.4, 0.05)};
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 2 + rng.below(5);
    const auto p = testing::random_profile(rng, 1 + rng.below(6), m);
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const auto q = p.permute_projects(order);
    for (const auto& r : neutral) {
      try {
        const auto a = allocate(p, r);
        const auto b = allocate(q, r);
        for (std::size_t j = 0; j < m; ++j) {
          EXPECT_NEAR(b[j], a[order[j]], 1e-12) << r.label();
        }
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::degenerate_profile);
      }
    }
  }
}

// Raises x[voter][project] by delta and renormalizes that ballot.
Profile raised(const Profile& p, std::size_t voter, std::size_t project, double delta) {
  std::vector<double> b(p.ballot(voter).begin(), p.ballot(voter).end());
  b[project] += delta;
  return p.replace_ballot(voter, b);
}

TEST(RuleProperties, MeanIsMonotone) {
  auto rng = CounterRng::derive(28, {});
  for (int trial = 0; trial < 2000; ++trial) {
    const auto p = testing::random_profile(rng, 1 + rng.below(6), 2 + rng.below(5));
    const auto voter = rng.below(p.voter_count());
    const auto project = rng.below(p.project_count());
    const double delta = rng.next_unit();
    EXPECT_GE(mean_rule(raised(p, voter, project, delta))[project],
              mean_rule(p)[project] - 1e-12);
  }
}

TEST(RuleProperties, CappedMedianIsMonotone) {
  auto rng = CounterRng::derive(29, {});
  const auto rule = RuleSpec::capped(0.4, 0.05);
  std::size_t checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const auto p = testing::random_profile(rng, 1 + rng.below(6), 2 + rng.below(5));
    const auto voter = rng.below(p.voter_count());
    const auto project = rng.below(p.project_count());
    const double delta = rng.next_unit();
    double before = 0.0;
    double after = 0.0;
    try {
      before = allocate(p, rule)[project];
      after = allocate(raised(p, voter, project, delta), rule)[project];
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::degenerate_profile);
      continue;
    }
    ++checked;
    // Report the first violation only, with enough detail to replay it.
    ASSERT_GE(after, before - 1e-9) << "trial " << trial << ": voter " << voter << " raises project "
                                    << project << " by " << delta << "; share " << before
                                    << " -> " << after;
  }
  EXPECT_GT(checked, 1000u);
}

TEST(RuleProperties, QuorumMedianIsNotMonotone) {
  // Written ballots kept as cast; the second voter raises the first project.
  const auto before = Profile::as_cast({{0.5, 0.5}, {0.0, 1.0}, {1.0, 0.0}});
  const auto after = Profile::as_cast({{0.5, 0.5}, {0.1, 1.0}, {1.0, 0.0}});
  const auto a = quorum_median_rule(before, 0.0, 0);
  const auto b = quorum_median_rule(after, 0.0, 0);
  EXPECT_NEAR(b[0], 0.4, 1e-3);
  EXPECT_NEAR(b[1], 0.6, 1e-3);
  EXPECT_LT(b[0], a[0] - 1e-9);
}

TEST(RuleProperties, OutputsAreBitIdenticalAcrossCalls) {
  auto rng = CounterRng::derive(30, {});
  const auto p = testing::random_profile(rng, 9, 7);
  for (const auto& r : every_rule()) {
    EXPECT_EQ(shares(allocate(p, r)), shares(allocate(p, r)));
  }
}

TEST(RuleSpec, LabelsAndParsing) {
  EXPECT_EQ(RuleSpec::of(RuleKind::mean).label(), "mean");
  EXPECT_EQ(RuleSpec::capped(0.125, 0.0017).label(), "capped_median(k1=0.125,k2=0.0017)");
  for (auto k : kAllRules) EXPECT_EQ(parse_rule_kind(to_string(k)), k);
  EXPECT_EQ(thrown_code([] { (void)parse_rule_kind("borda"); }), ErrorCode::config_error);
}

}  // namespace
}  // namespace retro
