#include "retro/rules.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "retro/error.hpp"
#include "retro/phantoms.hpp"

namespace retro {
namespace {

// Summing in sorted order makes totals independent of voter and project
// order, so permuted profiles give bit-identical outputs.
double sum_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return std::accumulate(v.begin(), v.end(), 0.0);
}

template <typename Transform>
std::vector<double> column_totals(const Profile& profile, Transform transform) {
  std::vector<double> totals(profile.project_count());
  std::vector<double> column(profile.voter_count());
  for (std::size_t p = 0; p < totals.size(); ++p) {
    for (std::size_t i = 0; i < column.size(); ++i) column[i] = transform(profile.weight(i, p));
    totals[p] = sum_of(column);
  }
  return totals;
}

Allocation normalize_or_throw(std::vector<double> values, const char* rule) {
  const double total = sum_of(values);
  if (!(total > 0.0)) {
    throw Error(ErrorCode::degenerate_profile, std::string(rule) + ": nothing left to allocate");
  }
  for (double& v : values) v /= total;
  return Allocation(std::move(values));
}

}  // namespace

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

MedianSummary median_summary(const Profile& profile, bool positive_only) {
  const std::size_t m = profile.project_count();
  MedianSummary out{std::vector<double>(m), std::vector<std::size_t>(m)};
  std::vector<double> column;
  for (std::size_t p = 0; p < m; ++p) {
    column.clear();
    for (std::size_t i = 0; i < profile.voter_count(); ++i) {
      const double x = profile.weight(i, p);
      if (x > 0.0) ++out.supporter_counts[p];
      if (!positive_only || x > 0.0) column.push_back(x);
    }
    out.raw_medians[p] = median_of(column);
  }
  return out;
}

Allocation quadratic_rule(const Profile& profile) {
  return normalize_or_throw(column_totals(profile, [](double x) { return std::sqrt(x); }),
                            "quadratic");
}

Allocation mean_rule(const Profile& profile) {
  return normalize_or_throw(column_totals(profile, [](double x) { return x; }), "mean");
}

Allocation normalized_median_rule(const Profile& profile) {
  return normalize_or_throw(median_summary(profile, false).raw_medians, "normalized_median");
}

Allocation quorum_median_rule(const Profile& profile, double q1, std::size_t q2) {
  const auto summary = median_summary(profile, true);
  const double total = sum_of(summary.raw_medians);
  if (!(total > 0.0)) {
    throw Error(ErrorCode::degenerate_profile, "quorum_median: all medians are zero");
  }
  std::vector<double> kept(profile.project_count(), 0.0);
  for (std::size_t p = 0; p < kept.size(); ++p) {
    const bool funded =
        summary.raw_medians[p] >= q1 && summary.supporter_counts[p] >= q2;
    if (funded) kept[p] = summary.raw_medians[p] / total;
  }
  return normalize_or_throw(std::move(kept), "quorum_median");
}

Allocation capped_median_rule(const Profile& profile, double k1, double k2) {
  RuleSpec::capped(k1, k2).validate();
  auto shares = median_summary(profile, false).raw_medians;
  const double median_total = sum_of(shares);
  if (!(median_total > 0.0)) {
    throw Error(ErrorCode::degenerate_profile, "capped_median: all medians are zero");
  }
  for (double& c : shares) c /= median_total;

  const double share_total = sum_of(shares);
  std::vector<double> overflow(shares.size());
  for (std::size_t p = 0; p < shares.size(); ++p) overflow[p] = std::max(0.0, shares[p] - k1);
  const double excess = sum_of(std::move(overflow));
  std::vector<double> capped(shares.size());
  for (std::size_t p = 0; p < shares.size(); ++p) {
    capped[p] = std::min(shares[p], k1) + excess * shares[p] / share_total;
  }
  for (double& d : capped) {
    if (d < k2) d = 0.0;
  }
  return normalize_or_throw(std::move(capped), "capped_median");
}

std::size_t midpoint_voter(const Profile& profile) {
  const std::size_t n = profile.voter_count();
  std::vector<double> scores(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = l1_distance(profile.ballot(i), profile.ballot(j));
      scores[i] += d;
      scores[j] += d;
    }
  }
  const double best = *std::min_element(scores.begin(), scores.end());
  for (std::size_t i = 0; i < n; ++i) {
    if (scores[i] <= best + kEqualityTolerance) return i;
  }
  return 0;
}

Allocation midpoint_rule(const Profile& profile) {
  const auto chosen = profile.ballot(midpoint_voter(profile));
  if (profile.normalized()) return Allocation(std::vector<double>(chosen.begin(), chosen.end()));
  return normalize_or_throw(std::vector<double>(chosen.begin(), chosen.end()), "midpoint");
}

Allocation allocate(const Profile& profile, const RuleSpec& spec) {
  switch (spec.kind) {
    case RuleKind::quadratic: return quadratic_rule(profile);
    case RuleKind::mean: return mean_rule(profile);
    case RuleKind::quorum_median: return quorum_median_rule(profile, spec.q1, spec.q2);
    case RuleKind::capped_median: return capped_median_rule(profile, spec.k1, spec.k2);
    case RuleKind::normalized_median: return normalized_median_rule(profile);
    case RuleKind::midpoint: return midpoint_rule(profile);
    case RuleKind::independent_markets:
      return solve_phantoms(profile, PhantomFamily::independent_markets).allocation;
    case RuleKind::majoritarian_phantoms:
      return solve_phantoms(profile, PhantomFamily::majoritarian).allocation;
  }
  throw Error(ErrorCode::invalid_argument, "unknown rule");
}

}  // namespace retro
