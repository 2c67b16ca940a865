#include "retro/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "retro/error.hpp"

namespace retro {
namespace {

double sorted_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return std::accumulate(v.begin(), v.end(), 0.0);
}

void check_outcome(const Profile& profile, std::span<const double> outcome) {
  if (outcome.size() != profile.project_count()) {
    throw Error(ErrorCode::shape_mismatch, "outcome has " + std::to_string(outcome.size()) +
                                               " entries for " +
                                               std::to_string(profile.project_count()) +
                                               " projects");
  }
}

}  // namespace

std::vector<double> voter_distances(const Profile& profile, std::span<const double> outcome) {
  check_outcome(profile, outcome);
  std::vector<double> out(profile.voter_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = l1_distance(profile.ballot(i), outcome);
  return out;
}

double utilitarian_welfare(const Profile& profile, const Allocation& outcome) {
  return sorted_sum(voter_distances(profile, outcome.shares())) /
         static_cast<double>(profile.voter_count());
}

double egalitarian_welfare(const Profile& profile, const Allocation& outcome) {
  const auto d = voter_distances(profile, outcome.shares());
  return *std::max_element(d.begin(), d.end());
}

WelfareReport welfare_report(const Profile& profile, const Allocation& outcome) {
  return {utilitarian_welfare(profile, outcome), egalitarian_welfare(profile, outcome)};
}

// With a_(1) <= ... <= a_(m), the gap a_(k+1) - a_(k) appears in |a_i - a_j|
// for exactly k (m - k) unordered pairs. Equal entries give exact zeros.
double gini_index(std::span<const double> values) {
  std::vector<double> a(values.begin(), values.end());
  for (double x : a) {
    if (!std::isfinite(x) || x < 0.0) {
      throw Error(ErrorCode::invalid_argument, "gini_index needs finite non-negative entries");
    }
  }
  std::sort(a.begin(), a.end());
  const double total = std::accumulate(a.begin(), a.end(), 0.0);
  if (!(total > 0.0)) {
    throw Error(ErrorCode::degenerate_profile, "gini_index of a zero allocation");
  }
  const std::size_t m = a.size();
  double pairs = 0.0;
  for (std::size_t k = 1; k < m; ++k) {
    const double gap = a[k] - a[k - 1];
    if (gap != 0.0) pairs += gap * static_cast<double>(k) * static_cast<double>(m - k);
  }
  return 2.0 * pairs / (2.0 * static_cast<double>(m) * total);
}

double gini_index_direct(std::span<const double> values) {
  double pairs = 0.0;
  double total = 0.0;
  for (double x : values) {
    total += x;
    for (double y : values) pairs += std::abs(x - y);
  }
  if (!(total > 0.0)) {
    throw Error(ErrorCode::degenerate_profile, "gini_index of a zero allocation");
  }
  return pairs / (2.0 * static_cast<double>(values.size()) * total);
}

ProportionalityResult proportionality_check(const Profile& profile, const Allocation& outcome,
                                            std::size_t k) {
  if (k == 0) throw Error(ErrorCode::invalid_argument, "proportionality needs k >= 1");
  check_outcome(profile, outcome.shares());
  const std::size_t n = profile.voter_count();
  const std::size_t threshold = (n + k - 1) / k;
  const double required = 1.0 / static_cast<double>(k);

  for (std::size_t p = 0; p < profile.project_count(); ++p) {
    std::vector<std::size_t> coalition;
    for (std::size_t i = 0; i < n; ++i) {
      const auto b = profile.ballot(i);
      const double total = std::accumulate(b.begin(), b.end(), 0.0);
      if (std::abs(b[p] - total) <= kEqualityTolerance * std::max(1.0, total)) {
        coalition.push_back(i);
      }
    }
    if (coalition.size() >= threshold && outcome[p] < required - kSumTolerance) {
      return {false, ProportionalityWitness{p, std::move(coalition), k, required, outcome[p]}};
    }
  }
  return {};
}

double ground_truth_alignment(const Allocation& outcome, std::span<const double> truth) {
  return l1_distance(outcome.shares(), truth);
}

}  // namespace retro
