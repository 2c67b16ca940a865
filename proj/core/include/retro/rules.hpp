#pragma once

#include <cstddef>
#include <vector>

#include "retro/profile.hpp"
#include "retro/rule_spec.hpp"

namespace retro {

/// Median of a multiset: 0 when empty, mean of the two middle order
/// statistics when the count is even.
double median_of(std::vector<double> values);

struct MedianSummary {
  std::vector<double> raw_medians;
  std::vector<std::size_t> supporter_counts;  // voters with strictly positive weight
};

/// Per-project medians. With `positive_only` the median runs over the
/// strictly positive entries of each column; otherwise over all entries.
MedianSummary median_summary(const Profile& profile, bool positive_only);

/// a_p proportional to the sum over voters of sqrt(x_ip).
Allocation quadratic_rule(const Profile& profile);

/// a_p proportional to the total weight on p (the per-voter average for
/// normalized profiles).
Allocation mean_rule(const Profile& profile);

/// All-votes medians, normalized. Throws DegenerateProfile if they are all 0.
Allocation normalized_median_rule(const Profile& profile);

/// Positive-only medians normalized to shares b_p. A project keeps b_p only if
/// its median token amount reaches q1 and it has at least q2 supporters; the
/// kept shares are renormalized. Throws DegenerateProfile if none is kept.
Allocation quorum_median_rule(const Profile& profile, double q1, std::size_t q2);

/// All-votes medians normalized to c_p, then one capping pass
///   d_p = min(c_p, k1) + excess * c_p / sum(c),  excess = sum max(0, c_j - k1),
/// then projects with d_p < k2 are dropped and the survivors renormalized.
/// Throws DegenerateProfile if nothing survives, InvalidArgument on bad caps.
Allocation capped_median_rule(const Profile& profile, double k1, double k2);

/// The submitted ballot with the least total l1 distance to all ballots.
/// Scores within kEqualityTolerance count as tied; the lowest voter wins.
Allocation midpoint_rule(const Profile& profile);
std::size_t midpoint_voter(const Profile& profile);

/// Dispatches on spec.kind.
Allocation allocate(const Profile& profile, const RuleSpec& spec);

}  // namespace retro
