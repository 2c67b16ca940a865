#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "retro/profile.hpp"

namespace retro {

/// Both fields are distances (welfare-cost): lower is better.
struct WelfareReport {
  double utilitarian = 0.0;  // mean per-voter l1 distance to the outcome
  double egalitarian = 0.0;  // max per-voter l1 distance
};

double utilitarian_welfare(const Profile& profile, const Allocation& outcome);
double egalitarian_welfare(const Profile& profile, const Allocation& outcome);
WelfareReport welfare_report(const Profile& profile, const Allocation& outcome);

/// Per-voter l1 distances to the outcome. Throws ShapeMismatch.
std::vector<double> voter_distances(const Profile& profile, std::span<const double> outcome);

/// sum_ij |a_i - a_j| / (2 m sum a), in O(m log m) from the sorted gaps.
/// Throws DegenerateProfile on a zero total, InvalidArgument on negative entries.
double gini_index(std::span<const double> values);
inline double gini_index(const Allocation& outcome) { return gini_index(outcome.shares()); }

/// The O(m^2) definition, kept as a reference implementation.
double gini_index_direct(std::span<const double> values);

struct ProportionalityWitness {
  std::size_t project = 0;
  std::vector<std::size_t> coalition;  // single-minded voters on `project`
  std::size_t k = 0;
  double required = 0.0;  // 1/k
  double actual = 0.0;    // outcome share of `project`
};

struct ProportionalityResult {
  bool holds = true;
  std::optional<ProportionalityWitness> witness;
};

/// A voter is single-minded on p when their whole ballot sits on p. Any
/// group of at least ceil(n/k) such voters entitles p to a share of 1/k.
/// Reports the first project (lowest index) short of that by more than 1e-9.
ProportionalityResult proportionality_check(const Profile& profile, const Allocation& outcome,
                                            std::size_t k);

/// l1 distance to the designated ground-truth allocation.
double ground_truth_alignment(const Allocation& outcome, std::span<const double> truth);

}  // namespace retro
