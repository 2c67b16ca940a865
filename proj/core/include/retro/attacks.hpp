#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "retro/profile.hpp"
#include "retro/rule_spec.hpp"

namespace retro {

/// Outcome of a greedy manipulation search. Costs are upper bounds on the
/// true minimum, never certified optima.
struct AttackResult {
  std::size_t target = 0;
  double increase = 0.0;      // requested rise of the target's share
  double before = 0.0;        // target share on the original profile
  double after = 0.0;         // target share on the modified profile
  double cost = 0.0;          // l1 ballot change (bribery) or voter count (control)
  double token_mass = 0.0;    // cost expressed in normalized voter tokens
  bool achieved = false;      // after >= before + increase - 1e-9
  std::size_t iterations = 0;
  std::uint64_t digest = 0;   // FNV-1a of the modified profile's entries
};

enum class ControlMode { add, remove };

/// FNV-1a over the raw bytes of the profile's entries, shape included.
std::uint64_t profile_digest(const Profile& profile);

/// Greedy bribery: repeatedly moves mass from the (voter, project) pair whose
/// move raises the target share the most, re-running the rule each step. The
/// step starts at max(1e-4, increase/4), doubles while nothing helps, and the
/// final move is bisected to land on the goal. cost is the l1 distance
/// between the original and the modified profile (each unit moved counts
/// twice). Throws TargetUnreachable when even the all-on-target profile
/// misses the goal; InvalidArgument for a negative increase.
AttackResult bribery_cost(const Profile& profile, const RuleSpec& rule, std::size_t target,
                          double increase);

/// add: append unit-vector voters on the target one at a time.
/// remove: greedily delete the voter whose removal maximizes the target share.
/// cost is the voter count. Throws TargetUnreachable.
AttackResult control_cost(const Profile& profile, const RuleSpec& rule, std::size_t target,
                          double increase, ControlMode mode);

struct RobustnessSummary {
  double mean = 0.0;
  double max = 0.0;
  std::vector<double> samples;  // l1 outcome shift per trial, trial order
};

/// Each trial resamples one uniformly chosen voter's ballot from Dirichlet(1)
/// using stream (seed, trial) and records the l1 shift of the outcome.
RobustnessSummary robustness_probe(const Profile& profile, const RuleSpec& rule,
                                   std::size_t trials, std::uint64_t seed);

struct VevResult {
  double value = 0.0;  // largest l1 outcome shift
  std::size_t voter = 0;
  std::size_t project = 0;
};

/// Ballot `voter` concentrated on `project`: `concentration` there and the
/// rest spread over the other projects in proportion to the original
/// weights (uniformly if those are all zero).
std::vector<double> concentrated_ballot(std::span<const double> ballot, std::size_t project,
                                        double concentration);

/// l1 outcome shift when `voter` concentrates on `project`.
double vev_shift(const Profile& profile, const RuleSpec& rule, std::size_t voter,
                 std::size_t project, double concentration);

/// Max of vev_shift over all (voter, project) pairs; ties keep the first pair.
VevResult voter_extractable_value(const Profile& profile, const RuleSpec& rule,
                                  double concentration);

}  // namespace retro
