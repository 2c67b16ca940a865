#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "retro/profile.hpp"
#include "retro/rng.hpp"
#include "retro/rule_spec.hpp"

namespace retro {

enum class Axiom {
  reinforcement,
  pareto,
  monotonicity,
  participation,
  proportionality,
  max_welfare,
  strategyproofness,
};

inline constexpr std::array<Axiom, 7> kAllAxioms = {
    Axiom::reinforcement,   Axiom::pareto,      Axiom::monotonicity,     Axiom::participation,
    Axiom::proportionality, Axiom::max_welfare, Axiom::strategyproofness,
};

std::string_view to_string(Axiom axiom) noexcept;
Axiom parse_axiom(std::string_view name);  // throws ConfigError

enum class VerdictStatus { no_counterexample_found, counterexample };
std::string_view to_string(VerdictStatus status) noexcept;

/// Everything needed to replay a violation. profiles[0] is the election the
/// rule was run on; profiles[1], when present, is the second group
/// (reinforcement), the raised profile (monotonicity) or the profile with
/// the misreport (strategyproofness).
struct Witness {
  RuleSpec rule;
  std::vector<Profile> profiles;
  std::size_t voter = 0;
  std::size_t project = 0;
  std::size_t k = 0;           // proportionality: the 1/k entitlement
  std::vector<double> point;   // dominating allocation, or the misreported ballot
  std::vector<double> before;  // outcome on profiles[0]
  std::vector<double> after;   // outcome that shows the violation
  double delta = 0.0;          // size of the violation (utility gain, share drop, ...)
  std::size_t trial = 0;
  std::string source;          // "search" or the name of a worked example
};

/// Grid and random searches report "no counterexample found in N trials",
/// never that an axiom holds.
struct AxiomVerdict {
  Axiom axiom = Axiom::reinforcement;
  RuleSpec rule;
  VerdictStatus status = VerdictStatus::no_counterexample_found;
  std::optional<Witness> witness;
  std::size_t trials_run = 0;

  [[nodiscard]] bool violated() const noexcept { return status == VerdictStatus::counterexample; }
};

inline constexpr double kAxiomTolerance = 1e-9;

/// Evaluates a rule. Defaults to allocate(); overridable for mutation tests.
using Evaluator = std::function<Allocation(const Profile&, const RuleSpec&)>;
Evaluator default_evaluator();

/// Compares rule(V1 u V2) with the common outcome. Throws PreconditionUnmet
/// when rule(V1) and rule(V2) differ by more than `tolerance` in l1.
AxiomVerdict check_reinforcement(const RuleSpec& rule, const Profile& first, const Profile& second,
                                 double tolerance = kAxiomTolerance);

/// Raises x[voter][project] by delta (the ballot is renormalized on
/// normalized profiles, kept as written otherwise) and flags a drop of the
/// project's share by more than 1e-9.
AxiomVerdict check_monotonicity(const RuleSpec& rule, const Profile& profile, std::size_t voter,
                                std::size_t project, double delta);

/// Flags when voting leaves `voter` strictly farther (> 1e-9) from the
/// outcome than abstaining. Throws DegenerateProfile for n < 2.
AxiomVerdict check_participation(const RuleSpec& rule, const Profile& profile, std::size_t voter);

/// Looks for an allocation every voter weakly prefers (within 1e-12) and
/// one voter strictly prefers (by > 1e-9). Simplex grid with the given step
/// for m <= 4, otherwise a fixed sample of random points.
AxiomVerdict check_pareto(const RuleSpec& rule, const Profile& profile, double step = 0.02);

/// proportionality_check for every k = 1..n.
AxiomVerdict check_proportionality(const RuleSpec& rule, const Profile& profile);

/// Flags when some grid allocation has a smaller total l1 distance than
/// the outcome by more than 1e-9.
AxiomVerdict check_max_welfare(const RuleSpec& rule, const Profile& profile, double step = 0.02);

/// Tries every simplex-grid ballot (given step) plus pairwise swaps and
/// partial transfers of the truthful ballot for `voter`; flags a report
/// that brings the outcome closer to the truthful ballot by > 1e-9.
AxiomVerdict check_strategyproofness(const RuleSpec& rule, const Profile& profile,
                                     std::size_t voter, double step = 0.05);

/// Re-evaluates a stored witness; true when the violation reproduces.
bool replay_witness(const AxiomVerdict& verdict, const Evaluator& evaluate = default_evaluator());

struct SearchOptions {
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::size_t min_voters = 1;
  std::size_t max_voters = 5;
  std::size_t min_projects = 2;
  std::size_t max_projects = 4;
  double grid_step = 0.05;       // strategyproofness deviations
  double pareto_step = 0.02;     // Pareto and welfare grids
  bool randomize_parameters = true;  // fresh q1/q2 or K1/K2 per trial
};

/// Random election used by the searches: Dirichlet(1) ballots with entries
/// zeroed at random and some single-project ballots mixed in.
Profile random_search_profile(CounterRng& rng, std::size_t voters, std::size_t projects,
                              double single_minded_rate = 0.15);

/// Per-trial parameters for rules that have them; other rules pass through.
RuleSpec randomized_rule(const RuleSpec& rule, CounterRng& rng);

/// Seeded search over random instances. Trial t draws from stream
/// (seed, axiom, t); the counterexample with the lowest trial index wins and
/// stops the search.
AxiomVerdict search_axiom(Axiom axiom, const RuleSpec& rule, const SearchOptions& options);

/// The strategyproofness search with the projects pinned to m.
AxiomVerdict search_strategyproofness(const RuleSpec& rule, std::size_t trials, double step,
                                      std::uint64_t seed, std::size_t projects = 3);

/// Witness taken from a worked textbook construction, when one exists for
/// this cell. The witness has source set to the example's name.
std::optional<AxiomVerdict> known_witness(RuleKind rule, Axiom axiom);

enum class Expectation { holds, violated, violated_when_many_projects };

/// The published property matrix. violated_when_many_projects marks the
/// Independent Markets Pareto cell, claimed only for m >= n^2.
Expectation table_expectation(RuleKind rule, Axiom axiom);

struct ExampleOutcome {
  std::string name;
  bool passed = false;
  double max_error = 0.0;  // largest deviation from the stated numbers
  std::string detail;
};

/// Runs the numeric worked examples against their stated outputs (1e-3).
std::vector<ExampleOutcome> evaluate_appendix_suite(const Evaluator& evaluate = default_evaluator());

/// As above, but throws RegressionFailure naming every failing example.
std::vector<ExampleOutcome> replay_appendix_suite(const Evaluator& evaluate = default_evaluator());

}  // namespace retro
