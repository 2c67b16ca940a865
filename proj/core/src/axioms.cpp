#include "retro/axioms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "retro/error.hpp"
#include "retro/metrics.hpp"
#include "retro/rules.hpp"
#include "retro/simplex.hpp"
#include "retro/votegen.hpp"

namespace retro {
namespace {

constexpr double kWeakTolerance = 1e-12;
constexpr std::size_t kSampledPoints = 20000;
constexpr std::uint64_t kSampleSeed = 0x5eed'0f'9a1dULL;

std::vector<double> to_vector(const Allocation& a) { return {a.shares().begin(), a.shares().end()}; }

double total_distance(const Profile& profile, std::span<const double> point) {
  auto d = voter_distances(profile, point);
  std::sort(d.begin(), d.end());
  return std::accumulate(d.begin(), d.end(), 0.0);
}

AxiomVerdict clean(Axiom axiom, const RuleSpec& rule) {
  AxiomVerdict v;
  v.axiom = axiom;
  v.rule = rule;
  v.trials_run = 1;
  return v;
}

AxiomVerdict violation(Axiom axiom, const RuleSpec& rule, Witness w) {
  AxiomVerdict v = clean(axiom, rule);
  v.status = VerdictStatus::counterexample;
  w.rule = rule;
  if (w.source.empty()) w.source = "search";
  v.witness = std::move(w);
  return v;
}

std::size_t divisions_for(double step) {
  if (!(step > 0.0 && step <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "grid step must lie in (0, 1]");
  }
  return static_cast<std::size_t>(std::llround(1.0 / step));
}

// Calls visit for grid points (m <= 4) or a fixed random sample (m > 4).
void for_each_candidate(std::size_t m, double step,
                        const std::function<bool(std::span<const double>)>& visit) {
  if (m <= 4) {
    for_each_simplex_point(m, divisions_for(step), visit);
    return;
  }
  auto rng = CounterRng::derive(kSampleSeed, {m});
  for (std::size_t s = 0; s < kSampledPoints; ++s) {
    const auto b = dirichlet_sample(m, 1.0, rng);
    if (!visit(b.weights())) return;
  }
}

std::optional<Witness> find_dominating(const Profile& profile, std::span<const double> outcome,
                                       double step) {
  const auto current = voter_distances(profile, outcome);
  std::optional<Witness> found;
  for_each_candidate(profile.project_count(), step, [&](std::span<const double> point) {
    bool strict = false;
    double gain = 0.0;
    for (std::size_t i = 0; i < profile.voter_count(); ++i) {
      const double d = l1_distance(profile.ballot(i), point);
      if (d > current[i] + kWeakTolerance) return true;
      if (d < current[i] - kAxiomTolerance) {
        strict = true;
        gain = std::max(gain, current[i] - d);
      }
    }
    if (!strict) return true;
    Witness w;
    w.profiles = {profile};
    w.point.assign(point.begin(), point.end());
    w.delta = gain;
    found = std::move(w);
    return false;
  });
  return found;
}

std::vector<std::vector<double>> deviations(std::span<const double> truth, double step) {
  const std::size_t m = truth.size();
  std::vector<std::vector<double>> out;
  for_each_simplex_point(m, divisions_for(step), [&](std::span<const double> p) {
    out.emplace_back(p.begin(), p.end());
    return true;
  });
  static constexpr double kFractions[] = {0.1, 0.25, 0.5, 1.0};
  for (std::size_t q = 0; q < m; ++q) {
    for (std::size_t r = 0; r < m; ++r) {
      if (q == r) continue;
      if (q < r) {
        std::vector<double> swapped(truth.begin(), truth.end());
        std::swap(swapped[q], swapped[r]);
        out.push_back(std::move(swapped));
      }
      if (truth[q] <= 0.0) continue;
      for (double f : kFractions) {
        std::vector<double> moved(truth.begin(), truth.end());
        const double amount = f * truth[q];
        moved[q] -= amount;
        moved[r] += amount;
        out.push_back(std::move(moved));
      }
    }
  }
  return out;
}

bool dominates(const Profile& profile, std::span<const double> outcome,
               std::span<const double> point) {
  bool strict = false;
  for (std::size_t i = 0; i < profile.voter_count(); ++i) {
    const double now = l1_distance(profile.ballot(i), outcome);
    const double alt = l1_distance(profile.ballot(i), point);
    if (alt > now + kWeakTolerance) return false;
    if (alt < now - kAxiomTolerance) strict = true;
  }
  return strict;
}

}  // namespace

std::string_view to_string(Axiom axiom) noexcept {
  switch (axiom) {
    case Axiom::reinforcement: return "reinforcement";
    case Axiom::pareto: return "pareto";
    case Axiom::monotonicity: return "monotonicity";
    case Axiom::participation: return "participation";
    case Axiom::proportionality: return "proportionality";
    case Axiom::max_welfare: return "max_welfare";
    case Axiom::strategyproofness: return "strategyproofness";
  }
  return "unknown";
}

Axiom parse_axiom(std::string_view name) {
  for (Axiom a : kAllAxioms) {
    if (to_string(a) == name) return a;
  }
  throw Error(ErrorCode::config_error, "unknown axiom '" + std::string(name) + "'");
}

std::string_view to_string(VerdictStatus status) noexcept {
  return status == VerdictStatus::counterexample ? "counterexample" : "no_counterexample_found";
}

Evaluator default_evaluator() {
  return [](const Profile& p, const RuleSpec& r) { return allocate(p, r); };
}

AxiomVerdict check_reinforcement(const RuleSpec& rule, const Profile& first, const Profile& second,
                                 double tolerance) {
  if (first.project_count() != second.project_count()) {
    throw Error(ErrorCode::shape_mismatch, "reinforcement groups differ in project count");
  }
  const auto a1 = allocate(first, rule);
  const auto a2 = allocate(second, rule);
  if (l1_distance(a1.shares(), a2.shares()) > tolerance) {
    throw Error(ErrorCode::precondition_unmet, "the two groups do not share an outcome");
  }
  const auto joint = allocate(first.join(second), rule);
  const double gap = l1_distance(joint.shares(), a1.shares());
  if (gap <= tolerance) return clean(Axiom::reinforcement, rule);
  Witness w;
  w.profiles = {first, second};
  w.before = to_vector(a1);
  w.after = to_vector(joint);
  w.delta = gap;
  return violation(Axiom::reinforcement, rule, std::move(w));
}

AxiomVerdict check_monotonicity(const RuleSpec& rule, const Profile& profile, std::size_t voter,
                                std::size_t project, double delta) {
  if (!(delta >= 0.0)) throw Error(ErrorCode::invalid_argument, "delta must be non-negative");
  if (project >= profile.project_count()) {
    throw Error(ErrorCode::index_out_of_range, "project " + std::to_string(project));
  }
  const auto before = allocate(profile, rule);
  if (delta == 0.0) return clean(Axiom::monotonicity, rule);
  const auto b = profile.ballot(voter);
  std::vector<double> raised(b.begin(), b.end());
  raised[project] += delta;
  const Profile changed = profile.replace_ballot(voter, raised);
  const auto after = allocate(changed, rule);
  const double drop = before[project] - after[project];
  if (drop <= kAxiomTolerance) return clean(Axiom::monotonicity, rule);
  Witness w;
  w.profiles = {profile, changed};
  w.voter = voter;
  w.project = project;
  w.point = raised;
  w.before = to_vector(before);
  w.after = to_vector(after);
  w.delta = drop;
  return violation(Axiom::monotonicity, rule, std::move(w));
}

AxiomVerdict check_participation(const RuleSpec& rule, const Profile& profile, std::size_t voter) {
  if (profile.voter_count() < 2) {
    throw Error(ErrorCode::degenerate_profile, "participation needs at least two voters");
  }
  const auto with = allocate(profile, rule);
  const auto without = allocate(profile.remove_voter(voter), rule);
  const auto truth = profile.ballot(voter);
  const double loss = l1_distance(truth, with.shares()) - l1_distance(truth, without.shares());
  if (loss <= kAxiomTolerance) return clean(Axiom::participation, rule);
  Witness w;
  w.profiles = {profile};
  w.voter = voter;
  w.before = to_vector(with);
  w.after = to_vector(without);
  w.delta = loss;
  return violation(Axiom::participation, rule, std::move(w));
}

AxiomVerdict check_pareto(const RuleSpec& rule, const Profile& profile, double step) {
  const auto outcome = allocate(profile, rule);
  auto found = find_dominating(profile, outcome.shares(), step);
  if (!found) return clean(Axiom::pareto, rule);
  found->before = to_vector(outcome);
  found->after = found->point;
  return violation(Axiom::pareto, rule, std::move(*found));
}

AxiomVerdict check_proportionality(const RuleSpec& rule, const Profile& profile) {
  const auto outcome = allocate(profile, rule);
  for (std::size_t k = 1; k <= profile.voter_count(); ++k) {
    const auto res = proportionality_check(profile, outcome, k);
    if (res.holds) continue;
    Witness w;
    w.profiles = {profile};
    w.k = k;
    w.project = res.witness->project;
    w.before = to_vector(outcome);
    w.after = w.before;
    w.delta = res.witness->required - res.witness->actual;
    return violation(Axiom::proportionality, rule, std::move(w));
  }
  return clean(Axiom::proportionality, rule);
}

AxiomVerdict check_max_welfare(const RuleSpec& rule, const Profile& profile, double step) {
  const auto outcome = allocate(profile, rule);
  const double cost = total_distance(profile, outcome.shares());
  double best = cost;
  std::vector<double> best_point;
  for_each_candidate(profile.project_count(), step, [&](std::span<const double> point) {
    const double c = total_distance(profile, point);
    if (c < best) {
      best = c;
      best_point.assign(point.begin(), point.end());
    }
    return true;
  });
  if (!(best < cost - kAxiomTolerance)) return clean(Axiom::max_welfare, rule);
  Witness w;
  w.profiles = {profile};
  w.point = best_point;
  w.before = to_vector(outcome);
  w.after = best_point;
  w.delta = cost - best;
  return violation(Axiom::max_welfare, rule, std::move(w));
}

AxiomVerdict check_strategyproofness(const RuleSpec& rule, const Profile& profile,
                                     std::size_t voter, double step) {
  const auto truth = profile.ballot(voter);
  const auto honest = allocate(profile, rule);
  const double honest_distance = l1_distance(truth, honest.shares());
  for (const auto& report : deviations(truth, step)) {
    Profile lied = profile;
    std::optional<Allocation> outcome;
    try {
      lied = profile.replace_ballot(voter, report);
      outcome = allocate(lied, rule);
    } catch (const Error&) {
      continue;
    }
    const double gain = honest_distance - l1_distance(truth, outcome->shares());
    if (gain > kAxiomTolerance) {
      Witness w;
      w.profiles = {profile, lied};
      w.voter = voter;
      w.point = report;
      w.before = to_vector(honest);
      w.after = to_vector(*outcome);
      w.delta = gain;
      return violation(Axiom::strategyproofness, rule, std::move(w));
    }
  }
  return clean(Axiom::strategyproofness, rule);
}

bool replay_witness(const AxiomVerdict& verdict, const Evaluator& evaluate) {
  if (!verdict.violated() || !verdict.witness) return false;
  const Witness& w = *verdict.witness;
  if (w.profiles.empty()) return false;
  const Profile& base = w.profiles.front();
  const auto outcome = evaluate(base, w.rule);
  switch (verdict.axiom) {
    case Axiom::reinforcement: {
      if (w.profiles.size() < 2) return false;
      const auto second = evaluate(w.profiles[1], w.rule);
      const auto joint = evaluate(base.join(w.profiles[1]), w.rule);
      return l1_distance(outcome.shares(), second.shares()) <= kAxiomTolerance &&
             l1_distance(joint.shares(), outcome.shares()) > kAxiomTolerance;
    }
    case Axiom::monotonicity: {
      if (w.profiles.size() < 2) return false;
      const auto after = evaluate(w.profiles[1], w.rule);
      const auto b0 = base.ballot(w.voter);
      const auto b1 = w.profiles[1].ballot(w.voter);
      const double share0 = b0[w.project] / std::accumulate(b0.begin(), b0.end(), 0.0);
      const double share1 = b1[w.project] / std::accumulate(b1.begin(), b1.end(), 0.0);
      return share1 > share0 && outcome[w.project] - after[w.project] > kAxiomTolerance;
    }
    case Axiom::participation: {
      const auto without = evaluate(base.remove_voter(w.voter), w.rule);
      const auto truth = base.ballot(w.voter);
      return l1_distance(truth, outcome.shares()) - l1_distance(truth, without.shares()) >
             kAxiomTolerance;
    }
    case Axiom::pareto:
      return dominates(base, outcome.shares(), w.point);
    case Axiom::proportionality:
      return !proportionality_check(base, outcome, w.k).holds;
    case Axiom::max_welfare:
      return total_distance(base, w.point) < total_distance(base, outcome.shares()) - kAxiomTolerance;
    case Axiom::strategyproofness: {
      if (w.profiles.size() < 2) return false;
      const auto lied = evaluate(w.profiles[1], w.rule);
      const auto truth = base.ballot(w.voter);
      return l1_distance(truth, outcome.shares()) - l1_distance(truth, lied.shares()) >
             kAxiomTolerance;
    }
  }
  return false;
}

Profile random_search_profile(CounterRng& rng, std::size_t voters, std::size_t projects,
                              double single_minded_rate) {
  Profile::Rows rows;
  rows.reserve(voters);
  for (std::size_t i = 0; i < voters; ++i) {
    std::vector<double> row(projects, 0.0);
    if (rng.next_unit() < single_minded_rate) {
      row[rng.below(projects)] = 1.0;
    } else {
      const auto b = dirichlet_sample(projects, 1.0, rng);
      row.assign(b.weights().begin(), b.weights().end());
      for (double& x : row) {
        if (rng.next_unit() < 0.25) x = 0.0;
      }
      if (std::all_of(row.begin(), row.end(), [](double x) { return x == 0.0; })) {
        row[rng.below(projects)] = 1.0;
      }
    }
    rows.push_back(std::move(row));
  }
  return Profile::from_rows(rows);
}

RuleSpec randomized_rule(const RuleSpec& rule, CounterRng& rng) {
  RuleSpec out = rule;
  if (rule.kind == RuleKind::quorum_median) {
    out.q1 = 0.4 * rng.next_unit();
    out.q2 = static_cast<std::size_t>(rng.below(4));
  } else if (rule.kind == RuleKind::capped_median) {
    out.k1 = 0.2 + 0.8 * rng.next_open_unit();
    out.k2 = std::min(0.45, 0.99 * out.k1) * rng.next_unit();
  }
  return out;
}

namespace {

struct TrialContext {
  Profile profile;
  RuleSpec rule;
};

TrialContext draw_trial(CounterRng& rng, const RuleSpec& rule, const SearchOptions& o,
                        double single_minded_rate, std::size_t min_voters = 1) {
  const std::size_t lo_n = std::max(o.min_voters, min_voters);
  const std::size_t hi_n = std::max(lo_n, o.max_voters);
  const std::size_t n = lo_n + rng.below(hi_n - lo_n + 1);
  const std::size_t hi_m = std::max(o.min_projects, o.max_projects);
  const std::size_t m = o.min_projects + rng.below(hi_m - o.min_projects + 1);
  const RuleSpec spec = o.randomize_parameters ? randomized_rule(rule, rng) : rule;
  return {random_search_profile(rng, n, m, single_minded_rate), spec};
}

std::vector<std::size_t> shuffled(std::size_t n, CounterRng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  return order;
}

AxiomVerdict run_trial(Axiom axiom, const RuleSpec& rule, const SearchOptions& o,
                       CounterRng& rng) {
  switch (axiom) {
    case Axiom::reinforcement: {
      const std::uint64_t shape = rng.below(3);
      auto first = draw_trial(rng, rule, o, 0.15);
      Profile second = first.profile;
      if (shape == 1) {
        second = first.profile.permute_voters(shuffled(first.profile.voter_count(), rng));
      } else if (shape == 2) {
        // An unrelated group that happens to share the outcome. Concentrated
        // ballots make such coincidences common for rules with thresholds.
        const std::size_t n = o.min_voters + rng.below(o.max_voters - o.min_voters + 1);
        second = random_search_profile(rng, n, first.profile.project_count(), 0.5);
      }
      try {
        return check_reinforcement(first.rule, first.profile, second);
      } catch (const Error&) {
        return clean(axiom, first.rule);
      }
    }
    case Axiom::monotonicity: {
      auto t = draw_trial(rng, rule, o, 0.15);
      const auto voter = static_cast<std::size_t>(rng.below(t.profile.voter_count()));
      const auto project = static_cast<std::size_t>(rng.below(t.profile.project_count()));
      const double delta = 0.5 * rng.next_open_unit();
      return check_monotonicity(t.rule, t.profile, voter, project, delta);
    }
    case Axiom::participation: {
      auto t = draw_trial(rng, rule, o, 0.15, 2);
      const auto voter = static_cast<std::size_t>(rng.below(t.profile.voter_count()));
      return check_participation(t.rule, t.profile, voter);
    }
    case Axiom::pareto: {
      auto t = draw_trial(rng, rule, o, 0.15);
      return check_pareto(t.rule, t.profile, o.pareto_step);
    }
    case Axiom::proportionality: {
      auto t = draw_trial(rng, rule, o, 0.5);
      return check_proportionality(t.rule, t.profile);
    }
    case Axiom::max_welfare: {
      auto t = draw_trial(rng, rule, o, 0.15);
      return check_max_welfare(t.rule, t.profile, o.pareto_step);
    }
    case Axiom::strategyproofness: {
      auto t = draw_trial(rng, rule, o, 0.15);
      for (std::size_t i = 0; i < t.profile.voter_count(); ++i) {
        auto v = check_strategyproofness(t.rule, t.profile, i, o.grid_step);
        if (v.violated()) return v;
      }
      return clean(axiom, t.rule);
    }
  }
  return clean(axiom, rule);
}

}  // namespace

AxiomVerdict search_axiom(Axiom axiom, const RuleSpec& rule, const SearchOptions& options) {
  if (options.trials == 0) throw Error(ErrorCode::invalid_argument, "search needs trials >= 1");
  if (options.min_voters == 0 || options.min_voters > options.max_voters ||
      options.min_projects < 2 || options.min_projects > options.max_projects) {
    throw Error(ErrorCode::invalid_argument, "search shape bounds are inconsistent");
  }
  AxiomVerdict result = clean(axiom, rule);
  result.trials_run = 0;
  for (std::size_t t = 0; t < options.trials; ++t) {
    auto rng = CounterRng::derive(options.seed, {static_cast<std::uint64_t>(axiom), t});
    ++result.trials_run;
    AxiomVerdict v;
    try {
      v = run_trial(axiom, rule, options, rng);
    } catch (const Error& e) {
      // Instances the rule cannot decide (e.g. every project filtered out)
      // say nothing about the axiom.
      if (e.code() == ErrorCode::degenerate_profile || e.code() == ErrorCode::precondition_unmet) {
        continue;
      }
      throw;
    }
    if (v.violated()) {
      v.witness->trial = t;
      v.trials_run = result.trials_run;
      return v;
    }
  }
  return result;
}

AxiomVerdict search_strategyproofness(const RuleSpec& rule, std::size_t trials, double step,
                                      std::uint64_t seed, std::size_t projects) {
  SearchOptions o;
  o.trials = trials;
  o.seed = seed;
  o.grid_step = step;
  o.min_projects = projects;
  o.max_projects = projects;
  return search_axiom(Axiom::strategyproofness, rule, o);
}

Expectation table_expectation(RuleKind rule, Axiom axiom) {
  using E = Expectation;
  // Columns: reinforcement, pareto, monotonicity, participation,
  // proportionality, max_welfare, strategyproofness.
  static constexpr E H = E::holds;
  static constexpr E V = E::violated;
  auto row = [&]() -> std::array<E, 7> {
    switch (rule) {
      case RuleKind::quadratic: return {H, V, H, V, V, V, V};
      case RuleKind::mean: return {H, H, H, H, H, V, V};
      case RuleKind::quorum_median: return {V, V, V, V, V, V, V};
      case RuleKind::capped_median: return {V, V, H, V, V, V, V};
      case RuleKind::normalized_median: return {H, H, H, H, V, V, V};
      case RuleKind::midpoint: return {H, H, H, H, V, V, V};
      case RuleKind::independent_markets: return {H, E::violated_when_many_projects, H, H, H, V, H};
      case RuleKind::majoritarian_phantoms: return {H, H, H, H, V, H, H};
    }
    return {};
  }();
  return row[static_cast<std::size_t>(axiom)];
}

}  // namespace retro
