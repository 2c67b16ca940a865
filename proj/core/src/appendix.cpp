// Worked examples with published numbers, replayed as regressions, plus the
// hand-made witnesses they provide for the property matrix.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "retro/axioms.hpp"
#include "retro/error.hpp"
#include "retro/metrics.hpp"
#include "retro/rules.hpp"

namespace retro {
namespace {

constexpr double kExampleTolerance = 1e-3;


class Case {
 public:
  explicit Case(std::string name) : out_{std::move(name), true, 0.0, {}} {}

  void vec(const std::string& what, std::span<const double> actual,
           std::vector<double> expected) {
    if (actual.size() != expected.size()) {
      fail(what + ": length " + std::to_string(actual.size()));
      return;
    }
    for (std::size_t p = 0; p < actual.size(); ++p) {
      record(what, actual[p], expected[p]);
    }
  }
  void num(const std::string& what, double actual, double expected) {
    record(what, actual, expected);
  }
  void fail(const std::string& why) {
    out_.passed = false;
    append(why);
  }
  ExampleOutcome done() && { return std::move(out_); }

 private:
  void record(const std::string& what, double actual, double expected) {
    const double err = std::abs(actual - expected);
    out_.max_error = std::max(out_.max_error, err);
    if (!(err <= kExampleTolerance)) {
      out_.passed = false;
      std::ostringstream s;
      s << what << " = " << actual << ", expected " << expected;
      append(s.str());
    }
  }
  void append(const std::string& text) {
    if (!out_.detail.empty()) out_.detail += "; ";
    out_.detail += text;
  }
  ExampleOutcome out_;
};

double total_l1(const Profile& profile, std::span<const double> point) {
  const auto d = voter_distances(profile, point);
  return std::accumulate(d.begin(), d.end(), 0.0);
}

struct Manipulation {
  const char* name;
  RuleSpec rule;
  Profile profile;
  std::size_t voter;
  std::vector<double> report;
  std::vector<double> honest;
  double honest_distance;
  std::vector<double> lied;
  double lied_distance;
};

struct WelfareGap {
  const char* name;
  RuleSpec rule;
  Profile profile;
  std::vector<double> outcome;
  double outcome_total;
  std::vector<double> alternative;
  double alternative_total;
};

std::vector<Manipulation> manipulations() {
  return {
      {"mean strategyproofness", RuleSpec::of(RuleKind::mean),
       Profile::from_rows({{0.75, 0.25}, {0.0, 1.0}}), 0, {1.0, 0.0}, {0.375, 0.625}, 0.75,
       {0.5, 0.5}, 0.5},
      // The third ballot sums to 1.01 and is used as written.
      {"normalized median strategyproofness", RuleSpec::of(RuleKind::normalized_median),
       Profile::as_cast({{0.57, 0.24, 0.19}, {0.39, 0.48, 0.13}, {0.44, 0.09, 0.48}}), 0,
       {0.6, 0.2, 0.2}, {0.506, 0.276, 0.218}, 0.1285, {0.524, 0.238, 0.238}, 0.0962},
      {"midpoint strategyproofness", RuleSpec::of(RuleKind::midpoint),
       Profile::from_rows({{0.9, 0.1}, {0.4, 0.6}, {0.2, 0.8}}), 0, {0.5, 0.5}, {0.4, 0.6}, 1.0,
       {0.5, 0.5}, 0.8},
      {"quadratic strategyproofness", RuleSpec::of(RuleKind::quadratic),
       Profile::from_rows({{0.7, 0.3}, {0.4, 0.6}, {0.3, 0.7}}), 0, {0.8, 0.2}, {0.483, 0.517},
       0.434, {0.502, 0.498}, 0.396},
      {"quorum median strategyproofness", RuleSpec::quorum(0.3, 2),
       Profile::from_rows({{0.2, 0.8}, {0.1, 0.9}, {0.5, 0.5}}), 0, {0.0, 1.0}, {0.0, 1.0}, 0.4,
       {0.25, 0.75}, 0.1},
  };
}

std::vector<WelfareGap> welfare_gaps() {
  return {
      {"mean welfare", RuleSpec::of(RuleKind::mean),
       Profile::from_rows({{1.0, 0.0}, {1.0, 0.0}, {0.2, 0.8}}), {0.733, 0.267}, 2.133,
       {1.0, 0.0}, 1.6},
      // Ballots sum to 1.0, 0.6 and 0.7; distances use them as written.
      {"normalized median welfare", RuleSpec::of(RuleKind::normalized_median),
       Profile::as_cast({{0.1, 0.9}, {0.4, 0.2}, {0.6, 0.1}}), {0.667, 0.333}, 1.834,
       {0.5, 0.5}, 1.7},
      {"midpoint welfare", RuleSpec::of(RuleKind::midpoint),
       Profile::from_rows({{0.8, 0.1, 0.05, 0.05},
                           {0.1, 0.8, 0.05, 0.05},
                           {0.05, 0.05, 0.8, 0.1},
                           {0.05, 0.05, 0.1, 0.8}}),
       {0.8, 0.1, 0.05, 0.05}, 4.6, {0.25, 0.25, 0.25, 0.25}, 4.4},
      {"quadratic welfare", RuleSpec::of(RuleKind::quadratic),
       Profile::from_rows({{0.01, 0.99}, {0.01, 0.99}, {0.99, 0.01}}), {0.364, 0.636}, 2.668,
       {0.2, 0.8}, 2.34},
  };
}

// Voters [0.5,0.5], [0,1], [1,0]; the second raises project 1 to 0.1 while
// keeping 1 on project 2, i.e. casts [0.1, 1].
Profile monotonicity_profile() { return Profile::as_cast({{0.5, 0.5}, {0.0, 1.0}, {1.0, 0.0}}); }

// Project 2 has one supporter and misses the two-supporter quorum until the
// third voter adds a sliver to it.
Profile participation_profile() {
  return Profile::from_rows({{1.0, 0.0}, {0.6, 0.4}, {0.99, 0.01}});
}

Profile lone_voter() { return Profile::from_rows({{0.7, 0.3}}); }

Profile split_profile() { return Profile::from_rows({{1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}); }

RuleSpec quorum_only_supporters(std::size_t q2) { return RuleSpec::quorum(0.0, q2); }

std::vector<double> shares(const Allocation& a) { return {a.shares().begin(), a.shares().end()}; }

}  // namespace

std::vector<ExampleOutcome> evaluate_appendix_suite(const Evaluator& evaluate) {
  std::vector<ExampleOutcome> out;
  auto guarded = [&](const std::string& name, const std::function<void(Case&)>& body) {
    Case c(name);
    try {
      body(c);
    } catch (const std::exception& e) {
      c.fail(std::string("threw: ") + e.what());
    }
    out.push_back(std::move(c).done());
  };

  for (const auto& m : manipulations()) {
    guarded(m.name, [&](Case& c) {
      const auto truth = m.profile.ballot(m.voter);
      const auto honest = evaluate(m.profile, m.rule);
      const auto lied = evaluate(m.profile.replace_ballot(m.voter, m.report), m.rule);
      c.vec("truthful outcome", honest.shares(), m.honest);
      c.num("truthful distance", l1_distance(truth, honest.shares()), m.honest_distance);
      c.vec("misreport outcome", lied.shares(), m.lied);
      c.num("misreport distance", l1_distance(truth, lied.shares()), m.lied_distance);
    });
  }
  for (const auto& w : welfare_gaps()) {
    guarded(w.name, [&](Case& c) {
      const auto outcome = evaluate(w.profile, w.rule);
      c.vec("outcome", outcome.shares(), w.outcome);
      c.num("outcome total distance", total_l1(w.profile, outcome.shares()), w.outcome_total);
      c.num("alternative total distance", total_l1(w.profile, w.alternative), w.alternative_total);
    });
  }
  guarded("quorum median monotonicity", [&](Case& c) {
    const auto rule = quorum_only_supporters(0);
    const Profile before = monotonicity_profile();
    const Profile after = before.replace_ballot(1, std::vector<double>{0.1, 1.0});
    c.vec("before", evaluate(before, rule).shares(), {0.5, 0.5});
    c.vec("after", evaluate(after, rule).shares(), {0.4, 0.6});
  });
  guarded("quorum median participation", [&](Case& c) {
    const auto rule = quorum_only_supporters(2);
    const Profile with = participation_profile();
    const auto truth = with.ballot(2);
    const auto voting = evaluate(with, rule);
    const auto abstaining = evaluate(with.remove_voter(2), rule);
    c.vec("abstaining outcome", abstaining.shares(), {1.0, 0.0});
    const double harm = l1_distance(truth, voting.shares()) - l1_distance(truth, abstaining.shares());
    if (!(harm > kAxiomTolerance)) c.fail("voting did not hurt the voter");
  });
  guarded("quorum median pareto", [&](Case& c) {
    const auto outcome = evaluate(lone_voter(), RuleSpec::quorum(0.4, 0));
    c.vec("outcome", outcome.shares(), {1.0, 0.0});
    c.num("voter distance", l1_distance(lone_voter().ballot(0), outcome.shares()), 0.6);
  });
  guarded("capped median pareto", [&](Case& c) {
    const auto outcome = evaluate(lone_voter(), RuleSpec::capped(1.0, 0.4));
    c.vec("outcome", outcome.shares(), {1.0, 0.0});
    c.num("voter distance", l1_distance(lone_voter().ballot(0), outcome.shares()), 0.6);
  });
  return out;
}

std::vector<ExampleOutcome> replay_appendix_suite(const Evaluator& evaluate) {
  auto results = evaluate_appendix_suite(evaluate);
  std::string failed;
  for (const auto& r : results) {
    if (r.passed) continue;
    if (!failed.empty()) failed += " | ";
    failed += r.name + " (" + r.detail + ")";
  }
  if (!failed.empty()) throw Error(ErrorCode::regression_failure, failed);
  return results;
}

std::optional<AxiomVerdict> known_witness(RuleKind kind, Axiom axiom) {
  auto tag = [](AxiomVerdict v, const std::string& name) -> std::optional<AxiomVerdict> {
    if (!v.violated()) return std::nullopt;
    v.witness->source = name;
    return v;
  };

  switch (axiom) {
    case Axiom::strategyproofness:
      for (const auto& m : manipulations()) {
        if (m.rule.kind != kind) continue;
        const auto honest = allocate(m.profile, m.rule);
        const Profile lied_profile = m.profile.replace_ballot(m.voter, m.report);
        const auto lied = allocate(lied_profile, m.rule);
        const auto truth = m.profile.ballot(m.voter);
        const double gain =
            l1_distance(truth, honest.shares()) - l1_distance(truth, lied.shares());
        if (!(gain > kAxiomTolerance)) return std::nullopt;
        AxiomVerdict v;
        v.axiom = axiom;
        v.rule = m.rule;
        v.status = VerdictStatus::counterexample;
        v.trials_run = 1;
        Witness w;
        w.rule = m.rule;
        w.profiles = {m.profile, lied_profile};
        w.voter = m.voter;
        w.point = m.report;
        w.before = shares(honest);
        w.after = shares(lied);
        w.delta = gain;
        w.source = m.name;
        v.witness = std::move(w);
        return v;
      }
      return std::nullopt;
    case Axiom::max_welfare:
      for (const auto& g : welfare_gaps()) {
        if (g.rule.kind != kind) continue;
        const auto outcome = allocate(g.profile, g.rule);
        const double now = total_l1(g.profile, outcome.shares());
        const double alt = total_l1(g.profile, g.alternative);
        if (!(alt < now - kAxiomTolerance)) return std::nullopt;
        AxiomVerdict v;
        v.axiom = axiom;
        v.rule = g.rule;
        v.status = VerdictStatus::counterexample;
        v.trials_run = 1;
        Witness w;
        w.rule = g.rule;
        w.profiles = {g.profile};
        w.point = g.alternative;
        w.before = shares(outcome);
        w.after = g.alternative;
        w.delta = now - alt;
        w.source = g.name;
        v.witness = std::move(w);
        return v;
      }
      return std::nullopt;
    case Axiom::monotonicity:
      if (kind != RuleKind::quorum_median) return std::nullopt;
      return tag(check_monotonicity(quorum_only_supporters(0), monotonicity_profile(), 1, 0, 0.1),
                 "quorum median monotonicity");
    case Axiom::participation:
      if (kind != RuleKind::quorum_median) return std::nullopt;
      return tag(check_participation(quorum_only_supporters(2), participation_profile(), 2),
                 "quorum median participation");
    case Axiom::pareto: {
      RuleSpec rule;
      if (kind == RuleKind::quorum_median) {
        rule = RuleSpec::quorum(0.4, 0);
      } else if (kind == RuleKind::capped_median) {
        rule = RuleSpec::capped(1.0, 0.4);
      } else {
        return std::nullopt;
      }
      const Profile p = lone_voter();
      const auto outcome = allocate(p, rule);
      const auto ideal = p.ballot(0);
      if (!(l1_distance(ideal, outcome.shares()) > kAxiomTolerance)) return std::nullopt;
      AxiomVerdict v;
      v.axiom = axiom;
      v.rule = rule;
      v.status = VerdictStatus::counterexample;
      v.trials_run = 1;
      Witness w;
      w.rule = rule;
      w.profiles = {p};
      w.point.assign(ideal.begin(), ideal.end());
      w.before = shares(outcome);
      w.after = w.point;
      w.delta = l1_distance(ideal, outcome.shares());
      w.source = kind == RuleKind::quorum_median ? "quorum median pareto" : "capped median pareto";
      v.witness = std::move(w);
      return v;
    }
    case Axiom::proportionality: {
      RuleSpec rule = RuleSpec::of(kind);
      if (kind == RuleKind::quorum_median) rule = quorum_only_supporters(2);
      if (kind != RuleKind::normalized_median && kind != RuleKind::midpoint &&
          kind != RuleKind::quorum_median) {
        return std::nullopt;
      }
      return tag(check_proportionality(rule, split_profile()), "two against one");
    }
    case Axiom::reinforcement: {
      if (kind != RuleKind::quorum_median) return std::nullopt;
      // Each copy alone leaves project 2 one supporter short of the quorum;
      // together they reach it.
      const Profile group = Profile::from_rows({{1.0, 0.0}, {0.5, 0.5}});
      return tag(check_reinforcement(quorum_only_supporters(2), group, group),
                 "doubled quorum group");
    }
  }
  return std::nullopt;
}

}  // namespace retro
