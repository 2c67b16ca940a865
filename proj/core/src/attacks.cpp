#include "retro/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <string>

#include "retro/error.hpp"
#include "retro/rules.hpp"
#include "retro/votegen.hpp"

namespace retro {
namespace {

constexpr double kMinStep = 1e-4;
constexpr std::size_t kMaxBriberySteps = 20000;
constexpr double kGoalSlack = 1e-12;

double share_of(const Profile& profile, const RuleSpec& rule, std::size_t target) {
  return allocate(profile, rule)[target];
}

void check_request(const Profile& profile, std::size_t target, double increase) {
  if (target >= profile.project_count()) {
    throw Error(ErrorCode::index_out_of_range, "target project " + std::to_string(target));
  }
  if (!(increase >= 0.0) || !std::isfinite(increase)) {
    throw Error(ErrorCode::invalid_argument, "increase must be a finite non-negative share");
  }
}

std::vector<double> unit_vector(std::size_t m, std::size_t p) {
  std::vector<double> v(m, 0.0);
  v[p] = 1.0;
  return v;
}

AttackResult start(const Profile& profile, std::size_t target, double increase, double before) {
  AttackResult r;
  r.target = target;
  r.increase = increase;
  r.before = before;
  r.after = before;
  r.achieved = increase == 0.0;
  r.digest = profile_digest(profile);
  return r;
}

// Moves `amount` of voter i's weight on `donor` to `target`.
Profile moved(const Profile& profile, std::size_t voter, std::size_t donor, std::size_t target,
              double amount) {
  const auto b = profile.ballot(voter);
  std::vector<double> row(b.begin(), b.end());
  row[donor] = std::max(0.0, row[donor] - amount);
  row[target] += amount;
  return profile.replace_ballot(voter, row);
}

double profile_l1(const Profile& a, const Profile& b) {
  return l1_distance(a.data(), b.data());
}

}  // namespace

std::uint64_t profile_digest(const Profile& profile) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* bytes, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (std::size_t k = 0; k < size; ++k) {
      h ^= p[k];
      h *= 0x100000001b3ULL;
    }
  };
  const std::uint64_t shape[2] = {profile.voter_count(), profile.project_count()};
  feed(shape, sizeof shape);
  for (double x : profile.data()) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &x, sizeof bits);
    feed(&bits, sizeof bits);
  }
  return h;
}

AttackResult bribery_cost(const Profile& input, const RuleSpec& rule, std::size_t target,
                          double increase) {
  const Profile original = validate_profile(input);
  check_request(original, target, increase);
  const std::size_t n = original.voter_count();
  const std::size_t m = original.project_count();
  const double before = share_of(original, rule, target);
  AttackResult result = start(original, target, increase, before);
  if (increase == 0.0) return result;
  const double goal = before + increase;

  Profile::Rows all_in;
  for (std::size_t i = 0; i < n; ++i) all_in.push_back(unit_vector(m, target));
  const double ceiling = share_of(Profile::from_rows(all_in), rule, target);
  if (ceiling < goal - kGoalSlack) {
    throw Error(ErrorCode::target_unreachable,
                "bribery: target share " + std::to_string(goal) + " exceeds the reachable " +
                    std::to_string(ceiling));
  }

  const double base_step = std::max(kMinStep, increase / 4.0);
  double step = base_step;
  Profile current = original;
  double share = before;

  struct Move {
    double share;
    std::size_t voter;
    std::size_t donor;
    double amount;
  };

  while (share < goal - kGoalSlack && result.iterations < kMaxBriberySteps) {
    ++result.iterations;
    bool have = false;
    Move best{share, 0, 0, 0.0};
    // Tie-breaker on plateaus: prefer the move that leaves the voter with the
    // most weight on the target, which walks towards a blocking majority.
    double best_weight = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ballot = current.ballot(i);
      for (std::size_t q = 0; q < m; ++q) {
        if (q == target || ballot[q] <= 0.0) continue;
        const double amount = std::min(step, ballot[q]);
        double s = 0.0;
        try {
          s = share_of(moved(current, i, q, target, amount), rule, target);
        } catch (const Error&) {
          continue;
        }
        const double weight = ballot[target] + amount;
        if (!have || s > best.share || (s == best.share && weight > best_weight)) {
          have = true;
          best = Move{s, i, q, amount};
          best_weight = weight;
        }
      }
    }
    if (!have) break;
    if (best.share <= share) {
      if (step < 1.0) {
        step = std::min(1.0, step * 2.0);
        continue;
      }
      // No single move helps even at full size: walk along a plateau, but
      // never downhill.
      if (best.share < share) break;
    }
    const bool gained = best.share > share;
    if (best.share >= goal) {
      // Bisect for the smallest amount that still reaches the goal.
      double lo = 0.0;
      double hi = best.amount;
      for (int k = 0; k < 60; ++k) {
        const double mid = 0.5 * (lo + hi);
        double s = 0.0;
        try {
          s = share_of(moved(current, best.voter, best.donor, target, mid), rule, target);
        } catch (const Error&) {
          s = -1.0;
        }
        if (s >= goal) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      best.amount = hi;
      best.share = share_of(moved(current, best.voter, best.donor, target, hi), rule, target);
    }
    current = moved(current, best.voter, best.donor, target, best.amount);
    share = best.share;
    if (gained) step = base_step;
  }

  result.after = share;
  result.achieved = share >= goal - kSumTolerance;
  result.cost = profile_l1(original, current);
  result.token_mass = 0.5 * result.cost;
  result.digest = profile_digest(current);
  return result;
}

AttackResult control_cost(const Profile& input, const RuleSpec& rule, std::size_t target,
                          double increase, ControlMode mode) {
  const Profile original = validate_profile(input);
  check_request(original, target, increase);
  const double before = share_of(original, rule, target);
  AttackResult result = start(original, target, increase, before);
  if (increase == 0.0) return result;
  const double goal = before + increase;
  if (goal > 1.0 + kGoalSlack) {
    throw Error(ErrorCode::target_unreachable, "control: target share above 1");
  }

  Profile current = original;
  double share = before;
  std::size_t count = 0;

  if (mode == ControlMode::add) {
    const auto unit = unit_vector(original.project_count(), target);
    const std::size_t limit = std::max<std::size_t>(1000, 100 * original.voter_count());
    while (share < goal - kGoalSlack) {
      if (count == limit) {
        throw Error(ErrorCode::target_unreachable,
                    "control(add): goal not met after " + std::to_string(limit) + " voters");
      }
      current = current.add_voter(unit);
      share = share_of(current, rule, target);
      ++count;
    }
    result.token_mass = static_cast<double>(count);
  } else {
    while (share < goal - kGoalSlack) {
      if (current.voter_count() == 1) {
        throw Error(ErrorCode::target_unreachable, "control(delete): goal not met at n = 1");
      }
      bool have = false;
      std::size_t pick = 0;
      double pick_share = 0.0;
      for (std::size_t i = 0; i < current.voter_count(); ++i) {
        double s = 0.0;
        try {
          s = share_of(current.remove_voter(i), rule, target);
        } catch (const Error&) {
          continue;
        }
        if (!have || s > pick_share) {
          have = true;
          pick = i;
          pick_share = s;
        }
      }
      if (!have) {
        throw Error(ErrorCode::target_unreachable, "control(delete): every deletion fails");
      }
      current = current.remove_voter(pick);
      share = pick_share;
      ++count;
    }
    result.token_mass = static_cast<double>(count);
  }

  result.iterations = count;
  result.cost = static_cast<double>(count);
  result.after = share;
  result.achieved = true;
  result.digest = profile_digest(current);
  return result;
}

RobustnessSummary robustness_probe(const Profile& input, const RuleSpec& rule, std::size_t trials,
                                   std::uint64_t seed) {
  if (trials == 0) throw Error(ErrorCode::invalid_argument, "robustness needs trials >= 1");
  const Profile profile = validate_profile(input);
  const auto baseline = allocate(profile, rule);
  RobustnessSummary out;
  out.samples.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    auto rng = CounterRng::derive(seed, {t});
    const auto voter = static_cast<std::size_t>(rng.below(profile.voter_count()));
    const auto fresh = dirichlet_sample(profile.project_count(), 1.0, rng);
    const auto perturbed = allocate(profile.replace_ballot(voter, fresh.weights()), rule);
    out.samples.push_back(l1_distance(baseline.shares(), perturbed.shares()));
  }
  std::vector<double> sorted = out.samples;
  std::sort(sorted.begin(), sorted.end());
  out.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(trials);
  out.max = sorted.back();
  return out;
}

std::vector<double> concentrated_ballot(std::span<const double> ballot, std::size_t project,
                                        double concentration) {
  if (project >= ballot.size()) {
    throw Error(ErrorCode::index_out_of_range, "project " + std::to_string(project));
  }
  if (!(concentration >= 0.0 && concentration <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "concentration must lie in [0, 1]");
  }
  const std::size_t m = ballot.size();
  std::vector<double> out(m, 0.0);
  if (m == 1) {
    out[0] = 1.0;
    return out;
  }
  double others = 0.0;
  for (std::size_t q = 0; q < m; ++q) {
    if (q != project) others += ballot[q];
  }
  const double rest = 1.0 - concentration;
  for (std::size_t q = 0; q < m; ++q) {
    if (q == project) {
      out[q] = concentration;
    } else if (others > 0.0) {
      out[q] = rest * ballot[q] / others;
    } else {
      out[q] = rest / static_cast<double>(m - 1);
    }
  }
  return out;
}

double vev_shift(const Profile& input, const RuleSpec& rule, std::size_t voter,
                 std::size_t project, double concentration) {
  const Profile profile = validate_profile(input);
  const auto before = allocate(profile, rule);
  const auto changed = concentrated_ballot(profile.ballot(voter), project, concentration);
  const auto after = allocate(profile.replace_ballot(voter, changed), rule);
  return l1_distance(before.shares(), after.shares());
}

VevResult voter_extractable_value(const Profile& input, const RuleSpec& rule,
                                  double concentration) {
  const Profile profile = validate_profile(input);
  const auto before = allocate(profile, rule);
  VevResult best;
  bool have = false;
  for (std::size_t i = 0; i < profile.voter_count(); ++i) {
    for (std::size_t k = 0; k < profile.project_count(); ++k) {
      const auto changed = concentrated_ballot(profile.ballot(i), k, concentration);
      const auto after = allocate(profile.replace_ballot(i, changed), rule);
      const double d = l1_distance(before.shares(), after.shares());
      if (!have || d > best.value) {
        best = VevResult{d, i, k};
        have = true;
      }
    }
  }
  return best;
}

}  // namespace retro
