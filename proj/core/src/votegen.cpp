#include "retro/votegen.hpp"

#include <cmath>
#include <vector>

#include "retro/error.hpp"

namespace retro {

void GenSpec::validate() const {
  if (voters == 0 || projects == 0) {
    throw Error(ErrorCode::invalid_argument, "voters and projects must be positive");
  }
  if (!(mix_weight >= 0.0 && mix_weight <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "mix_weight must lie in [0, 1]");
  }
  if (!(dirichlet_alpha > 0.0) || !std::isfinite(dirichlet_alpha)) {
    throw Error(ErrorCode::invalid_argument, "dirichlet_alpha must be positive");
  }
  if (!(budget_tokens > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "budget_tokens must be positive");
  }
}

double gamma_sample(double alpha, CounterRng& rng) {
  if (alpha == 1.0) {
    return -std::log(rng.next_open_unit());
  }
  if (alpha < 1.0) {
    const double boosted = gamma_sample(alpha + 1.0, rng);
    return boosted * std::pow(rng.next_open_unit(), 1.0 / alpha);
  }
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = rng.next_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.next_open_unit();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

Ballot dirichlet_sample(std::size_t projects, double alpha, CounterRng& rng) {
  if (projects == 0) {
    throw Error(ErrorCode::invalid_argument, "dirichlet_sample needs at least one coordinate");
  }
  std::vector<double> draws(projects);
  double total = 0.0;
  do {
    total = 0.0;
    for (double& g : draws) {
      g = gamma_sample(alpha, rng);
      total += g;
    }
  } while (total <= 0.0);  // possible only for tiny alpha
  for (double& g : draws) g /= total;
  return Ballot::from_tokens(draws);
}

GeneratedProfile generate_profile(const GenSpec& spec) {
  spec.validate();
  auto base_rng = CounterRng::derive(spec.seed, {0});
  Ballot base = dirichlet_sample(spec.projects, spec.dirichlet_alpha, base_rng);

  Profile::Rows rows(spec.voters, std::vector<double>(spec.projects));
  for (std::size_t i = 0; i < spec.voters; ++i) {
    auto voter_rng = CounterRng::derive(spec.seed, {1, i});
    const Ballot independent = dirichlet_sample(spec.projects, spec.dirichlet_alpha, voter_rng);
    for (std::size_t p = 0; p < spec.projects; ++p) {
      rows[i][p] = spec.mix_weight * base[p] + (1.0 - spec.mix_weight) * independent[p];
    }
  }
  return GeneratedProfile{Profile::from_rows(rows, spec.budget_tokens), std::move(base)};
}

}  // namespace retro
