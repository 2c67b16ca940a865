#pragma once

#include <cstddef>
#include <cstdint>

#include "retro/profile.hpp"
#include "retro/rng.hpp"

namespace retro {

/// Synthetic election shape. Each ballot mixes one shared base vote with an
/// independent draw: mix_weight * base + (1 - mix_weight) * independent.
struct GenSpec {
  std::size_t voters = 40;
  std::size_t projects = 145;
  double mix_weight = 0.5;
  double dirichlet_alpha = 1.0;
  std::uint64_t seed = 0;
  double budget_tokens = 8'000'000.0;

  void validate() const;
};

struct GeneratedProfile {
  Profile profile;
  Ballot base_vote;  // ground-truth benchmark
};

/// Gamma(alpha, 1). alpha == 1 draws an exponential; otherwise
/// Marsaglia-Tsang, boosted for alpha < 1.
double gamma_sample(double alpha, CounterRng& rng);

/// Symmetric Dirichlet(alpha, ..., alpha) over `projects` coordinates.
Ballot dirichlet_sample(std::size_t projects, double alpha, CounterRng& rng);

/// Base vote from stream (seed, 0); voter i from stream (seed, 1, i).
GeneratedProfile generate_profile(const GenSpec& spec);

}  // namespace retro
