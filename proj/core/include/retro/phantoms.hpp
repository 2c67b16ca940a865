#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "retro/profile.hpp"

namespace retro {

enum class PhantomFamily { independent_markets, majoritarian };

std::string_view to_string(PhantomFamily family) noexcept;

/// The n+1 phantom positions f_0(t) >= ... >= f_n(t) of a moving-phantom
/// mechanism for n voters. Each f_k is continuous and non-decreasing in t.
class PhantomSystem {
 public:
  PhantomSystem(PhantomFamily family, std::size_t voters) : family_(family), voters_(voters) {}

  [[nodiscard]] PhantomFamily family() const noexcept { return family_; }
  [[nodiscard]] std::size_t voters() const noexcept { return voters_; }

  /// f_k(t). Throws IndexOutOfRange for k > n, InvalidArgument for t outside [0, 1].
  [[nodiscard]] double value(std::size_t k, double t) const;

  /// All n+1 phantoms in ascending order (k = n down to 0), written to `out`.
  void ascending(double t, std::vector<double>& out) const;

 private:
  PhantomFamily family_;
  std::size_t voters_;
};

double phantom_value(const PhantomSystem& system, std::size_t k, double t);

/// Per-project medians of a profile's columns merged with the phantoms at a
/// given t. Columns are sorted once at construction.
class PhantomMedians {
 public:
  PhantomMedians(const Profile& profile, PhantomFamily family);

  [[nodiscard]] std::size_t project_count() const noexcept { return projects_; }
  [[nodiscard]] const PhantomSystem& system() const noexcept { return system_; }

  /// Sum over projects of med(f_0(t), ..., f_n(t), x_1p, ..., x_np).
  [[nodiscard]] double total(double t) const;
  [[nodiscard]] std::vector<double> medians(double t) const;

 private:
  [[nodiscard]] double project_median(std::size_t project, const std::vector<double>& phantoms) const;

  PhantomSystem system_;
  std::size_t voters_;
  std::size_t projects_;
  std::vector<double> sorted_columns_;  // project-major, each column ascending
  mutable std::vector<double> scratch_;
};

struct PhantomSolution {
  double t_star = 0.0;
  Allocation allocation;
  std::size_t iterations = 0;
  double residual = 0.0;  // |sum of medians - 1|
};

inline constexpr double kPhantomSumTolerance = 1e-12;
inline constexpr std::size_t kPhantomMaxIterations = 200;

/// Finds t* with sum of per-project medians equal to 1 and returns those
/// medians. Bisection on [0, 1] safeguarded with a linear-interpolation probe
/// per step (the sum is piecewise linear in t). The first probe within
/// kPhantomSumTolerance wins; plateaus are output-invariant.
/// Off-simplex profiles are normalized first. Throws NoConvergence.
PhantomSolution solve_phantoms(const Profile& profile, PhantomFamily family);

}  // namespace retro
