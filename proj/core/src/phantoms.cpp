#include "retro/phantoms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "retro/error.hpp"

namespace retro {

std::string_view to_string(PhantomFamily family) noexcept {
  switch (family) {
    case PhantomFamily::independent_markets: return "independent_markets";
    case PhantomFamily::majoritarian: return "majoritarian";
  }
  return "unknown";
}

double PhantomSystem::value(std::size_t k, double t) const {
  if (k > voters_) {
    throw Error(ErrorCode::index_out_of_range,
                "phantom " + std::to_string(k) + " of " + std::to_string(voters_ + 1));
  }
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "phantom parameter t must lie in [0, 1]");
  }
  const auto n = static_cast<double>(voters_);
  const auto kk = static_cast<double>(k);
  switch (family_) {
    case PhantomFamily::independent_markets:
      return std::min(t * (n - kk), 1.0);
    case PhantomFamily::majoritarian:
      if (t <= kk / (n + 1.0)) return 0.0;
      if (t <= (kk + 1.0) / (n + 1.0)) return t * (n + 1.0) - kk;
      return 1.0;
  }
  return 0.0;
}

void PhantomSystem::ascending(double t, std::vector<double>& out) const {
  out.resize(voters_ + 1);
  for (std::size_t k = 0; k <= voters_; ++k) {
    out[voters_ - k] = value(k, t);
  }
}

double phantom_value(const PhantomSystem& system, std::size_t k, double t) {
  return system.value(k, t);
}

PhantomMedians::PhantomMedians(const Profile& profile, PhantomFamily family)
    : system_(family, profile.voter_count()),
      voters_(profile.voter_count()),
      projects_(profile.project_count()),
      sorted_columns_(voters_ * projects_) {
  for (std::size_t p = 0; p < projects_; ++p) {
    auto first = sorted_columns_.begin() + static_cast<std::ptrdiff_t>(p * voters_);
    for (std::size_t i = 0; i < voters_; ++i) {
      first[static_cast<std::ptrdiff_t>(i)] = profile.weight(i, p);
    }
    std::sort(first, first + static_cast<std::ptrdiff_t>(voters_));
  }
}

// Median of 2n+1 values = the (n+1)-th smallest of the sorted column (n
// values) merged with the ascending phantoms (n+1 values).
double PhantomMedians::project_median(std::size_t project,
                                      const std::vector<double>& phantoms) const {
  const double* a = sorted_columns_.data() + project * voters_;
  const double* b = phantoms.data();
  const std::size_t na = voters_;
  const std::size_t nb = phantoms.size();
  const std::size_t take = voters_ + 1;

  std::size_t lo = take > nb ? take - nb : 0;
  std::size_t hi = std::min(na, take);
  while (lo < hi) {
    const std::size_t i = lo + (hi - lo) / 2;
    const std::size_t j = take - i;
    if (a[i] < b[j - 1]) {
      lo = i + 1;
    } else {
      hi = i;
    }
  }
  const std::size_t i = lo;
  const std::size_t j = take - i;
  const double from_a = i > 0 ? a[i - 1] : -std::numeric_limits<double>::infinity();
  const double from_b = j > 0 ? b[j - 1] : -std::numeric_limits<double>::infinity();
  return std::max(from_a, from_b);
}

double PhantomMedians::total(double t) const {
  system_.ascending(t, scratch_);
  double sum = 0.0;
  for (std::size_t p = 0; p < projects_; ++p) {
    sum += project_median(p, scratch_);
  }
  return sum;
}

std::vector<double> PhantomMedians::medians(double t) const {
  system_.ascending(t, scratch_);
  std::vector<double> out(projects_);
  for (std::size_t p = 0; p < projects_; ++p) {
    out[p] = project_median(p, scratch_);
  }
  return out;
}

PhantomSolution solve_phantoms(const Profile& input, PhantomFamily family) {
  const Profile profile = validate_profile(input);
  const PhantomMedians medians(profile, family);

  auto finish = [&](double t, std::size_t iterations) {
    auto shares = medians.medians(t);
    double sum = 0.0;
    for (double s : shares) sum += s;
    return PhantomSolution{t, Allocation(std::move(shares)), iterations, std::abs(sum - 1.0)};
  };

  double lo = 0.0;
  double hi = 1.0;
  double sum_lo = medians.total(lo);
  double sum_hi = medians.total(hi);
  if (std::abs(sum_lo - 1.0) <= kPhantomSumTolerance) return finish(lo, 0);
  if (std::abs(sum_hi - 1.0) <= kPhantomSumTolerance) return finish(hi, 0);
  if (sum_lo > 1.0 || sum_hi < 1.0) {
    throw Error(ErrorCode::no_convergence, "phantom sum does not bracket 1 on [0, 1]");
  }

  auto shrink = [&](double t, double s) {
    if (s < 1.0) {
      lo = t;
      sum_lo = s;
    } else {
      hi = t;
      sum_hi = s;
    }
  };

  for (std::size_t it = 1; it <= kPhantomMaxIterations; ++it) {
    // Exact once the bracket sits inside one linear piece.
    if (sum_hi > sum_lo) {
      const double t = lo + (1.0 - sum_lo) * (hi - lo) / (sum_hi - sum_lo);
      if (t > lo && t < hi) {
        const double s = medians.total(t);
        if (std::abs(s - 1.0) <= kPhantomSumTolerance) return finish(t, it);
        shrink(t, s);
      }
    }
    const double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) {
      // Bracket collapsed to adjacent doubles; rounding in the sum is the
      // only thing left between us and the tolerance.
      const double t = std::abs(sum_lo - 1.0) <= std::abs(sum_hi - 1.0) ? lo : hi;
      if (std::abs(medians.total(t) - 1.0) <= kSumTolerance) return finish(t, it);
      break;
    }
    const double s = medians.total(mid);
    if (std::abs(s - 1.0) <= kPhantomSumTolerance) return finish(mid, it);
    shrink(mid, s);
  }
  throw Error(ErrorCode::no_convergence,
              std::string(to_string(family)) + ": no t* within tolerance after " +
                  std::to_string(kPhantomMaxIterations) + " iterations");
}

}  // namespace retro
