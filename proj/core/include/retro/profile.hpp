#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace retro {

// Ballot sums and allocation totals are checked against this.
inline constexpr double kSumTolerance = 1e-9;
// Equality assertions between computed reals.
inline constexpr double kEqualityTolerance = 1e-12;

/// One voter's distribution over projects. Entries are non-negative and sum
/// to 1; token amounts are normalized away on construction.
class Ballot {
 public:
  Ballot() = default;

  /// Rescales `tokens` to the simplex. Throws NegativeWeight or EmptyBallot.
  static Ballot from_tokens(std::span<const double> tokens);

  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
  [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
  [[nodiscard]] double operator[](std::size_t project) const { return weights_.at(project); }

  friend bool operator==(const Ballot&, const Ballot&) = default;

 private:
  explicit Ballot(std::vector<double> weights) : weights_(std::move(weights)) {}

  std::vector<double> weights_;
};

/// Outcome of a rule: the fraction of the budget each project receives.
class Allocation {
 public:
  Allocation() = default;

  /// Throws InvalidArgument on negative or non-finite shares, or a total
  /// above 1 + kSumTolerance.
  explicit Allocation(std::vector<double> shares);

  [[nodiscard]] std::span<const double> shares() const noexcept { return shares_; }
  [[nodiscard]] std::size_t size() const noexcept { return shares_.size(); }
  [[nodiscard]] double operator[](std::size_t project) const { return shares_.at(project); }
  [[nodiscard]] double total() const noexcept;

  friend bool operator==(const Allocation&, const Allocation&) = default;

 private:
  std::vector<double> shares_;
};

/// An election: n ballots over m projects, stored row-major. Immutable; the
/// editing helpers return new profiles.
///
/// A profile built by from_rows() is normalized: every ballot sums to 1. A
/// profile built by as_cast() keeps entries exactly as written, which is
/// what worked examples with off-simplex ballots need; validate_profile()
/// turns it into a normalized one.
class Profile {
 public:
  using Rows = std::vector<std::vector<double>>;

  static Profile from_rows(const Rows& rows, double budget_tokens = 1.0);
  static Profile as_cast(const Rows& rows, double budget_tokens = 1.0);
  static Profile from_ballots(std::span<const Ballot> ballots, double budget_tokens = 1.0);

  [[nodiscard]] std::size_t voter_count() const noexcept { return voters_; }
  [[nodiscard]] std::size_t project_count() const noexcept { return projects_; }
  [[nodiscard]] double budget_tokens() const noexcept { return budget_tokens_; }
  [[nodiscard]] bool normalized() const noexcept { return normalized_; }

  [[nodiscard]] std::span<const double> ballot(std::size_t voter) const;
  [[nodiscard]] double weight(std::size_t voter, std::size_t project) const noexcept {
    return data_[voter * projects_ + project];
  }
  [[nodiscard]] std::vector<double> column(std::size_t project) const;
  [[nodiscard]] Rows rows() const;
  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

  /// Project identifiers; "p1".."pm" unless set from a CSV header.
  [[nodiscard]] const std::vector<std::string>& project_ids() const noexcept { return ids_; }
  [[nodiscard]] Profile with_project_ids(std::vector<std::string> ids) const;
  [[nodiscard]] Profile with_budget_tokens(double budget_tokens) const;

  // A replaced or added ballot is normalized when this profile is.
  [[nodiscard]] Profile replace_ballot(std::size_t voter, std::span<const double> weights) const;
  [[nodiscard]] Profile add_voter(std::span<const double> weights) const;
  [[nodiscard]] Profile remove_voter(std::size_t voter) const;
  [[nodiscard]] Profile join(const Profile& other) const;
  [[nodiscard]] Profile permute_voters(std::span<const std::size_t> order) const;
  [[nodiscard]] Profile permute_projects(std::span<const std::size_t> order) const;

  friend bool operator==(const Profile&, const Profile&) = default;

 private:
  Profile(std::size_t voters, std::size_t projects, double budget_tokens, bool normalized,
          std::vector<double> data, std::vector<std::string> ids);

  std::size_t voters_ = 0;
  std::size_t projects_ = 0;
  double budget_tokens_ = 1.0;
  bool normalized_ = true;
  std::vector<double> data_;
  std::vector<std::string> ids_;
};

/// Rescales one voter's token amounts to sum 1. Rows already within
/// kEqualityTolerance of 1 are kept bit-for-bit, which makes normalization
/// idempotent. `voter` only feeds error messages.
std::vector<double> normalize_ballot(std::span<const double> tokens, std::size_t voter = 0);

/// Returns `profile` with every ballot on the simplex.
Profile validate_profile(const Profile& profile);
Profile validate_profile(const Profile::Rows& rows, double budget_tokens = 1.0);

/// Sum of absolute coordinate differences. Throws ShapeMismatch.
double l1_distance(std::span<const double> a, std::span<const double> b);

std::vector<std::string> default_project_ids(std::size_t projects);

}  // namespace retro
