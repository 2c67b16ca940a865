#include "retro/profile.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "retro/error.hpp"

namespace retro {
namespace {

void check_entries(std::span<const double> tokens, std::size_t voter) {
  for (std::size_t p = 0; p < tokens.size(); ++p) {
    const double x = tokens[p];
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::invalid_argument, "voter " + std::to_string(voter) +
                                                   " has a non-finite entry at project " +
                                                   std::to_string(p));
    }
    if (x < 0.0) {
      throw Error(ErrorCode::negative_weight, "voter " + std::to_string(voter) +
                                                  " has weight " + std::to_string(x) +
                                                  " on project " + std::to_string(p));
    }
  }
}

double row_sum(std::span<const double> row) {
  return std::accumulate(row.begin(), row.end(), 0.0);
}

std::vector<double> flatten(const Profile::Rows& rows, bool normalize, std::size_t& projects) {
  if (rows.empty()) {
    throw Error(ErrorCode::shape_mismatch, "profile needs at least one ballot");
  }
  projects = rows.front().size();
  if (projects == 0) {
    throw Error(ErrorCode::shape_mismatch, "profile needs at least one project");
  }
  std::vector<double> data;
  data.reserve(rows.size() * projects);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != projects) {
      throw Error(ErrorCode::shape_mismatch, "ballot " + std::to_string(i) + " has " +
                                                 std::to_string(rows[i].size()) +
                                                 " entries, expected " + std::to_string(projects));
    }
    if (normalize) {
      const auto row = normalize_ballot(rows[i], i);
      data.insert(data.end(), row.begin(), row.end());
    } else {
      check_entries(rows[i], i);
      if (row_sum(rows[i]) <= 0.0) {
        throw Error(ErrorCode::empty_ballot, "voter " + std::to_string(i) + " cast no tokens");
      }
      data.insert(data.end(), rows[i].begin(), rows[i].end());
    }
  }
  return data;
}

void check_budget(double budget_tokens) {
  if (!(budget_tokens > 0.0) || !std::isfinite(budget_tokens)) {
    throw Error(ErrorCode::invalid_argument, "budget must be a positive finite number");
  }
}

}  // namespace

std::vector<double> normalize_ballot(std::span<const double> tokens, std::size_t voter) {
  check_entries(tokens, voter);
  const double total = row_sum(tokens);
  if (total <= 0.0) {
    throw Error(ErrorCode::empty_ballot, "voter " + std::to_string(voter) + " cast no tokens");
  }
  std::vector<double> out(tokens.begin(), tokens.end());
  if (std::abs(total - 1.0) <= kEqualityTolerance) {
    return out;
  }
  for (double& x : out) {
    x /= total;
  }
  return out;
}

Ballot Ballot::from_tokens(std::span<const double> tokens) {
  if (tokens.empty()) {
    throw Error(ErrorCode::shape_mismatch, "ballot needs at least one project");
  }
  return Ballot(normalize_ballot(tokens));
}

Allocation::Allocation(std::vector<double> shares) : shares_(std::move(shares)) {
  for (double s : shares_) {
    if (!std::isfinite(s) || s < 0.0) {
      throw Error(ErrorCode::invalid_argument, "allocation shares must be finite and >= 0");
    }
  }
  if (total() > 1.0 + kSumTolerance) {
    throw Error(ErrorCode::invalid_argument,
                "allocation exceeds the budget: total " + std::to_string(total()));
  }
}

double Allocation::total() const noexcept { return row_sum(shares_); }

Profile::Profile(std::size_t voters, std::size_t projects, double budget_tokens, bool normalized,
                 std::vector<double> data, std::vector<std::string> ids)
    : voters_(voters),
      projects_(projects),
      budget_tokens_(budget_tokens),
      normalized_(normalized),
      data_(std::move(data)),
      ids_(std::move(ids)) {}

Profile Profile::from_rows(const Rows& rows, double budget_tokens) {
  check_budget(budget_tokens);
  std::size_t projects = 0;
  auto data = flatten(rows, true, projects);
  return Profile(rows.size(), projects, budget_tokens, true, std::move(data),
                 default_project_ids(projects));
}

Profile Profile::as_cast(const Rows& rows, double budget_tokens) {
  check_budget(budget_tokens);
  std::size_t projects = 0;
  auto data = flatten(rows, false, projects);
  return Profile(rows.size(), projects, budget_tokens, false, std::move(data),
                 default_project_ids(projects));
}

Profile Profile::from_ballots(std::span<const Ballot> ballots, double budget_tokens) {
  Rows rows;
  rows.reserve(ballots.size());
  for (const auto& b : ballots) {
    rows.emplace_back(b.weights().begin(), b.weights().end());
  }
  return from_rows(rows, budget_tokens);
}

std::span<const double> Profile::ballot(std::size_t voter) const {
  if (voter >= voters_) {
    throw Error(ErrorCode::index_out_of_range, "voter " + std::to_string(voter));
  }
  return std::span<const double>(data_).subspan(voter * projects_, projects_);
}

std::vector<double> Profile::column(std::size_t project) const {
  if (project >= projects_) {
    throw Error(ErrorCode::index_out_of_range, "project " + std::to_string(project));
  }
  std::vector<double> out(voters_);
  for (std::size_t i = 0; i < voters_; ++i) {
    out[i] = data_[i * projects_ + project];
  }
  return out;
}

Profile::Rows Profile::rows() const {
  Rows out;
  out.reserve(voters_);
  for (std::size_t i = 0; i < voters_; ++i) {
    const auto b = ballot(i);
    out.emplace_back(b.begin(), b.end());
  }
  return out;
}

Profile Profile::with_project_ids(std::vector<std::string> ids) const {
  if (ids.size() != projects_) {
    throw Error(ErrorCode::shape_mismatch, "expected " + std::to_string(projects_) +
                                               " project ids, got " + std::to_string(ids.size()));
  }
  Profile out = *this;
  out.ids_ = std::move(ids);
  return out;
}

Profile Profile::with_budget_tokens(double budget_tokens) const {
  check_budget(budget_tokens);
  Profile out = *this;
  out.budget_tokens_ = budget_tokens;
  return out;
}

Profile Profile::replace_ballot(std::size_t voter, std::span<const double> weights) const {
  if (voter >= voters_) {
    throw Error(ErrorCode::index_out_of_range, "voter " + std::to_string(voter));
  }
  if (weights.size() != projects_) {
    throw Error(ErrorCode::shape_mismatch, "replacement ballot has wrong length");
  }
  std::vector<double> row;
  if (normalized_) {
    row = normalize_ballot(weights, voter);
  } else {
    check_entries(weights, voter);
    if (row_sum(weights) <= 0.0) {
      throw Error(ErrorCode::empty_ballot, "voter " + std::to_string(voter) + " cast no tokens");
    }
    row.assign(weights.begin(), weights.end());
  }
  Profile out = *this;
  std::copy(row.begin(), row.end(), out.data_.begin() + static_cast<std::ptrdiff_t>(voter * projects_));
  return out;
}

Profile Profile::add_voter(std::span<const double> weights) const {
  if (weights.size() != projects_) {
    throw Error(ErrorCode::shape_mismatch, "added ballot has wrong length");
  }
  std::vector<double> row;
  if (normalized_) {
    row = normalize_ballot(weights, voters_);
  } else {
    check_entries(weights, voters_);
    if (row_sum(weights) <= 0.0) {
      throw Error(ErrorCode::empty_ballot, "added voter cast no tokens");
    }
    row.assign(weights.begin(), weights.end());
  }
  Profile out = *this;
  out.data_.insert(out.data_.end(), row.begin(), row.end());
  ++out.voters_;
  return out;
}

Profile Profile::remove_voter(std::size_t voter) const {
  if (voter >= voters_) {
    throw Error(ErrorCode::index_out_of_range, "voter " + std::to_string(voter));
  }
  if (voters_ == 1) {
    throw Error(ErrorCode::degenerate_profile, "cannot remove the only voter");
  }
  Profile out = *this;
  const auto first = out.data_.begin() + static_cast<std::ptrdiff_t>(voter * projects_);
  out.data_.erase(first, first + static_cast<std::ptrdiff_t>(projects_));
  --out.voters_;
  return out;
}

Profile Profile::join(const Profile& other) const {
  if (other.projects_ != projects_) {
    throw Error(ErrorCode::shape_mismatch, "joined profiles differ in project count");
  }
  Profile out = *this;
  out.data_.insert(out.data_.end(), other.data_.begin(), other.data_.end());
  out.voters_ += other.voters_;
  out.normalized_ = normalized_ && other.normalized_;
  return out;
}

Profile Profile::permute_voters(std::span<const std::size_t> order) const {
  if (order.size() != voters_) {
    throw Error(ErrorCode::shape_mismatch, "voter permutation has wrong length");
  }
  Profile out = *this;
  for (std::size_t i = 0; i < voters_; ++i) {
    const auto src = ballot(order[i]);
    std::copy(src.begin(), src.end(), out.data_.begin() + static_cast<std::ptrdiff_t>(i * projects_));
  }
  return out;
}

Profile Profile::permute_projects(std::span<const std::size_t> order) const {
  if (order.size() != projects_) {
    throw Error(ErrorCode::shape_mismatch, "project permutation has wrong length");
  }
  Profile out = *this;
  for (std::size_t i = 0; i < voters_; ++i) {
    for (std::size_t p = 0; p < projects_; ++p) {
      out.data_[i * projects_ + p] = data_[i * projects_ + order[p]];
    }
  }
  for (std::size_t p = 0; p < projects_; ++p) {
    out.ids_[p] = ids_[order[p]];
  }
  return out;
}

Profile validate_profile(const Profile& profile) {
  if (profile.normalized()) {
    return profile;
  }
  return Profile::from_rows(profile.rows(), profile.budget_tokens())
      .with_project_ids(profile.project_ids());
}

Profile validate_profile(const Profile::Rows& rows, double budget_tokens) {
  return Profile::from_rows(rows, budget_tokens);
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::shape_mismatch, "l1_distance on vectors of length " +
                                               std::to_string(a.size()) + " and " +
                                               std::to_string(b.size()));
  }
  double total = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) {
    total += std::abs(a[p] - b[p]);
  }
  return total;
}

std::vector<std::string> default_project_ids(std::size_t projects) {
  std::vector<std::string> ids;
  ids.reserve(projects);
  for (std::size_t p = 0; p < projects; ++p) {
    ids.push_back("p" + std::to_string(p + 1));
  }
  return ids;
}

}  // namespace retro
