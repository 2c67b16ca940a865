#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "retro/profile.hpp"

namespace retro {

// Ballot CSV: first row holds project ids, each further row one voter's
// non-negative token amounts. Rows are normalized per voter on load.
Profile parse_ballots_csv(std::string_view text, double budget_tokens);
Profile load_ballots_csv(const std::filesystem::path& path, double budget_tokens);

// Writes weights with round-trip precision.
void write_ballots_csv(std::ostream& out, const Profile& profile);
void write_vector_csv(std::ostream& out, std::span<const std::string> ids,
                      std::span<const double> values);

// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace retro
