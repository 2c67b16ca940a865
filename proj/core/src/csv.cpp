#include "retro/csv.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "retro/error.hpp"

namespace retro {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return cells;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

double parse_cell(std::string_view cell, std::size_t line_no, std::size_t column) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && cell.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc() || ptr != last) {
    throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ", column " +
                                            std::to_string(column + 1) + ": not a number: '" +
                                            std::string(cell) + "'");
  }
  return value;
}

}  // namespace

Profile parse_ballots_csv(std::string_view text, double budget_tokens) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) {
    throw Error(ErrorCode::parse_error, "empty ballot file");
  }

  auto header_line = lines.front();
  if (header_line.starts_with("\xEF\xBB\xBF")) header_line.remove_prefix(3);
  std::vector<std::string> ids;
  for (auto cell : split(header_line)) {
    if (cell.empty()) {
      throw Error(ErrorCode::parse_error, "line 1: empty project id");
    }
    ids.emplace_back(cell);
  }

  Profile::Rows rows;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto cells = split(lines[l]);
    if (cells.size() != ids.size()) {
      throw Error(ErrorCode::shape_mismatch, "line " + std::to_string(l + 1) + " has " +
                                                 std::to_string(cells.size()) + " cells, expected " +
                                                 std::to_string(ids.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      row.push_back(parse_cell(cells[c], l + 1, c));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw Error(ErrorCode::shape_mismatch, "ballot file has a header but no voters");
  }
  return Profile::from_rows(rows, budget_tokens).with_project_ids(std::move(ids));
}

Profile load_ballots_csv(const std::filesystem::path& path, double budget_tokens) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io_error, "cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_ballots_csv(buffer.str(), budget_tokens);
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) {
    throw Error(ErrorCode::invalid_argument, "cannot format number");
  }
  return std::string(buf, ptr);
}

void write_vector_csv(std::ostream& out, std::span<const std::string> ids,
                      std::span<const double> values) {
  for (std::size_t p = 0; p < ids.size(); ++p) {
    out << (p ? "," : "") << ids[p];
  }
  out << '\n';
  for (std::size_t p = 0; p < values.size(); ++p) {
    out << (p ? "," : "") << format_double(values[p]);
  }
  out << '\n';
}

void write_ballots_csv(std::ostream& out, const Profile& profile) {
  const auto& ids = profile.project_ids();
  for (std::size_t p = 0; p < ids.size(); ++p) {
    out << (p ? "," : "") << ids[p];
  }
  out << '\n';
  for (std::size_t i = 0; i < profile.voter_count(); ++i) {
    const auto b = profile.ballot(i);
    for (std::size_t p = 0; p < b.size(); ++p) {
      out << (p ? "," : "") << format_double(b[p]);
    }
    out << '\n';
  }
}

}  // namespace retro
