#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "experiment.hpp"
#include "retro/axioms.hpp"
#include "retro/csv.hpp"
#include "retro/error.hpp"
#include "retro/rules.hpp"
#include "retro/votegen.hpp"

namespace {

using nlohmann::json;
using retro::ErrorCode;

struct RuleFlags {
  std::string rule = "mean";
  retro::RuleSpec defaults;
  double q1 = defaults.q1;
  std::size_t q2 = defaults.q2;
  double k1 = defaults.k1;
  double k2 = defaults.k2;

  void attach(CLI::App& cmd) {
    cmd.add_option("--rule", rule,
                   "quadratic | mean | quorum_median | capped_median | normalized_median | "
                   "midpoint | independent_markets | majoritarian_phantoms")
        ->capture_default_str();
    cmd.add_option("--q1", q1, "quorum: minimum median tokens")->capture_default_str();
    cmd.add_option("--q2", q2, "quorum: minimum supporters")->capture_default_str();
    cmd.add_option("--k1", k1, "capped median: per-project cap")->capture_default_str();
    cmd.add_option("--k2", k2, "capped median: elimination floor")->capture_default_str();
  }

  [[nodiscard]] retro::RuleSpec spec(const std::string& name) const {
    retro::RuleSpec s;
    s.kind = retro::parse_rule_kind(name);
    s.q1 = q1;
    s.q2 = q2;
    s.k1 = k1;
    s.k2 = k2;
    s.validate();
    return s;
  }
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw retro::Error(ErrorCode::io_error, "cannot write " + path.string());
  return out;
}

// Writes to `path`, or stdout when it is empty.
template <typename Fn>
void emit(const std::string& path, Fn&& body) {
  if (path.empty()) {
    body(std::cout);
    std::cout.flush();
    return;
  }
  auto out = open_output(path);
  body(out);
}

// Shortest round-trip text without an exponent, so 3e6 prints as 3000000.
std::string plain_number(double v) {
  char buf[400];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  return std::string(buf, res.ptr);
}

void print_allocation(std::ostream& out, const retro::Profile& profile,
                      const retro::Allocation& a, double budget, const std::string& format) {
  const auto& ids = profile.project_ids();
  if (format == "json") {
    json rows = json::array();
    for (std::size_t p = 0; p < a.size(); ++p) {
      rows.push_back({{"project", ids[p]}, {"share", a[p]}, {"tokens", a[p] * budget}});
    }
    out << json{{"budget_tokens", budget}, {"allocation", rows}}.dump(2) << "\n";
  } else if (format == "table") {
    std::size_t width = 7;
    for (const auto& id : ids) width = std::max(width, id.size());
    out << std::left << std::setw(static_cast<int>(width)) << "project" << "  " << std::right
        << std::setw(14) << "share" << "  " << std::setw(16) << "tokens" << "\n";
    for (std::size_t p = 0; p < a.size(); ++p) {
      char share[32];
      char tokens[32];
      std::snprintf(share, sizeof share, "%.10f", a[p]);
      std::snprintf(tokens, sizeof tokens, "%.2f", a[p] * budget);
      out << std::left << std::setw(static_cast<int>(width)) << ids[p] << "  " << std::right
          << std::setw(14) << share << "  " << std::setw(16) << tokens << "\n";
    }
  } else {
    out << "project,share,tokens\n";
    for (std::size_t p = 0; p < a.size(); ++p) {
      out << ids[p] << "," << plain_number(a[p]) << "," << plain_number(a[p] * budget) << "\n";
    }
  }
}

int run_allocate(const std::string& input, const RuleFlags& flags, double budget,
                 const std::string& output, const std::string& format) {
  const auto profile = retro::load_ballots_csv(input, budget);
  const auto a = retro::allocate(profile, flags.spec(flags.rule));
  emit(output, [&](std::ostream& out) { print_allocation(out, profile, a, budget, format); });
  return 0;
}

int run_experiment_cmd(const std::string& config_path, const std::string& output,
                       std::size_t workers) {
  std::ifstream in(config_path);
  if (!in) throw retro::Error(ErrorCode::io_error, "cannot read " + config_path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw retro::Error(ErrorCode::config_error, std::string("config is not valid JSON: ") + e.what());
  }
  auto config = retro::ExperimentConfig::from_json(j);
  if (!output.empty()) config.output = output;
  if (workers > 0) config.workers = workers;
  const auto report = retro::run_experiment(config);
  std::size_t failed = 0;
  for (const auto& r : report.records) failed += r.error.empty() ? 0 : 1;
  std::cout << "experiment " << retro::to_string(config.experiment) << ": "
            << report.records.size() << " rows (" << report.resumed << " resumed, " << failed
            << " failed cells)\n"
            << "  " << config.output.string() << ".trials.csv\n"
            << "  " << config.output.string() << ".summary.json\n";
  return 0;
}

std::string cell_mark(const retro::AxiomVerdict& v) {
  if (!v.violated()) return "ok";
  return v.witness && v.witness->source != "search" ? "X*" : "X";
}

int run_axioms(const std::string& rules_arg, std::size_t trials, std::uint64_t seed,
               const std::string& output) {
  std::vector<retro::RuleKind> rules;
  if (rules_arg.empty() || rules_arg == "all") {
    rules.assign(retro::kAllRules.begin(), retro::kAllRules.end());
  } else {
    for (const auto& name : split_list(rules_arg)) rules.push_back(retro::parse_rule_kind(name));
  }

  const auto suite = retro::evaluate_appendix_suite();
  std::vector<std::string> failing;
  std::cout << "worked examples\n";
  for (const auto& e : suite) {
    std::cout << "  " << (e.passed ? "PASS " : "FAIL ") << e.name;
    if (!e.passed) std::cout << "  (" << e.detail << ")";
    std::cout << "\n";
    if (!e.passed) failing.push_back(e.name);
  }

  if (!output.empty()) std::filesystem::create_directories(output);
  retro::SearchOptions options;
  options.trials = trials;
  options.seed = seed;

  std::cout << "\nproperty matrix (" << trials << " random trials per cell, seed " << seed
            << "; X = counterexample, X* = worked example only, ok = none found)\n";
  std::cout << std::left << std::setw(24) << "rule";
  for (auto ax : retro::kAllAxioms) {
    std::cout << std::setw(18) << retro::to_string(ax);
  }
  std::cout << "\n";
  std::size_t witnesses = 0;
  for (auto kind : rules) {
    std::cout << std::left << std::setw(24) << retro::to_string(kind);
    for (auto ax : retro::kAllAxioms) {
      auto v = retro::search_axiom(ax, retro::RuleSpec::of(kind), options);
      if (!v.violated()) {
        if (auto known = retro::known_witness(kind, ax)) v = *known;
      }
      std::cout << std::setw(18) << cell_mark(v);
      std::cout.flush();
      if (v.violated() && !output.empty()) {
        const auto path = std::filesystem::path(output) /
                          (std::string(retro::to_string(kind)) + "__" +
                           std::string(retro::to_string(ax)) + ".json");
        auto out = open_output(path);
        out << retro::witness_json(v).dump(2) << "\n";
        ++witnesses;
      }
    }
    std::cout << "\n";
  }
  if (!output.empty()) std::cout << "\n" << witnesses << " witness files in " << output << "\n";

  if (!failing.empty()) {
    std::string names;
    for (const auto& n : failing) names += (names.empty() ? "" : ", ") + n;
    throw retro::Error(ErrorCode::regression_failure, "worked examples failed: " + names);
  }
  return 0;
}

int run_generate(const retro::GenSpec& spec, const std::string& output, std::string truth) {
  spec.validate();
  const auto g = retro::generate_profile(spec);
  if (truth.empty()) {
    auto p = std::filesystem::path(output);
    truth = (p.parent_path() / (p.stem().string() + ".truth.csv")).string();
  }
  {
    auto out = open_output(output);
    retro::write_ballots_csv(out, g.profile);
  }
  {
    auto out = open_output(truth);
    retro::write_vector_csv(out, g.profile.project_ids(), g.base_vote.weights());
  }
  std::cout << "wrote " << output << " (" << spec.voters << "x" << spec.projects << ") and "
            << truth << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Retroactive funding rules: allocate, attack, audit"};
  app.require_subcommand(1);

  auto* allocate_cmd = app.add_subcommand("allocate", "Run one rule on a ballot CSV");
  std::string input;
  std::string output;
  std::string format = "csv";
  double budget = 8'000'000.0;
  RuleFlags rule_flags;
  allocate_cmd->add_option("--input", input, "ballot CSV")->required();
  rule_flags.attach(*allocate_cmd);
  allocate_cmd->add_option("--budget", budget, "tokens to distribute")->capture_default_str();
  allocate_cmd->add_option("--output", output, "write here instead of stdout");
  allocate_cmd->add_option("--format", format, "csv | table | json")
      ->check(CLI::IsMember({"csv", "table", "json"}))
      ->capture_default_str();

  auto* experiment_cmd = app.add_subcommand("experiment", "Run an experiment sweep");
  std::string config_path;
  std::string experiment_output;
  std::size_t workers = 0;
  experiment_cmd->add_option("--config", config_path, "experiment JSON")->required();
  experiment_cmd->add_option("--output", experiment_output, "output prefix (overrides config)");
  experiment_cmd->add_option("--workers", workers, "worker threads (overrides config)");

  auto* axioms_cmd = app.add_subcommand("axioms", "Replay worked examples and search for violations");
  std::string rules_arg = "all";
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::string witness_dir;
  axioms_cmd->add_option("--rules", rules_arg, "comma-separated rule names, or all")
      ->capture_default_str();
  axioms_cmd->add_option("--trials", trials, "random trials per cell")->capture_default_str();
  axioms_cmd->add_option("--seed", seed)->capture_default_str();
  axioms_cmd->add_option("--output", witness_dir, "directory for witness JSON files");

  auto* generate_cmd = app.add_subcommand("generate", "Write a synthetic ballot CSV");
  retro::GenSpec gen;
  std::string gen_output;
  std::string truth_output;
  generate_cmd->add_option("--voters", gen.voters)->capture_default_str();
  generate_cmd->add_option("--projects", gen.projects)->capture_default_str();
  generate_cmd->add_option("--mix", gen.mix_weight, "weight of the shared base vote")
      ->capture_default_str();
  generate_cmd->add_option("--alpha", gen.dirichlet_alpha, "Dirichlet concentration")
      ->capture_default_str();
  generate_cmd->add_option("--seed", gen.seed)->capture_default_str();
  generate_cmd->add_option("--budget", gen.budget_tokens)->capture_default_str();
  generate_cmd->add_option("--output", gen_output, "ballot CSV path")->required();
  generate_cmd->add_option("--truth", truth_output, "base-vote CSV (default <output>.truth.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*allocate_cmd) return run_allocate(input, rule_flags, budget, output, format);
    if (*experiment_cmd) return run_experiment_cmd(config_path, experiment_output, workers);
    if (*axioms_cmd) return run_axioms(rules_arg, trials, seed, witness_dir);
    if (*generate_cmd) return run_generate(gen, gen_output, truth_output);
  } catch (const retro::Error& e) {
    std::cerr << e.what() << "\n";
    return retro::exit_status(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << retro::to_string(ErrorCode::io_error) << ": " << e.what() << "\n";
    return retro::exit_status(ErrorCode::io_error);
  }
  return 0;
}
