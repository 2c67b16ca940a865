#include "experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "retro/axioms.hpp"
#include "retro/csv.hpp"
#include "retro/error.hpp"
#include "retro/metrics.hpp"
#include "retro/rng.hpp"
#include "retro/rules.hpp"

namespace retro {
namespace {

using nlohmann::json;

constexpr std::array<ExperimentKind, 6> kAllExperiments = {
    ExperimentKind::bribery, ExperimentKind::control,
    ExperimentKind::robustness, ExperimentKind::vev,
    ExperimentKind::welfare_gini_alignment, ExperimentKind::axioms,
};

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorCode::config_error, msg);
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(std::string("field '") + key + "': " + e.what());
  }
}

std::string rule_json_name(const RuleSpec& r) { return std::string(to_string(r.kind)); }

bool needs_sweep(ExperimentKind k) {
  return k == ExperimentKind::bribery || k == ExperimentKind::control ||
         k == ExperimentKind::vev || k == ExperimentKind::axioms;
}

std::vector<double> swept_values(const ExperimentConfig& c) {
  if (needs_sweep(c.experiment)) return c.sweep;
  return {0.0};
}

double parse_number(const std::string& cell) {
  if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto* end = cell.data() + cell.size();
  const auto res = std::from_chars(cell.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw Error(ErrorCode::parse_error, "trial CSV: bad number '" + cell + "'");
  }
  return v;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream s(line);
  while (std::getline(s, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string format_metric(double v) { return std::isnan(v) ? std::string() : format_double(v); }

Profile trial_profile(const ExperimentConfig& c, std::uint64_t seed, std::vector<double>* truth,
                      const std::optional<Profile>& shared) {
  if (shared) return *shared;
  GenSpec g = c.generation;
  g.seed = seed;
  auto generated = generate_profile(g);
  if (truth) truth->assign(generated.base_vote.weights().begin(), generated.base_vote.weights().end());
  return generated.profile;
}

// Loading the input file once per process is enough; it never changes
// during a run.
const std::optional<Profile>& shared_input(const ExperimentConfig& c) {
  static std::mutex lock;
  static std::map<std::string, std::optional<Profile>> cache;
  std::lock_guard<std::mutex> guard(lock);
  const std::string key = c.input ? c.input->string() + "|" + format_double(c.generation.budget_tokens) : "";
  auto it = cache.find(key);
  if (it == cache.end()) {
    std::optional<Profile> p;
    if (c.input) p = load_ballots_csv(*c.input, c.generation.budget_tokens);
    it = cache.emplace(key, std::move(p)).first;
  }
  return it->second;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::bribery: return "bribery";
    case ExperimentKind::control: return "control";
    case ExperimentKind::robustness: return "robustness";
    case ExperimentKind::vev: return "vev";
    case ExperimentKind::welfare_gini_alignment: return "welfare_gini_alignment";
    case ExperimentKind::axioms: return "axioms";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (auto k : kAllExperiments) {
    if (to_string(k) == name) return k;
  }
  config_error("unknown experiment '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (rules.empty()) config_error("at least one rule is required");
  for (const auto& r : rules) {
    try {
      r.validate();
    } catch (const Error& e) {
      config_error(e.what());
    }
  }
  if (trials == 0) config_error("trials must be >= 1");
  if (workers == 0) config_error("workers must be >= 1");
  if (experiment == ExperimentKind::robustness && perturbations == 0) {
    config_error("perturbations must be >= 1");
  }
  if (!input) {
    try {
      generation.validate();
    } catch (const Error& e) {
      config_error(e.what());
    }
  }
  if (needs_sweep(experiment) && sweep.empty()) config_error("sweep must not be empty");
  for (double v : sweep) {
    switch (experiment) {
      case ExperimentKind::bribery:
      case ExperimentKind::control:
        if (!(v >= 0.0 && v <= 1.0)) config_error("target increases must lie in [0, 1]");
        break;
      case ExperimentKind::vev:
        if (!(v >= 0.9 && v <= 0.99)) config_error("concentrations must lie in [0.90, 0.99]");
        break;
      case ExperimentKind::axioms:
        if (!(v >= 0.0 && v < static_cast<double>(kAllAxioms.size())) || v != std::floor(v)) {
          config_error("axiom sweep values are indices 0..6");
        }
        break;
      default:
        break;
    }
  }
}

json ExperimentConfig::to_json() const {
  json rules_json = json::array();
  for (const auto& r : rules) rules_json.push_back(rule_json_name(r));
  json j;
  j["experiment"] = std::string(to_string(experiment));
  j["rules"] = rules_json;
  const RuleSpec params = rules.empty() ? RuleSpec{} : rules.front();
  j["rule_params"] = {{"q1", params.q1}, {"q2", params.q2}, {"k1", params.k1}, {"k2", params.k2}};
  if (input) {
    j["input"] = input->string();
    j["budget_tokens"] = generation.budget_tokens;
  } else {
    j["generation"] = {{"voters", generation.voters},
                       {"projects", generation.projects},
                       {"mix_weight", generation.mix_weight},
                       {"dirichlet_alpha", generation.dirichlet_alpha},
                       {"budget_tokens", generation.budget_tokens}};
  }
  j["sweep"] = sweep;
  j["control_mode"] = control_mode == ControlMode::add ? "add" : "delete";
  j["trials"] = trials;
  j["perturbations"] = perturbations;
  j["seed"] = seed;
  j["output"] = output.string();
  j["workers"] = workers;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) config_error("config must be a JSON object");
  static const std::set<std::string> known = {
      "experiment", "rules",  "rule_params", "generation", "input",   "budget_tokens",
      "sweep",      "control_mode", "trials", "perturbations", "seed", "output", "workers"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) config_error("unknown config field '" + key + "'");
  }
  ExperimentConfig c;
  if (!j.contains("experiment")) config_error("missing field 'experiment'");
  c.experiment = parse_experiment_kind(get_or<std::string>(j, "experiment", ""));

  RuleSpec params;
  if (j.contains("rule_params")) {
    const auto& p = j.at("rule_params");
    params.q1 = get_or(p, "q1", params.q1);
    params.q2 = get_or(p, "q2", params.q2);
    params.k1 = get_or(p, "k1", params.k1);
    params.k2 = get_or(p, "k2", params.k2);
  }
  const auto names = get_or<std::vector<std::string>>(j, "rules", {});
  for (const auto& n : names) {
    RuleSpec r = params;
    r.kind = parse_rule_kind(n);
    c.rules.push_back(r);
  }

  if (j.contains("generation")) {
    const auto& g = j.at("generation");
    c.generation.voters = get_or(g, "voters", c.generation.voters);
    c.generation.projects = get_or(g, "projects", c.generation.projects);
    c.generation.mix_weight = get_or(g, "mix_weight", c.generation.mix_weight);
    c.generation.dirichlet_alpha = get_or(g, "dirichlet_alpha", c.generation.dirichlet_alpha);
    c.generation.budget_tokens = get_or(g, "budget_tokens", c.generation.budget_tokens);
  }
  if (j.contains("input")) c.input = std::filesystem::path(get_or<std::string>(j, "input", ""));
  c.generation.budget_tokens = get_or(j, "budget_tokens", c.generation.budget_tokens);
  c.sweep = get_or(j, "sweep", c.sweep);
  const auto mode = get_or<std::string>(j, "control_mode", "delete");
  if (mode == "add") {
    c.control_mode = ControlMode::add;
  } else if (mode == "delete") {
    c.control_mode = ControlMode::remove;
  } else {
    config_error("control_mode must be 'add' or 'delete'");
  }
  c.trials = get_or(j, "trials", c.trials);
  c.perturbations = get_or(j, "perturbations", c.perturbations);
  c.seed = get_or(j, "seed", c.seed);
  c.output = get_or<std::string>(j, "output", c.output.string());
  c.workers = get_or(j, "workers", c.workers);
  c.validate();
  return c;
}

std::vector<std::string> metric_names(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::bribery:
      return {"target", "before", "after", "cost_l1", "mass_moved", "achieved", "iterations"};
    case ExperimentKind::control:
      return {"target", "before", "after", "voters", "token_mass", "achieved"};
    case ExperimentKind::robustness: return {"mean_shift", "max_shift"};
    case ExperimentKind::vev: return {"vev", "voter", "project"};
    case ExperimentKind::welfare_gini_alignment:
      return {"gini", "utilitarian_cost", "egalitarian_cost", "ground_truth_distance"};
    case ExperimentKind::axioms: return {"violated", "replays"};
  }
  return {};
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) {
  return CounterRng::derive(master, {trial}).next_u64();
}

TrialRecord run_trial(const ExperimentConfig& c, const RuleSpec& rule, double sweep,
                      std::size_t trial) {
  TrialRecord rec;
  rec.rule = rule.label();
  rec.sweep = sweep;
  rec.trial = trial;
  rec.seed = trial_seed(c.seed, trial);
  try {
    std::vector<double> truth;
    const Profile profile = trial_profile(c, rec.seed, &truth, shared_input(c));
    auto side = CounterRng::derive(rec.seed, {1});
    const auto target = static_cast<std::size_t>(side.below(profile.project_count()));
    switch (c.experiment) {
      case ExperimentKind::bribery: {
        const auto r = bribery_cost(profile, rule, target, sweep);
        rec.metrics = {static_cast<double>(target), r.before, r.after, r.cost, r.token_mass,
                       r.achieved ? 1.0 : 0.0, static_cast<double>(r.iterations)};
        break;
      }
      case ExperimentKind::control: {
        const auto r = control_cost(profile, rule, target, sweep, c.control_mode);
        rec.metrics = {static_cast<double>(target), r.before, r.after, r.cost, r.token_mass,
                       r.achieved ? 1.0 : 0.0};
        break;
      }
      case ExperimentKind::robustness: {
        const auto r = robustness_probe(profile, rule, c.perturbations, side.next_u64());
        rec.metrics = {r.mean, r.max};
        break;
      }
      case ExperimentKind::vev: {
        const auto r = voter_extractable_value(profile, rule, sweep);
        rec.metrics = {r.value, static_cast<double>(r.voter), static_cast<double>(r.project)};
        break;
      }
      case ExperimentKind::welfare_gini_alignment: {
        const auto a = allocate(profile, rule);
        const auto w = welfare_report(profile, a);
        const double gt = truth.empty() ? std::numeric_limits<double>::quiet_NaN()
                                        : ground_truth_alignment(a, truth);
        rec.metrics = {gini_index(a), w.utilitarian, w.egalitarian, gt};
        break;
      }
      case ExperimentKind::axioms: {
        SearchOptions o;
        o.trials = 1;
        o.seed = rec.seed;
        const auto axiom = kAllAxioms.at(static_cast<std::size_t>(sweep));
        const auto v = search_axiom(axiom, rule, o);
        rec.metrics = {v.violated() ? 1.0 : 0.0, v.violated() && replay_witness(v) ? 1.0 : 0.0};
        break;
      }
    }
  } catch (const Error& e) {
    rec.metrics.clear();
    rec.error = std::string(to_string(e.code()));
  }
  return rec;
}

std::vector<CellSummary> summarize(const std::vector<TrialRecord>& records, std::size_t metrics) {
  std::vector<CellSummary> cells;
  std::size_t begin = 0;
  while (begin < records.size()) {
    std::size_t end = begin;
    while (end < records.size() && records[end].rule == records[begin].rule &&
           records[end].sweep == records[begin].sweep) {
      ++end;
    }
    CellSummary cell;
    cell.rule = records[begin].rule;
    cell.sweep = records[begin].sweep;
    cell.metrics.resize(metrics);
    for (std::size_t k = 0; k < metrics; ++k) {
      MetricSummary& s = cell.metrics[k];
      double sum = 0.0;
      for (std::size_t r = begin; r < end; ++r) {
        if (!records[r].error.empty() || std::isnan(records[r].metrics[k])) continue;
        const double v = records[r].metrics[k];
        s.min = s.count == 0 ? v : std::min(s.min, v);
        s.max = s.count == 0 ? v : std::max(s.max, v);
        sum += v;
        ++s.count;
      }
      if (s.count == 0) continue;
      s.mean = sum / static_cast<double>(s.count);
      double sq = 0.0;
      for (std::size_t r = begin; r < end; ++r) {
        if (!records[r].error.empty() || std::isnan(records[r].metrics[k])) continue;
        const double d = records[r].metrics[k] - s.mean;
        sq += d * d;
      }
      s.stddev = std::sqrt(sq / static_cast<double>(s.count));
    }
    for (std::size_t r = begin; r < end; ++r) {
      if (!records[r].error.empty()) ++cell.errors;
    }
    cells.push_back(std::move(cell));
    begin = end;
  }
  return cells;
}

void write_trials_csv(std::ostream& out, const ExperimentReport& report) {
  out << "rule,sweep,trial,seed,error";
  for (const auto& m : report.metric_names) out << ',' << m;
  out << '\n';
  for (const auto& r : report.records) {
    out << r.rule << ',' << format_double(r.sweep) << ',' << r.trial << ',' << r.seed << ','
        << r.error;
    for (std::size_t k = 0; k < report.metric_names.size(); ++k) {
      out << ',' << (k < r.metrics.size() ? format_metric(r.metrics[k]) : std::string());
    }
    out << '\n';
  }
}

std::vector<TrialRecord> read_trials_csv(std::istream& in, std::size_t metrics) {
  std::vector<TrialRecord> out;
  std::string line;
  if (!std::getline(in, line)) return out;
  const std::size_t width = 5 + metrics;
  if (split_line(line).size() != width) {
    throw Error(ErrorCode::parse_error, "trial CSV header does not match the experiment");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    // The rule label may contain commas inside its parentheses.
    const auto close = line.find(')');
    std::string rule;
    std::string rest;
    if (close != std::string::npos && line.find('(') < close) {
      rule = line.substr(0, close + 1);
      rest = line.substr(close + 2);
    } else {
      const auto comma = line.find(',');
      rule = line.substr(0, comma);
      rest = comma == std::string::npos ? "" : line.substr(comma + 1);
    }
    const auto cells = split_line(rest);
    if (cells.size() != width - 1) {
      throw Error(ErrorCode::parse_error, "trial CSV line " + std::to_string(line_no) +
                                              " has the wrong number of cells");
    }
    TrialRecord r;
    r.rule = rule;
    r.sweep = parse_number(cells[0]);
    r.trial = static_cast<std::size_t>(std::stoull(cells[1]));
    r.seed = std::stoull(cells[2]);
    r.error = cells[3];
    if (r.error.empty()) {
      for (std::size_t k = 0; k < metrics; ++k) r.metrics.push_back(parse_number(cells[4 + k]));
    }
    out.push_back(std::move(r));
  }
  return out;
}

json summary_json(const ExperimentReport& report) {
  json cells = json::array();
  for (const auto& c : report.cells) {
    json metrics = json::object();
    for (std::size_t k = 0; k < c.metrics.size(); ++k) {
      const auto& s = c.metrics[k];
      metrics[report.metric_names[k]] = {
          {"count", s.count}, {"mean", s.mean}, {"stddev", s.stddev}, {"min", s.min}, {"max", s.max}};
    }
    cells.push_back({{"rule", c.rule}, {"sweep", c.sweep}, {"errors", c.errors}, {"metrics", metrics}});
  }
  json notes = {
      {"costs", "greedy upper bounds, not certified minima"},
      {"welfare", "utilitarian_cost and egalitarian_cost are l1 distances: lower is better"},
      {"robustness_perturbation", "one voter's ballot resampled from Dirichlet(1)"},
      {"rule_parameters", "q1/q2/k1/k2 defaults are placeholders; production values are not public"},
  };
  json j;
  j["artifact_version"] = kArtifactVersion;
  j["experiment"] = std::string(to_string(report.config.experiment));
  j["config"] = report.config.to_json();
  j["notes"] = notes;
  j["metric_names"] = report.metric_names;
  j["trial_rows"] = report.records.size();
  j["cells"] = cells;
  return j;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentReport report;
  report.config = config;
  report.metric_names = metric_names(config.experiment);
  const std::size_t width = report.metric_names.size();

  // Canonical order: rule (config order), sweep value (config order), trial.
  struct Slot {
    const RuleSpec* rule;
    double sweep;
    std::size_t trial;
  };
  std::vector<Slot> slots;
  const auto sweeps = swept_values(config);
  for (const auto& r : config.rules) {
    for (double s : sweeps) {
      for (std::size_t t = 0; t < config.trials; ++t) slots.push_back({&r, s, t});
    }
  }
  std::vector<std::optional<TrialRecord>> rows(slots.size());

  const auto csv_path = std::filesystem::path(config.output.string() + ".trials.csv");
  const auto json_path = std::filesystem::path(config.output.string() + ".summary.json");
  if (std::filesystem::exists(csv_path)) {
    std::ifstream in(csv_path);
    if (!in) throw Error(ErrorCode::io_error, "cannot read " + csv_path.string());
    std::map<std::tuple<std::string, double, std::size_t>, TrialRecord> done;
    for (auto& r : read_trials_csv(in, width)) {
      auto key = std::make_tuple(r.rule, r.sweep, r.trial);
      done.emplace(std::move(key), std::move(r));
    }
    for (std::size_t k = 0; k < slots.size(); ++k) {
      auto it = done.find({slots[k].rule->label(), slots[k].sweep, slots[k].trial});
      if (it != done.end() && it->second.seed == trial_seed(config.seed, slots[k].trial)) {
        rows[k] = it->second;
        ++report.resumed;
      }
    }
  }

  std::vector<std::size_t> pending;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    if (!rows[k]) pending.push_back(k);
  }
  std::mutex next_lock;
  std::size_t next = 0;
  auto worker = [&]() {
    while (true) {
      std::size_t k = 0;
      {
        std::lock_guard<std::mutex> guard(next_lock);
        if (next == pending.size()) return;
        k = pending[next++];
      }
      const auto& s = slots[k];
      rows[k] = run_trial(config, *s.rule, s.sweep, s.trial);
    }
  };
  const std::size_t threads = std::min(config.workers, std::max<std::size_t>(1, pending.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (auto& r : rows) report.records.push_back(std::move(*r));
  report.cells = summarize(report.records, width);

  if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + csv_path.string());
    write_trials_csv(out, report);
  }
  {
    std::ofstream out(json_path, std::ios::binary);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + json_path.string());
    out << summary_json(report).dump(2) << '\n';
  }
  return report;
}

json witness_json(const AxiomVerdict& verdict) {
  json j;
  j["axiom"] = std::string(to_string(verdict.axiom));
  j["rule"] = verdict.rule.label();
  j["status"] = std::string(to_string(verdict.status));
  j["trials_run"] = verdict.trials_run;
  if (!verdict.witness) return j;
  const Witness& w = *verdict.witness;
  json profiles = json::array();
  for (const auto& p : w.profiles) {
    profiles.push_back({{"normalized", p.normalized()}, {"rows", p.rows()}});
  }
  j["witness"] = {{"rule", w.rule.label()}, {"profiles", profiles}, {"voter", w.voter},
                  {"project", w.project},    {"k", w.k},              {"point", w.point},
                  {"before", w.before},     {"after", w.after},      {"delta", w.delta},
                  {"trial", w.trial},       {"source", w.source}};
  return j;
}

}  // namespace retro
