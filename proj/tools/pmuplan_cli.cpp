// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// pmuplan: command-line front end.
//
//   pmuplan case info      --case ieee14
//   pmuplan metrics        --case ieee14 --scope paper-compat --add 10,14
//   pmuplan plan compare   --case ieee14 --scope paper-compat --stages 10
//   pmuplan submod audit   --case ieee14 --scope paper-compat
//   pmuplan submod count   --case ieee118
//   pmuplan knapsack demo
//
// Exit codes: 0 success, 2 usage or parse error, 3 numerical infeasibility,
// 4 combinatorial cap exceeded.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pmuplan/pmuplan.hpp"

namespace {

using namespace pmuplan;
namespace fs = std::filesystem;

#ifndef PMUPLAN_DATA_DIR
#define PMUPLAN_DATA_DIR "data"
#endif

std::string data_dir() {
  if (const char* env = std::getenv("PMUPLAN_DATA_DIR")) return env;
  return PMUPLAN_DATA_DIR;
}

struct RunConfig {
  std::string case_arg = "ieee14";
  std::string format = "auto";
  std::string scope = "full";
  std::string dedupe = "by-branch";
  double sigma_v = 1.0;
  double sigma_i = 1.0;
  double tol = kDefaultTieTolerance;
  std::size_t stages = 1;
  std::uint64_t enum_cap = kDefaultEnumerationCap;
  std::optional<std::string> nu;
  std::vector<std::string> add;
  std::optional<std::size_t> a_size;
  std::optional<std::size_t> b_size;
  std::size_t max_counterexamples = kDefaultCounterexampleCap;
  bool count_only = false;
  unsigned parallel = 0;
  std::string out = "md";
  std::string output_path;
  bool flat_branch_model = false;
  int channel_limit = kDefaultChannelLimit;
  std::string values;
  std::string weights;
  std::string method = "both";

  // Filled by validate().
  OutputFormat output_format = OutputFormat::kMarkdown;
  MetricOptions metric;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string token;
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '[' ||
        c == ']') {
      if (!token.empty()) out.push_back(token);
      token.clear();
    } else {
      token += c;
    }
  }
  if (!token.empty()) out.push_back(token);
  return out;
}

template <typename T>
std::vector<T> parse_numbers(const std::string& text, const char* what) {
  std::vector<T> out;
  for (const std::string& tok : split_list(text)) {
    std::istringstream in(tok);
    T v{};
    if (!(in >> v) || !in.eof()) {
      throw UsageError(std::string("invalid ") + what + " '" + tok + "'");
    }
    out.push_back(v);
  }
  return out;
}

void validate(RunConfig& cfg) {
  if (cfg.scope == "full" || cfg.scope == "full-state") {
    cfg.metric.scope = StateScope::kFullState;
  } else if (cfg.scope == "paper-compat" || cfg.scope == "pmu-state") {
    cfg.metric.scope = StateScope::kPmuState;
  } else {
    throw UsageError("--scope must be full or paper-compat");
  }
  if (cfg.dedupe == "by-branch") {
    cfg.metric.dedupe = Dedupe::kByBranch;
  } else if (cfg.dedupe == "per-end") {
    cfg.metric.dedupe = Dedupe::kPerEnd;
  } else {
    throw UsageError("--dedupe must be by-branch or per-end");
  }
  if (!(cfg.sigma_v > 0) || !(cfg.sigma_i > 0)) {
    throw UsageError("--sigma-v and --sigma-i must be positive");
  }
  cfg.metric.variances = {cfg.sigma_v * cfg.sigma_v, cfg.sigma_i * cfg.sigma_i};
  cfg.metric.branch_model =
      cfg.flat_branch_model ? BranchModel::kFlat : BranchModel::kTapAware;
  if (cfg.channel_limit <= 0) throw UsageError("--channel-limit must be positive");
  cfg.metric.channel_limit = cfg.channel_limit;
  if (!(cfg.tol >= 0)) throw UsageError("--tol must be non-negative");
  if (cfg.out == "md" || cfg.out == "markdown") {
    cfg.output_format = OutputFormat::kMarkdown;
  } else if (cfg.out == "csv") {
    cfg.output_format = OutputFormat::kCsv;
  } else if (cfg.out == "json") {
    cfg.output_format = OutputFormat::kJson;
  } else {
    throw UsageError("--out must be md, csv or json");
  }
  if (cfg.format != "auto" && cfg.format != "matpower" && cfg.format != "json") {
    throw UsageError("--format must be auto, matpower or json");
  }
}

// A path, or the name of a bundled case (ieee14, ieee118).
std::string resolve_case_path(const std::string& arg) {
  if (fs::exists(arg)) return arg;
  for (const char* ext : {".m", ".json"}) {
    const fs::path bundled = fs::path(data_dir()) / (arg + ext);
    if (fs::exists(bundled)) return bundled.string();
  }
  throw UsageError("case file '" + arg + "' not found");
}

NetworkCase load(const RunConfig& cfg) {
  std::optional<CaseFormat> fmt;
  if (cfg.format == "json") fmt = CaseFormat::kJson;
  if (cfg.format == "matpower") fmt = CaseFormat::kMatpower;
  NetworkCase net = load_case_file(resolve_case_path(cfg.case_arg), fmt);
  if (!net.is_connected()) {
    std::cerr << "warning: case '" << net.name() << "' is not connected\n";
  }
  return net;
}

BusSet read_bus_list(const NetworkCase& net, const std::string& text) {
  BusSet buses = make_bus_set(parse_numbers<BusId>(text, "bus id"));
  for (BusId b : buses) net.bus_index(b);
  return buses;
}

// --nu: "auto" (greedy cover), a bus list, or a file holding one. Without
// it, a bundled <case>.nu.json next to the case file is used if present.
BusSet resolve_nu(const NetworkCase& net, const RunConfig& cfg) {
  if (cfg.nu && split_list(*cfg.nu).empty()) return {};
  std::string spec = cfg.nu.value_or("");
  if (!cfg.nu) {
    const fs::path sidecar =
        fs::path(resolve_case_path(cfg.case_arg)).replace_extension(".nu.json");
    spec = fs::exists(sidecar) ? sidecar.string() : "auto";
  }
  if (spec == "auto") return greedy_observable_cover(net, cfg.channel_limit).buses;
  if (fs::exists(spec)) {
    std::ifstream in(spec);
    std::stringstream buf;
    buf << in.rdbuf();
    return read_bus_list(net, buf.str());
  }
  return read_bus_list(net, spec);
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.output_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.output_path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + cfg.output_path + "'");
  out << text;
}

PlanOptions plan_options(const RunConfig& cfg) {
  return {kPlanTieTolerance, cfg.enum_cap, cfg.parallel};
}

// ---------------------------------------------------------------------------

void cmd_case_info(const RunConfig& cfg) {
  emit(cfg, render_case_info(load(cfg), cfg.output_format));
}

void cmd_metrics(const RunConfig& cfg) {
  const NetworkCase net = load(cfg);
  const BusSet nu = resolve_nu(net, cfg);
  std::vector<std::string> adds = cfg.add;
  if (adds.empty()) adds.push_back("-");
  std::vector<MetricsRow> rows;
  for (const std::string& add : adds) {
    BusSet extra = add == "-" ? BusSet{} : read_bus_list(net, add);
    BusSet placement = set_union(nu, extra);
    if (placement.empty()) throw UsageError("placement is empty");
    const PmuPlacement p = make_placement(net, placement, cfg.channel_limit);
    const MeasurementSet mset =
        enumerate_channels(net, p, cfg.metric.dedupe, cfg.metric.variances);
    const Jacobian h = build_jacobian(net, mset, cfg.metric.scope, cfg.metric.branch_model);
    rows.push_back({add == "-" ? "" : detail::join_ids(extra), placement,
                    sensitivity_report(h, CovarianceModel::from_channels(mset.channels))});
  }
  emit(cfg, render_metrics(rows, cfg.output_format));
}

void cmd_plan(const RunConfig& cfg, const std::string& mode) {
  auto net = std::make_shared<const NetworkCase>(load(cfg));
  const BusSet nu = resolve_nu(*net, cfg);
  const SetMetric metric = make_sensitivity_metric(net, cfg.metric);
  const PlanOptions opt = plan_options(cfg);
  if (mode == "greedy") {
    emit(cfg, render_priority_list(greedy_plan(net->omega(), nu, metric, cfg.stages, opt),
                                   cfg.output_format));
  } else if (mode == "budget") {
    for (std::size_t k = 1; k <= cfg.stages; ++k) {
      const std::uint64_t required = budget_subset_count(net->omega(), nu, k);
      if (required > opt.enum_cap) throw EnumerationCapError(required, opt.enum_cap);
    }
    std::vector<StageResult> stages;
    for (std::size_t k = 1; k <= cfg.stages; ++k) {
      stages.push_back(budget_constrained_plan(net->omega(), nu, metric, k, opt));
    }
    emit(cfg, render_budget_stages(stages, cfg.output_format));
  } else {
    emit(cfg, render_comparison(compare_plans(net->omega(), nu, metric, cfg.stages, opt),
                                cfg.output_format));
  }
}

void cmd_submod(const RunConfig& cfg, bool count_only) {
  auto net = std::make_shared<const NetworkCase>(load(cfg));
  const BusSet nu = resolve_nu(*net, cfg);
  AuditSummary summary;
  summary.case_name = net->name();
  summary.nu = nu;
  summary.omega_size = net->bus_count();
  summary.a_size = cfg.a_size.value_or(net->bus_count() >= 2 ? net->bus_count() - 2 : 0);
  summary.b_size = cfg.b_size.value_or(net->bus_count() >= 1 ? net->bus_count() - 1 : 0);
  summary.tol = cfg.tol;
  summary.alpha =
      count_combinations(summary.omega_size, nu.size(), summary.a_size, summary.b_size);
  if (count_only) {
    emit(cfg, fmt::format("α = {}\n", summary.alpha));
    return;
  }
  AuditOptions opt;
  opt.a_size = summary.a_size;
  opt.b_size = summary.b_size;
  opt.tol = cfg.tol;
  opt.max_counterexamples = cfg.max_counterexamples;
  opt.workers = cfg.parallel;
  try {
    summary.tally = audit(net->omega(), nu, make_sensitivity_metric(net, cfg.metric), opt);
  } catch (const AuditError& e) {
    std::cerr << "partial tally before failure: " << e.partial().submodular
              << " submodular, " << e.partial().supermodular << " supermodular, "
              << e.partial().ties << " ties\n";
    throw;
  }
  emit(cfg, render_audit(summary, cfg.output_format));
}

void cmd_knapsack(const RunConfig& cfg) {
  KnapsackInstance inst = illustrative_knapsack();
  if (!cfg.values.empty() || !cfg.weights.empty()) {
    inst = make_knapsack(parse_numbers<double>(cfg.values, "value"),
                         parse_numbers<double>(cfg.weights, "weight"));
  }
  if (cfg.method != "both" && cfg.method != "optimal" && cfg.method != "greedy") {
    throw UsageError("--method must be both, optimal or greedy");
  }
  std::string out;
  if (cfg.method != "greedy") {
    out += render_breakpoints(inst, budget_sweep(inst, KnapsackMethod::kOptimal),
                              cfg.output_format);
  }
  if (cfg.method == "both" && cfg.output_format == OutputFormat::kMarkdown) out += "\n";
  if (cfg.method != "optimal") {
    out += render_breakpoints(inst, budget_sweep(inst, KnapsackMethod::kGreedy),
                              cfg.output_format);
  }
  emit(cfg, out);
}

void add_case_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--case", cfg.case_arg, "case file, or bundled name (ieee14, ieee118)");
  cmd->add_option("--format", cfg.format, "case format: auto|matpower|json");
  cmd->add_option("--out", cfg.out, "output format: md|csv|json");
  cmd->add_option("--output", cfg.output_path, "write output to this file");
}

void add_model_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--scope", cfg.scope, "state scope: full|paper-compat");
  cmd->add_option("--dedupe", cfg.dedupe, "current channels: by-branch|per-end");
  cmd->add_option("--sigma-v", cfg.sigma_v, "voltage channel std deviation (p.u.)");
  cmd->add_option("--sigma-i", cfg.sigma_i, "current channel std deviation (p.u.)");
  cmd->add_flag("--flat-branch-model", cfg.flat_branch_model,
                "ignore taps, shifts and line charging");
  cmd->add_option("--channel-limit", cfg.channel_limit,
                  "maximum incident branches per PMU");
  cmd->add_option("--nu", cfg.nu,
                  "base placement: auto, bus list or file (default: bundled list or auto)");
  cmd->add_option("--parallel", cfg.parallel, "worker threads (0 = all cores)");
}

int run(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Multi-stage PMU placement planning"};
  app.require_subcommand(1);

  auto* case_cmd = app.add_subcommand("case", "case file utilities");
  case_cmd->require_subcommand(1);
  auto* case_info = case_cmd->add_subcommand("info", "bus and branch summary");
  add_case_options(case_info, cfg);

  auto* metrics = app.add_subcommand("metrics", "diag(S) metrics for placements");
  add_case_options(metrics, cfg);
  add_model_options(metrics, cfg);
  metrics->add_option("--add", cfg.add,
                      "buses added to nu, one row per use ('-' for nu alone)");

  auto* plan = app.add_subcommand("plan", "multi-stage placement planning");
  plan->require_subcommand(1);
  std::vector<CLI::App*> plan_modes;
  for (const char* mode : {"greedy", "budget", "compare"}) {
    auto* sub = plan->add_subcommand(mode, std::string(mode) + " planner");
    add_case_options(sub, cfg);
    add_model_options(sub, cfg);
    sub->add_option("--stages", cfg.stages, "number of stages");
    sub->add_option("--enum-cap", cfg.enum_cap, "maximum subsets per budget stage");
    plan_modes.push_back(sub);
  }

  auto* submod = app.add_subcommand("submod", "submodularity audit");
  submod->require_subcommand(1);
  std::vector<CLI::App*> submod_modes;
  for (const char* mode : {"audit", "count"}) {
    auto* sub = submod->add_subcommand(
        mode, mode == std::string("audit") ? "brute-force triple audit"
                                           : "number of audited triples");
    add_case_options(sub, cfg);
    add_model_options(sub, cfg);
    sub->add_option("--a-size", cfg.a_size, "|A| (default |Omega| - 2)");
    sub->add_option("--b-size", cfg.b_size, "|B| (default |Omega| - 1)");
    sub->add_option("--tol", cfg.tol, "tie tolerance on the margin");
    sub->add_option("--max-counterexamples", cfg.max_counterexamples,
                    "supermodular records kept");
    sub->add_flag("--count-only", cfg.count_only, "print alpha and stop");
    submod_modes.push_back(sub);
  }

  auto* knapsack = app.add_subcommand("knapsack", "illustrative knapsack");
  knapsack->require_subcommand(1);
  auto* demo = knapsack->add_subcommand("demo", "budget sweeps of both methods");
  demo->add_option("--values", cfg.values, "item values, comma separated");
  demo->add_option("--weights", cfg.weights, "item weights, comma separated");
  demo->add_option("--method", cfg.method, "both|optimal|greedy");
  demo->add_option("--out", cfg.out, "output format: md|csv|json");
  demo->add_option("--output", cfg.output_path, "write output to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    validate(cfg);
    if (case_info->parsed()) cmd_case_info(cfg);
    if (metrics->parsed()) cmd_metrics(cfg);
    for (auto* sub : plan_modes) {
      if (sub->parsed()) cmd_plan(cfg, sub->get_name());
    }
    for (auto* sub : submod_modes) {
      if (sub->parsed()) cmd_submod(cfg, cfg.count_only || sub->get_name() == "count");
    }
    if (demo->parsed()) cmd_knapsack(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
