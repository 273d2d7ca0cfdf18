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

// Text renderings of results: markdown tables for people, CSV and JSON for
// scripts. Every JSON document carries a "schema" tag; field order is fixed.

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <nlohmann/json.hpp>

#include "pmuplan/estimation.hpp"
#include "pmuplan/knapsack.hpp"
#include "pmuplan/network.hpp"
#include "pmuplan/planner.hpp"
#include "pmuplan/submodularity.hpp"

namespace pmuplan {

enum class OutputFormat { kMarkdown, kCsv, kJson };

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline std::string join_ids(std::span<const BusId> ids, const char* empty = "-") {
  if (ids.empty()) return empty;
  return fmt::format("{}", fmt::join(ids, ","));
}

inline std::string fixed4(double v) { return fmt::format("{:.4f}", v); }

inline std::string dump(const ordered_json& doc) { return doc.dump(2) + "\n"; }

}  // namespace detail

// ---------------------------------------------------------------------------
// case info

inline std::string render_case_info(const NetworkCase& net, OutputFormat format) {
  const bool connected = net.is_connected();
  if (format == OutputFormat::kJson) {
    ordered_json doc;
    doc["schema"] = "pmuplan.case-info/1";
    doc["name"] = net.name();
    doc["buses"] = net.bus_count();
    doc["branches"] = net.branch_count();
    doc["connected"] = connected;
    auto& deg = doc["degrees"] = ordered_json::array();
    for (BusId b : net.omega()) {
      deg.push_back({{"bus", b},
                     {"branches", net.incident_branches(b).size()},
                     {"neighbors", net.neighbors(b)}});
    }
    return detail::dump(doc);
  }
  if (format == OutputFormat::kCsv) {
    std::string out = "bus,branches,neighbors\n";
    for (BusId b : net.omega()) {
      out += fmt::format("{},{},\"{}\"\n", b, net.incident_branches(b).size(),
                         detail::join_ids(net.neighbors(b), ""));
    }
    return out;
  }
  std::string out = fmt::format("{}: {} buses, {} branches, {}\n\n",
                                net.name(), net.bus_count(), net.branch_count(),
                                connected ? "connected" : "NOT connected");
  out += "| bus | branches | neighbors |\n|---:|---:|:---|\n";
  for (BusId b : net.omega()) {
    out += fmt::format("| {} | {} | {} |\n", b, net.incident_branches(b).size(),
                       detail::join_ids(net.neighbors(b)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// sensitivity metrics

struct MetricsRow {
  std::string label;  // e.g. buses added to the base set
  BusSet placement;
  SensitivityReport report;
};

inline std::string render_metrics(std::span<const MetricsRow> rows,
                                  OutputFormat format) {
  if (format == OutputFormat::kJson) {
    ordered_json doc;
    doc["schema"] = "pmuplan.sensitivity/1";
    auto& arr = doc["rows"] = ordered_json::array();
    for (const MetricsRow& r : rows) {
      ordered_json row;
      row["label"] = r.label;
      row["placement"] = r.placement;
      row["m"] = r.report.m;
      row["n"] = r.report.n;
      row["rank"] = r.report.rank;
      row["min"] = r.report.min;
      row["max"] = r.report.max;
      row["sum"] = r.report.sum;
      row["average"] = r.report.average;
      row["diag_s"] = std::vector<double>(r.report.diag_s.data(),
                                          r.report.diag_s.data() + r.report.diag_s.size());
      arr.push_back(std::move(row));
    }
    return detail::dump(doc);
  }
  if (format == OutputFormat::kCsv) {
    std::string out = "label,placement,m,n,rank,min,max,sum,average\n";
    for (const MetricsRow& r : rows) {
      out += fmt::format("\"{}\",\"{}\",{},{},{},{},{},{},{}\n", r.label,
                         detail::join_ids(r.placement, ""), r.report.m, r.report.n,
                         r.report.rank, r.report.min, r.report.max, r.report.sum,
                         r.report.average);
    }
    return out;
  }
  std::string out =
      "| added | m | n | rank | min | max | sum | average |\n"
      "|:---|---:|---:|---:|---:|---:|---:|---:|\n";
  for (const MetricsRow& r : rows) {
    out += fmt::format("| {} | {} | {} | {} | {} | {} | {} | {} |\n",
                       r.label.empty() ? "-" : r.label, r.report.m, r.report.n,
                       r.report.rank, detail::fixed4(r.report.min),
                       detail::fixed4(r.report.max), detail::fixed4(r.report.sum),
                       detail::fixed4(r.report.average));
  }
  return out;
}

// ---------------------------------------------------------------------------
// submodularity audit

struct AuditSummary {
  std::string case_name;
  BusSet nu;
  std::size_t omega_size = 0;
  std::size_t a_size = 0;
  std::size_t b_size = 0;
  double tol = 0.0;
  std::uint64_t alpha = 0;
  ClassificationTally tally;
};

inline ordered_json margin_record_json(const MarginRecord& r) {
  ordered_json j;
  j["a"] = r.triple.a;
  j["b"] = r.triple.b;
  j["s"] = r.triple.s;
  j["f_a"] = r.f_a;
  j["f_a_s"] = r.f_a_s;
  j["f_b"] = r.f_b;
  j["f_b_s"] = r.f_b_s;
  j["gain_small"] = r.gain_small;
  j["gain_large"] = r.gain_large;
  j["margin"] = r.margin;
  j["class"] = to_string(r.cls);
  return j;
}

inline std::string render_audit(const AuditSummary& a, OutputFormat format) {
  const ClassificationTally& t = a.tally;
  if (format == OutputFormat::kJson) {
    ordered_json doc;
    doc["schema"] = "pmuplan.submodularity-audit/1";
    doc["case"] = a.case_name;
    doc["nu"] = a.nu;
    doc["omega_size"] = a.omega_size;
    doc["a_size"] = a.a_size;
    doc["b_size"] = a.b_size;
    doc["tol"] = a.tol;
    doc["alpha"] = a.alpha;
    doc["total"] = t.total;
    doc["submodular"] = t.submodular;
    doc["supermodular"] = t.supermodular;
    doc["ties"] = t.ties;
    auto& ce = doc["counterexamples"] = ordered_json::array();
    for (const MarginRecord& r : t.counterexamples) ce.push_back(margin_record_json(r));
    return detail::dump(doc);
  }
  if (format == OutputFormat::kCsv) {
    std::string out = "case,nu_size,a_size,b_size,alpha,total,submodular,supermodular,ties\n";
    out += fmt::format("\"{}\",{},{},{},{},{},{},{},{}\n", a.case_name, a.nu.size(),
                       a.a_size, a.b_size, a.alpha, t.total, t.submodular,
                       t.supermodular, t.ties);
    return out;
  }
  std::string out = fmt::format(
      "| case | nu | A | B | submodular cases | supermodular cases | ties |\n"
      "|:---|---:|---:|---:|---:|---:|---:|\n"
      "| {} | {} | {} | {} | {} | {} | {} |\n\n",
      a.case_name, a.nu.size(), a.a_size, a.b_size, t.submodular, t.supermodular,
      t.ties);
  out += fmt::format("{} triples: {} submodular, {} supermodular, {} ties\n", t.total,
                     t.submodular, t.supermodular, t.ties);
  out += fmt::format("alpha = {} ({})\n", a.alpha,
                     a.alpha == t.total ? "matches enumeration" : "MISMATCH");
  if (!t.counterexamples.empty()) {
    out += "\n| A \\ nu | B \\ A | s | gain at A | gain at B | margin |\n"
           "|:---|:---|---:|---:|---:|---:|\n";
    for (const MarginRecord& r : t.counterexamples) {
      out += fmt::format("| {} | {} | {} | {:.6g} | {:.6g} | {:.3e} |\n",
                         detail::join_ids(set_difference(r.triple.a, a.nu)),
                         detail::join_ids(set_difference(r.triple.b, r.triple.a)),
                         r.triple.s, r.gain_small, r.gain_large, r.margin);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// planning

inline std::string render_priority_list(const PriorityList& plan,
                                        OutputFormat format) {
  if (format == OutputFormat::kJson) {
    ordered_json doc;
    doc["schema"] = "pmuplan.greedy-plan/1";
    doc["base"] = plan.base;
    doc["order"] = plan.order;
    doc["stage_values"] = plan.stage_values;
    return detail::dump(doc);
  }
  if (format == OutputFormat::kCsv) {
    std::string out = "stage,added,nodes,value\n";
    for (std::size_t k = 0; k < plan.order.size(); ++k) {
      out += fmt::format("{},{},\"{}\",{}\n", k + 1, plan.order[k],
                         detail::join_ids(std::span(plan.order).first(k + 1), ""),
                         plan.stage_values[k]);
    }
    return out;
  }
  std::string out = "| stage | added node(s) | av(diag(S)) |\n|---:|:---|---:|\n";
  for (std::size_t k = 0; k < plan.order.size(); ++k) {
    out += fmt::format("| {} | {} | {} |\n", k + 1,
                       detail::join_ids(std::span(plan.order).first(k + 1)),
                       detail::fixed4(plan.stage_values[k]));
  }
  return out;
}

inline std::string render_budget_stages(std::span<const StageResult> stages,
                                        OutputFormat format) {
  if (format == OutputFormat::kJson) {
    ordered_json doc;
    doc["schema"] = "pmuplan.budget-plan/1";
    auto& arr = doc["stages"] = ordered_json::array();
    for (const StageResult& s : stages) {
      arr.push_back({{"stage", s.stage}, {"selected", s.selected}, {"value", s.metric_value}});
    }
    return detail::dump(doc);
  }
  if (format == OutputFormat::kCsv) {
    std::string out = "stage,nodes,value\n";
    for (const StageResult& s : stages) {
      out += fmt::format("{},\"{}\",{}\n", s.stage, detail::join_ids(s.selected, ""),
                         s.metric_value);
    }
    return out;
  }
  std::string out = "| stage | added node(s) | av(diag(S)) |\n|---:|:---|---:|\n";
  for (const StageResult& s : stages) {
    out += fmt::format("| {} | {} | {} |\n", s.stage, detail::join_ids(s.selected),
                       detail::fixed4(s.metric_value));
  }
  return out;
}

inline std::string render_comparison(const PlanComparison& cmp, OutputFormat format) {
  auto greedy_prefix = [&](std::size_t k) {
    return std::span(cmp.greedy.order).first(k);
  };
  if (format == OutputFormat::kJson) {
    ordered_json doc;
    doc["schema"] = "pmuplan.plan-comparison/1";
    doc["base"] = cmp.base;
    doc["greedy_order"] = cmp.greedy.order;
    auto& arr = doc["stages"] = ordered_json::array();
    for (const StageComparison& s : cmp.stages) {
      ordered_json row;
      row["stage"] = s.stage;
      row["budget_nodes"] = s.budget.selected;
      row["budget_value"] = s.budget.metric_value;
      row["greedy_nodes"] = std::vector<BusId>(greedy_prefix(s.stage).begin(),
                                               greedy_prefix(s.stage).end());
      row["greedy_value"] = s.greedy.metric_value;
      row["sets_differ"] = s.sets_differ;
      row["greedy_worse"] = s.greedy_worse;
      arr.push_back(std::move(row));
    }
    return detail::dump(doc);
  }
  if (format == OutputFormat::kCsv) {
    std::string out =
        "stage,budget_nodes,budget_value,greedy_nodes,greedy_value,sets_differ,greedy_worse\n";
    for (const StageComparison& s : cmp.stages) {
      out += fmt::format("{},\"{}\",{},\"{}\",{},{},{}\n", s.stage,
                         detail::join_ids(s.budget.selected, ""), s.budget.metric_value,
                         detail::join_ids(greedy_prefix(s.stage), ""),
                         s.greedy.metric_value, s.sets_differ, s.greedy_worse);
    }
    return out;
  }
  std::string out =
      "| stage | budget-constrained nodes | av(diag(S)) | greedy nodes | av(diag(S)) | note |\n"
      "|---:|:---|---:|:---|---:|:---|\n";
  for (const StageComparison& s : cmp.stages) {
    const char* note = s.greedy_worse ? "greedy worse"
                       : s.sets_differ ? "different set, same value"
                                       : "";
    out += fmt::format("| {} | {} | {} | {} | {} | {} |\n", s.stage,
                       detail::join_ids(s.budget.selected),
                       detail::fixed4(s.budget.metric_value),
                       detail::join_ids(greedy_prefix(s.stage)),
                       detail::fixed4(s.greedy.metric_value), note);
  }
  return out;
}

// ---------------------------------------------------------------------------
// knapsack

namespace detail {

inline std::string interval(const BreakpointRow& r) {
  if (std::isinf(r.hi)) return fmt::format("[{},+inf)", r.lo);
  return fmt::format("[{},{})", r.lo, r.hi);
}

inline std::string item_labels(const KnapsackInstance& inst,
                               const std::vector<std::size_t>& items,
                               const char* empty) {
  if (items.empty()) return empty;
  std::vector<std::string> names;
  for (std::size_t i : items) names.push_back(inst.labels[i]);
  return fmt::format("{}", fmt::join(names, ", "));
}

}  // namespace detail

inline std::string render_breakpoints(const KnapsackInstance& inst,
                                      const BudgetBreakpointTable& table,
                                      OutputFormat format) {
  const char* method = table.method == KnapsackMethod::kOptimal ? "optimal" : "greedy";
  if (format == OutputFormat::kJson) {
    ordered_json doc;
    doc["schema"] = "pmuplan.knapsack-sweep/1";
    doc["method"] = method;
    auto& arr = doc["rows"] = ordered_json::array();
    for (const BreakpointRow& r : table.rows) {
      ordered_json row;
      row["lo"] = r.lo;
      row["hi"] = std::isinf(r.hi) ? ordered_json(nullptr) : ordered_json(r.hi);
      std::vector<std::string> labels;
      for (std::size_t i : r.items) labels.push_back(inst.labels[i]);
      row["items"] = labels;
      row["objective"] = r.objective;
      arr.push_back(std::move(row));
    }
    return detail::dump(doc);
  }
  if (format == OutputFormat::kCsv) {
    std::string out = "method,lo,hi,items,objective\n";
    for (const BreakpointRow& r : table.rows) {
      out += fmt::format("{},{},{},\"{}\",{}\n", method, r.lo,
                         std::isinf(r.hi) ? std::string("inf") : fmt::format("{}", r.hi),
                         detail::item_labels(inst, r.items, ""), r.objective);
    }
    return out;
  }
  std::string out = fmt::format("| b ({}) | solution | objective |\n|:---|:---|---:|\n", method);
  for (const BreakpointRow& r : table.rows) {
    out += fmt::format("| {} | {} | {} |\n", detail::interval(r),
                       detail::item_labels(inst, r.items, "-"), r.objective);
  }
  return out;
}

}  // namespace pmuplan
