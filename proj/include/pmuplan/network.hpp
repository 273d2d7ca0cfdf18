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

// Power-network case data: buses, branches, topology queries and the
// per-branch admittance model shared by the measurement and estimation code.
//
// Two input formats are understood:
//
//  * a MATPOWER subset: `mpc.baseMVA`, `mpc.bus` and `mpc.branch` tables of a
//    standard `.m` case file. Generator, cost and any other tables are parsed
//    for syntax and ignored. Bus shunts (Gs, Bs) are converted to per unit on
//    baseMVA, a zero tap ratio means 1.0, shift angles are read in degrees,
//    and out-of-service branches (status 0) are dropped.
//  * a native JSON document (see `case_to_json`), all quantities per unit and
//    shift angles in radians.

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "pmuplan/errors.hpp"

namespace pmuplan {

using BusId = int;
// Sorted, duplicate-free list of bus ids.
using BusSet = std::vector<BusId>;

// Real-valued objective over PMU placements; lower is better.
using SetMetric = std::function<double(const BusSet&)>;

inline BusSet make_bus_set(std::vector<BusId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

struct Bus {
  BusId id = 0;
  double shunt_g = 0.0;  // per unit
  double shunt_b = 0.0;  // per unit

  bool operator==(const Bus&) const = default;
};

struct Branch {
  BusId from_bus = 0;
  BusId to_bus = 0;
  double r = 0.0;
  double x = 0.0;
  double b_charging = 0.0;  // total line charging, per unit
  double tap = 1.0;         // off-nominal ratio at the from end
  double shift = 0.0;       // radians

  bool operator==(const Branch&) const = default;
};

enum class BranchModel {
  kTapAware,  // series admittance, half line charging per end, taps, shifts
  kFlat,      // bare series admittance: Y_ff = y_s, Y_ft = -y_s
};

enum class CaseFormat { kMatpower, kJson };

// Two-port admittances of a branch: I_f = ff·V_f + ft·V_t, I_t = tf·V_f + tt·V_t.
struct BranchAdmittance {
  std::complex<double> ff;
  std::complex<double> ft;
  std::complex<double> tf;
  std::complex<double> tt;
};

inline void validate_branch(const Branch& br) {
  auto where = [&] {
    return "branch " + std::to_string(br.from_bus) + "-" +
           std::to_string(br.to_bus);
  };
  if (br.from_bus == br.to_bus) {
    throw CaseError(where() + " connects a bus to itself");
  }
  if (!std::isfinite(br.r) || !std::isfinite(br.x) ||
      !std::isfinite(br.b_charging) || !std::isfinite(br.tap) ||
      !std::isfinite(br.shift)) {
    throw CaseError(where() + " has non-finite parameters");
  }
  if (br.r == 0.0 && br.x == 0.0) {
    throw CaseError(where() + " has zero series impedance");
  }
  if (!(br.tap > 0.0)) {
    throw CaseError(where() + " has non-positive tap ratio");
  }
}

inline BranchAdmittance branch_end_admittances(
    const Branch& br, BranchModel model = BranchModel::kTapAware) {
  validate_branch(br);
  const std::complex<double> ys = 1.0 / std::complex<double>(br.r, br.x);
  if (model == BranchModel::kFlat) return {ys, -ys, -ys, ys};
  const std::complex<double> half_charging(0.0, br.b_charging / 2.0);
  const std::complex<double> ratio = std::polar(br.tap, br.shift);
  return {
      (ys + half_charging) / (br.tap * br.tap),
      -ys / std::conj(ratio),
      -ys / ratio,
      ys + half_charging,
  };
}

class NetworkCase {
 public:
  NetworkCase() = default;

  // Validates every invariant; throws CaseError on the first violation.
  NetworkCase(std::string name, std::vector<Bus> buses,
              std::vector<Branch> branches)
      : name_(std::move(name)),
        buses_(std::move(buses)),
        branches_(std::move(branches)) {
    if (buses_.empty()) throw CaseError("case has no buses");
    index_.reserve(buses_.size());
    for (std::size_t i = 0; i < buses_.size(); ++i) {
      const Bus& bus = buses_[i];
      if (bus.id <= 0) {
        throw CaseError("bus id " + std::to_string(bus.id) +
                        " is not a positive integer");
      }
      if (!index_.emplace(bus.id, i).second) {
        throw CaseError("duplicate bus id " + std::to_string(bus.id));
      }
      omega_.push_back(bus.id);
    }
    std::sort(omega_.begin(), omega_.end());
    incident_.assign(buses_.size(), {});
    for (std::size_t k = 0; k < branches_.size(); ++k) {
      const Branch& br = branches_[k];
      for (BusId end : {br.from_bus, br.to_bus}) {
        if (!index_.contains(end)) {
          throw CaseError("branch " + std::to_string(k + 1) +
                          " references undeclared bus " + std::to_string(end));
        }
      }
      validate_branch(br);
      incident_[index_.at(br.from_bus)].push_back(k);
      incident_[index_.at(br.to_bus)].push_back(k);
    }
  }

  const std::string& name() const { return name_; }
  std::span<const Bus> buses() const { return buses_; }
  std::span<const Branch> branches() const { return branches_; }
  std::size_t bus_count() const { return buses_.size(); }
  std::size_t branch_count() const { return branches_.size(); }

  // Ground set of bus ids in ascending order.
  const BusSet& omega() const { return omega_; }

  bool has_bus(BusId id) const { return index_.contains(id); }

  // Position of the bus in file order.
  std::size_t bus_index(BusId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
      throw UsageError("unknown bus id " + std::to_string(id));
    }
    return it->second;
  }

  // Branch indices touching `id`, in file order. Parallel branches repeat.
  std::span<const std::size_t> incident_branches(BusId id) const {
    return incident_[bus_index(id)];
  }

  static BusId other_end(const Branch& br, BusId end) {
    return br.from_bus == end ? br.to_bus : br.from_bus;
  }

  BusSet neighbors(BusId id) const {
    BusSet out;
    for (std::size_t k : incident_branches(id)) {
      out.push_back(other_end(branches_[k], id));
    }
    return make_bus_set(std::move(out));
  }

  bool is_connected() const {
    std::vector<bool> seen(buses_.size(), false);
    std::queue<std::size_t> frontier;
    frontier.push(0);
    seen[0] = true;
    std::size_t reached = 1;
    while (!frontier.empty()) {
      const std::size_t i = frontier.front();
      frontier.pop();
      for (std::size_t k : incident_[i]) {
        const std::size_t j =
            index_.at(other_end(branches_[k], buses_[i].id));
        if (!seen[j]) {
          seen[j] = true;
          ++reached;
          frontier.push(j);
        }
      }
    }
    return reached == buses_.size();
  }

  bool operator==(const NetworkCase& other) const {
    return name_ == other.name_ && buses_ == other.buses_ &&
           branches_ == other.branches_;
  }

 private:
  std::string name_;
  std::vector<Bus> buses_;
  std::vector<Branch> branches_;
  BusSet omega_;
  std::unordered_map<BusId, std::size_t> index_;
  std::vector<std::vector<std::size_t>> incident_;
};

// Row per branch: +1 in the from-bus column, -1 in the to-bus column.
// Columns follow file bus order.
inline Eigen::MatrixXi incidence_matrix(const NetworkCase& net) {
  Eigen::MatrixXi a = Eigen::MatrixXi::Zero(
      static_cast<Eigen::Index>(net.branch_count()),
      static_cast<Eigen::Index>(net.bus_count()));
  const auto branches = net.branches();
  for (std::size_t k = 0; k < branches.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    a(row, static_cast<Eigen::Index>(net.bus_index(branches[k].from_bus))) = 1;
    a(row, static_cast<Eigen::Index>(net.bus_index(branches[k].to_bus))) = -1;
  }
  return a;
}

// ---------------------------------------------------------------------------
// JSON format

inline constexpr int kCaseSchemaVersion = 1;

inline nlohmann::ordered_json case_to_json(const NetworkCase& net) {
  nlohmann::ordered_json doc;
  doc["format"] = "pmuplan-case";
  doc["version"] = kCaseSchemaVersion;
  doc["name"] = net.name();
  auto& buses = doc["buses"] = nlohmann::ordered_json::array();
  for (const Bus& b : net.buses()) {
    buses.push_back({{"id", b.id}, {"shunt_g", b.shunt_g}, {"shunt_b", b.shunt_b}});
  }
  auto& branches = doc["branches"] = nlohmann::ordered_json::array();
  for (const Branch& br : net.branches()) {
    branches.push_back({{"from", br.from_bus},
                        {"to", br.to_bus},
                        {"r", br.r},
                        {"x", br.x},
                        {"b_charging", br.b_charging},
                        {"tap", br.tap},
                        {"shift", br.shift}});
  }
  return doc;
}

inline std::string serialize_case_json(const NetworkCase& net) {
  return case_to_json(net).dump(2) + "\n";
}

namespace detail {

inline std::pair<int, int> line_column(std::string_view text,
                                       std::size_t offset) {
  int line = 1;
  int column = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

inline double json_number(const nlohmann::json& obj, const char* key,
                          std::optional<double> fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (fallback) return *fallback;
    throw CaseError(std::string("missing field '") + key + "'");
  }
  if (!it->is_number()) {
    throw CaseError(std::string("field '") + key + "' must be a number");
  }
  return it->get<double>();
}

inline BusId json_bus_id(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer()) {
    throw CaseError(std::string("field '") + key + "' must be an integer");
  }
  return it->get<BusId>();
}

inline NetworkCase parse_json_case(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // nlohmann reports the byte just past the offending token.
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    auto [line, column] = line_column(text, at);
    std::string what = e.what();
    if (auto p = what.find("parse error"); p != std::string::npos) {
      what = what.substr(p);
    }
    throw ParseError(what, line, column);
  }
  if (!doc.is_object()) throw CaseError("case document must be a JSON object");
  if (auto v = doc.find("version");
      v != doc.end() && (!v->is_number_integer() || v->get<int>() != kCaseSchemaVersion)) {
    throw CaseError("unsupported case schema version");
  }
  std::string name = doc.value("name", std::string{});
  auto buses_it = doc.find("buses");
  auto branches_it = doc.find("branches");
  if (buses_it == doc.end() || !buses_it->is_array()) {
    throw CaseError("case document needs a 'buses' array");
  }
  if (branches_it == doc.end() || !branches_it->is_array()) {
    throw CaseError("case document needs a 'branches' array");
  }
  std::vector<Bus> buses;
  for (const auto& b : *buses_it) {
    if (!b.is_object()) throw CaseError("bus entries must be objects");
    buses.push_back({json_bus_id(b, "id"), json_number(b, "shunt_g", 0.0),
                     json_number(b, "shunt_b", 0.0)});
  }
  std::vector<Branch> branches;
  for (const auto& br : *branches_it) {
    if (!br.is_object()) throw CaseError("branch entries must be objects");
    branches.push_back({json_bus_id(br, "from"), json_bus_id(br, "to"),
                        json_number(br, "r", std::nullopt),
                        json_number(br, "x", std::nullopt),
                        json_number(br, "b_charging", 0.0),
                        json_number(br, "tap", 1.0),
                        json_number(br, "shift", 0.0)});
  }
  return NetworkCase(std::move(name), std::move(buses), std::move(branches));
}

// ---------------------------------------------------------------------------
// MATPOWER subset

class MatpowerScanner {
 public:
  explicit MatpowerScanner(std::string_view text) : text_(text) {}

  struct Table {
    std::vector<std::vector<double>> rows;
    std::vector<int> row_lines;
  };

  void run() {
    while (true) {
      skip_blank(true);
      if (at_end()) break;
      if (match_word("function")) {
        parse_function_header();
        continue;
      }
      parse_assignment();
    }
  }

  const std::string& name() const { return name_; }
  std::optional<double> base_mva() const { return base_mva_; }
  const std::optional<Table>& bus() const { return bus_; }
  const std::optional<Table>& branch() const { return branch_; }

  [[noreturn]] void fail(const std::string& message) const {
    auto [line, column] = line_column(text_, pos_);
    throw ParseError(message, line, column);
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  int line() const { return line_column(text_, pos_).first; }

  void skip_comment() {
    while (!at_end() && peek() != '\n') ++pos_;
  }

  // Skips spaces and comments; newlines too when `newlines` is set.
  void skip_blank(bool newlines) {
    while (!at_end()) {
      const char c = peek();
      if (c == '%') {
        skip_comment();
      } else if (c == ' ' || c == '\t' || c == '\r' ||
                 (newlines && c == '\n')) {
        ++pos_;
      } else if (c == '.' && text_.substr(pos_, 3) == "...") {
        // line continuation
        skip_comment();
        if (!at_end()) ++pos_;
      } else {
        break;
      }
    }
  }

  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  bool match_word(std::string_view word) {
    if (text_.substr(pos_, word.size()) != word) return false;
    const std::size_t end = pos_ + word.size();
    if (end < text_.size() && ident_char(text_[end])) return false;
    pos_ = end;
    return true;
  }

  std::string identifier() {
    const std::size_t start = pos_;
    if (at_end() || !(std::isalpha(static_cast<unsigned char>(peek())) ||
                      peek() == '_')) {
      fail("expected identifier");
    }
    while (!at_end() && ident_char(peek())) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  void expect(char c) {
    skip_blank(false);
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void parse_function_header() {
    // function mpc = case14
    skip_blank(false);
    identifier();
    expect('=');
    skip_blank(false);
    name_ = identifier();
    end_statement();
  }

  void end_statement() {
    skip_blank(false);
    if (peek() == ';') ++pos_;
    skip_blank(false);
    if (!at_end() && peek() != '\n') fail("unexpected trailing characters");
  }

  void parse_assignment() {
    const std::string root = identifier();
    std::string field;
    if (peek() == '.') {
      ++pos_;
      field = identifier();
    }
    (void)root;
    expect('=');
    skip_blank(false);
    const char c = peek();
    if (c == '[') {
      Table table = parse_matrix();
      if (field == "bus") bus_ = std::move(table);
      if (field == "branch") branch_ = std::move(table);
    } else if (c == '{') {
      skip_cell();
    } else if (c == '\'' || c == '"') {
      skip_string();
    } else {
      const double value = parse_number();
      if (field == "baseMVA") base_mva_ = value;
    }
    end_statement();
  }

  void skip_string() {
    const char quote = peek();
    ++pos_;
    while (!at_end() && peek() != quote) {
      if (peek() == '\n') fail("unterminated string");
      ++pos_;
    }
    if (at_end()) fail("unterminated string");
    ++pos_;
  }

  void skip_cell() {
    int depth = 0;
    do {
      skip_blank(true);
      if (at_end()) fail("unterminated cell array");
      const char c = peek();
      if (c == '\'' || c == '"') {
        skip_string();
        continue;
      }
      if (c == '{') ++depth;
      if (c == '}') --depth;
      ++pos_;
    } while (depth > 0);
  }

  double parse_number() {
    const std::size_t start = pos_;
    if (peek() == '+' || peek() == '-') ++pos_;
    auto word_at = [&](std::string_view w) {
      return text_.substr(pos_, w.size()) == w;
    };
    double sign = text_[start] == '-' ? -1.0 : 1.0;
    if (word_at("Inf")) {
      pos_ += 3;
      return sign * HUGE_VAL;
    }
    while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) ||
                         peek() == '.' || peek() == 'e' || peek() == 'E' ||
                         ((peek() == '+' || peek() == '-') &&
                          (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E')))) {
      ++pos_;
    }
    const std::string token(text_.substr(start, pos_ - start));
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(token, &used);
    } catch (const std::exception&) {
      pos_ = start;
      fail("expected number");
    }
    if (used != token.size()) {
      pos_ = start + used;
      fail("malformed number '" + token + "'");
    }
    return value;
  }

  Table parse_matrix() {
    ++pos_;  // '['
    Table table;
    std::vector<double> row;
    int row_line = line();
    auto flush = [&] {
      if (!row.empty()) {
        table.rows.push_back(std::move(row));
        table.row_lines.push_back(row_line);
        row.clear();
      }
    };
    while (true) {
      skip_blank(false);
      if (at_end()) fail("unterminated matrix");
      const char c = peek();
      if (c == ']') {
        ++pos_;
        flush();
        return table;
      }
      if (c == ';' || c == '\n') {
        ++pos_;
        flush();
        row_line = line();
        continue;
      }
      if (c == ',') {
        ++pos_;
        continue;
      }
      if (row.empty()) row_line = line();
      row.push_back(parse_number());
      const char after = peek();
      if (!(after == ' ' || after == '\t' || after == '\r' || after == '\n' ||
            after == ',' || after == ';' || after == ']' || after == '%')) {
        fail("unexpected character in matrix");
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::string name_;
  std::optional<double> base_mva_;
  std::optional<Table> bus_;
  std::optional<Table> branch_;
};

inline BusId table_bus_id(double v, int line) {
  if (v != std::floor(v) || v <= 0 || v > 1e9) {
    throw ParseError("bus number must be a positive integer", line, 1);
  }
  return static_cast<BusId>(v);
}

inline NetworkCase parse_matpower_case(std::string_view text) {
  MatpowerScanner scanner(text);
  scanner.run();
  if (!scanner.bus()) scanner.fail("missing mpc.bus table");
  if (!scanner.branch()) scanner.fail("missing mpc.branch table");
  const double base = scanner.base_mva().value_or(100.0);
  if (!(base > 0)) throw CaseError("baseMVA must be positive");

  std::vector<Bus> buses;
  const auto& bus_table = *scanner.bus();
  for (std::size_t i = 0; i < bus_table.rows.size(); ++i) {
    const auto& row = bus_table.rows[i];
    const int line = bus_table.row_lines[i];
    if (row.size() < 6) {
      throw ParseError("bus row needs at least 6 columns", line, 1);
    }
    buses.push_back({table_bus_id(row[0], line), row[4] / base, row[5] / base});
  }
  std::vector<Branch> branches;
  const auto& branch_table = *scanner.branch();
  for (std::size_t i = 0; i < branch_table.rows.size(); ++i) {
    const auto& row = branch_table.rows[i];
    const int line = branch_table.row_lines[i];
    if (row.size() < 5) {
      throw ParseError("branch row needs at least 5 columns", line, 1);
    }
    if (row.size() >= 11 && row[10] == 0.0) continue;
    Branch br;
    br.from_bus = table_bus_id(row[0], line);
    br.to_bus = table_bus_id(row[1], line);
    br.r = row[2];
    br.x = row[3];
    br.b_charging = row[4];
    br.tap = (row.size() >= 9 && row[8] != 0.0) ? row[8] : 1.0;
    br.shift = row.size() >= 10 ? row[9] * std::numbers::pi / 180.0 : 0.0;
    branches.push_back(br);
  }
  return NetworkCase(scanner.name(), std::move(buses), std::move(branches));
}

}  // namespace detail

inline NetworkCase parse_case(std::string_view text, CaseFormat format) {
  return format == CaseFormat::kJson ? detail::parse_json_case(text)
                                     : detail::parse_matpower_case(text);
}

inline CaseFormat format_for_path(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot != std::string::npos) {
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == "json") return CaseFormat::kJson;
  }
  return CaseFormat::kMatpower;
}

// Reads and parses a case file. Without `format`, `.json` files are read as
// JSON and everything else as MATPOWER. A case without a name takes the file
// stem.
inline NetworkCase load_case_file(const std::string& path,
                                  std::optional<CaseFormat> format = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open case file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  NetworkCase net;
  try {
    net = parse_case(text, format.value_or(format_for_path(path)));
  } catch (const Error& e) {
    rethrow_with_context(e, path);
  }
  if (net.name().empty()) {
    std::string stem = path.substr(path.find_last_of("/\\") + 1);
    stem = stem.substr(0, stem.rfind('.'));
    std::vector<Bus> buses(net.buses().begin(), net.buses().end());
    std::vector<Branch> branches(net.branches().begin(), net.branches().end());
    net = NetworkCase(stem, std::move(buses), std::move(branches));
  }
  return net;
}

}  // namespace pmuplan
