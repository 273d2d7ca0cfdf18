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

// Brute-force submodularity audit for placement objectives.
//
// Objectives here are costs (lower is better, e.g. av(diag(S))), so the
// return of adding bus s to a set X is the decrease it buys:
//
//     gain(X, s) = f(X) - f(X ∪ {s}).
//
// A triple (A, B, s) with A ⊆ B, s ∉ B shows diminishing returns
// (submodular) when gain(A, s) >= gain(B, s). Equivalently, the usual
// inequality f(A ∪ {s}) - f(A) >= f(B ∪ {s}) - f(B) applied to the accuracy
// -f.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <iterator>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pmuplan/combinatorics.hpp"
#include "pmuplan/errors.hpp"
#include "pmuplan/network.hpp"
#include "pmuplan/parallel.hpp"

namespace pmuplan {

inline constexpr double kDefaultTieTolerance = 1e-9;
inline constexpr std::size_t kDefaultCounterexampleCap = 100;

struct SubsetTriple {
  BusSet a;
  BusSet b;
  BusId s = 0;

  auto operator<=>(const SubsetTriple&) const = default;
};

enum class Modularity { kSubmodular, kSupermodular, kTie };

inline const char* to_string(Modularity m) {
  switch (m) {
    case Modularity::kSubmodular:
      return "submodular";
    case Modularity::kSupermodular:
      return "supermodular";
    case Modularity::kTie:
      return "tie";
  }
  return "?";
}

struct MarginRecord {
  SubsetTriple triple;
  double f_a = 0.0;
  double f_a_s = 0.0;
  double f_b = 0.0;
  double f_b_s = 0.0;
  double gain_small = 0.0;  // f(A) - f(A ∪ {s})
  double gain_large = 0.0;  // f(B) - f(B ∪ {s})
  double margin = 0.0;      // gain_small - gain_large
  Modularity cls = Modularity::kTie;
};

struct ClassificationTally {
  std::uint64_t total = 0;
  std::uint64_t submodular = 0;
  std::uint64_t supermodular = 0;
  std::uint64_t ties = 0;
  std::vector<MarginRecord> counterexamples;  // supermodular, lexicographic

  void add(const MarginRecord& r, std::size_t counterexample_cap) {
    ++total;
    switch (r.cls) {
      case Modularity::kSubmodular:
        ++submodular;
        break;
      case Modularity::kSupermodular:
        ++supermodular;
        if (counterexamples.size() < counterexample_cap) {
          counterexamples.push_back(r);
        }
        break;
      case Modularity::kTie:
        ++ties;
        break;
    }
  }
};

// Raised when the objective fails on some set; carries the tally of every
// triple classified before the first failing one.
class AuditError : public Error {
 public:
  AuditError(ErrorCategory category, const std::string& message,
             SubsetTriple triple, ClassificationTally partial)
      : Error(category, message),
        triple_(std::move(triple)),
        partial_(std::move(partial)) {}

  const SubsetTriple& triple() const { return triple_; }
  const ClassificationTally& partial() const { return partial_; }

 private:
  SubsetTriple triple_;
  ClassificationTally partial_;
};

inline BusSet with_bus(const BusSet& set, BusId s) {
  BusSet out = set;
  out.insert(std::upper_bound(out.begin(), out.end(), s), s);
  return out;
}

inline BusSet set_difference(const BusSet& a, const BusSet& b) {
  BusSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

inline BusSet set_union(const BusSet& a, std::span<const BusId> b) {
  BusSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Number of triples ν ⊆ A ⊆ B ⊂ Ω, s ∈ Ω \ B with the given cardinalities:
// C(|Ω|-|ν|, |A|-|ν|) · C(|Ω|-|A|, |B|-|A|) · C(|Ω|-|B|, 1).
inline std::uint64_t count_combinations(std::uint64_t omega, std::uint64_t nu,
                                        std::uint64_t a, std::uint64_t b) {
  if (!(nu <= a && a <= b && b < omega)) {
    throw UsageError("subset sizes must satisfy |nu| <= |A| <= |B| < |Omega| (got " +
                     std::to_string(nu) + ", " + std::to_string(a) + ", " +
                     std::to_string(b) + ", " + std::to_string(omega) + ")");
  }
  return checked_mul(checked_mul(binomial(omega - nu, a - nu),
                                 binomial(omega - a, b - a)),
                     binomial(omega - b, 1));
}

namespace detail {

inline void check_triple_inputs(const BusSet& omega, const BusSet& nu,
                                std::size_t a_size, std::size_t b_size) {
  if (!std::includes(omega.begin(), omega.end(), nu.begin(), nu.end())) {
    throw UsageError("nu must be a subset of the bus set");
  }
  count_combinations(omega.size(), nu.size(), a_size, b_size);
}

}  // namespace detail

// Visits every triple once, lexicographically by (A, B, s).
template <typename Visit>
void for_each_triple(const BusSet& omega, const BusSet& nu, std::size_t a_size,
                     std::size_t b_size, Visit&& visit) {
  detail::check_triple_inputs(omega, nu, a_size, b_size);
  const BusSet free_buses = set_difference(omega, nu);
  SubsetTriple t;
  for_each_combination<BusId>(free_buses, a_size - nu.size(), [&](auto extra_a) {
    t.a = set_union(nu, extra_a);
    const BusSet outside_a = set_difference(omega, t.a);
    for_each_combination<BusId>(outside_a, b_size - a_size, [&](auto extra_b) {
      t.b = set_union(t.a, extra_b);
      for (BusId s : set_difference(omega, t.b)) {
        t.s = s;
        visit(static_cast<const SubsetTriple&>(t));
      }
    });
  });
}

inline std::vector<SubsetTriple> enumerate_triples(const BusSet& omega,
                                                   const BusSet& nu,
                                                   std::size_t a_size,
                                                   std::size_t b_size) {
  std::vector<SubsetTriple> out;
  for_each_triple(omega, nu, a_size, b_size,
                  [&](const SubsetTriple& t) { out.push_back(t); });
  return out;
}

inline Modularity classify_margin(double margin, double tol) {
  if (margin >= tol) return Modularity::kSubmodular;
  if (margin <= -tol) return Modularity::kSupermodular;
  return Modularity::kTie;
}

inline MarginRecord make_margin_record(SubsetTriple triple, double f_a,
                                       double f_a_s, double f_b, double f_b_s,
                                       double tol) {
  MarginRecord r;
  r.triple = std::move(triple);
  r.f_a = f_a;
  r.f_a_s = f_a_s;
  r.f_b = f_b;
  r.f_b_s = f_b_s;
  r.gain_small = f_a - f_a_s;
  r.gain_large = f_b - f_b_s;
  r.margin = r.gain_small - r.gain_large;
  r.cls = classify_margin(r.margin, tol);
  return r;
}

inline MarginRecord classify_triple(const SetMetric& f, const SubsetTriple& t,
                                    double tol = kDefaultTieTolerance) {
  return make_margin_record(t, f(t.a), f(with_bus(t.a, t.s)), f(t.b),
                            f(with_bus(t.b, t.s)), tol);
}

struct AuditOptions {
  std::size_t a_size = 0;
  std::size_t b_size = 0;
  double tol = kDefaultTieTolerance;
  std::size_t max_counterexamples = kDefaultCounterexampleCap;
  unsigned workers = 0;
};

// Classifies every triple. Each distinct set is evaluated once, possibly in
// parallel; classification then runs in enumeration order, so the tally and
// the counterexample list do not depend on the worker count.
inline ClassificationTally audit(const BusSet& omega, const BusSet& nu,
                                 const SetMetric& f, const AuditOptions& opt) {
  struct Pending {
    SubsetTriple triple;
    std::size_t a, a_s, b, b_s;
  };
  std::map<BusSet, std::size_t> set_ids;
  std::vector<const BusSet*> sets;
  auto intern = [&](BusSet s) {
    auto [it, inserted] = set_ids.emplace(std::move(s), sets.size());
    if (inserted) sets.push_back(&it->first);
    return it->second;
  };
  std::vector<Pending> pending;
  for_each_triple(omega, nu, opt.a_size, opt.b_size, [&](const SubsetTriple& t) {
    pending.push_back({t, intern(t.a), intern(with_bus(t.a, t.s)), intern(t.b),
                       intern(with_bus(t.b, t.s))});
  });

  struct Evaluation {
    double value = 0.0;
    std::exception_ptr error;
  };
  const std::vector<Evaluation> values =
      parallel_map(sets.size(), opt.workers, [&](std::size_t i) {
        Evaluation e;
        try {
          e.value = f(*sets[i]);
        } catch (...) {
          e.error = std::current_exception();
        }
        return e;
      });

  ClassificationTally tally;
  for (const Pending& p : pending) {
    for (std::size_t id : {p.a, p.a_s, p.b, p.b_s}) {
      if (!values[id].error) continue;
      ErrorCategory category = ErrorCategory::kUsage;
      std::string cause;
      try {
        std::rethrow_exception(values[id].error);
      } catch (const Error& e) {
        category = e.category();
        cause = e.what();
      } catch (const std::exception& e) {
        cause = e.what();
      }
      throw AuditError(category,
                       "objective failed after " + std::to_string(tally.total) +
                           " classified triples: " + cause,
                       p.triple, tally);
    }
    tally.add(make_margin_record(p.triple, values[p.a].value, values[p.a_s].value,
                                 values[p.b].value, values[p.b_s].value, opt.tol),
              opt.max_counterexamples);
  }
  return tally;
}

// True when f never increases along the nested chain (within tol).
inline bool check_monotone(const SetMetric& f, const std::vector<BusSet>& chain,
                           double tol = 0.0) {
  for (std::size_t i = 1; i < chain.size(); ++i) {
    if (!std::includes(chain[i].begin(), chain[i].end(), chain[i - 1].begin(),
                       chain[i - 1].end())) {
      throw UsageError("chain sets must be nested");
    }
  }
  for (std::size_t i = 1; i < chain.size(); ++i) {
    if (f(chain[i]) > f(chain[i - 1]) + tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Exhaustive checks over every subset of a small ground set (at most 16
// elements) with f tabulated once per subset.

namespace detail {

inline std::vector<double> tabulate(const SetMetric& f, const BusSet& ground) {
  if (ground.size() > 16) throw UsageError("ground set too large to tabulate");
  const std::size_t subsets = std::size_t{1} << ground.size();
  std::vector<double> table(subsets);
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    BusSet q;
    for (std::size_t i = 0; i < ground.size(); ++i) {
      if (mask >> i & 1) q.push_back(ground[i]);
    }
    table[mask] = f(q);
  }
  return table;
}

}  // namespace detail

// Diminishing-returns verdict over every A ⊆ B ⊆ ground and s ∉ B.
inline bool is_submodular_exhaustive(const SetMetric& f, const BusSet& ground,
                                     double tol = kDefaultTieTolerance) {
  const std::vector<double> table = detail::tabulate(f, ground);
  const std::size_t full = table.size() - 1;
  for (std::size_t b = 0; b <= full; ++b) {
    // Enumerate submasks a of b.
    for (std::size_t a = b;; a = (a - 1) & b) {
      for (std::size_t i = 0; i < ground.size(); ++i) {
        const std::size_t s = std::size_t{1} << i;
        if (b & s) continue;
        const double margin = (table[a] - table[a | s]) - (table[b] - table[b | s]);
        if (classify_margin(margin, tol) == Modularity::kSupermodular) return false;
      }
      if (a == 0) break;
    }
  }
  return true;
}

// Whether every marginal-gain function Q ↦ gain(Q, s) on subsets of
// ground \ {s} is monotone decreasing.
inline bool marginal_gains_monotone(const SetMetric& f, const BusSet& ground,
                                    double tol = kDefaultTieTolerance) {
  const std::vector<double> table = detail::tabulate(f, ground);
  const std::size_t full = table.size() - 1;
  for (std::size_t i = 0; i < ground.size(); ++i) {
    const std::size_t s = std::size_t{1} << i;
    const std::size_t rest = full & ~s;
    auto gain = [&](std::size_t q) { return table[q] - table[q | s]; };
    for (std::size_t b = rest;; b = (b - 1) & rest) {
      for (std::size_t a = b;; a = (a - 1) & b) {
        if (gain(a) - gain(b) <= -tol) return false;
        if (a == 0) break;
      }
      if (b == 0) break;
    }
  }
  return true;
}

}  // namespace pmuplan
