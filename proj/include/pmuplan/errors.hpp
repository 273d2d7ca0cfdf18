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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace pmuplan {

// Broad failure classes. The CLI maps each one to a process exit code.
enum class ErrorCategory {
  kUsage,          // bad arguments, malformed input files, violated preconditions
  kNumerical,      // rank-deficient gain matrix, unobservable state
  kCombinatorial,  // exhaustive enumeration over the configured cap
};

inline int exit_code_for(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kUsage:
      return 2;
    case ErrorCategory::kNumerical:
      return 3;
    case ErrorCategory::kCombinatorial:
      return 4;
  }
  return 1;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

// Syntax error in a case file; line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error(ErrorCategory::kUsage, "line " + std::to_string(line) +
                                         ", column " + std::to_string(column) +
                                         ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Structurally invalid network data (duplicate ids, dangling branches, ...).
class CaseError : public Error {
 public:
  explicit CaseError(const std::string& message)
      : Error(ErrorCategory::kUsage, message) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& message)
      : Error(ErrorCategory::kUsage, message) {}
};

class ChannelLimitError : public Error {
 public:
  ChannelLimitError(int bus, int incident, int limit)
      : Error(ErrorCategory::kUsage,
              "bus " + std::to_string(bus) + " has " +
                  std::to_string(incident) +
                  " incident branches, exceeding the PMU channel limit of " +
                  std::to_string(limit)),
        bus_(bus) {}

  int bus() const { return bus_; }

 private:
  int bus_;
};

class UnobservableError : public Error {
 public:
  explicit UnobservableError(std::int64_t null_space_dimension)
      : Error(ErrorCategory::kNumerical,
              "gain matrix is rank deficient: " +
                  std::to_string(null_space_dimension) +
                  " state direction(s) unobservable"),
        null_space_dimension_(null_space_dimension) {}

  std::int64_t null_space_dimension() const { return null_space_dimension_; }

 private:
  std::int64_t null_space_dimension_;
};

class EnumerationCapError : public Error {
 public:
  EnumerationCapError(std::uint64_t required, std::uint64_t cap)
      : Error(ErrorCategory::kCombinatorial,
              std::to_string(required) +
                  " candidate subsets exceed the enumeration cap of " +
                  std::to_string(cap) +
                  "; use the greedy planner for this size"),
        required_(required),
        cap_(cap) {}

  std::uint64_t required() const { return required_; }
  std::uint64_t cap() const { return cap_; }

 private:
  std::uint64_t required_;
  std::uint64_t cap_;
};

// Re-raises `e` with a context prefix while keeping its category.
[[noreturn]] inline void rethrow_with_context(const Error& e,
                                              const std::string& context) {
  throw Error(e.category(), context + ": " + e.what());
}

}  // namespace pmuplan
