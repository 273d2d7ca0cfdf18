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

// Shared fixtures and independent reference computations for the tests.

#ifndef PMUPLAN_TESTS_TEST_SUPPORT_HPP_
#define PMUPLAN_TESTS_TEST_SUPPORT_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "pmuplan/pmuplan.hpp"

namespace pmuplan::testing {

inline std::string data_path(const std::string& file) {
  return std::string(PMUPLAN_DATA_DIR) + "/" + file;
}

inline const NetworkCase& ieee14() {
  static const NetworkCase net = load_case_file(data_path("ieee14.m"));
  return net;
}

inline const NetworkCase& ieee118() {
  static const NetworkCase net = load_case_file(data_path("ieee118.m"));
  return net;
}

inline std::shared_ptr<const NetworkCase> shared_ieee14() {
  static const auto net = std::make_shared<const NetworkCase>(ieee14());
  return net;
}

inline const BusSet kNu14 = {2, 6, 7, 9};

inline MetricOptions pmu_state() {
  MetricOptions opt;
  opt.scope = StateScope::kPmuState;
  return opt;
}

// Lossless two-bus case: r = 0, x = 1, no charging.
inline NetworkCase two_bus(double b_charging = 0.0) {
  return NetworkCase("two", {{1}, {2}}, {{1, 2, 0.0, 1.0, b_charging}});
}

// Random subset of `pool` of the given size.
inline BusSet random_subset(const BusSet& pool, std::size_t size, std::mt19937& rng) {
  BusSet copy = pool;
  std::shuffle(copy.begin(), copy.end(), rng);
  copy.resize(size);
  return make_bus_set(std::move(copy));
}

// Reference WLS through explicit normal equations and an LU solve.
inline Eigen::VectorXd normal_equation_estimate(const Eigen::MatrixXd& h,
                                                const Eigen::VectorXd& var,
                                                const Eigen::VectorXd& dz) {
  const Eigen::MatrixXd w = var.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd g = h.transpose() * w * h;
  return g.fullPivLu().solve(h.transpose() * w * dz);
}

inline Eigen::MatrixXd normal_equation_projection(const Eigen::MatrixXd& h,
                                                  const Eigen::VectorXd& var) {
  const Eigen::MatrixXd w = var.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd g = h.transpose() * w * h;
  return h * g.fullPivLu().inverse() * h.transpose() * w;
}

inline double max_abs(const Eigen::MatrixXd& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

// Brute-force channel count: 2 per PMU bus plus 2 per metered branch end.
inline std::size_t reference_channel_count(const NetworkCase& net, const BusSet& q,
                                           bool per_end) {
  auto in = [&](BusId b) { return std::find(q.begin(), q.end(), b) != q.end(); };
  std::size_t m = 2 * q.size();
  for (const Branch& br : net.branches()) {
    const int ends = (in(br.from_bus) ? 1 : 0) + (in(br.to_bus) ? 1 : 0);
    if (per_end) {
      m += 2 * ends;
    } else if (ends > 0) {
      m += 2;
    }
  }
  return m;
}

// Buses whose incident branch count stays within `limit`.
inline BusSet eligible_buses(const NetworkCase& net, int limit) {
  BusSet out;
  for (BusId b : net.omega()) {
    if (static_cast<int>(net.incident_branches(b).size()) <= limit) out.push_back(b);
  }
  return out;
}

// Random connected network: a random spanning tree plus a few chords.
inline NetworkCase random_network(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.01, 0.5);
  std::vector<Bus> buses;
  for (int i = 1; i <= n; ++i) buses.push_back({i});
  std::vector<Branch> branches;
  for (int i = 2; i <= n; ++i) {
    const int parent = 1 + static_cast<int>(rng() % (i - 1));
    branches.push_back({parent, i, u(rng), u(rng), u(rng) * 0.1});
  }
  for (int extra = static_cast<int>(rng() % 4); extra > 0 && n > 2; --extra) {
    const int a = 1 + static_cast<int>(rng() % n);
    const int b = 1 + static_cast<int>(rng() % n);
    if (a != b) branches.push_back({a, b, u(rng), u(rng)});
  }
  return NetworkCase("random" + std::to_string(n), buses, branches);
}

}  // namespace pmuplan::testing

#endif  // PMUPLAN_TESTS_TEST_SUPPORT_HPP_
