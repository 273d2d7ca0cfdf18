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

// PMU placements and the real measurement channels they induce.
//
// A bus-type PMU meters the voltage phasor of its bus and the current phasor
// of every incident branch, each phasor split into real and imaginary
// channels. Channels are listed in a fixed canonical order: all voltage
// channels by bus id, then current channels by (lower endpoint, higher
// endpoint, branch index, metered end).

#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "pmuplan/errors.hpp"
#include "pmuplan/network.hpp"

namespace pmuplan {

inline constexpr int kDefaultChannelLimit = 8;

struct PmuPlacement {
  BusSet buses;
  int channel_limit = kDefaultChannelLimit;
};

// Builds a placement after checking every bus exists. Input order and
// duplicates do not matter.
inline PmuPlacement make_placement(const NetworkCase& net,
                                   std::vector<BusId> buses,
                                   int channel_limit = kDefaultChannelLimit) {
  if (channel_limit <= 0) throw UsageError("channel limit must be positive");
  PmuPlacement p{make_bus_set(std::move(buses)), channel_limit};
  for (BusId b : p.buses) {
    if (!net.has_bus(b)) {
      throw UsageError("placement names unknown bus " + std::to_string(b));
    }
  }
  return p;
}

enum class ChannelKind { kVr, kVx, kIr, kIx };

enum class Dedupe {
  kByBranch,  // a branch metered from both ends yields one current phasor
  kPerEnd,    // every PMU meters all its incident branches
};

struct MeteredBranch {
  std::size_t index = 0;  // position in NetworkCase::branches()
  BusId metered_end = 0;

  bool operator==(const MeteredBranch&) const = default;
};

struct MeasurementChannel {
  ChannelKind kind = ChannelKind::kVr;
  BusId bus = 0;  // bus of the measuring PMU
  std::optional<MeteredBranch> branch;
  double variance = 1.0;  // per unit squared

  bool operator==(const MeasurementChannel&) const = default;
};

// Per-kind channel variances, per unit squared.
struct ChannelVariances {
  double voltage = 1.0;
  double current = 1.0;
};

struct MeasurementSet {
  std::vector<MeasurementChannel> channels;
  PmuPlacement placement;

  std::size_t size() const { return channels.size(); }
};

namespace detail {

inline void check_channel_limit(const NetworkCase& net,
                                const PmuPlacement& placement) {
  for (BusId b : placement.buses) {
    const auto incident = static_cast<int>(net.incident_branches(b).size());
    if (incident > placement.channel_limit) {
      throw ChannelLimitError(b, incident, placement.channel_limit);
    }
  }
}

inline std::vector<MeteredBranch> metered_branches(const NetworkCase& net,
                                                   const PmuPlacement& placement,
                                                   Dedupe dedupe) {
  const auto branches = net.branches();
  auto hosts = [&](BusId b) {
    return std::binary_search(placement.buses.begin(), placement.buses.end(), b);
  };
  std::vector<MeteredBranch> out;
  for (std::size_t k = 0; k < branches.size(); ++k) {
    const Branch& br = branches[k];
    const BusId lo = std::min(br.from_bus, br.to_bus);
    const BusId hi = std::max(br.from_bus, br.to_bus);
    const bool at_lo = hosts(lo);
    const bool at_hi = hosts(hi);
    if (at_lo) out.push_back({k, lo});
    if (at_hi && (dedupe == Dedupe::kPerEnd || !at_lo)) out.push_back({k, hi});
  }
  auto key = [&](const MeteredBranch& m) {
    const Branch& br = branches[m.index];
    return std::make_tuple(std::min(br.from_bus, br.to_bus),
                           std::max(br.from_bus, br.to_bus), m.index,
                           m.metered_end);
  };
  std::sort(out.begin(), out.end(),
            [&](const auto& a, const auto& b) { return key(a) < key(b); });
  return out;
}

}  // namespace detail

inline MeasurementSet enumerate_channels(const NetworkCase& net,
                                         const PmuPlacement& placement,
                                         Dedupe dedupe = Dedupe::kByBranch,
                                         ChannelVariances variances = {}) {
  if (!(variances.voltage > 0.0) || !(variances.current > 0.0)) {
    throw UsageError("channel variances must be positive");
  }
  for (BusId b : placement.buses) net.bus_index(b);
  detail::check_channel_limit(net, placement);

  MeasurementSet set;
  set.placement = placement;
  for (BusId b : placement.buses) {
    set.channels.push_back({ChannelKind::kVr, b, std::nullopt, variances.voltage});
    set.channels.push_back({ChannelKind::kVx, b, std::nullopt, variances.voltage});
  }
  for (const MeteredBranch& m : detail::metered_branches(net, placement, dedupe)) {
    set.channels.push_back({ChannelKind::kIr, m.metered_end, m, variances.current});
    set.channels.push_back({ChannelKind::kIx, m.metered_end, m, variances.current});
  }
  return set;
}

// Channel count m without building the channel list.
inline std::size_t channel_count(const NetworkCase& net,
                                 const PmuPlacement& placement,
                                 Dedupe dedupe = Dedupe::kByBranch) {
  for (BusId b : placement.buses) net.bus_index(b);
  detail::check_channel_limit(net, placement);
  auto hosts = [&](BusId b) {
    return std::binary_search(placement.buses.begin(), placement.buses.end(), b);
  };
  std::size_t metered = 0;
  for (const Branch& br : net.branches()) {
    const int ends = int(hosts(br.from_bus)) + int(hosts(br.to_bus));
    metered += dedupe == Dedupe::kPerEnd ? ends : (ends > 0 ? 1 : 0);
  }
  return 2 * placement.buses.size() + 2 * metered;
}

struct ObservabilityResult {
  bool observable = false;
  BusSet unobserved;
};

// A bus is observed when it hosts a PMU or neighbors a PMU bus.
inline ObservabilityResult observability_check(const NetworkCase& net,
                                               const BusSet& placement) {
  std::vector<bool> seen(net.bus_count(), false);
  for (BusId b : placement) {
    seen[net.bus_index(b)] = true;
    for (BusId n : net.neighbors(b)) seen[net.bus_index(n)] = true;
  }
  ObservabilityResult result;
  for (BusId b : net.omega()) {
    if (!seen[net.bus_index(b)]) result.unobserved.push_back(b);
  }
  result.observable = result.unobserved.empty();
  return result;
}

// Greedy dominating-set heuristic: repeatedly take the bus whose closed
// neighbourhood covers the most still-unobserved buses, lowest id on ties.
// Buses with more incident branches than `channel_limit` are not eligible.
// Not guaranteed to be of minimum size.
inline PmuPlacement greedy_observable_cover(
    const NetworkCase& net, int channel_limit = kDefaultChannelLimit) {
  std::vector<bool> covered(net.bus_count(), false);
  std::size_t remaining = net.bus_count();
  BusSet chosen;
  std::vector<BusSet> closed(net.bus_count());
  for (BusId b : net.omega()) {
    BusSet nb = net.neighbors(b);
    nb.push_back(b);
    closed[net.bus_index(b)] = make_bus_set(std::move(nb));
  }
  while (remaining > 0) {
    BusId best = 0;
    std::size_t best_gain = 0;
    for (BusId b : net.omega()) {
      if (static_cast<int>(net.incident_branches(b).size()) > channel_limit) {
        continue;
      }
      std::size_t gain = 0;
      for (BusId n : closed[net.bus_index(b)]) {
        gain += covered[net.bus_index(n)] ? 0 : 1;
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = b;
      }
    }
    if (best_gain == 0) {
      throw UsageError(
          "no PMU within the channel limit can observe the remaining buses");
    }
    chosen.push_back(best);
    for (BusId n : closed[net.bus_index(best)]) {
      if (!covered[net.bus_index(n)]) {
        covered[net.bus_index(n)] = true;
        --remaining;
      }
    }
  }
  return {make_bus_set(std::move(chosen)), channel_limit};
}

}  // namespace pmuplan
