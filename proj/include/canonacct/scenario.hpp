// Copyright 2026 The canonacct Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "canonacct/aggregation.hpp"
#include "canonacct/core_model.hpp"

namespace canonacct {

// xorshift64* (Vigna 2014) seeded through one splitmix64 step:
//
//   seed:  z = seed + 0x9E3779B97F4A7C15
//          z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//          z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//          state = z ^ (z >> 31)            (0 is replaced by 0x9E3779B97F4A7C15)
//   next:  x ^= x >> 12; x ^= x << 25; x ^= x >> 27
//          return x * 0x2545F4914F6CDD1D
//
// Bounded draws reject values >= 2^64 - (2^64 mod n) and return value mod n,
// so every implementation of this recurrence yields the same stream.
class Xorshift64Star {
 public:
  explicit Xorshift64Star(std::uint64_t seed);

  std::uint64_t next();
  // Uniform in [0, bound), bound >= 1.
  std::uint64_t below(std::uint64_t bound);
  // Uniform in [lo, hi], lo <= hi.
  std::int64_t uniform(std::int64_t lo, std::int64_t hi);

 private:
  std::uint64_t state_;
};

enum class ScenarioKind { Figure2, ComplementaryMix, Fragmented, Random };

// Throws Error(UnknownScenario).
ScenarioKind parse_scenario_kind(std::string_view name);
std::string_view to_string(ScenarioKind kind);

// Limits for the "random" scenario. Memory is drawn in 256 MB steps.
struct RandomCaps {
  Quantity node_cores = 32;
  Quantity node_memory_mb = 65536;
  Quantity job_max_cores = 8;
  Quantity job_max_memory_mb = 16384;
  int max_jobs_per_node = 12;
  int pending_jobs = 8;
};

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::Figure2;
  std::uint32_t node_count = 4;
  std::uint64_t seed = 0;
  std::uint32_t duration_hours = 1;
  RandomCaps caps;

  // Throws Error(ValidationError) for zero nodes or hours.
  void validate() const;
};

struct Scenario {
  std::vector<NodeSnapshot> snapshots;  // sorted by (node, timestamp)
  std::optional<std::vector<PendingJob>> queue;
  TimeWindow window;
};

// All scenarios start at 2024-01-01T00:00:00Z and emit one snapshot per node
// per hour, all in partition "cpu" (thresholds: 1 core + 2048 MB).
//
//   figure2            nodes cycle through the four 8-core/16384 MB cases with
//                      free {0,6144}, {3,1024}, {3,4096}, {3,7168}; queue holds
//                      one 2-core/4096 MB job.
//   complementary_mix  even nodes have all memory taken by few-thread jobs, odd
//                      nodes all cores taken by small-memory jobs; no queue.
//   fragmented         every node keeps 2..6 free cores with >= 2048 MB free
//                      per free core; queue always has a 1-core/2048 MB job.
//   random             uniform requests under `caps` until one does not fit.
Scenario generate(const ScenarioSpec& spec);

Instant scenario_epoch();

}  // namespace canonacct
