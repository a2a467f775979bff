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

#include "canonacct/scenario.hpp"

#include <algorithm>
#include <array>

#include "canonacct/error.hpp"

namespace canonacct {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t seed) {
  std::uint64_t z = seed + kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::array<std::string_view, 4> kUsers = {"alice", "bob", "carol", "dave"};

std::string node_name(std::uint32_t index, std::uint32_t count) {
  std::string digits = std::to_string(index + 1);
  std::size_t width = std::max<std::size_t>(3, std::to_string(count).size());
  return "n" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

std::string pick_user(Xorshift64Star& rng) {
  return std::string(kUsers[rng.below(kUsers.size())]);
}

ResourceVector cpu_mem(Quantity cores, Quantity memory_mb) {
  ResourceVector v;
  v.set(kCpuCores, cores);
  v.set(kMemoryMb, memory_mb);
  return v;
}

// Splits `total` into `parts` positive integers (parts <= total).
std::vector<Quantity> compose(Xorshift64Star& rng, Quantity total, int parts) {
  std::vector<Quantity> out;
  Quantity remaining = total;
  for (int i = 0; i + 1 < parts; ++i) {
    Quantity slots_left = parts - 1 - i;
    Quantity take = rng.uniform(1, remaining - slots_left);
    out.push_back(take);
    remaining -= take;
  }
  out.push_back(remaining);
  return out;
}

std::string job_id(const std::string& node, std::uint32_t hour, int k) {
  return node + ".h" + std::to_string(hour) + ".j" + std::to_string(k);
}

NodeSnapshot figure2_node(const std::string& node, std::uint32_t which, Instant ts) {
  // Allocations leave free {0,6144}, {3,1024}, {3,4096}, {3,7168} on 8/16384.
  static constexpr std::array<std::array<std::array<Quantity, 2>, 2>, 4> kJobs = {{
      {{{6, 6144}, {2, 4096}}},
      {{{3, 10240}, {2, 5120}}},
      {{{4, 8192}, {1, 4096}}},
      {{{5, 9216}, {0, 0}}},
  }};
  NodeSnapshot s{ts, node, "cpu", cpu_mem(8, 16384), {}};
  int k = 0;
  for (const auto& [cores, mem] : kJobs[which]) {
    if (cores == 0) continue;
    ++k;
    s.jobs.push_back({node + ".j" + std::to_string(k), k == 1 ? "alice" : "bob",
                      cpu_mem(cores, mem)});
  }
  return s;
}

NodeSnapshot complementary_node(Xorshift64Star& rng, const std::string& node,
                                std::uint32_t index, std::uint32_t hour, Instant ts) {
  constexpr Quantity kCores = 16, kMemBlocks = 64, kBlock = 1024;
  NodeSnapshot s{ts, node, "cpu", cpu_mem(kCores, kMemBlocks * kBlock), {}};
  const int jobs = static_cast<int>(rng.uniform(1, 4));
  if (index % 2 == 0) {
    // Big-memory, few-thread jobs saturate memory.
    auto blocks = compose(rng, kMemBlocks, jobs);
    for (int k = 0; k < jobs; ++k)
      s.jobs.push_back({job_id(node, hour, k + 1), pick_user(rng),
                        cpu_mem(rng.uniform(1, 2), blocks[k] * kBlock)});
  } else {
    // Many-thread, small-memory jobs saturate cores.
    auto cores = compose(rng, kCores, jobs);
    for (int k = 0; k < jobs; ++k)
      s.jobs.push_back({job_id(node, hour, k + 1), pick_user(rng),
                        cpu_mem(cores[k], rng.uniform(1, 4) * kBlock)});
  }
  return s;
}

NodeSnapshot fragmented_node(Xorshift64Star& rng, const std::string& node,
                             std::uint32_t hour, Instant ts) {
  constexpr Quantity kCores = 16, kMem = 32768, kScratch = 200, kBlock = 512;
  ResourceVector total = cpu_mem(kCores, kMem);
  total.set(kScratchGb, kScratch);
  NodeSnapshot s{ts, node, "cpu", total, {}};

  const Quantity free_cores = rng.uniform(2, 6);
  const Quantity free_mem = free_cores * 2048 + rng.uniform(0, 8) * kBlock;
  const int jobs = static_cast<int>(rng.uniform(1, 3));
  auto cores = compose(rng, kCores - free_cores, jobs);
  auto blocks = compose(rng, (kMem - free_mem) / kBlock, jobs);
  for (int k = 0; k < jobs; ++k) {
    ResourceVector request = cpu_mem(cores[k], blocks[k] * kBlock);
    request.set(kScratchGb, rng.uniform(0, 40));
    s.jobs.push_back({job_id(node, hour, k + 1), pick_user(rng), std::move(request)});
  }
  return s;
}

std::vector<PendingJob> fragmented_queue(Xorshift64Star& rng) {
  auto with_scratch = [](ResourceVector v, Quantity gb) {
    v.set(kScratchGb, gb);
    return v;
  };
  std::vector<PendingJob> q = {
      {"q1", "erin", "cpu", cpu_mem(1, 2048)},
      {"q2", "erin", "cpu", cpu_mem(2, 4096)},
      {"q3", "frank", "cpu", cpu_mem(8, 16384)},
      {"q4", "frank", "cpu", with_scratch(cpu_mem(1, 2048), 500)},
      {"q5", "grace", "cpu", cpu_mem(1, 12288)},
  };
  for (int k = 6; k <= 8; ++k)
    q.push_back({"q" + std::to_string(k), pick_user(rng), "cpu",
                 cpu_mem(rng.uniform(1, 4), rng.uniform(1, 8) * 1024)});
  return q;
}

ResourceVector random_request(Xorshift64Star& rng, const RandomCaps& caps) {
  return cpu_mem(rng.uniform(1, caps.job_max_cores),
                 rng.uniform(1, std::max<Quantity>(1, caps.job_max_memory_mb / 256)) * 256);
}

NodeSnapshot random_node(Xorshift64Star& rng, const RandomCaps& caps,
                         const std::string& node, std::uint32_t hour, Instant ts) {
  NodeSnapshot s{ts, node, "cpu", cpu_mem(caps.node_cores, caps.node_memory_mb), {}};
  ResourceVector used;
  for (int k = 0; k < caps.max_jobs_per_node; ++k) {
    ResourceVector request = random_request(rng, caps);
    if (!(used + request).fits_within(s.total)) break;
    used += request;
    s.jobs.push_back({job_id(node, hour, k + 1), pick_user(rng), std::move(request)});
  }
  return s;
}

}  // namespace

Xorshift64Star::Xorshift64Star(std::uint64_t seed) : state_(splitmix64(seed)) {
  if (state_ == 0) state_ = kGolden;
}

std::uint64_t Xorshift64Star::next() {
  state_ ^= state_ >> 12;
  state_ ^= state_ << 25;
  state_ ^= state_ >> 27;
  return state_ * 0x2545F4914F6CDD1DULL;
}

std::uint64_t Xorshift64Star::below(std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
  std::uint64_t x;
  do {
    x = next();
  } while (x > limit);
  return x % bound;
}

std::int64_t Xorshift64Star::uniform(std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(span == 0 ? next() : below(span));
}

ScenarioKind parse_scenario_kind(std::string_view name) {
  if (name == "figure2") return ScenarioKind::Figure2;
  if (name == "complementary_mix") return ScenarioKind::ComplementaryMix;
  if (name == "fragmented") return ScenarioKind::Fragmented;
  if (name == "random") return ScenarioKind::Random;
  throw Error(ErrorKind::UnknownScenario, "unknown scenario '" + std::string(name) + "'");
}

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Figure2: return "figure2";
    case ScenarioKind::ComplementaryMix: return "complementary_mix";
    case ScenarioKind::Fragmented: return "fragmented";
    case ScenarioKind::Random: return "random";
  }
  return "unknown";
}

void ScenarioSpec::validate() const {
  if (node_count == 0) throw Error(ErrorKind::ValidationError, "node_count must be >= 1");
  if (duration_hours == 0)
    throw Error(ErrorKind::ValidationError, "duration_hours must be >= 1");
}

Instant scenario_epoch() { return parse_timestamp("2024-01-01T00:00:00Z"); }

Scenario generate(const ScenarioSpec& spec) {
  spec.validate();
  Xorshift64Star rng(spec.seed);
  Scenario out;
  const Instant start = scenario_epoch();
  out.window = {start, start + std::chrono::hours(spec.duration_hours)};

  // Hour-major draws; output is re-sorted by node afterwards.
  for (std::uint32_t hour = 0; hour < spec.duration_hours; ++hour) {
    const Instant ts = start + std::chrono::hours(hour);
    for (std::uint32_t i = 0; i < spec.node_count; ++i) {
      const std::string node = node_name(i, spec.node_count);
      switch (spec.kind) {
        case ScenarioKind::Figure2:
          out.snapshots.push_back(figure2_node(node, i % 4, ts));
          break;
        case ScenarioKind::ComplementaryMix:
          out.snapshots.push_back(complementary_node(rng, node, i, hour, ts));
          break;
        case ScenarioKind::Fragmented:
          out.snapshots.push_back(fragmented_node(rng, node, hour, ts));
          break;
        case ScenarioKind::Random:
          out.snapshots.push_back(random_node(rng, spec.caps, node, hour, ts));
          break;
      }
    }
  }

  switch (spec.kind) {
    case ScenarioKind::Figure2:
      out.queue = std::vector<PendingJob>{{"q1", "carol", "cpu", cpu_mem(2, 4096)}};
      break;
    case ScenarioKind::Fragmented:
      out.queue = fragmented_queue(rng);
      break;
    case ScenarioKind::Random: {
      std::vector<PendingJob> q;
      for (int k = 1; k <= spec.caps.pending_jobs; ++k)
        q.push_back({"q" + std::to_string(k), pick_user(rng), "cpu",
                     random_request(rng, spec.caps)});
      out.queue = std::move(q);
      break;
    }
    case ScenarioKind::ComplementaryMix:
      break;
  }

  std::stable_sort(out.snapshots.begin(), out.snapshots.end(), [](const auto& a, const auto& b) {
    return std::tie(a.node, a.timestamp) < std::tie(b.node, b.timestamp);
  });
  return out;
}

}  // namespace canonacct
