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

#include <doctest.h>

#include <algorithm>
#include <random>

#include "canonacct/aggregation.hpp"
#include "canonacct/error.hpp"
#include "canonacct/scenario.hpp"

using namespace canonacct;
using std::chrono::hours;

namespace {

const Instant T0 = parse_timestamp("2024-01-01T00:00:00Z");
const CanonicalUnitThresholds kCpu = osg_cpu_preset("cpu");

ResourceVector cm(Quantity cpu, Quantity mem) {
  return {{"cpu_cores", cpu}, {"memory_mb", mem}};
}

// 8-core / 16384 MB node with one job leaving `free` unallocated.
NodeSnapshot with_free(const std::string& name, Instant ts, Quantity free_cpu,
                       Quantity free_mem) {
  NodeSnapshot s{ts, name, "cpu", cm(8, 16384), {}};
  if (free_cpu < 8 || free_mem < 16384)
    s.jobs.push_back({name + "-j", "alice", cm(8 - free_cpu, 16384 - free_mem)});
  return s;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("integrate_overhead") {
  SUBCASE("constant step") {
    std::vector<NodeSnapshot> s{with_free("n1", T0, 3, 4096)};
    auto spans = integrate_overhead(s, kCpu, {T0, T0 + hours(3)});
    CHECK(spans == std::vector<OverheadSpan>{{2, hours(3)}});
  }
  SUBCASE("two steps") {
    std::vector<NodeSnapshot> s{with_free("n1", T0, 3, 7168),
                                with_free("n1", T0 + hours(1), 0, 0)};
    auto spans = integrate_overhead(s, kCpu, {T0, T0 + hours(4)});
    CHECK(spans == std::vector<OverheadSpan>{{3, hours(1)}, {0, hours(3)}});
  }
  SUBCASE("snapshot after the window") {
    std::vector<NodeSnapshot> s{with_free("n1", T0 + hours(5), 3, 7168)};
    CHECK(kind_of([&] { integrate_overhead(s, kCpu, {T0, T0 + hours(4)}); }) ==
          ErrorKind::EmptyInput);
  }
  SUBCASE("no snapshots") {
    CHECK(kind_of([&] { integrate_overhead({}, kCpu, {T0, T0 + hours(4)}); }) ==
          ErrorKind::EmptyInput);
  }
  SUBCASE("snapshot before the window contributes only its tail") {
    std::vector<NodeSnapshot> s{with_free("n1", T0 - hours(2), 3, 7168),
                                with_free("n1", T0 + hours(1), 3, 4096)};
    auto spans = integrate_overhead(s, kCpu, {T0, T0 + hours(2)});
    CHECK(spans == std::vector<OverheadSpan>{{3, hours(1)}, {2, hours(1)}});
  }
  SUBCASE("time before the first snapshot is not covered") {
    std::vector<NodeSnapshot> s{with_free("n1", T0 + hours(1), 3, 4096)};
    auto spans = integrate_overhead(s, kCpu, {T0, T0 + hours(3)});
    CHECK(spans == std::vector<OverheadSpan>{{2, hours(2)}});
  }
  SUBCASE("unsorted input") {
    std::vector<NodeSnapshot> s{with_free("n1", T0 + hours(1), 3, 4096),
                                with_free("n1", T0, 3, 4096)};
    CHECK(kind_of([&] { integrate_overhead(s, kCpu, {T0, T0 + hours(3)}); }) ==
          ErrorKind::UnsortedInput);
    s[0].timestamp = T0;
    CHECK(kind_of([&] { integrate_overhead(s, kCpu, {T0, T0 + hours(3)}); }) ==
          ErrorKind::UnsortedInput);
  }
  SUBCASE("inverted window") {
    std::vector<NodeSnapshot> s{with_free("n1", T0, 3, 4096)};
    CHECK_THROWS_AS(integrate_overhead(s, kCpu, {T0, T0}), Error);
  }
}

TEST_CASE("build_histogram") {
  const TimeWindow w{T0, T0 + hours(1)};
  SUBCASE("additivity") {
    std::vector<NodeIntegration> in{{"a", "cpu", {{2, hours(1)}}}, {"b", "cpu", {{2, hours(1)}}}};
    auto h = build_histogram(in, "cpu", w);
    CHECK(h.bins == std::map<Quantity, Rational>{{2, Rational(2)}});
  }
  SUBCASE("four worked cases") {
    std::vector<NodeIntegration> in;
    const Quantity units[] = {0, 0, 2, 3};
    for (int i = 0; i < 4; ++i)
      in.push_back({"n" + std::to_string(i), "cpu", {{units[i], hours(1)}}});
    auto h = build_histogram(in, "cpu", w);
    CHECK(h.bins ==
          std::map<Quantity, Rational>{{0, Rational(2)}, {2, Rational(1)}, {3, Rational(1)}});
    CHECK(h.cu_hours() == 5);
    CHECK(h.node_hours() == 4);
  }
  SUBCASE("empty") { CHECK(build_histogram({}, "cpu", w).bins.empty()); }
  SUBCASE("mixed partitions") {
    std::vector<NodeIntegration> in{{"a", "cpu", {{2, hours(1)}}}, {"g", "gpu", {{1, hours(1)}}}};
    CHECK(kind_of([&] { build_histogram(in, "cpu", w); }) == ErrorKind::MixedPartitions);
  }
}

TEST_CASE("correlate_queue") {
  SUBCASE("three free units match a two-unit job") {
    std::vector<NodeSnapshot> nodes{with_free("n1", T0, 3, 7168)};
    std::vector<PendingJob> q{{"q1", "bob", "cpu", cm(2, 4096)}};
    auto flags = correlate_queue(nodes, q, kCpu);
    REQUIRE(flags.size() == 1);
    CHECK(flags[0].node == "n1");
    CHECK(flags[0].overhead_units == 3);
    CHECK(flags[0].matching_jobs == std::vector<std::string>{"q1"});
  }
  SUBCASE("zero overhead never flags") {
    std::vector<NodeSnapshot> nodes{with_free("n1", T0, 3, 1024), with_free("n2", T0, 0, 9000)};
    std::vector<PendingJob> q{{"q1", "bob", "cpu", ResourceVector{{"cpu_cores", 1}}}};
    CHECK(correlate_queue(nodes, q, kCpu).empty());
  }
  SUBCASE("raw fit fails on a non-threshold resource") {
    NodeSnapshot n = with_free("n1", T0, 3, 4096);
    n.total.set("scratch_gb", 100);
    n.jobs[0].requested.set("scratch_gb", 100);
    ResourceVector req = cm(2, 4096);
    req.set("scratch_gb", 500);
    std::vector<NodeSnapshot> nodes{n};
    std::vector<PendingJob> q{{"q1", "bob", "cpu", req}};
    CHECK(correlate_queue(nodes, q, kCpu).empty());
  }
  SUBCASE("CU size above the overhead does not match") {
    std::vector<NodeSnapshot> nodes{with_free("n1", T0, 3, 4096)};
    std::vector<PendingJob> q{{"q1", "bob", "cpu", cm(3, 2048)}};
    CHECK(correlate_queue(nodes, q, kCpu).empty());
  }
  SUBCASE("pending jobs of other partitions are ignored") {
    std::vector<NodeSnapshot> nodes{with_free("n1", T0, 3, 7168)};
    std::vector<PendingJob> q{{"q1", "bob", "gpu", cm(1, 2048)}};
    CHECK(correlate_queue(nodes, q, kCpu).empty());
  }
  SUBCASE("snapshot from another partition") {
    NodeSnapshot n = with_free("n1", T0, 3, 7168);
    n.partition = "gpu";
    std::vector<NodeSnapshot> nodes{n};
    CHECK(kind_of([&] { correlate_queue(nodes, {}, kCpu); }) == ErrorKind::MixedPartitions);
  }
}

TEST_CASE("traditional_utilization") {
  SUBCASE("fully allocated") {
    std::vector<NodeSnapshot> s{with_free("n1", T0, 0, 0)};
    auto u = traditional_utilization(s);
    CHECK(u.at("cpu_cores") == 1);
    CHECK(u.at("memory_mb") == 1);
  }
  SUBCASE("two-node mix") {
    std::vector<NodeSnapshot> s{
        {T0, "a", "cpu", cm(10, 20), {{"j1", "u", cm(10, 14)}}},
        {T0, "b", "cpu", cm(10, 20), {{"j2", "u", cm(5, 20)}}},
    };
    auto u = traditional_utilization(s);
    CHECK(u.at("cpu_cores") == Rational(15, 20));
    CHECK(u.at("memory_mb") == Rational(34, 40));
  }
  SUBCASE("zero-total resource omitted") {
    NodeSnapshot n = with_free("n1", T0, 3, 4096);
    n.total.set("gpu_chips", 0);
    std::vector<NodeSnapshot> s{n};
    auto u = traditional_utilization(s);
    CHECK(u.count("gpu_chips") == 0);
    CHECK(u.at("cpu_cores") == Rational(5, 8));
  }
  SUBCASE("empty") {
    CHECK(kind_of([&] { traditional_utilization(std::span<const NodeSnapshot>{}); }) ==
          ErrorKind::EmptyInput);
  }
}

TEST_CASE("whole_node_comparison") {
  SUBCASE("fully allocated node matches bill_node") {
    NodeSnapshot n{T0, "n1", "cpu", cm(10, 20480),
                   {{"A", "alice", cm(6, 8192)}, {"B", "bob", cm(4, 12288)}}};
    std::vector<NodeBillingStatement> st{bill_node(n, kCpu)};
    auto whole = whole_node_comparison(std::span<const NodeBillingStatement>(st));
    CHECK(whole.per_key == aggregate_user_bills(st));
    CHECK(whole.provider_loss.empty());
  }
  SUBCASE("rightmost case charges the whole node") {
    NodeSnapshot n = with_free("n1", T0, 3, 7168);
    std::vector<NodeBillingStatement> st{bill_node(n, kCpu)};
    auto whole = whole_node_comparison(std::span<const NodeBillingStatement>(st));
    CHECK(whole.per_key.at("alice").at("cpu_cores") == 8);
    CHECK(whole.per_key.at("alice").at("memory_mb") == 16384);
  }
  SUBCASE("empty node is all provider loss") {
    std::vector<NodeBillingStatement> st{bill_node(with_free("n1", T0, 8, 16384), kCpu)};
    auto whole = whole_node_comparison(std::span<const NodeBillingStatement>(st));
    CHECK(whole.per_key.empty());
    CHECK(whole.provider_loss.at("cpu_cores") == 8);
    CHECK(whole.provider_loss.at("memory_mb") == 16384);
  }
}

TEST_CASE("equal traditional utilization, different true overhead") {
  // X: cores full, 30% memory free. Y: memory full, half the cores free.
  // P: full. Q: the same free cores and memory as X and Y combined.
  std::vector<NodeSnapshot> a{
      {T0, "x", "cpu", cm(10, 20480), {{"j1", "u", cm(10, 14336)}}},
      {T0, "y", "cpu", cm(10, 20480), {{"j2", "u", cm(5, 20480)}}},
  };
  std::vector<NodeSnapshot> b{
      {T0, "p", "cpu", cm(10, 20480), {{"j1", "u", cm(10, 20480)}}},
      {T0, "q", "cpu", cm(10, 20480), {{"j2", "u", cm(5, 14336)}}},
  };
  CHECK(traditional_utilization(a) == traditional_utilization(b));
  auto total_units = [](const std::vector<NodeSnapshot>& c) {
    Quantity sum = 0;
    for (const auto& s : c) sum += compute_true_overhead(s.free(), kCpu).units;
    return sum;
  };
  CHECK(total_units(a) == 0);
  CHECK(total_units(b) == 3);
}

TEST_CASE("report over the four worked cases") {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::Figure2;
  const Scenario sc = generate(spec);
  PartitionTable table{{"cpu", kCpu}};
  const auto report = build_report(sc.snapshots, table, sc.window, sc.queue);
  REQUIRE(report.histograms.size() == 1);
  CHECK(report.histograms[0].bins ==
        std::map<Quantity, Rational>{{0, Rational(2)}, {2, Rational(1)}, {3, Rational(1)}});
  CHECK(report.cu_hours_total == 5);
  REQUIRE(report.waste_flags.has_value());
  REQUIRE(report.waste_flags->size() == 2);
  CHECK((*report.waste_flags)[0].overhead_units == 2);
  CHECK((*report.waste_flags)[1].overhead_units == 3);

  const auto no_queue = build_report(sc.snapshots, table, sc.window, std::nullopt);
  CHECK_FALSE(no_queue.waste_flags.has_value());

  CHECK(kind_of([&] {
          build_report(sc.snapshots, table, {T0 - hours(5), T0 - hours(1)}, std::nullopt);
        }) == ErrorKind::EmptyInput);
  PartitionTable wrong{{"gpu", osg_gpu_preset("gpu")}};
  CHECK(kind_of([&] { build_report(sc.snapshots, wrong, sc.window, std::nullopt); }) ==
        ErrorKind::UnknownPartition);
}

TEST_CASE("aggregation properties on random traces") {
  PartitionTable table{{"cpu", kCpu}};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ScenarioSpec spec;
    spec.kind = ScenarioKind::Random;
    spec.seed = seed;
    spec.node_count = 6;
    spec.duration_hours = 3;
    const Scenario sc = generate(spec);
    const TimeWindow w{sc.window.from + std::chrono::minutes(30), sc.window.to};
    const auto report = build_report(sc.snapshots, table, w, std::nullopt);

    // Mass conservation: every node is covered for the whole window.
    Rational expected_mass = to_hours(w.length()) * spec.node_count;
    CHECK(report.histograms.at(0).node_hours() == expected_mass);

    // Ordering independence.
    std::vector<NodeSnapshot> shuffled = sc.snapshots;
    std::mt19937_64 gen(seed);
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    const auto again = build_report(shuffled, table, w, std::nullopt);
    CHECK(again.histograms.at(0).bins == report.histograms.at(0).bins);
    CHECK(again.traditional_utilization == report.traditional_utilization);
    CHECK(again.per_user == report.per_user);

    for (const auto& [resource, fraction] : report.traditional_utilization) {
      CHECK(fraction >= 0);
      CHECK(fraction <= 1);
    }
  }
}
