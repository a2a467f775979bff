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

#include <random>
#include <sstream>

#include "canonacct/error.hpp"
#include "canonacct/ingest.hpp"
#include "canonacct/scenario.hpp"

using namespace canonacct;

namespace {

Config config_from(const std::string& text) {
  std::istringstream in(text);
  return load_config(in);
}

Error error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  FAIL("no error thrown");
  return Error(ErrorKind::IoError, "unreachable");
}

std::vector<NodeSnapshot> snapshots_from(const std::string& text) {
  std::istringstream in(text);
  return parse_snapshots(in);
}

std::vector<PendingJob> queue_from(const std::string& text) {
  std::istringstream in(text);
  return parse_queue(in);
}

const std::string kRightmost =
    R"({"ts":"2024-01-01T00:00:00Z","node":"n1","partition":"cpu","total":{"cpu_cores":8,"memory_mb":16384},"jobs":[{"id":"j1","user":"alice","request":{"cpu_cores":5,"memory_mb":9216}}]})";

}  // namespace

TEST_CASE("load_config presets") {
  auto c = config_from(R"({"partitions":[{"name":"cpu","preset":"osg_cpu"}]})");
  CHECK(c.partitions.at("cpu").per_unit ==
        ResourceVector{{"cpu_cores", 1}, {"memory_mb", 2048}});
  c = config_from(R"({"partitions":[{"name":"gpu","preset":"osg_gpu"}]})");
  CHECK(c.partitions.at("gpu").per_unit == ResourceVector{{"gpu_chips", 1}});
}

TEST_CASE("load_config explicit thresholds and memory_gb") {
  auto c = config_from(
      R"({"partitions":[{"name":"big","per_unit":{"cpu_cores":4,"memory_gb":16}}]})");
  CHECK(c.partitions.at("big").per_unit ==
        ResourceVector{{"cpu_cores", 4}, {"memory_mb", 16384}});
}

TEST_CASE("load_config defaults flag") {
  auto c = config_from(R"({"defaults":true})");
  CHECK(c.partitions.size() == 2);
  CHECK(c.partitions.at("cpu") == osg_cpu_preset("cpu"));
  c = config_from(
      R"({"defaults":true,"partitions":[{"name":"cpu","per_unit":{"cpu_cores":2}}]})");
  CHECK(c.partitions.at("cpu").per_unit == ResourceVector{{"cpu_cores", 2}});
  CHECK(c.partitions.count("gpu") == 1);
}

TEST_CASE("load_config errors") {
  auto kind = [](const std::string& text) {
    return error_of([&] { config_from(text); }).kind();
  };
  CHECK(kind(R"({"partitions":[{"name":"x","per_unit":{"cpu_cores":0}}]})") ==
        ErrorKind::ValidationError);
  CHECK(kind(R"({"partitions":[{"name":"x","per_unit":{"cpu_cores":-2}}]})") ==
        ErrorKind::ValidationError);
  CHECK(kind(R"({"partitions":[{"name":"x","per_unit":{}}]})") == ErrorKind::ValidationError);
  CHECK(kind(R"({"partitions":[{"name":"x","preset":"osg_cpu"},{"name":"x","preset":"osg_gpu"}]})") ==
        ErrorKind::ValidationError);
  CHECK(kind(R"({"partitions":[]})") == ErrorKind::ValidationError);
  CHECK(kind(R"({"partitions":[{"name":"x","preset":"osg_cpu"}],"extra":1})") ==
        ErrorKind::SchemaError);
  CHECK(kind(R"({"partitions":[{"name":"x","preset":"osg_cpu","per_unit":{"cpu_cores":1}}]})") ==
        ErrorKind::SchemaError);
  CHECK(kind(R"({"partitions":[{"name":"x"}]})") == ErrorKind::SchemaError);
  CHECK(kind(R"({"partitions":[{"name":"x","preset":"nope"}]})") == ErrorKind::SchemaError);
  CHECK(kind(R"({"partitions":[{"name":"x","per_unit":{"cpu_cores":1.5}}]})") ==
        ErrorKind::SchemaError);
  CHECK(kind(R"({"partitions":[{"name":"x","per_unit":{"memory_gb":1,"memory_mb":1}}]})") ==
        ErrorKind::SchemaError);
  CHECK(kind(R"({"partitions":"cpu"})") == ErrorKind::SchemaError);
  CHECK(kind("{\n\"partitions\": [\n") == ErrorKind::ParseError);

  const Error e = error_of([] { config_from("{\n  \"partitions\": [\n    {,}\n  ]\n}"); });
  REQUIRE(e.line().has_value());
  CHECK(*e.line() == 3);
  const Error typo = error_of(
      [] { config_from(R"({"partitions":[{"name":"x","per_unit":{"Memory":1}}]})"); });
  CHECK(typo.path() == "partitions[0].per_unit.Memory");
}

TEST_CASE("parse_snapshots") {
  SUBCASE("single line") {
    auto s = snapshots_from(kRightmost + "\n");
    REQUIRE(s.size() == 1);
    CHECK(s[0].free() == ResourceVector{{"cpu_cores", 3}, {"memory_mb", 7168}});
    CHECK(s[0].jobs[0].user == "alice");
    CHECK(format_timestamp(s[0].timestamp) == "2024-01-01T00:00:00Z");
  }
  SUBCASE("empty input") {
    CHECK(snapshots_from("").empty());
    CHECK(snapshots_from("\n   \n").empty());
  }
  SUBCASE("sorted by node then time") {
    auto line = [](const char* node, const char* ts) {
      return std::string(R"({"ts":")") + ts + R"(","node":")" + node +
             R"(","partition":"cpu","total":{"cpu_cores":1},"jobs":[]})" + "\n";
    };
    auto s = snapshots_from(line("b", "2024-01-01T01:00:00Z") + line("a", "2024-01-01T02:00:00Z") +
                            line("b", "2024-01-01T00:00:00Z") + line("a", "2024-01-01T00:00:00Z"));
    REQUIRE(s.size() == 4);
    CHECK(s[0].node == "a");
    CHECK(s[1].node == "a");
    CHECK(s[0].timestamp < s[1].timestamp);
    CHECK(s[2].node == "b");
    CHECK(s[2].timestamp < s[3].timestamp);

    const Error dup = error_of([&] {
      snapshots_from(line("a", "2024-01-01T00:00:00Z") + line("a", "2024-01-01T00:00:00+00:00"));
    });
    CHECK(dup.kind() == ErrorKind::ValidationError);
    CHECK(*dup.line() == 2);
  }
  SUBCASE("over-allocation names the resource") {
    const std::string over =
        R"({"ts":"2024-01-01T00:00:00Z","node":"n1","partition":"cpu","total":{"cpu_cores":8,"memory_mb":16384},"jobs":[{"id":"j1","user":"a","request":{"cpu_cores":5,"memory_mb":9216}},{"id":"j2","user":"b","request":{"cpu_cores":1,"memory_mb":8192}}]})";
    const Error e = error_of([&] { snapshots_from(kRightmost + "\n" + over + "\n"); });
    CHECK(e.kind() == ErrorKind::OverAllocated);
    CHECK(e.exit_code() == 1);
    CHECK(*e.line() == 2);
    CHECK(e.path() == "total.memory_mb");
    CHECK(std::string(e.what()).find("memory_mb") != std::string::npos);
  }
  SUBCASE("malformed lines carry line numbers and paths") {
    auto err = [](const std::string& text) { return error_of([&] { snapshots_from(text); }); };
    Error e = err(kRightmost + "\n{not json\n");
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(e.exit_code() == 2);
    CHECK(*e.line() == 2);

    e = err(R"({"ts":"2024-01-01T00:00:00","node":"n","partition":"cpu","total":{},"jobs":[]})");
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(e.path() == "ts");

    e = err(R"({"ts":"2024-01-01T00:00:00Z","node":"n","partition":"cpu","total":{"cpu_cores":-1},"jobs":[]})");
    CHECK(e.path() == "total.cpu_cores");
    CHECK(*e.line() == 1);

    e = err(R"({"ts":"2024-01-01T00:00:00Z","node":"n","partition":"cpu","total":{},"jobs":[],"memory_gb":4})");
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(e.path() == "memory_gb");

    e = err(R"({"ts":"2024-01-01T00:00:00Z","node":"n","partition":"cpu","total":{"cpu_cores":2},"jobs":[{"id":"j","user":"u","request":{"cpu_cores":"1"}}]})");
    CHECK(e.path() == "jobs[0].request.cpu_cores");

    e = err(R"({"ts":"2024-01-01T00:00:00Z","node":"n","partition":"cpu","total":{"cpu_cores":2},"jobs":[{"id":"j","user":"u","request":{"cpu_cores":1}},{"id":"j","user":"u","request":{"cpu_cores":1}}]})");
    CHECK(e.kind() == ErrorKind::ValidationError);
    CHECK(e.path() == "jobs[1].id");

    e = err(R"({"ts":"2024-01-01T00:00:00Z","node":"n","partition":"cpu","total":{"cpu_cores":2}})");
    CHECK(e.path() == "jobs");
  }
}

TEST_CASE("parse_queue") {
  auto q = queue_from(
      R"({"id":"q1","user":"bob","partition":"cpu","request":{"cpu_cores":2,"memory_mb":4096}})");
  REQUIRE(q.size() == 1);
  CHECK(job_cu_size(q[0].requested, osg_cpu_preset("cpu")) == 2);
  CHECK(queue_from("").empty());

  const Error e = error_of([] {
    queue_from("\n" R"({"id":"q1","user":"bob","partition":"cpu","request":{"cpu_cores":-2}})");
  });
  CHECK(e.kind() == ErrorKind::ParseError);
  CHECK(*e.line() == 2);
  CHECK(e.path() == "request.cpu_cores");
}

TEST_CASE("check_partitions") {
  auto s = snapshots_from(kRightmost);
  CHECK_NOTHROW(check_partitions(s, config_from(R"({"defaults":true})")));
  const Error e = error_of([&] {
    check_partitions(s, config_from(R"({"partitions":[{"name":"gpu","preset":"osg_gpu"}]})"));
  });
  CHECK(e.kind() == ErrorKind::UnknownPartition);
}

TEST_CASE("snapshot and queue serialization round-trips") {
  for (auto kind : {ScenarioKind::Figure2, ScenarioKind::Fragmented, ScenarioKind::Random}) {
    ScenarioSpec spec;
    spec.kind = kind;
    spec.seed = 99;
    spec.node_count = 5;
    spec.duration_hours = 2;
    const Scenario sc = generate(spec);
    std::ostringstream out;
    write_snapshots(out, sc.snapshots);
    CHECK(snapshots_from(out.str()) == sc.snapshots);

    std::ostringstream q;
    write_queue(q, *sc.queue);
    CHECK(queue_from(q.str()) == *sc.queue);
  }
}

TEST_CASE("statement serialization is exact") {
  std::mt19937_64 gen(3);
  auto draw = [&](Quantity lo, Quantity hi) {
    return std::uniform_int_distribution<Quantity>(lo, hi)(gen);
  };
  const auto thresholds = osg_cpu_preset("cpu");
  for (int iter = 0; iter < 300; ++iter) {
    NodeSnapshot s{parse_timestamp("2024-03-01T12:00:00Z"), "n", "cpu",
                   {{"cpu_cores", draw(1, 64)}, {"memory_mb", draw(1, 100000)}}, {}};
    ResourceVector used;
    for (int k = 0; k < 4; ++k) {
      ResourceVector req{{"cpu_cores", draw(0, 9)}, {"memory_mb", draw(1, 30000)}};
      if (!(used + req).fits_within(s.total)) continue;
      used += req;
      s.jobs.push_back({"j" + std::to_string(k), "u", req});
    }
    const auto st = bill_node(s, thresholds);
    const Json j = Json::parse(statement_to_json(st).dump());
    CHECK(statement_from_json(j) == st);
  }
}

TEST_CASE("rational fields carry decimal and exact forms") {
  Json j;
  put_rational(j, "rate", Rational(10, 7));
  CHECK(j["rate"] == "1.429");
  CHECK(j["rate_exact"] == "10/7");
}
