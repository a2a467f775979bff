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

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "canonacct/aggregation.hpp"
#include "canonacct/billing.hpp"
#include "canonacct/core_model.hpp"

namespace canonacct {

using Json = nlohmann::json;

struct Config {
  PartitionTable partitions;
  bool defaults = false;
};

// Config document:
//   {"defaults": bool?,
//    "partitions": [{"name": str, "preset": "osg_cpu"|"osg_gpu"}
//                 | {"name": str, "per_unit": {resource: int}}]}
// "memory_gb" inside per_unit is converted to memory_mb (x1024). With
// "defaults": true the two presets are added as partitions "cpu" and "gpu"
// unless those names are already taken.
Config load_config(std::istream& in);
Config load_config(const std::filesystem::path& path);

// JSON Lines, one snapshot per line; blank lines are skipped. The result is
// sorted by (node, timestamp).
std::vector<NodeSnapshot> parse_snapshots(std::istream& in);
// JSON Lines of {"id","user","partition","request"}.
std::vector<PendingJob> parse_queue(std::istream& in);

// Throws Error(UnknownPartition) for a snapshot whose partition is not
// configured.
void check_partitions(std::span<const NodeSnapshot> snapshots, const Config& config);

Json to_json(const ResourceVector& v);
Json snapshot_to_json(const NodeSnapshot& s);
Json pending_to_json(const PendingJob& job);
void write_snapshots(std::ostream& out, std::span<const NodeSnapshot> snapshots);
void write_queue(std::ostream& out, std::span<const PendingJob> pending);

// A rational at key K is written as K (4 significant digits) and K_exact
// ("num/den"); readers use K_exact only.
void put_rational(Json& object, const std::string& key, const Rational& value);
void put_rational_map(Json& object, const std::string& key, const RationalVector& values);
void put_user_totals(Json& object, const std::string& key, const UserTotals& totals);

Json statement_to_json(const NodeBillingStatement& st);
// Throws Error(SchemaError) on a malformed statement document.
NodeBillingStatement statement_from_json(const Json& j);

Json report_to_json(const UtilizationReport& report);
// Columns partition,cu_count,node_hours with a header row.
void write_histogram_csv(std::ostream& out, std::span<const OverheadHistogram> histograms);

}  // namespace canonacct
