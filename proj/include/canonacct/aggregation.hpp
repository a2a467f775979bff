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

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "canonacct/billing.hpp"
#include "canonacct/core_model.hpp"
#include "canonacct/rational.hpp"
#include "canonacct/timestamp.hpp"

namespace canonacct {

struct TimeWindow {
  Instant from;
  Instant to;

  // Throws Error(ValidationError) unless from < to.
  void validate() const;
  Seconds length() const { return to - from; }
};

// Portion of a window during which snapshot `index` is the current state.
struct StepInterval {
  std::size_t index;
  Instant begin;
  Instant end;

  Seconds duration() const { return end - begin; }
};

// Left-constant step function over one node's snapshots: snapshot i holds on
// [t_i, t_{i+1}), the last one until window.to, all clipped to the window.
// Time before the first snapshot is not covered. Throws Error(UnsortedInput)
// unless timestamps strictly increase; returns an empty list when nothing
// overlaps the window.
std::vector<StepInterval> step_intervals(std::span<const NodeSnapshot> snapshots,
                                         const TimeWindow& window);

struct OverheadSpan {
  Quantity units;
  Seconds duration;

  bool operator==(const OverheadSpan&) const = default;
};

// Throws Error(EmptyInput) for no snapshots or no coverage of the window.
std::vector<OverheadSpan> integrate_overhead(std::span<const NodeSnapshot> snapshots,
                                             const CanonicalUnitThresholds& thresholds,
                                             const TimeWindow& window);

struct NodeIntegration {
  std::string node;
  std::string partition;
  std::vector<OverheadSpan> spans;
};

// Time-weighted distribution of exact CU counts for one partition.
struct OverheadHistogram {
  std::string partition;
  std::map<Quantity, Rational> bins;  // CU count -> node-hours
  TimeWindow window;

  Rational node_hours() const;
  Rational cu_hours() const;
};

// Throws Error(MixedPartitions) if any input belongs to another partition.
OverheadHistogram build_histogram(std::span<const NodeIntegration> integrations,
                                  const std::string& partition, const TimeWindow& window);

struct PendingJob {
  std::string job_id;
  std::string user;
  std::string partition;
  ResourceVector requested;

  bool operator==(const PendingJob&) const = default;
};

struct WasteFlag {
  std::string node;
  Instant timestamp;
  Quantity overhead_units = 0;
  std::vector<std::string> matching_jobs;

  bool operator==(const WasteFlag&) const = default;
};

// A node holding >= 1 CU of true overhead is flagged with every pending job
// of its partition whose CU size is <= that overhead and whose raw request
// fits the node's free vector on every resource. Nodes without a match are
// not flagged. Throws Error(MixedPartitions) if a snapshot is not in
// thresholds.partition.
std::vector<WasteFlag> correlate_queue(std::span<const NodeSnapshot> snapshots,
                                       std::span<const PendingJob> pending,
                                       const CanonicalUnitThresholds& thresholds);

struct WeightedSnapshot {
  std::reference_wrapper<const NodeSnapshot> snapshot;
  Rational weight;
};

// Allocated fraction per resource: sum of requests over sum of totals.
// Resources with zero total are omitted. Throws Error(EmptyInput).
RationalVector traditional_utilization(std::span<const NodeSnapshot> snapshots);
RationalVector traditional_utilization(std::span<const WeightedSnapshot> snapshots);

struct TimedStatement {
  NodeBillingStatement statement;
  Rational hours;
};

struct BillingTotals {
  UserTotals per_key;
  RationalVector provider_loss;
};

// Comparison policy: each node's full total is split over its jobs in
// proportion to their requests. Resources nobody requested are provider loss.
BillingTotals whole_node_comparison(std::span<const NodeBillingStatement> statements);
BillingTotals whole_node_comparison(std::span<const TimedStatement> statements);

enum class BillKey { User, Job };

// Sum of bill * hours keyed by user or job id.
UserTotals integrate_bills(std::span<const TimedStatement> statements, BillKey key);

// What the provider absorbs under the overhead-discount scheme, weighted by
// hours: overhead discount plus unrequested billable resources.
RationalVector integrate_provider_share(std::span<const TimedStatement> statements);

// Groups snapshots by node (ordering by timestamp within each node).
std::map<std::string, std::vector<NodeSnapshot>> group_by_node(
    std::span<const NodeSnapshot> snapshots);

// Bills every step interval of every node inside the window. Throws
// Error(EmptyInput) when no node covers any part of the window.
std::vector<TimedStatement> bill_window(std::span<const NodeSnapshot> snapshots,
                                        const PartitionTable& table,
                                        const TimeWindow& window);

struct UtilizationReport {
  TimeWindow window;
  RationalVector traditional_utilization;
  std::vector<OverheadHistogram> histograms;  // one per partition, by name
  Rational cu_hours_total;
  std::optional<std::vector<WasteFlag>> waste_flags;  // absent without a queue
  UserTotals per_user;
  BillingTotals whole_node;
  RationalVector provider_share;
};

// Full report over a window. With a queue, each node's latest snapshot at or
// before window.to is correlated against the pending jobs of its partition.
UtilizationReport build_report(std::span<const NodeSnapshot> snapshots,
                               const PartitionTable& table, const TimeWindow& window,
                               const std::optional<std::vector<PendingJob>>& pending);

}  // namespace canonacct
