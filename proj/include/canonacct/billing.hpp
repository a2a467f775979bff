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

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "canonacct/core_model.hpp"
#include "canonacct/rational.hpp"

namespace canonacct {

using RationalVector = std::map<std::string, Rational, std::less<>>;
using PartitionTable = std::map<std::string, CanonicalUnitThresholds, std::less<>>;

// Throws Error(UnknownPartition).
const CanonicalUnitThresholds& thresholds_for(const PartitionTable& table,
                                              std::string_view partition);

struct JobBill {
  std::string job_id;
  std::string user;
  ResourceVector requested;
  RationalVector billed;  // one entry per rated resource

  bool operator==(const JobBill&) const = default;
};

// Billing result for one node at one instant. The node's true overhead is
// discounted before the rest is spread over the jobs in proportion to their
// requests, so every rate is billable / requested >= 1.
struct NodeBillingStatement {
  std::string node;
  std::string partition;
  Instant timestamp;
  ResourceVector total;
  Quantity overhead_units = 0;
  ResourceVector overhead_discount;  // overhead_units * per_unit
  ResourceVector billable;           // total - discount (threshold resources),
                                     // sum of requests (others)
  ResourceVector provider_loss;      // billable with nobody requesting it
  RationalVector rates;              // only resources with a positive request
  std::vector<JobBill> job_bills;

  bool operator==(const NodeBillingStatement&) const = default;
};

// Throws Error(OverAllocated) for an over-allocated snapshot and
// Error(UnknownPartition) when `thresholds` is for another partition.
NodeBillingStatement bill_node(const NodeSnapshot& snapshot,
                               const CanonicalUnitThresholds& thresholds);
NodeBillingStatement bill_node(const NodeSnapshot& snapshot, const PartitionTable& table);

using UserTotals = std::map<std::string, RationalVector, std::less<>>;

// Sum of billed quantities per user and resource.
UserTotals aggregate_user_bills(std::span<const NodeBillingStatement> statements);

void accumulate(RationalVector& into, const RationalVector& add,
                const Rational& weight = Rational(1));

}  // namespace canonacct
