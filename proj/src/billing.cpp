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

#include "canonacct/billing.hpp"

#include <set>

#include "canonacct/error.hpp"

namespace canonacct {

const CanonicalUnitThresholds& thresholds_for(const PartitionTable& table,
                                              std::string_view partition) {
  auto it = table.find(partition);
  if (it == table.end())
    throw Error(ErrorKind::UnknownPartition,
                "no canonical unit thresholds configured for partition '" +
                    std::string(partition) + "'");
  return it->second;
}

NodeBillingStatement bill_node(const NodeSnapshot& snapshot,
                               const CanonicalUnitThresholds& thresholds) {
  if (thresholds.partition != snapshot.partition)
    throw Error(ErrorKind::UnknownPartition,
                "node '" + snapshot.node + "' is in partition '" + snapshot.partition +
                    "' but thresholds are for '" + thresholds.partition + "'");

  const ResourceVector requested = snapshot.allocated();
  const ResourceVector free = snapshot.free();
  const TrueOverhead overhead = compute_true_overhead(free, thresholds);

  NodeBillingStatement st;
  st.node = snapshot.node;
  st.partition = snapshot.partition;
  st.timestamp = snapshot.timestamp;
  st.total = snapshot.total;
  st.overhead_units = overhead.units;
  st.overhead_discount = thresholds.per_unit.scaled(overhead.units);

  std::set<std::string, std::less<>> resources;
  for (const auto& [name, q] : snapshot.total.entries()) resources.insert(name);
  for (const auto& [name, q] : requested.entries()) resources.insert(name);

  for (const auto& name : resources) {
    const Quantity asked = requested.get(name);
    const bool is_threshold = thresholds.per_unit.contains(name);
    const Quantity billable =
        is_threshold ? snapshot.total.get(name) - st.overhead_discount.get(name) : asked;
    st.billable.set(name, billable);
    if (asked > 0)
      st.rates.emplace(name, Rational(billable, asked));
    else if (is_threshold && billable > 0)
      st.provider_loss.set(name, billable);
  }

  st.job_bills.reserve(snapshot.jobs.size());
  for (const auto& job : snapshot.jobs) {
    JobBill bill{job.job_id, job.user, job.requested, {}};
    for (const auto& [name, rate] : st.rates)
      bill.billed.emplace(name, rate * job.requested.get(name));
    st.job_bills.push_back(std::move(bill));
  }
  return st;
}

NodeBillingStatement bill_node(const NodeSnapshot& snapshot, const PartitionTable& table) {
  return bill_node(snapshot, thresholds_for(table, snapshot.partition));
}

void accumulate(RationalVector& into, const RationalVector& add, const Rational& weight) {
  for (const auto& [name, value] : add) {
    auto it = into.find(name);
    if (it == into.end())
      into.emplace(name, value * weight);
    else
      it->second += value * weight;
  }
}

UserTotals aggregate_user_bills(std::span<const NodeBillingStatement> statements) {
  UserTotals totals;
  for (const auto& st : statements)
    for (const auto& bill : st.job_bills) accumulate(totals[bill.user], bill.billed);
  return totals;
}

}  // namespace canonacct
