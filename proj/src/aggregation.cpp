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

#include "canonacct/aggregation.hpp"

#include <algorithm>
#include <set>

#include "canonacct/error.hpp"

namespace canonacct {

void TimeWindow::validate() const {
  if (!(from < to))
    throw Error(ErrorKind::ValidationError, "window start " + format_timestamp(from) +
                                                " is not before end " + format_timestamp(to));
}

std::vector<StepInterval> step_intervals(std::span<const NodeSnapshot> snapshots,
                                         const TimeWindow& window) {
  window.validate();
  for (std::size_t i = 1; i < snapshots.size(); ++i)
    if (!(snapshots[i - 1].timestamp < snapshots[i].timestamp))
      throw Error(ErrorKind::UnsortedInput,
                  "snapshots of node '" + snapshots[i].node +
                      "' are not strictly increasing at " +
                      format_timestamp(snapshots[i].timestamp));

  std::vector<StepInterval> out;
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    Instant begin = std::max(snapshots[i].timestamp, window.from);
    Instant end = i + 1 < snapshots.size() ? std::min(snapshots[i + 1].timestamp, window.to)
                                           : window.to;
    if (begin < end) out.push_back({i, begin, end});
  }
  return out;
}

std::vector<OverheadSpan> integrate_overhead(std::span<const NodeSnapshot> snapshots,
                                             const CanonicalUnitThresholds& thresholds,
                                             const TimeWindow& window) {
  if (snapshots.empty()) throw Error(ErrorKind::EmptyInput, "no snapshots to integrate");
  auto intervals = step_intervals(snapshots, window);
  if (intervals.empty())
    throw Error(ErrorKind::EmptyInput, "no snapshot of node '" + snapshots.front().node +
                                           "' covers the window");
  std::vector<OverheadSpan> out;
  out.reserve(intervals.size());
  for (const auto& iv : intervals) {
    const auto units =
        compute_true_overhead(snapshots[iv.index].free(), thresholds).units;
    out.push_back({units, iv.duration()});
  }
  return out;
}

Rational OverheadHistogram::node_hours() const {
  Rational sum = 0;
  for (const auto& [cu, hours] : bins) sum += hours;
  return sum;
}

Rational OverheadHistogram::cu_hours() const {
  Rational sum = 0;
  for (const auto& [cu, hours] : bins) sum += hours * cu;
  return sum;
}

OverheadHistogram build_histogram(std::span<const NodeIntegration> integrations,
                                  const std::string& partition, const TimeWindow& window) {
  OverheadHistogram h{partition, {}, window};
  for (const auto& integration : integrations) {
    if (integration.partition != partition)
      throw Error(ErrorKind::MixedPartitions,
                  "node '" + integration.node + "' is in partition '" +
                      integration.partition + "', histogram is for '" + partition + "'");
    for (const auto& span : integration.spans) h.bins[span.units] += to_hours(span.duration);
  }
  return h;
}

std::vector<WasteFlag> correlate_queue(std::span<const NodeSnapshot> snapshots,
                                       std::span<const PendingJob> pending,
                                       const CanonicalUnitThresholds& thresholds) {
  std::vector<WasteFlag> flags;
  for (const auto& snapshot : snapshots) {
    if (snapshot.partition != thresholds.partition)
      throw Error(ErrorKind::MixedPartitions,
                  "node '" + snapshot.node + "' is in partition '" + snapshot.partition +
                      "', thresholds are for '" + thresholds.partition + "'");
    const ResourceVector free = snapshot.free();
    const Quantity units = compute_true_overhead(free, thresholds).units;
    if (units < 1) continue;

    WasteFlag flag{snapshot.node, snapshot.timestamp, units, {}};
    for (const auto& job : pending) {
      if (job.partition != thresholds.partition) continue;
      if (job_cu_size(job.requested, thresholds) <= units && job.requested.fits_within(free))
        flag.matching_jobs.push_back(job.job_id);
    }
    if (!flag.matching_jobs.empty()) flags.push_back(std::move(flag));
  }
  return flags;
}

RationalVector traditional_utilization(std::span<const WeightedSnapshot> snapshots) {
  if (snapshots.empty())
    throw Error(ErrorKind::EmptyInput, "no snapshots for utilization");
  RationalVector allocated, total;
  for (const auto& ws : snapshots) {
    const NodeSnapshot& s = ws.snapshot.get();
    for (const auto& [name, q] : s.total.entries()) total[name] += ws.weight * q;
    const ResourceVector requested = s.allocated();
    for (const auto& [name, q] : requested.entries()) allocated[name] += ws.weight * q;
  }
  RationalVector out;
  for (const auto& [name, denom] : total) {
    if (denom == 0) continue;
    auto it = allocated.find(name);
    out.emplace(name, it == allocated.end() ? Rational(0) : it->second / denom);
  }
  return out;
}

RationalVector traditional_utilization(std::span<const NodeSnapshot> snapshots) {
  std::vector<WeightedSnapshot> weighted;
  weighted.reserve(snapshots.size());
  for (const auto& s : snapshots) weighted.push_back({std::cref(s), Rational(1)});
  return traditional_utilization(std::span<const WeightedSnapshot>(weighted));
}

namespace {

void whole_node_into(BillingTotals& out, const NodeBillingStatement& st,
                     const Rational& weight) {
  std::set<std::string, std::less<>> resources;
  ResourceVector requested;
  for (const auto& [name, q] : st.total.entries()) resources.insert(name);
  for (const auto& bill : st.job_bills) {
    requested += bill.requested;
    for (const auto& [name, q] : bill.requested.entries()) resources.insert(name);
  }
  for (const auto& name : resources) {
    const Quantity asked = requested.get(name);
    const Quantity total = st.total.get(name);
    if (asked == 0) {
      if (total > 0) out.provider_loss[name] += weight * total;
      continue;
    }
    const Rational rate(total, asked);
    for (const auto& bill : st.job_bills) {
      const Quantity q = bill.requested.get(name);
      out.per_key[bill.user][name] += weight * rate * q;
    }
  }
}

}  // namespace

BillingTotals whole_node_comparison(std::span<const NodeBillingStatement> statements) {
  BillingTotals out;
  for (const auto& st : statements) whole_node_into(out, st, Rational(1));
  return out;
}

BillingTotals whole_node_comparison(std::span<const TimedStatement> statements) {
  BillingTotals out;
  for (const auto& ts : statements) whole_node_into(out, ts.statement, ts.hours);
  return out;
}

UserTotals integrate_bills(std::span<const TimedStatement> statements, BillKey key) {
  UserTotals totals;
  for (const auto& ts : statements)
    for (const auto& bill : ts.statement.job_bills)
      accumulate(totals[key == BillKey::User ? bill.user : bill.job_id], bill.billed,
                 ts.hours);
  return totals;
}

RationalVector integrate_provider_share(std::span<const TimedStatement> statements) {
  RationalVector out;
  for (const auto& ts : statements) {
    for (const auto& [name, q] : ts.statement.overhead_discount.entries())
      out[name] += ts.hours * q;
    for (const auto& [name, q] : ts.statement.provider_loss.entries())
      out[name] += ts.hours * q;
  }
  return out;
}

std::map<std::string, std::vector<NodeSnapshot>> group_by_node(
    std::span<const NodeSnapshot> snapshots) {
  std::map<std::string, std::vector<NodeSnapshot>> by_node;
  for (const auto& s : snapshots) by_node[s.node].push_back(s);
  for (auto& [node, list] : by_node)
    std::stable_sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
      return a.timestamp < b.timestamp;
    });
  return by_node;
}

std::vector<TimedStatement> bill_window(std::span<const NodeSnapshot> snapshots,
                                        const PartitionTable& table,
                                        const TimeWindow& window) {
  std::vector<TimedStatement> out;
  for (const auto& [node, list] : group_by_node(snapshots))
    for (const auto& iv : step_intervals(list, window))
      out.push_back({bill_node(list[iv.index], table), to_hours(iv.duration())});
  if (out.empty())
    throw Error(ErrorKind::EmptyInput, "no snapshot covers the window " +
                                           format_timestamp(window.from) + " .. " +
                                           format_timestamp(window.to));
  return out;
}

UtilizationReport build_report(std::span<const NodeSnapshot> snapshots,
                               const PartitionTable& table, const TimeWindow& window,
                               const std::optional<std::vector<PendingJob>>& pending) {
  window.validate();
  UtilizationReport report;
  report.window = window;

  const auto by_node = group_by_node(snapshots);
  std::map<std::string, std::vector<NodeIntegration>, std::less<>> per_partition;
  std::vector<WeightedSnapshot> weighted;
  std::vector<TimedStatement> statements;
  std::map<std::string, std::vector<NodeSnapshot>, std::less<>> latest;

  for (const auto& [node, list] : by_node) {
    const auto intervals = step_intervals(list, window);
    if (intervals.empty()) continue;
    NodeIntegration integration{node, list.front().partition, {}};
    for (const auto& iv : intervals) {
      const NodeSnapshot& s = list[iv.index];
      if (s.partition != integration.partition)
        throw Error(ErrorKind::MixedPartitions,
                    "node '" + node + "' changes partition within the window");
      const Rational hours = to_hours(iv.duration());
      const auto& thresholds = thresholds_for(table, s.partition);
      integration.spans.push_back(
          {compute_true_overhead(s.free(), thresholds).units, iv.duration()});
      weighted.push_back({std::cref(s), hours});
      statements.push_back({bill_node(s, thresholds), hours});
    }
    per_partition[integration.partition].push_back(std::move(integration));
    latest[list[intervals.back().index].partition].push_back(list[intervals.back().index]);
  }
  if (weighted.empty())
    throw Error(ErrorKind::EmptyInput, "no snapshot covers the window " +
                                           format_timestamp(window.from) + " .. " +
                                           format_timestamp(window.to));

  report.traditional_utilization = traditional_utilization(weighted);
  report.cu_hours_total = 0;
  for (const auto& [partition, integrations] : per_partition) {
    report.histograms.push_back(build_histogram(integrations, partition, window));
    report.cu_hours_total += report.histograms.back().cu_hours();
  }
  if (pending) {
    std::vector<WasteFlag> flags;
    for (const auto& [partition, nodes] : latest) {
      auto found = correlate_queue(nodes, *pending, thresholds_for(table, partition));
      std::move(found.begin(), found.end(), std::back_inserter(flags));
    }
    std::sort(flags.begin(), flags.end(),
              [](const auto& a, const auto& b) { return a.node < b.node; });
    report.waste_flags = std::move(flags);
  }
  report.per_user = integrate_bills(statements, BillKey::User);
  report.whole_node = whole_node_comparison(std::span<const TimedStatement>(statements));
  report.provider_share = integrate_provider_share(statements);
  return report;
}

}  // namespace canonacct
