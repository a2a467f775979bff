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

#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "canonacct/aggregation.hpp"
#include "canonacct/billing.hpp"
#include "canonacct/error.hpp"
#include "canonacct/ingest.hpp"
#include "canonacct/scenario.hpp"

namespace canonacct::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Streams {
  std::istream& in;
  std::ostream& out;
};

// Reads a whole file (or `in` for "-") into memory.
std::string slurp(const std::string& path, Streams io) {
  std::ostringstream buffer;
  if (path == "-") {
    buffer << io.in.rdbuf();
  } else {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
    buffer << f.rdbuf();
  }
  return buffer.str();
}

void emit(const std::string& path, const std::string& data, Streams io) {
  if (path == "-") {
    io.out << data;
    io.out.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  f << data;
  if (!f) throw Error(ErrorKind::IoError, "write failed for '" + path + "'");
}

Config read_config(const std::string& path, Streams io) {
  if (path.empty())
    throw UsageError("--config is required (or set CANON_ACCT_CONFIG)");
  std::istringstream s(slurp(path, io));
  return load_config(s);
}

std::vector<NodeSnapshot> read_snapshots(const std::string& path, const Config& config,
                                         Streams io) {
  std::istringstream s(slurp(path, io));
  auto snapshots = parse_snapshots(s);
  check_partitions(snapshots, config);
  return snapshots;
}

Instant flag_time(const std::string& flag, const std::string& value) {
  try {
    return parse_timestamp(value);
  } catch (const Error& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

TimeWindow flag_window(const std::string& from, const std::string& to) {
  TimeWindow w{flag_time("--from", from), flag_time("--to", to)};
  if (!(w.from < w.to)) throw UsageError("--from must be before --to");
  return w;
}

struct CommonFlags {
  std::string config;
  std::string snapshots;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "Partition threshold config (JSON)")
      ->envname("CANON_ACCT_CONFIG");
  cmd->add_option("--snapshots", flags.snapshots, "Node snapshot trace (JSON Lines)")
      ->required();
}

// --- overhead ---------------------------------------------------------------

struct OverheadFlags {
  CommonFlags common;
  std::string at;
  std::string format = "json";
};

std::string cmd_overhead(const OverheadFlags& flags, Streams io) {
  const Config config = read_config(flags.common.config, io);
  const auto snapshots = read_snapshots(flags.common.snapshots, config, io);
  if (snapshots.empty()) throw Error(ErrorKind::EmptyInput, "no snapshots in input");

  Instant at = snapshots.front().timestamp;
  for (const auto& s : snapshots) at = std::max(at, s.timestamp);
  if (!flags.at.empty()) at = flag_time("--at", flags.at);

  // Latest snapshot per node at or before `at`; input is sorted by node, time.
  std::vector<const NodeSnapshot*> current;
  for (const auto& s : snapshots) {
    if (s.timestamp > at) continue;
    if (!current.empty() && current.back()->node == s.node)
      current.back() = &s;
    else
      current.push_back(&s);
  }
  if (current.empty())
    throw Error(ErrorKind::EmptyInput, "no snapshot at or before requested instant " +
                                           format_timestamp(at));

  std::map<std::string, std::map<Quantity, std::size_t>> histogram;
  Json nodes = Json::array();
  std::ostringstream csv;
  csv << "node,partition,timestamp,cu\n";
  for (const NodeSnapshot* s : current) {
    const auto& thresholds = thresholds_for(config.partitions, s->partition);
    const TrueOverhead overhead = compute_true_overhead(s->free(), thresholds);
    ++histogram[s->partition][overhead.units];
    nodes.push_back({{"node", s->node},
                     {"partition", s->partition},
                     {"ts", format_timestamp(s->timestamp)},
                     {"cu", overhead.units},
                     {"free", to_json(overhead.free)},
                     {"sub_threshold_remainder", to_json(overhead.sub_threshold_remainder)}});
    csv << s->node << ',' << s->partition << ',' << format_timestamp(s->timestamp) << ','
        << overhead.units << '\n';
  }
  if (flags.format == "csv") return csv.str();

  Json bins = Json::array();
  for (const auto& [partition, counts] : histogram)
    for (const auto& [cu, n] : counts)
      bins.push_back({{"partition", partition}, {"cu", cu}, {"nodes", n}});
  Json doc = {{"at", format_timestamp(at)}, {"nodes", std::move(nodes)},
              {"histogram", std::move(bins)}};
  return doc.dump(2) + "\n";
}

// --- bill -------------------------------------------------------------------

struct BillFlags {
  CommonFlags common;
  std::string from, to;
  std::string by = "user";
  std::string format = "json";
};

std::string cmd_bill(const BillFlags& flags, Streams io) {
  const TimeWindow window = flag_window(flags.from, flags.to);
  const Config config = read_config(flags.common.config, io);
  const auto snapshots = read_snapshots(flags.common.snapshots, config, io);
  const auto statements = bill_window(snapshots, config.partitions, window);
  const BillKey key = flags.by == "job" ? BillKey::Job : BillKey::User;
  const UserTotals totals = integrate_bills(statements, key);

  if (flags.format == "csv") {
    std::ostringstream csv;
    csv << (key == BillKey::Job ? "job" : "user") << ",resource,value,exact\n";
    for (const auto& [who, values] : totals)
      for (const auto& [resource, value] : values)
        csv << who << ',' << resource << ',' << to_decimal_string(value) << ','
            << to_exact_string(value) << '\n';
    return csv.str();
  }

  Json list = Json::array();
  for (const auto& ts : statements) {
    Json st = statement_to_json(ts.statement);
    put_rational(st, "hours", ts.hours);
    list.push_back(std::move(st));
  }
  Json doc = {{"window",
               {{"from", format_timestamp(window.from)}, {"to", format_timestamp(window.to)}}},
              {"by", flags.by},
              {"statements", std::move(list)}};
  put_user_totals(doc, "totals", totals);
  return doc.dump(2) + "\n";
}

// --- report -----------------------------------------------------------------

struct ReportFlags {
  CommonFlags common;
  std::string queue;
  std::string from, to;
  std::string histogram_csv;
};

std::string cmd_report(const ReportFlags& flags, Streams io) {
  const TimeWindow window = flag_window(flags.from, flags.to);
  const Config config = read_config(flags.common.config, io);
  const auto snapshots = read_snapshots(flags.common.snapshots, config, io);
  std::optional<std::vector<PendingJob>> pending;
  if (!flags.queue.empty()) {
    std::istringstream s(slurp(flags.queue, io));
    pending = parse_queue(s);
  }
  const UtilizationReport report = build_report(snapshots, config.partitions, window, pending);
  if (!flags.histogram_csv.empty()) {
    std::ostringstream csv;
    write_histogram_csv(csv, report.histograms);
    emit(flags.histogram_csv, csv.str(), io);
  }
  return report_to_json(report).dump(2) + "\n";
}

// --- simulate ---------------------------------------------------------------

struct SimulateFlags {
  std::string scenario;
  std::uint32_t nodes = 4;
  std::uint64_t seed = 0;
  std::uint32_t hours = 1;
  std::string out = "-";
  std::string queue_out;
};

void cmd_simulate(const SimulateFlags& flags, Streams io) {
  ScenarioSpec spec;
  spec.kind = parse_scenario_kind(flags.scenario);
  spec.node_count = flags.nodes;
  spec.seed = flags.seed;
  spec.duration_hours = flags.hours;
  const Scenario scenario = generate(spec);

  std::ostringstream snapshots;
  write_snapshots(snapshots, scenario.snapshots);
  emit(flags.out, snapshots.str(), io);
  if (!flags.queue_out.empty()) {
    std::ostringstream queue;
    if (scenario.queue) write_queue(queue, *scenario.queue);
    emit(flags.queue_out, queue.str(), io);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Canonical-unit true overhead accounting and billing", "canon-acct"};
  app.require_subcommand(1);

  OverheadFlags overhead;
  auto* c_overhead =
      app.add_subcommand("overhead", "Per-node true overhead (canonical units) at an instant");
  add_common(c_overhead, overhead.common);
  c_overhead->add_option("--at", overhead.at, "Instant (ISO-8601 with zone); default latest");
  c_overhead->add_option("--format", overhead.format)
      ->check(CLI::IsMember({"json", "csv"}));

  BillFlags bill;
  auto* c_bill = app.add_subcommand("bill", "Overhead-discounted billing over a window");
  add_common(c_bill, bill.common);
  c_bill->add_option("--from", bill.from)->required();
  c_bill->add_option("--to", bill.to)->required();
  c_bill->add_option("--by", bill.by)->check(CLI::IsMember({"user", "job"}));
  c_bill->add_option("--format", bill.format)->check(CLI::IsMember({"json", "csv"}));

  ReportFlags report;
  auto* c_report = app.add_subcommand("report", "Full utilization report over a window");
  add_common(c_report, report.common);
  c_report->add_option("--queue", report.queue, "Pending jobs (JSON Lines)");
  c_report->add_option("--from", report.from)->required();
  c_report->add_option("--to", report.to)->required();
  c_report->add_option("--histogram-csv", report.histogram_csv,
                       "Also write the histogram as CSV to this path");

  SimulateFlags simulate;
  auto* c_simulate = app.add_subcommand("simulate", "Generate a synthetic snapshot trace");
  c_simulate->add_option("--scenario", simulate.scenario)
      ->required()
      ->check(CLI::IsMember({"figure2", "complementary_mix", "fragmented", "random"}));
  c_simulate->add_option("--nodes", simulate.nodes)->check(CLI::PositiveNumber);
  c_simulate->add_option("--seed", simulate.seed);
  c_simulate->add_option("--hours", simulate.hours)->check(CLI::PositiveNumber);
  c_simulate->add_option("--out", simulate.out, "Snapshot output path or -");
  c_simulate->add_option("--queue-out", simulate.queue_out, "Pending queue output path");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "canon-acct: " << e.what() << '\n';
    return kUsageError;
  }

  const Streams io{in, out};
  try {
    if (*c_overhead) {
      emit("-", cmd_overhead(overhead, io), io);
    } else if (*c_bill) {
      emit("-", cmd_bill(bill, io), io);
    } else if (*c_report) {
      emit("-", cmd_report(report, io), io);
    } else if (*c_simulate) {
      cmd_simulate(simulate, io);
    }
    out.flush();
    return kOk;
  } catch (const UsageError& e) {
    err << "canon-acct: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "canon-acct: " << e.what() << '\n';
    return e.kind() == ErrorKind::UnknownScenario ? kUsageError : e.exit_code();
  } catch (const std::exception& e) {
    err << "canon-acct: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace canonacct::cli
