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

#include "canonacct/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "canonacct/error.hpp"

namespace canonacct {

namespace {

// Where a value came from, for diagnostics. `kind` is the error raised for
// shape problems: ParseError for trace lines, SchemaError for config.
struct Ctx {
  ErrorKind kind;
  std::optional<std::size_t> line;
  std::string path;

  Ctx at(std::string_view key) const {
    return {kind, line, path.empty() ? std::string(key) : path + "." + std::string(key)};
  }
  Ctx at(std::size_t index) const {
    return {kind, line, path + "[" + std::to_string(index) + "]"};
  }
  [[noreturn]] void fail(const std::string& message) const {
    throw Error(kind, message, line, path);
  }
  [[noreturn]] void fail(ErrorKind k, const std::string& message) const {
    throw Error(k, message, line, path);
  }
};

const Json& require_object(const Json& j, const Ctx& ctx) {
  if (!j.is_object()) ctx.fail("expected an object");
  return j;
}

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                const Ctx& ctx) {
  for (const auto& [key, value] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      ctx.at(key).fail("unknown key '" + key + "'");
}

const Json& member(const Json& j, std::string_view key, const Ctx& ctx) {
  auto it = j.find(key);
  if (it == j.end()) ctx.at(key).fail("missing required key '" + std::string(key) + "'");
  return *it;
}

std::string get_string(const Json& j, const Ctx& ctx, bool allow_empty = false) {
  if (!j.is_string()) ctx.fail("expected a string");
  auto s = j.get<std::string>();
  if (!allow_empty && s.empty()) ctx.fail("must not be empty");
  return s;
}

// Integer in [0, int64 max].
Quantity get_quantity(const Json& j, const Ctx& ctx) {
  if (j.is_number_unsigned()) {
    auto v = j.get<std::uint64_t>();
    if (v > static_cast<std::uint64_t>(std::numeric_limits<Quantity>::max()))
      ctx.fail("quantity out of range");
    return static_cast<Quantity>(v);
  }
  if (j.is_number_integer()) ctx.fail("quantity must be non-negative");
  ctx.fail("expected a non-negative integer");
}

ResourceVector get_resources(const Json& j, const Ctx& ctx) {
  require_object(j, ctx);
  ResourceVector out;
  for (const auto& [key, value] : j.items()) {
    Ctx field = ctx.at(key);
    if (!is_valid_resource_name(key)) field.fail("invalid resource name '" + key + "'");
    out.set(key, get_quantity(value, field));
  }
  return out;
}

Instant get_timestamp(const Json& j, const Ctx& ctx) {
  std::string text = get_string(j, ctx);
  try {
    return parse_timestamp(text);
  } catch (const Error& e) {
    ctx.fail(e.what());
  }
}

std::size_t line_of_offset(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

Json parse_document(std::istream& in) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::ParseError, e.what(), line_of_offset(text, e.byte));
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
  return in;
}

CanonicalUnitThresholds parse_partition(const Json& j, const Ctx& ctx) {
  require_object(j, ctx);
  check_keys(j, {"name", "preset", "per_unit"}, ctx);
  std::string name = get_string(member(j, "name", ctx), ctx.at("name"));
  const bool has_preset = j.contains("preset");
  const bool has_per_unit = j.contains("per_unit");
  if (has_preset == has_per_unit)
    ctx.fail("partition '" + name + "' needs exactly one of 'preset' or 'per_unit'");

  if (has_preset) {
    Ctx pc = ctx.at("preset");
    std::string preset = get_string(j["preset"], pc);
    if (preset == "osg_cpu") return osg_cpu_preset(name);
    if (preset == "osg_gpu") return osg_gpu_preset(name);
    pc.fail("unknown preset '" + preset + "'");
  }

  Ctx uc = ctx.at("per_unit");
  const Json& per_unit = require_object(j["per_unit"], uc);
  CanonicalUnitThresholds t{name, {}};
  for (const auto& [key, value] : per_unit.items()) {
    Ctx field = uc.at(key);
    if (!is_valid_resource_name(key)) field.fail("invalid resource name '" + key + "'");
    if (!value.is_number_integer()) field.fail("threshold must be an integer");
    if (!value.is_number_unsigned() || value.get<std::uint64_t>() == 0)
      field.fail(ErrorKind::ValidationError,
                 "threshold for '" + key + "' must be >= 1");
    Quantity q = get_quantity(value, field);
    std::string resource = key;
    if (key == "memory_gb") {
      if (per_unit.contains(std::string(kMemoryMb)))
        field.fail("both 'memory_gb' and 'memory_mb' given");
      if (q > std::numeric_limits<Quantity>::max() / 1024) field.fail("quantity out of range");
      resource = kMemoryMb;
      q *= 1024;
    }
    t.per_unit.set(resource, q);
  }
  try {
    t.validate();
  } catch (const Error& e) {
    uc.fail(ErrorKind::ValidationError, e.what());
  }
  return t;
}

NodeSnapshot parse_snapshot_line(const Json& j, const Ctx& ctx) {
  require_object(j, ctx);
  check_keys(j, {"ts", "node", "partition", "total", "jobs"}, ctx);
  NodeSnapshot s;
  s.timestamp = get_timestamp(member(j, "ts", ctx), ctx.at("ts"));
  s.node = get_string(member(j, "node", ctx), ctx.at("node"));
  s.partition = get_string(member(j, "partition", ctx), ctx.at("partition"));
  s.total = get_resources(member(j, "total", ctx), ctx.at("total"));

  Ctx jc = ctx.at("jobs");
  const Json& jobs = member(j, "jobs", ctx);
  if (!jobs.is_array()) jc.fail("expected an array");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    Ctx c = jc.at(i);
    require_object(jobs[i], c);
    check_keys(jobs[i], {"id", "user", "request"}, c);
    JobAllocation job;
    job.job_id = get_string(member(jobs[i], "id", c), c.at("id"));
    job.user = get_string(member(jobs[i], "user", c), c.at("user"));
    job.requested = get_resources(member(jobs[i], "request", c), c.at("request"));
    if (!ids.insert(job.job_id).second)
      c.at("id").fail(ErrorKind::ValidationError, "duplicate job id '" + job.job_id + "'");
    if (!job.requested.any_positive())
      c.at("request").fail(ErrorKind::ValidationError,
                           "job '" + job.job_id + "' requests no resources");
    s.jobs.push_back(std::move(job));
  }

  try {
    validate_snapshot(s);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::OverAllocated)
      throw Error(ErrorKind::OverAllocated, e.what(), ctx.line, "total." + e.path());
    throw Error(e.kind(), e.what(), ctx.line, ctx.path);
  }
  return s;
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorKind::ParseError, e.what(), line);
    }
    fn(j, Ctx{ErrorKind::ParseError, line, {}});
  }
  if (in.bad()) throw Error(ErrorKind::IoError, "read failure", line);
}

}  // namespace

Config load_config(std::istream& in) {
  const Json doc = parse_document(in);
  const Ctx root{ErrorKind::SchemaError, std::nullopt, {}};
  require_object(doc, root);
  check_keys(doc, {"partitions", "defaults"}, root);

  Config config;
  if (doc.contains("defaults")) {
    if (!doc["defaults"].is_boolean()) root.at("defaults").fail("expected a boolean");
    config.defaults = doc["defaults"].get<bool>();
  }
  if (doc.contains("partitions")) {
    Ctx pc = root.at("partitions");
    const Json& list = doc["partitions"];
    if (!list.is_array()) pc.fail("expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      auto t = parse_partition(list[i], pc.at(i));
      if (config.partitions.count(t.partition))
        pc.at(i).fail(ErrorKind::ValidationError,
                      "duplicate partition '" + t.partition + "'");
      config.partitions.emplace(t.partition, std::move(t));
    }
  }
  if (config.defaults) {
    config.partitions.try_emplace("cpu", osg_cpu_preset("cpu"));
    config.partitions.try_emplace("gpu", osg_gpu_preset("gpu"));
  }
  if (config.partitions.empty())
    root.fail(ErrorKind::ValidationError, "no partitions defined");
  return config;
}

Config load_config(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load_config(in);
}

std::vector<NodeSnapshot> parse_snapshots(std::istream& in) {
  std::vector<NodeSnapshot> out;
  std::map<std::pair<std::string, Instant>, std::size_t> seen;
  for_each_line(in, [&](const Json& j, const Ctx& ctx) {
    NodeSnapshot s = parse_snapshot_line(j, ctx);
    auto [it, fresh] = seen.emplace(std::make_pair(s.node, s.timestamp), *ctx.line);
    if (!fresh)
      ctx.fail(ErrorKind::ValidationError,
               "duplicate snapshot for node '" + s.node + "' at " +
                   format_timestamp(s.timestamp) + " (first on line " +
                   std::to_string(it->second) + ")");
    out.push_back(std::move(s));
  });
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.node, a.timestamp) < std::tie(b.node, b.timestamp);
  });
  return out;
}

std::vector<PendingJob> parse_queue(std::istream& in) {
  std::vector<PendingJob> out;
  std::set<std::string> ids;
  for_each_line(in, [&](const Json& j, const Ctx& ctx) {
    require_object(j, ctx);
    check_keys(j, {"id", "user", "partition", "request"}, ctx);
    PendingJob job;
    job.job_id = get_string(member(j, "id", ctx), ctx.at("id"));
    job.user = get_string(member(j, "user", ctx), ctx.at("user"));
    job.partition = get_string(member(j, "partition", ctx), ctx.at("partition"));
    job.requested = get_resources(member(j, "request", ctx), ctx.at("request"));
    if (!job.requested.any_positive())
      ctx.at("request").fail("pending job '" + job.job_id + "' requests no resources");
    if (!ids.insert(job.job_id).second)
      ctx.at("id").fail(ErrorKind::ValidationError,
                        "duplicate pending job id '" + job.job_id + "'");
    out.push_back(std::move(job));
  });
  return out;
}

void check_partitions(std::span<const NodeSnapshot> snapshots, const Config& config) {
  for (const auto& s : snapshots) (void)thresholds_for(config.partitions, s.partition);
}

Json to_json(const ResourceVector& v) {
  Json j = Json::object();
  for (const auto& [name, q] : v.entries()) j[name] = q;
  return j;
}

Json snapshot_to_json(const NodeSnapshot& s) {
  Json jobs = Json::array();
  for (const auto& job : s.jobs)
    jobs.push_back({{"id", job.job_id}, {"user", job.user}, {"request", to_json(job.requested)}});
  return {{"ts", format_timestamp(s.timestamp)},
          {"node", s.node},
          {"partition", s.partition},
          {"total", to_json(s.total)},
          {"jobs", std::move(jobs)}};
}

Json pending_to_json(const PendingJob& job) {
  return {{"id", job.job_id},
          {"user", job.user},
          {"partition", job.partition},
          {"request", to_json(job.requested)}};
}

void write_snapshots(std::ostream& out, std::span<const NodeSnapshot> snapshots) {
  for (const auto& s : snapshots) out << snapshot_to_json(s).dump() << '\n';
}

void write_queue(std::ostream& out, std::span<const PendingJob> pending) {
  for (const auto& job : pending) out << pending_to_json(job).dump() << '\n';
}

void put_rational(Json& object, const std::string& key, const Rational& value) {
  object[key] = to_decimal_string(value);
  object[key + "_exact"] = to_exact_string(value);
}

void put_rational_map(Json& object, const std::string& key, const RationalVector& values) {
  Json decimal = Json::object(), exact = Json::object();
  for (const auto& [name, value] : values) {
    decimal[name] = to_decimal_string(value);
    exact[name] = to_exact_string(value);
  }
  object[key] = std::move(decimal);
  object[key + "_exact"] = std::move(exact);
}

void put_user_totals(Json& object, const std::string& key, const UserTotals& totals) {
  Json decimal = Json::object(), exact = Json::object();
  for (const auto& [user, values] : totals) {
    Json tmp;
    put_rational_map(tmp, "v", values);
    decimal[user] = tmp["v"];
    exact[user] = tmp["v_exact"];
  }
  object[key] = std::move(decimal);
  object[key + "_exact"] = std::move(exact);
}

Json statement_to_json(const NodeBillingStatement& st) {
  Json j = {{"node", st.node},
            {"partition", st.partition},
            {"ts", format_timestamp(st.timestamp)},
            {"total", to_json(st.total)},
            {"overhead_units", st.overhead_units},
            {"overhead_discount", to_json(st.overhead_discount)},
            {"billable", to_json(st.billable)},
            {"provider_loss", to_json(st.provider_loss)}};
  put_rational_map(j, "rates", st.rates);
  Json jobs = Json::array();
  for (const auto& bill : st.job_bills) {
    Json b = {{"id", bill.job_id}, {"user", bill.user}, {"request", to_json(bill.requested)}};
    put_rational_map(b, "billed", bill.billed);
    jobs.push_back(std::move(b));
  }
  j["jobs"] = std::move(jobs);
  return j;
}

namespace {

RationalVector get_exact_map(const Json& j, const Ctx& ctx) {
  require_object(j, ctx);
  RationalVector out;
  for (const auto& [key, value] : j.items()) {
    Ctx field = ctx.at(key);
    try {
      out.emplace(key, parse_exact(get_string(value, field)));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ParseError) throw;
      field.fail(e.what());
    }
  }
  return out;
}

}  // namespace

NodeBillingStatement statement_from_json(const Json& j) {
  const Ctx ctx{ErrorKind::SchemaError, std::nullopt, {}};
  require_object(j, ctx);
  NodeBillingStatement st;
  st.node = get_string(member(j, "node", ctx), ctx.at("node"));
  st.partition = get_string(member(j, "partition", ctx), ctx.at("partition"));
  st.timestamp = get_timestamp(member(j, "ts", ctx), ctx.at("ts"));
  st.total = get_resources(member(j, "total", ctx), ctx.at("total"));
  const Json& units = member(j, "overhead_units", ctx);
  st.overhead_units = get_quantity(units, ctx.at("overhead_units"));
  st.overhead_discount =
      get_resources(member(j, "overhead_discount", ctx), ctx.at("overhead_discount"));
  st.billable = get_resources(member(j, "billable", ctx), ctx.at("billable"));
  st.provider_loss = get_resources(member(j, "provider_loss", ctx), ctx.at("provider_loss"));
  st.rates = get_exact_map(member(j, "rates_exact", ctx), ctx.at("rates_exact"));
  Ctx jc = ctx.at("jobs");
  const Json& jobs = member(j, "jobs", ctx);
  if (!jobs.is_array()) jc.fail("expected an array");
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    Ctx c = jc.at(i);
    require_object(jobs[i], c);
    JobBill bill;
    bill.job_id = get_string(member(jobs[i], "id", c), c.at("id"));
    bill.user = get_string(member(jobs[i], "user", c), c.at("user"));
    bill.requested = get_resources(member(jobs[i], "request", c), c.at("request"));
    bill.billed = get_exact_map(member(jobs[i], "billed_exact", c), c.at("billed_exact"));
    st.job_bills.push_back(std::move(bill));
  }
  return st;
}

Json report_to_json(const UtilizationReport& report) {
  Json j;
  j["window"] = {{"from", format_timestamp(report.window.from)},
                 {"to", format_timestamp(report.window.to)}};
  put_rational_map(j, "traditional_utilization", report.traditional_utilization);

  Json histogram = Json::array();
  for (const auto& h : report.histograms)
    for (const auto& [cu, hours] : h.bins) {
      Json bin = {{"partition", h.partition}, {"cu", cu}};
      put_rational(bin, "node_hours", hours);
      histogram.push_back(std::move(bin));
    }
  j["histogram"] = std::move(histogram);
  put_rational(j, "cu_hours_total", report.cu_hours_total);

  if (report.waste_flags) {
    Json flags = Json::array();
    for (const auto& f : *report.waste_flags)
      flags.push_back({{"node", f.node},
                       {"ts", format_timestamp(f.timestamp)},
                       {"overhead_units", f.overhead_units},
                       {"matching_jobs", f.matching_jobs}});
    j["waste_flags"] = std::move(flags);
  }

  Json billing = Json::object();
  put_user_totals(billing, "per_user", report.per_user);
  Json whole = Json::object();
  put_user_totals(whole, "per_user", report.whole_node.per_key);
  put_rational_map(whole, "provider_loss", report.whole_node.provider_loss);
  billing["whole_node_comparison"] = std::move(whole);
  put_rational_map(billing, "provider_share", report.provider_share);
  j["billing"] = std::move(billing);
  return j;
}

void write_histogram_csv(std::ostream& out, std::span<const OverheadHistogram> histograms) {
  out << "partition,cu_count,node_hours\n";
  for (const auto& h : histograms)
    for (const auto& [cu, hours] : h.bins)
      out << h.partition << ',' << cu << ',' << to_decimal_string(hours) << '\n';
}

}  // namespace canonacct
