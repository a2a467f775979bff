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

#include "canonacct/core_model.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

#include "canonacct/error.hpp"

namespace canonacct {

bool is_valid_resource_name(std::string_view name) {
  if (name.empty() || name.front() < 'a' || name.front() > 'z') return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

ResourceVector::ResourceVector(
    std::initializer_list<std::pair<const std::string, Quantity>> init) {
  for (const auto& [name, quantity] : init) {
    if (contains(name))
      throw Error(ErrorKind::ValidationError, "duplicate resource '" + name + "'");
    set(name, quantity);
  }
}

Quantity ResourceVector::get(std::string_view name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? 0 : it->second;
}

void ResourceVector::set(std::string_view name, Quantity quantity) {
  if (!is_valid_resource_name(name))
    throw Error(ErrorKind::ValidationError,
                "invalid resource name '" + std::string(name) + "'");
  if (quantity < 0)
    throw Error(ErrorKind::ValidationError,
                "negative quantity for '" + std::string(name) + "'");
  auto it = entries_.find(name);
  if (it == entries_.end())
    entries_.emplace(std::string(name), quantity);
  else
    it->second = quantity;
}

bool ResourceVector::any_positive() const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [](const auto& e) { return e.second > 0; });
}

bool ResourceVector::fits_within(const ResourceVector& bound) const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [&](const auto& e) { return e.second <= bound.get(e.first); });
}

ResourceVector& ResourceVector::operator+=(const ResourceVector& other) {
  for (const auto& [name, quantity] : other.entries_) {
    Quantity current = get(name);
    if (quantity > std::numeric_limits<Quantity>::max() - current)
      throw Error(ErrorKind::ValidationError, "quantity overflow on '" + name + "'");
    entries_[name] = current + quantity;
  }
  return *this;
}

ResourceVector ResourceVector::scaled(Quantity factor) const {
  ResourceVector out;
  for (const auto& [name, quantity] : entries_) out.set(name, quantity * factor);
  return out;
}

ResourceVector subtract(const ResourceVector& a, const ResourceVector& b) {
  ResourceVector out = a;
  for (const auto& [name, quantity] : b.entries()) {
    Quantity have = a.get(name);
    if (quantity > have)
      throw Error(ErrorKind::NegativeResource,
                  "'" + name + "' would go negative (" + std::to_string(have) +
                      " - " + std::to_string(quantity) + ")");
    out.set(name, have - quantity);
  }
  return out;
}

std::string to_string(const ResourceVector& v) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [name, quantity] : v.entries()) {
    if (!first) os << ", ";
    first = false;
    os << name << ':' << quantity;
  }
  os << '}';
  return os.str();
}

void CanonicalUnitThresholds::validate() const {
  if (per_unit.empty())
    throw Error(ErrorKind::ValidationError,
                "partition '" + partition + "' defines no threshold resources");
  for (const auto& [name, quantity] : per_unit.entries())
    if (quantity < 1)
      throw Error(ErrorKind::ValidationError, "partition '" + partition +
                                                  "': threshold for '" + name +
                                                  "' must be >= 1");
}

CanonicalUnitThresholds osg_cpu_preset(std::string partition) {
  return {std::move(partition), {{std::string(kCpuCores), 1}, {std::string(kMemoryMb), 2048}}};
}

CanonicalUnitThresholds osg_gpu_preset(std::string partition) {
  return {std::move(partition), {{std::string(kGpuChips), 1}}};
}

ResourceVector NodeSnapshot::allocated() const {
  ResourceVector sum;
  for (const auto& job : jobs) sum += job.requested;
  return sum;
}

ResourceVector NodeSnapshot::free() const {
  try {
    return subtract(total, allocated());
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NegativeResource) throw;
    const ResourceVector requested = allocated();
    for (const auto& [name, quantity] : requested.entries())
      if (quantity > total.get(name))
        throw Error(ErrorKind::OverAllocated,
                    "node '" + node + "' over-allocated on '" + name + "': jobs request " +
                        std::to_string(quantity) + ", total " +
                        std::to_string(total.get(name)),
                    std::nullopt, name);
    throw;
  }
}

void validate_snapshot(const NodeSnapshot& snapshot) {
  if (snapshot.node.empty())
    throw Error(ErrorKind::ValidationError, "empty node name");
  if (snapshot.partition.empty())
    throw Error(ErrorKind::ValidationError, "node '" + snapshot.node + "' has no partition");
  std::set<std::string_view> ids;
  for (const auto& job : snapshot.jobs) {
    if (job.job_id.empty())
      throw Error(ErrorKind::ValidationError, "node '" + snapshot.node + "': empty job id");
    if (!ids.insert(job.job_id).second)
      throw Error(ErrorKind::ValidationError,
                  "node '" + snapshot.node + "': duplicate job id '" + job.job_id + "'");
    if (!job.requested.any_positive())
      throw Error(ErrorKind::ValidationError,
                  "job '" + job.job_id + "' requests no resources");
  }
  (void)snapshot.free();
}

TrueOverhead compute_true_overhead(const ResourceVector& free,
                                   const CanonicalUnitThresholds& thresholds) {
  Quantity units = std::numeric_limits<Quantity>::max();
  for (const auto& [name, per_unit] : thresholds.per_unit.entries())
    units = std::min(units, free.get(name) / per_unit);
  if (thresholds.per_unit.empty()) units = 0;

  TrueOverhead out;
  out.units = units;
  out.free = free;
  for (const auto& [name, per_unit] : thresholds.per_unit.entries())
    out.sub_threshold_remainder.set(name, free.get(name) - units * per_unit);
  return out;
}

Quantity job_cu_size(const ResourceVector& requested,
                     const CanonicalUnitThresholds& thresholds) {
  Quantity size = 0;
  for (const auto& [name, per_unit] : thresholds.per_unit.entries()) {
    Quantity want = requested.get(name);
    size = std::max(size, (want + per_unit - 1) / per_unit);
  }
  return size;
}

}  // namespace canonacct
