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

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "canonacct/timestamp.hpp"

namespace canonacct {

using Quantity = std::int64_t;

inline constexpr std::string_view kCpuCores = "cpu_cores";
inline constexpr std::string_view kMemoryMb = "memory_mb";
inline constexpr std::string_view kGpuChips = "gpu_chips";
inline constexpr std::string_view kScratchGb = "scratch_gb";

// Lowercase identifier: [a-z][a-z0-9_]*.
bool is_valid_resource_name(std::string_view name);

// Non-negative integer quantity per named resource type. A missing key reads
// as zero; arithmetic is component-wise over the union of keys.
class ResourceVector {
 public:
  using Map = std::map<std::string, Quantity, std::less<>>;

  ResourceVector() = default;
  ResourceVector(std::initializer_list<std::pair<const std::string, Quantity>> init);

  Quantity get(std::string_view name) const;
  bool contains(std::string_view name) const { return entries_.count(name) != 0; }
  // Throws Error(ValidationError) on a bad name or negative quantity.
  void set(std::string_view name, Quantity quantity);

  const Map& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  // True if some quantity is strictly positive.
  bool any_positive() const;
  // Every component of *this is <= the same component of `bound`.
  bool fits_within(const ResourceVector& bound) const;

  ResourceVector& operator+=(const ResourceVector& other);
  friend ResourceVector operator+(ResourceVector a, const ResourceVector& b) {
    a += b;
    return a;
  }
  ResourceVector scaled(Quantity factor) const;

  bool operator==(const ResourceVector&) const = default;

 private:
  Map entries_;
};

// a - b over the union of keys. Throws Error(NegativeResource) naming the
// first resource that would go negative.
ResourceVector subtract(const ResourceVector& a, const ResourceVector& b);

std::string to_string(const ResourceVector& v);

// Quantities that make up one canonical unit on a partition. Only resources
// listed in `per_unit` (the threshold resources) constrain the unit count.
struct CanonicalUnitThresholds {
  std::string partition;
  ResourceVector per_unit;

  // Throws Error(ValidationError) when per_unit is empty or has a quantity < 1.
  void validate() const;
  bool operator==(const CanonicalUnitThresholds&) const = default;
};

// Shipped presets: 1 core + 2048 MB for CPU-only nodes, 1 GPU chip for GPU
// nodes.
CanonicalUnitThresholds osg_cpu_preset(std::string partition);
CanonicalUnitThresholds osg_gpu_preset(std::string partition);

struct JobAllocation {
  std::string job_id;
  std::string user;
  ResourceVector requested;

  bool operator==(const JobAllocation&) const = default;
};

struct NodeSnapshot {
  Instant timestamp;
  std::string node;
  std::string partition;
  ResourceVector total;
  std::vector<JobAllocation> jobs;

  // Sum of job requests.
  ResourceVector allocated() const;
  // total - allocated; throws Error(OverAllocated) naming node and resource.
  ResourceVector free() const;

  bool operator==(const NodeSnapshot&) const = default;
};

// Checks job ids (non-empty, unique), that each job requests something, and
// that the node is not over-allocated. Throws Error(ValidationError) or
// Error(OverAllocated).
void validate_snapshot(const NodeSnapshot& snapshot);

struct TrueOverhead {
  Quantity units = 0;
  ResourceVector free;
  // free - units * per_unit, restricted to threshold resources.
  ResourceVector sub_threshold_remainder;
};

// Largest whole number of canonical units buildable from `free`:
// min over threshold resources of floor(free[r] / per_unit[r]).
TrueOverhead compute_true_overhead(const ResourceVector& free,
                                   const CanonicalUnitThresholds& thresholds);

// Smallest n with n * per_unit >= requested on every threshold resource.
Quantity job_cu_size(const ResourceVector& requested,
                     const CanonicalUnitThresholds& thresholds);

}  // namespace canonacct
