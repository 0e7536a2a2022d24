// Copyright 2026 The lrsdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "lrsdp/random.hpp"

namespace lrsdp {

/// Thread-local count of tree nodes visited by sampling, query and norm
/// accessors. Used by tests to check logarithmic access cost.
std::size_t nodes_touched();
void reset_nodes_touched();

namespace detail {
void touch_nodes(std::size_t count);
}

/// Complete binary tree over nonnegative leaf weights, stored as an implicit
/// heap (root at 1, leaves at [capacity, 2 * capacity)). Every internal node
/// holds the floating-point sum of its two children, which makes descent
/// sampling exact: the probability of reaching leaf k is the product of the
/// branch ratios on its path, i.e. weight(k) / total().
class SumTree {
 public:
  SumTree() = default;
  explicit SumTree(std::span<const double> weights);

  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] std::size_t capacity() const { return capacity_; }
  /// Number of levels including root and leaves.
  [[nodiscard]] std::size_t depth() const;

  [[nodiscard]] double total() const { return nodes_.empty() ? 0.0 : nodes_[1]; }
  [[nodiscard]] double weight(std::size_t leaf) const { return nodes_[capacity_ + leaf]; }
  [[nodiscard]] double node(std::size_t heap_index) const { return nodes_[heap_index]; }

  /// Sets one leaf and refreshes the sums on its path to the root.
  void update(std::size_t leaf, double weight);
  /// Recomputes every internal node bottom-up from the leaves.
  void rebuild();

  /// Descends from the root with `u` in [0, 1) scaled by total(); never
  /// returns a zero-weight leaf. Requires total() > 0.
  [[nodiscard]] std::size_t sample(double u) const;

  /// Tally of `count` independent sample() draws, produced by splitting the
  /// count binomially at each node. Appends (leaf, hits) pairs with hits > 0
  /// in increasing leaf order. Requires total() > 0 when count > 0.
  void split_count(std::uint64_t count, RandomStream& rng,
                   std::vector<std::pair<std::size_t, std::uint64_t>>& out) const;

  /// Product of branch ratios along the root-to-leaf path.
  [[nodiscard]] double descent_probability(std::size_t leaf) const;

  /// True when each internal node matches the sum of its children within
  /// `relative_tolerance` (0 demands exact equality).
  [[nodiscard]] bool sums_consistent(double relative_tolerance) const;

 private:
  std::size_t size_ = 0;
  std::size_t capacity_ = 0;
  std::vector<double> nodes_;
};

}  // namespace lrsdp
