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

#include "lrsdp/sum_tree.hpp"

#include <bit>
#include <cmath>
#include <random>

#include "lrsdp/error.hpp"

namespace lrsdp {

namespace {
thread_local std::size_t g_nodes_touched = 0;

// Counts up to this size are split by direct Bernoulli trials, which is
// cheaper than setting up a binomial distribution.
constexpr std::uint64_t kDirectSplit = 64;
}  // namespace

std::size_t nodes_touched() { return g_nodes_touched; }
void reset_nodes_touched() { g_nodes_touched = 0; }

namespace detail {
void touch_nodes(std::size_t count) { g_nodes_touched += count; }
}  // namespace detail

SumTree::SumTree(std::span<const double> weights) : size_(weights.size()) {
  capacity_ = std::bit_ceil(std::max<std::size_t>(size_, 1));
  nodes_.assign(2 * capacity_, 0.0);
  for (std::size_t k = 0; k < size_; ++k) {
    if (!(weights[k] >= 0.0) || !std::isfinite(weights[k])) {
      throw InternalError("SumTree: weights must be finite and nonnegative");
    }
    nodes_[capacity_ + k] = weights[k];
  }
  rebuild();
}

std::size_t SumTree::depth() const {
  return capacity_ == 0 ? 0 : static_cast<std::size_t>(std::countr_zero(capacity_)) + 1;
}

void SumTree::update(std::size_t leaf, double weight) {
  if (leaf >= size_) throw IndexError("SumTree::update: leaf out of range");
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    throw InternalError("SumTree: weights must be finite and nonnegative");
  }
  std::size_t node = capacity_ + leaf;
  nodes_[node] = weight;
  for (node /= 2; node >= 1; node /= 2) {
    nodes_[node] = nodes_[2 * node] + nodes_[2 * node + 1];
  }
}

void SumTree::rebuild() {
  for (std::size_t node = capacity_ - 1; node >= 1; --node) {
    nodes_[node] = nodes_[2 * node] + nodes_[2 * node + 1];
  }
}

std::size_t SumTree::sample(double u) const {
  double target = u * nodes_[1];
  std::size_t node = 1;
  std::size_t visited = 1;
  while (node < capacity_) {
    const double left = nodes_[2 * node];
    const double right = nodes_[2 * node + 1];
    // Rounding in `target -= left` can push the remainder past a subtree's
    // mass; the zero checks keep the walk on positive-weight leaves.
    const bool go_left = (target < left && left > 0.0) || right <= 0.0;
    target -= go_left ? 0.0 : left;
    node = 2 * node + (go_left ? 0 : 1);
    ++visited;
  }
  detail::touch_nodes(visited);
  return node - capacity_;
}

void SumTree::split_count(std::uint64_t count, RandomStream& rng,
                          std::vector<std::pair<std::size_t, std::uint64_t>>& out) const {
  if (count == 0) return;
  if (!(total() > 0.0)) throw InternalError("SumTree::split_count on an empty tree");
  // Depth-first, left child first, so leaves come out in increasing order.
  std::vector<std::pair<std::size_t, std::uint64_t>> stack{{1, count}};
  while (!stack.empty()) {
    auto [node, hits] = stack.back();
    stack.pop_back();
    while (node < capacity_) {
      const double left = nodes_[2 * node];
      const double right = nodes_[2 * node + 1];
      std::uint64_t go_left = hits;
      if (right <= 0.0) {
        go_left = hits;
      } else if (left <= 0.0) {
        go_left = 0;
      } else if (hits <= kDirectSplit) {
        const double p_left = left / (left + right);
        go_left = 0;
        for (std::uint64_t k = 0; k < hits; ++k) go_left += rng.uniform() < p_left ? 1 : 0;
      } else {
        std::binomial_distribution<std::uint64_t> split(hits, left / (left + right));
        go_left = split(rng);
      }
      if (go_left == 0) {
        node = 2 * node + 1;
      } else {
        if (go_left < hits) stack.push_back({2 * node + 1, hits - go_left});
        node = 2 * node;
        hits = go_left;
      }
    }
    out.emplace_back(node - capacity_, hits);
  }
}

double SumTree::descent_probability(std::size_t leaf) const {
  if (leaf >= size_) throw IndexError("SumTree::descent_probability: leaf out of range");
  double probability = 1.0;
  for (std::size_t node = capacity_ + leaf; node > 1; node /= 2) {
    const double parent = nodes_[node / 2];
    if (parent <= 0.0) return 0.0;
    probability *= nodes_[node] / parent;
  }
  return probability;
}

bool SumTree::sums_consistent(double relative_tolerance) const {
  for (std::size_t node = 1; node < capacity_; ++node) {
    const double expected = nodes_[2 * node] + nodes_[2 * node + 1];
    const double diff = std::abs(nodes_[node] - expected);
    if (relative_tolerance == 0.0 ? diff != 0.0
                                  : diff > relative_tolerance * std::max(std::abs(expected), 1e-300)) {
      return false;
    }
  }
  return true;
}

}  // namespace lrsdp
