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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "lrsdp/random.hpp"
#include "lrsdp/sum_tree.hpp"

namespace lrsdp {

using Complex = std::complex<double>;

/// One (row, column, value) triple; indices are 0-based.
struct MatrixEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  Complex value;
};

/// Result of an l2 entry draw: row ~ |M(i,.)|^2 / |M|_F^2, then
/// column ~ |M(i,j)|^2 / |M(i,.)|^2.
struct SampledEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  Complex value;
};

/// Hermitian n x n matrix held in the two-level tree layout that gives
/// O(log n) l2 sampling, entry queries and norm queries.
///
/// Each nonempty row owns a SumTree over |M(i,j)|^2 of its stored entries
/// (columns kept sorted so an entry query is a binary search). A second
/// SumTree over the squared row norms serves row sampling; its root is
/// |M|_F^2.
///
/// Immutable use (sampling, query, norms) is safe from any number of threads.
/// write() and rebuild() need exclusive access.
class SampledMatrix {
 public:
  static constexpr double kHermitianTolerance = 1e-12;

  SampledMatrix() = default;

  /// Builds the store from upper-triangle entries (i <= j). Each off-diagonal
  /// entry is mirrored by conjugation. A lower-triangle entry is accepted
  /// only as a mirror of its partner; a conflicting pair raises
  /// HermiticityError, as does a diagonal with |Im| > 1e-12.
  static SampledMatrix build(std::span<const MatrixEntry> entries, std::size_t n,
                             std::size_t rank_hint);

  [[nodiscard]] std::size_t dim() const { return n_; }
  [[nodiscard]] std::size_t rank_hint() const { return rank_hint_; }
  /// Number of stored entries across both triangles.
  [[nodiscard]] std::size_t nnz() const;

  [[nodiscard]] Complex query(std::size_t i, std::size_t j) const;

  [[nodiscard]] std::size_t sample_row(RandomStream& rng) const;
  [[nodiscard]] std::size_t sample_entry_in_row(std::size_t i, RandomStream& rng) const;
  /// Row draw followed by an in-row draw, returning the entry value too.
  [[nodiscard]] SampledEntry sample_entry(RandomStream& rng) const;

  /// Tally of `count` independent sample_entry() draws: appends each drawn
  /// entry once with its hit count, in row-major order.
  void sample_tally(std::uint64_t count, RandomStream& rng,
                    std::vector<std::pair<SampledEntry, std::uint64_t>>& out) const;

  [[nodiscard]] double row_norm_squared(std::size_t i) const;
  [[nodiscard]] double row_norm(std::size_t i) const;
  [[nodiscard]] double frobenius_norm_squared() const { return norm_tree_.total(); }
  [[nodiscard]] double frobenius_norm() const;

  /// Probability of row i under sample_row, computed as the product of
  /// branch ratios along the norm-tree path.
  [[nodiscard]] double row_probability(std::size_t i) const;
  /// Probability of column j under sample_entry_in_row(i), via the row tree.
  [[nodiscard]] double entry_probability(std::size_t i, std::size_t j) const;

  /// Sets M(i,j) and M(j,i) = conj(value), touching only leaf-to-root paths
  /// when the entry already exists. A new entry rebuilds its row tree.
  void write(std::size_t i, std::size_t j, Complex value);
  /// Recomputes every internal node from the leaves.
  void rebuild();

  /// Columns of the stored entries of row i, in storage order.
  [[nodiscard]] std::span<const std::size_t> row_columns(std::size_t i) const;

  /// All stored entries, both triangles, row-major order.
  [[nodiscard]] std::vector<MatrixEntry> stored_entries() const;

  /// Levels of the deepest tree (norm tree or any row tree).
  [[nodiscard]] std::size_t tree_depth() const;
  [[nodiscard]] bool trees_consistent(double relative_tolerance) const;

 private:
  struct Row {
    std::vector<std::size_t> cols;
    std::vector<Complex> values;
    SumTree tree;
  };

  static constexpr std::uint32_t kNoRow = 0xffffffffu;

  void check_index(std::size_t i, const char* what) const;
  [[nodiscard]] const Row* find_row(std::size_t i) const;
  void set_single(std::size_t i, std::size_t j, Complex value);
  void rebuild_row(Row& row);

  std::size_t n_ = 0;
  std::size_t rank_hint_ = 1;
  std::vector<std::uint32_t> row_slot_;
  std::vector<Row> rows_;
  SumTree norm_tree_;
};

/// Parses the text matrix format:
///
///     n <dim> rank <r>
///     <i> <j> <re> <im>      (1-based, upper triangle, '#' starts a comment)
SampledMatrix parse_matrix(std::istream& in);
SampledMatrix load_matrix_file(const std::filesystem::path& path);
/// Writes the upper triangle in the text format with 17 significant digits.
void write_matrix(std::ostream& out, const SampledMatrix& matrix);

}  // namespace lrsdp
