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

#include "lrsdp/sampling_store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "lrsdp/error.hpp"

namespace lrsdp {

namespace {

std::string position(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i + 1) + ", " + std::to_string(j + 1) + ")";
}

}  // namespace

SampledMatrix SampledMatrix::build(std::span<const MatrixEntry> entries, std::size_t n,
                                   std::size_t rank_hint) {
  if (n == 0) throw ShapeError("matrix dimension must be positive");
  if (rank_hint == 0) throw ShapeError("rank hint must be positive");

  // Canonical upper-triangle map; lower-triangle input only confirms it.
  std::map<std::pair<std::size_t, std::size_t>, Complex> upper;
  std::map<std::pair<std::size_t, std::size_t>, Complex> lower;
  for (const auto& e : entries) {
    if (e.row >= n || e.col >= n) {
      throw IndexError("entry " + position(e.row, e.col) + " outside a " + std::to_string(n) +
                       "x" + std::to_string(n) + " matrix");
    }
    if (!std::isfinite(e.value.real()) || !std::isfinite(e.value.imag())) {
      throw ParseError("entry " + position(e.row, e.col) + " is not finite");
    }
    auto& target = e.row <= e.col ? upper : lower;
    const auto key = std::make_pair(e.row, e.col);
    if (!target.emplace(key, e.value).second) {
      throw DuplicateEntryError("duplicate entry " + position(e.row, e.col));
    }
  }
  for (const auto& [key, value] : lower) {
    const auto mirror = std::make_pair(key.second, key.first);
    auto it = upper.find(mirror);
    if (it == upper.end()) {
      upper.emplace(mirror, std::conj(value));
    } else if (std::abs(it->second - std::conj(value)) > kHermitianTolerance) {
      throw HermiticityError("entries " + position(key.first, key.second) + " and " +
                             position(key.second, key.first) + " are not conjugates");
    }
  }

  SampledMatrix m;
  m.n_ = n;
  m.rank_hint_ = rank_hint;
  m.row_slot_.assign(n, kNoRow);

  std::vector<std::vector<std::pair<std::size_t, Complex>>> by_row(n);
  for (auto [key, value] : upper) {
    const auto [i, j] = key;
    if (i == j) {
      if (std::abs(value.imag()) > kHermitianTolerance) {
        throw HermiticityError("diagonal entry " + position(i, i) + " has imaginary part " +
                               std::to_string(value.imag()));
      }
      value = Complex(value.real(), 0.0);
    }
    if (value == Complex(0.0, 0.0)) continue;
    by_row[i].emplace_back(j, value);
    if (i != j) by_row[j].emplace_back(i, std::conj(value));
  }

  std::vector<double> row_mass(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& items = by_row[i];
    if (items.empty()) continue;
    std::sort(items.begin(), items.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Row row;
    row.cols.reserve(items.size());
    row.values.reserve(items.size());
    for (const auto& [j, v] : items) {
      row.cols.push_back(j);
      row.values.push_back(v);
    }
    m.rebuild_row(row);
    row_mass[i] = row.tree.total();
    m.row_slot_[i] = static_cast<std::uint32_t>(m.rows_.size());
    m.rows_.push_back(std::move(row));
  }
  m.norm_tree_ = SumTree(row_mass);
  return m;
}

void SampledMatrix::rebuild_row(Row& row) {
  std::vector<double> weights(row.values.size());
  for (std::size_t k = 0; k < weights.size(); ++k) weights[k] = std::norm(row.values[k]);
  row.tree = SumTree(weights);
}

std::size_t SampledMatrix::nnz() const {
  std::size_t count = 0;
  for (const auto& row : rows_) count += row.cols.size();
  return count;
}

void SampledMatrix::check_index(std::size_t i, const char* what) const {
  if (i >= n_) {
    throw IndexError(std::string(what) + " index " + std::to_string(i + 1) + " outside [1, " +
                     std::to_string(n_) + "]");
  }
}

const SampledMatrix::Row* SampledMatrix::find_row(std::size_t i) const {
  const auto slot = row_slot_[i];
  return slot == kNoRow ? nullptr : &rows_[slot];
}

Complex SampledMatrix::query(std::size_t i, std::size_t j) const {
  check_index(i, "row");
  check_index(j, "column");
  const Row* row = find_row(i);
  detail::touch_nodes(1);
  if (row == nullptr) return {};
  // Binary search over the sorted columns; each probe counts as a node.
  std::size_t lo = 0;
  std::size_t hi = row->cols.size();
  std::size_t probes = 0;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    ++probes;
    if (row->cols[mid] < j) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  detail::touch_nodes(probes);
  if (lo < row->cols.size() && row->cols[lo] == j) return row->values[lo];
  return {};
}

std::size_t SampledMatrix::sample_row(RandomStream& rng) const {
  if (!(norm_tree_.total() > 0.0)) throw ZeroMassError("cannot sample a row of the zero matrix");
  return norm_tree_.sample(rng.uniform());
}

std::size_t SampledMatrix::sample_entry_in_row(std::size_t i, RandomStream& rng) const {
  check_index(i, "row");
  const Row* row = find_row(i);
  if (row == nullptr || !(row->tree.total() > 0.0)) {
    throw ZeroMassError("row " + std::to_string(i + 1) + " has zero norm");
  }
  return row->cols[row->tree.sample(rng.uniform())];
}

SampledEntry SampledMatrix::sample_entry(RandomStream& rng) const {
  const std::size_t i = sample_row(rng);
  const Row& row = rows_[row_slot_[i]];
  const std::size_t leaf = row.tree.sample(rng.uniform());
  return {i, row.cols[leaf], row.values[leaf]};
}

void SampledMatrix::sample_tally(std::uint64_t count, RandomStream& rng,
                                 std::vector<std::pair<SampledEntry, std::uint64_t>>& out) const {
  if (count == 0) return;
  if (!(norm_tree_.total() > 0.0)) throw ZeroMassError("cannot sample entries of a zero matrix");
  std::vector<std::pair<std::size_t, std::uint64_t>> row_hits;
  std::vector<std::pair<std::size_t, std::uint64_t>> leaf_hits;
  norm_tree_.split_count(count, rng, row_hits);
  for (const auto& [i, hits] : row_hits) {
    const Row& row = rows_[row_slot_[i]];
    leaf_hits.clear();
    row.tree.split_count(hits, rng, leaf_hits);
    for (const auto& [leaf, k] : leaf_hits) {
      out.push_back({SampledEntry{i, row.cols[leaf], row.values[leaf]}, k});
    }
  }
}

double SampledMatrix::row_norm_squared(std::size_t i) const {
  check_index(i, "row");
  detail::touch_nodes(1);
  const Row* row = find_row(i);
  return row == nullptr ? 0.0 : row->tree.total();
}

double SampledMatrix::row_norm(std::size_t i) const { return std::sqrt(row_norm_squared(i)); }

std::span<const std::size_t> SampledMatrix::row_columns(std::size_t i) const {
  check_index(i, "row");
  const Row* row = find_row(i);
  if (row == nullptr) return {};
  return row->cols;
}

double SampledMatrix::frobenius_norm() const {
  detail::touch_nodes(1);
  return std::sqrt(norm_tree_.total());
}

double SampledMatrix::row_probability(std::size_t i) const {
  check_index(i, "row");
  return norm_tree_.descent_probability(i);
}

double SampledMatrix::entry_probability(std::size_t i, std::size_t j) const {
  check_index(i, "row");
  check_index(j, "column");
  const Row* row = find_row(i);
  if (row == nullptr) return 0.0;
  const auto it = std::lower_bound(row->cols.begin(), row->cols.end(), j);
  if (it == row->cols.end() || *it != j) return 0.0;
  return row->tree.descent_probability(static_cast<std::size_t>(it - row->cols.begin()));
}

void SampledMatrix::set_single(std::size_t i, std::size_t j, Complex value) {
  auto slot = row_slot_[i];
  if (slot == kNoRow) {
    if (value == Complex(0.0, 0.0)) return;
    slot = static_cast<std::uint32_t>(rows_.size());
    row_slot_[i] = slot;
    rows_.push_back(Row{});
  }
  Row& row = rows_[slot];
  const auto it = std::lower_bound(row.cols.begin(), row.cols.end(), j);
  const auto k = static_cast<std::size_t>(it - row.cols.begin());
  if (it != row.cols.end() && *it == j) {
    row.values[k] = value;
    row.tree.update(k, std::norm(value));
  } else {
    if (value == Complex(0.0, 0.0)) return;
    row.cols.insert(it, j);
    row.values.insert(row.values.begin() + static_cast<std::ptrdiff_t>(k), value);
    rebuild_row(row);
  }
  norm_tree_.update(i, row.tree.total());
}

void SampledMatrix::write(std::size_t i, std::size_t j, Complex value) {
  check_index(i, "row");
  check_index(j, "column");
  if (i == j) {
    if (std::abs(value.imag()) > kHermitianTolerance) {
      throw HermiticityError("diagonal entry " + position(i, i) + " must be real");
    }
    set_single(i, i, Complex(value.real(), 0.0));
    return;
  }
  set_single(i, j, value);
  set_single(j, i, std::conj(value));
}

void SampledMatrix::rebuild() {
  std::vector<double> row_mass(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const auto slot = row_slot_[i];
    if (slot == kNoRow) continue;
    rebuild_row(rows_[slot]);
    row_mass[i] = rows_[slot].tree.total();
  }
  norm_tree_ = SumTree(row_mass);
}

std::vector<MatrixEntry> SampledMatrix::stored_entries() const {
  std::vector<MatrixEntry> out;
  out.reserve(nnz());
  for (std::size_t i = 0; i < n_; ++i) {
    const Row* row = find_row(i);
    if (row == nullptr) continue;
    for (std::size_t k = 0; k < row->cols.size(); ++k) {
      out.push_back({i, row->cols[k], row->values[k]});
    }
  }
  return out;
}

std::size_t SampledMatrix::tree_depth() const {
  std::size_t depth = norm_tree_.depth();
  for (const auto& row : rows_) depth = std::max(depth, row.tree.depth());
  return depth;
}

bool SampledMatrix::trees_consistent(double relative_tolerance) const {
  if (!norm_tree_.sums_consistent(relative_tolerance)) return false;
  for (std::size_t i = 0; i < n_; ++i) {
    const Row* row = find_row(i);
    const double mass = row == nullptr ? 0.0 : row->tree.total();
    if (row != nullptr && !row->tree.sums_consistent(relative_tolerance)) return false;
    const double stored = norm_tree_.weight(i);
    if (std::abs(stored - mass) > relative_tolerance * std::max(mass, 1e-300)) return false;
  }
  return true;
}

SampledMatrix parse_matrix(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t n = 0;
  std::size_t rank = 0;
  bool have_header = false;
  std::vector<MatrixEntry> entries;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    const auto fail = [&](const std::string& why) {
      throw ParseError("matrix line " + std::to_string(line_no) + ": " + why);
    };
    if (!have_header) {
      std::string rank_kw;
      long long dim = 0;
      long long r = 0;
      if (first != "n" || !(fields >> dim >> rank_kw >> r) || rank_kw != "rank" || dim <= 0 ||
          r <= 0) {
        fail("expected header 'n <dim> rank <r>'");
      }
      std::string extra;
      if (fields >> extra) fail("trailing text after header");
      n = static_cast<std::size_t>(dim);
      rank = static_cast<std::size_t>(r);
      have_header = true;
      continue;
    }
    long long i = 0;
    long long j = 0;
    double re = 0.0;
    double im = 0.0;
    std::istringstream row_fields(line);
    if (!(row_fields >> i >> j >> re >> im)) fail("expected 'i j re im'");
    std::string extra;
    if (row_fields >> extra) fail("trailing text after entry");
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > n || static_cast<std::size_t>(j) > n) {
      throw IndexError("matrix line " + std::to_string(line_no) + ": index out of range");
    }
    if (i > j) fail("only the upper triangle (i <= j) may be listed");
    entries.push_back({static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1), {re, im}});
  }
  if (!have_header) throw ParseError("matrix text has no header");
  return SampledMatrix::build(entries, n, rank);
}

SampledMatrix load_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file " + path.string());
  try {
    return parse_matrix(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_matrix(std::ostream& out, const SampledMatrix& matrix) {
  out << "n " << matrix.dim() << " rank " << matrix.rank_hint() << '\n';
  char buffer[128];
  for (const auto& e : matrix.stored_entries()) {
    if (e.row > e.col) continue;
    std::snprintf(buffer, sizeof(buffer), "%zu %zu %.17g %.17g\n", e.row + 1, e.col + 1,
                  e.value.real(), e.value.imag());
    out << buffer;
  }
}

}  // namespace lrsdp
