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
#include <memory>
#include <span>
#include <vector>

#include "lrsdp/random.hpp"
#include "lrsdp/sampling_store.hpp"
#include "lrsdp/smalldense.hpp"
#include "lrsdp/sum_tree.hpp"

namespace lrsdp {

/// One distinct summand of a MatrixSum: `multiplicity` copies of
/// sign * matrix. Negation and repetition leave every sampling
/// distribution of the stored matrix unchanged.
struct SumTerm {
  std::shared_ptr<const SampledMatrix> matrix;
  int sign = 1;
  std::size_t multiplicity = 1;
};

/// A = A_1 + ... + A_tau with each A_l a (possibly negated) stored matrix.
/// Equal summands are grouped into one SumTerm; tau counts multiplicity.
class MatrixSum {
 public:
  MatrixSum(std::vector<SumTerm> terms, std::size_t rank_bound);
  /// One term per matrix, multiplicity 1, sign +1.
  static MatrixSum of(const std::vector<std::shared_ptr<const SampledMatrix>>& summands,
                      std::size_t rank_bound);

  [[nodiscard]] std::size_t dim() const { return n_; }
  [[nodiscard]] std::size_t tau() const { return tau_; }
  [[nodiscard]] std::size_t rank_bound() const { return rank_bound_; }
  [[nodiscard]] std::size_t distinct() const { return terms_.size(); }
  [[nodiscard]] const SumTerm& term(std::size_t k) const { return terms_[k]; }

  /// Sum over l of |A_l|_F^2 (multiplicity counted).
  [[nodiscard]] double frobenius_mass() const { return term_tree_.total(); }
  /// Sum over l of |A_l(i, .)|^2.
  [[nodiscard]] double row_mass(std::size_t i) const;
  /// A(i, j) = sum over l of A_l(i, j).
  [[nodiscard]] Complex query(std::size_t i, std::size_t j) const;

  /// P_i = row_mass(i) / frobenius_mass().
  [[nodiscard]] double row_probability(std::size_t i) const;
  /// Q_{j|i} = sum_l |A_l(i, j)|^2 / row_mass(i).
  [[nodiscard]] double column_probability(std::size_t i, std::size_t j) const;

  /// Summand l with probability |A_l|_F^2 / frobenius_mass(); returns the term.
  [[nodiscard]] std::size_t sample_term(RandomStream& rng) const;
  /// Procedure for rows: term by Frobenius mass, then a row of that term.
  [[nodiscard]] std::size_t sample_row(RandomStream& rng) const;
  /// Column draw from Q_{.|i}: term by row mass, then an entry in the row.
  [[nodiscard]] std::size_t sample_column(std::size_t i, RandomStream& rng) const;

 private:
  std::vector<SumTerm> terms_;
  std::size_t n_ = 0;
  std::size_t tau_ = 0;
  std::size_t rank_bound_ = 1;
  SumTree term_tree_;
};

struct SketchParams {
  std::size_t p = 1;
  double gamma = 1e-4;

  /// p = ceil(50 tau^2 r^2 / eps^2) clipped to `p_cap`, gamma = eps^2 / (30 tau^2 r^2).
  static SketchParams scaled(std::size_t tau, std::size_t r, double epsilon,
                             std::size_t p_cap = kMaxSketchSize);
  /// p = 2e20 tau^12 r^19 / eps^6 and gamma = eps^2 / (3e6 tau^2 r^6) as
  /// reals, before rounding p up.
  static double paper_p(std::size_t tau, std::size_t r, double epsilon);
  static double paper_gamma(std::size_t tau, std::size_t r, double epsilon);
  /// The paper-size parameters; ConfigError when p exceeds kMaxSketchSize.
  static SketchParams paper(std::size_t tau, std::size_t r, double epsilon);

  static constexpr std::size_t kMaxSketchSize = 10000;
};

struct RowSample {
  std::vector<std::size_t> rows;
  std::vector<double> probabilities;
};

RowSample sample_rows(const MatrixSum& ms, std::size_t p, RandomStream& rng);

/// p column draws, each from Q_{.|i_t} for a uniformly chosen t.
std::vector<std::size_t> sample_cols(const MatrixSum& ms, std::span<const std::size_t> rows,
                                     std::size_t p, RandomStream& rng);

/// P'_j = (1/p) sum_s Q_{j|i_s}, evaluated exactly.
double column_mixture_probability(const MatrixSum& ms, std::span<const std::size_t> rows,
                                  std::size_t j);

/// Succinct description of the approximate singular vectors V of A:
/// V(., k) = S^dagger u_k / sigma_k with S(t, .) = A(i_t, .) / sqrt(p P_{i_t}).
struct VDescription {
  std::shared_ptr<const MatrixSum> sum;
  std::vector<std::size_t> rows;
  std::vector<double> probabilities;
  std::vector<double> sigma;  // retained singular values, descending
  DenseMatrix u;              // p x rank(), column k is u_k

  /// Column sample and W are kept for inspection; V does not depend on them.
  std::vector<std::size_t> columns;
  std::vector<double> column_probabilities;

  [[nodiscard]] std::size_t dim() const { return sum ? sum->dim() : 0; }
  [[nodiscard]] std::size_t p() const { return rows.size(); }
  [[nodiscard]] std::size_t rank() const { return sigma.size(); }
};

/// W(s, t) = A(i_s, j_t) / (sqrt(p P_{i_s}) sqrt(p P'_{j_t})) together with
/// sum_l |W_l|_F^2.
struct ColumnSketch {
  DenseMatrix w;
  double summand_mass = 0.0;
};
ColumnSketch column_sketch(const MatrixSum& ms, std::span<const std::size_t> rows,
                           std::span<const double> row_probabilities,
                           std::span<const std::size_t> cols,
                           std::span<const double> col_probabilities);

/// Builds V's description. Singular values with sigma^2 < gamma sum_l |W_l|_F^2
/// are dropped; EmptySketchError when none survive.
VDescription build_sketch(std::shared_ptr<const MatrixSum> ms, const SketchParams& params,
                          RandomStream& rng);

/// V(l, k) = sum_s conj(A(i_s, l)) u_k(s) / (sqrt(p P_{i_s}) sigma_k).
Complex query_v_entry(const VDescription& v, std::size_t l, std::size_t k);
/// Row l of V, all rank() columns at once (one pass over the sampled rows).
void v_row(const VDescription& v, std::size_t l, std::span<Complex> out);

}  // namespace lrsdp
