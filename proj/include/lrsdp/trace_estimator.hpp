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
#include <functional>
#include <span>
#include <vector>

#include "lrsdp/random.hpp"
#include "lrsdp/sampling_store.hpp"
#include "lrsdp/smalldense.hpp"

namespace lrsdp {

/// Entry oracle (i, j) -> B(i, j), 0-based. An oracle instance is used by a
/// single thread and may cache freely.
using EntryOracle = std::function<Complex(std::size_t, std::size_t)>;

/// Query access to an n x n matrix B together with an upper bound on |B|_F.
struct QueryableOperator {
  std::size_t n = 0;
  double frobenius_bound = 0.0;
  /// True when B is Hermitian, so Tr[AB] is real for Hermitian A.
  bool hermitian = false;
  /// Creates a fresh oracle for one worker thread.
  std::function<EntryOracle()> make_oracle;

  /// Wraps a thread-safe function as an operator.
  static QueryableOperator from_function(std::size_t n, double frobenius_bound, bool hermitian,
                                         EntryOracle entry);
  /// scale * I_n.
  static QueryableOperator scaled_identity(std::size_t n, double scale);
  /// Dense matrix with its exact Frobenius norm as the bound.
  static QueryableOperator dense(DenseMatrix m);
};

struct EstimatorConfig {
  double epsilon = 0.1;  // additive error
  double delta = 0.01;   // failure probability
  std::size_t threads = 1;

  /// ceil(18 ln(1/delta)).
  static std::size_t batch_count(double delta);
  /// ceil(6 |A|_F^2 |B|_F^2 / epsilon^2).
  static std::size_t batch_size(double a_frobenius_sq, double b_frobenius_sq, double epsilon);
};

/// Upper limit on batches * batch_size for a single estimate.
inline constexpr double kMaxSamplesPerEstimate = 1e11;

/// Per-sample accumulator: adds one sample's contribution to each output.
using SampleKernel = std::function<void(RandomStream&, std::span<Complex>)>;

/// Median-of-means over `outputs` complex quantities. Batch b draws from
/// stream.split(b), so the result does not depend on `threads`. Real and
/// imaginary parts take separate medians.
std::vector<Complex> median_of_means(std::size_t outputs, std::size_t batches,
                                     std::size_t batch_size,
                                     const std::function<SampleKernel()>& make_kernel,
                                     const RandomStream& stream, std::size_t threads);

/// Adds `count` identical samples at entry e to the accumulators.
using TallyKernel = std::function<void(const SampledEntry& e, double count, std::span<Complex>)>;

/// median_of_means where every sample is an l2 draw of an entry of `a`. Each
/// batch draws the tally of its batch_size draws directly (binomial splits
/// down the sampling trees, see SampledMatrix::sample_tally) and calls the
/// kernel once per distinct entry. The batch means have the same
/// distribution as in the per-sample form.
std::vector<Complex> tallied_median_of_means(const SampledMatrix& a, std::size_t outputs,
                                             std::size_t batches, std::size_t batch_size,
                                             const std::function<TallyKernel()>& make_kernel,
                                             const RandomStream& stream, std::size_t threads);

/// Value of the single-sample estimator at the outcome (i, j):
/// B(j, i) |A|_F^2 / conj(A(i, j)). Requires A(i, j) != 0.
Complex trace_sample_value(const SampledMatrix& a, const EntryOracle& b, std::size_t i,
                           std::size_t j);

/// Estimates Tr[AB] to additive error cfg.epsilon with probability at least
/// 1 - cfg.delta, using l2 samples of A and entry queries of B. Advances
/// `rng` by one draw.
Complex estimate_trace_product(const SampledMatrix& a, const QueryableOperator& b,
                               const EstimatorConfig& cfg, RandomStream& rng);

}  // namespace lrsdp
