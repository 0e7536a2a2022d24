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
#include <string_view>
#include <vector>

#include "lrsdp/random.hpp"
#include "lrsdp/sampling_store.hpp"
#include "lrsdp/sketch.hpp"
#include "lrsdp/symmetric_approx.hpp"
#include "lrsdp/trace_estimator.hpp"

namespace lrsdp {

/// How the surrogate exponential is extended to all of C^n.
///
/// Subspace: rho = X e^{-beta D} X^dagger / sum_k e^{-beta D_k}, with X = V U.
/// The state lives on the span of V only.
///
/// Full: rho = exp(-beta X D X^dagger) / Tr, treating the complement of the
/// span as eigenvalue 0. Written out,
///     rho = [I + X (e^{-beta D} - 1) X^dagger] / (sum_k e^{-beta D_k} + n - rank),
/// which is the normalized Gibbs state of the surrogate when X is an isometry.
enum class GibbsCompletion { Subspace, Full };

std::string_view to_string(GibbsCompletion c);
GibbsCompletion parse_completion(std::string_view text);

class GibbsDescription {
 public:
  /// rho = I / n.
  static GibbsDescription uniform(std::size_t n);
  static GibbsDescription make(std::shared_ptr<const VDescription> v, SpectralSurrogate s,
                               double beta, GibbsCompletion completion = GibbsCompletion::Full);

  [[nodiscard]] bool uniform_fallback() const { return !v_; }
  [[nodiscard]] std::size_t dim() const { return n_; }
  [[nodiscard]] std::size_t rank() const { return coefficients_.size(); }
  [[nodiscard]] double beta() const { return beta_; }
  [[nodiscard]] GibbsCompletion completion() const { return completion_; }
  [[nodiscard]] const std::shared_ptr<const VDescription>& v() const { return v_; }
  [[nodiscard]] const SpectralSurrogate& surrogate() const { return s_; }

  /// eta = sum_k e^{-beta D_k} = eta_mantissa() * exp(eta_log_scale()).
  [[nodiscard]] double eta() const;
  [[nodiscard]] double eta_mantissa() const { return eta_mantissa_; }
  [[nodiscard]] double eta_log_scale() const { return eta_log_scale_; }

  /// rho(l, j) = [c0 delta_lj + sum_k X(l,k) f_k conj(X(j,k))] / N.
  [[nodiscard]] const std::vector<double>& coefficients() const { return coefficients_; }
  [[nodiscard]] double identity_weight() const { return identity_weight_; }
  [[nodiscard]] double normalizer() const { return normalizer_; }

  /// Declared upper bound on |rho|_F, assuming |V| <= kIsometrySlack.
  [[nodiscard]] double frobenius_bound() const;

  /// Row l of X = V U.
  void vu_row(std::size_t l, std::span<Complex> out) const;
  /// rho(l, j) from precomputed rows of X. Swapping the arguments gives the
  /// exact complex conjugate.
  [[nodiscard]] Complex entry_from_rows(std::span<const Complex> xl, std::span<const Complex> xj,
                                        bool diagonal) const;
  [[nodiscard]] Complex entry(std::size_t l, std::size_t j) const;

  /// rho as a query operator; each worker's oracle caches rows of X.
  [[nodiscard]] QueryableOperator as_operator() const;

 private:
  std::size_t n_ = 0;
  double beta_ = 0.0;
  GibbsCompletion completion_ = GibbsCompletion::Full;
  std::shared_ptr<const VDescription> v_;
  SpectralSurrogate s_;
  std::vector<double> coefficients_;
  double identity_weight_ = 1.0;
  double normalizer_ = 1.0;
  double eta_mantissa_ = 0.0;
  double eta_log_scale_ = 0.0;
};

/// rho(l, j), 0-based.
Complex query_solution_entry(const GibbsDescription& g, std::size_t l, std::size_t j);

/// Estimates sign * Tr[A rho] to additive error epsilon with probability
/// 1 - delta. For a sketched state the estimator runs at precision
/// `precision_fraction * epsilon`, leaving the rest of the budget for the
/// sketch error; the uniform state is estimated at epsilon directly.
double estimate_constraint_trace(const GibbsDescription& g, const SampledMatrix& a,
                                 double epsilon, double delta, RandomStream& rng,
                                 std::size_t threads = 1, int sign = 1,
                                 double precision_fraction = 0.2);

}  // namespace lrsdp
