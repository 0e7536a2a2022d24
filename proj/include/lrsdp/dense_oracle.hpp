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
#include <optional>
#include <vector>

#include "lrsdp/gibbs.hpp"
#include "lrsdp/sampling_store.hpp"
#include "lrsdp/sketch.hpp"
#include "lrsdp/smalldense.hpp"
#include "lrsdp/solver.hpp"

namespace lrsdp {

inline constexpr std::size_t kMaxRealizeDim = 512;
inline constexpr std::size_t kMaxMmwDim = 256;
inline constexpr std::size_t kMaxMmwConstraints = 16;

/// Dense copy of a stored matrix (n <= 512).
DenseMatrix dense_matrix(const SampledMatrix& m);
/// Entrywise sum of the summands (n <= 512).
DenseMatrix dense_realize(const MatrixSum& ms);
/// n x rank matrix V from its description.
DenseMatrix dense_v(const VDescription& v);
/// Every entry of a Gibbs description's state.
DenseMatrix dense_state(const GibbsDescription& g);

/// U e^{-beta D} U^dagger / sum_k e^{-beta D_k} for the eigendecomposition A = U D U^dagger.
DenseMatrix dense_gibbs(const DenseMatrix& a, double beta);

/// Square root of a positive semidefinite matrix (negative eigenvalues clipped to 0).
DenseMatrix psd_sqrt(const DenseMatrix& m);
/// Sum of singular values.
double trace_norm(const DenseMatrix& m);
/// Tr sqrt(sqrt(rho) sigma sqrt(rho)).
double fidelity(const DenseMatrix& rho, const DenseMatrix& sigma);
/// Re Tr[A B].
double real_trace_product(const DenseMatrix& a, const DenseMatrix& b);

struct DenseOutcome {
  Verdict verdict = Verdict::Infeasible;
  DenseMatrix witness;  // the accepted state when feasible
  std::size_t iterations_used = 0;
  std::size_t iteration_limit = 0;
  std::vector<Violation> violations;
};

/// Multiplicative weights with exact traces: start from I/n, pick the first j
/// with Tr[A_j rho] > a_j + threshold, set rho = exp(-beta sum A) / Tr.
/// threshold defaults to epsilon and beta to epsilon / 4.
DenseOutcome dense_mmw(const FeasibilityProblem& problem,
                       std::optional<std::size_t> max_iterations = std::nullopt,
                       double beta_scale = 0.25, std::optional<double> threshold = std::nullopt);

}  // namespace lrsdp
