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

// Planted feasibility and shadow instances with dense verification.

#include <algorithm>
#include <limits>
#include <vector>

#include "fixtures.hpp"
#include "lrsdp/dense_oracle.hpp"
#include "lrsdp/solver.hpp"

namespace lrsdp::fixtures {

struct PlantedInstance {
  FeasibilityProblem problem;
  std::vector<DenseMatrix> dense;  // constraint matrices before any sign
  DenseMatrix planted;             // a state meeting every constraint exactly
};

/// m rank-r constraints with eigenvalues in [-1, 1] and bounds
/// a_i = Tr[A_i X*] for X* = exp(-kappa sum A_i) / Tr.
inline PlantedInstance planted_feasible(std::size_t n, std::size_t m, std::size_t r, double epsilon,
                                        double kappa, RandomStream& rng) {
  PlantedInstance out;
  out.problem.n = n;
  out.problem.epsilon = epsilon;
  const auto ni = static_cast<Eigen::Index>(n);
  DenseMatrix h = DenseMatrix::Zero(ni, ni);
  for (std::size_t i = 0; i < m; ++i) {
    out.dense.push_back(low_rank(n, r, rng));
    h += out.dense.back();
  }
  out.planted = dense_gibbs(h, kappa);
  for (const auto& a : out.dense) {
    out.problem.constraints.push_back({shared_store(a, r), 1, real_trace_product(a, out.planted)});
  }
  return out;
}

/// m observables 0 <= E_i <= I of rank r, values p_i = Tr[E_i rho] for a
/// planted rho = exp(-kappa sum s_i E_i) / Tr with s_i uniform in [-1, 1].
inline PlantedInstance planted_shadow(std::size_t n, std::size_t m, std::size_t r, double epsilon,
                                      double kappa, RandomStream& rng) {
  PlantedInstance out;
  const auto ni = static_cast<Eigen::Index>(n);
  DenseMatrix h = DenseMatrix::Zero(ni, ni);
  std::vector<std::shared_ptr<const SampledMatrix>> stores;
  for (std::size_t i = 0; i < m; ++i) {
    out.dense.push_back(low_rank(n, r, rng, 0.0, 1.0));
    stores.push_back(shared_store(out.dense.back(), r));
    h += (2.0 * rng.uniform() - 1.0) * out.dense.back();
  }
  out.planted = dense_gibbs(h, kappa);
  std::vector<double> values;
  for (const auto& e : out.dense) values.push_back(real_trace_product(e, out.planted));
  out.problem = shadow_to_feasibility(stores, values, epsilon);
  return out;
}

/// max over constraints of sign Tr[A X] - bound.
inline double worst_excess(const FeasibilityProblem& problem, const DenseMatrix& x) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& c : problem.constraints) {
    const double value = c.sign * real_trace_product(dense_matrix(*c.matrix), x);
    worst = std::max(worst, value - c.bound);
  }
  return worst;
}

}  // namespace lrsdp::fixtures
