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

#include "lrsdp/random.hpp"
#include "lrsdp/sketch.hpp"
#include "lrsdp/smalldense.hpp"

namespace lrsdp {

/// (U, D) with U unitary and D real descending, so that
/// (V U) diag(D) (V U)^dagger approximates A.
struct SpectralSurrogate {
  DenseMatrix u;
  RealVector d;

  [[nodiscard]] std::size_t rank() const { return static_cast<std::size_t>(d.size()); }
};

/// Assumed bound on the spectral norm of V (and of V U). Must satisfy
/// kIsometrySlack^2 <= 2.
inline constexpr double kIsometrySlack = 1.25;

/// epsilon / (400 r^2).
double default_vav_precision(double epsilon, std::size_t rank_bound);

/// Estimates V^dagger A V to Frobenius error eps_s with probability at least
/// 1 - delta. Each distinct summand's entries are estimated to error
/// eps_s / (rank tau); only the upper triangle is sampled, then mirrored and
/// symmetrized.
DenseMatrix estimate_vav(const VDescription& v, double eps_s, double delta, RandomStream& rng,
                         std::size_t threads = 1);

/// Eigendecomposition of the Hermitian estimate.
SpectralSurrogate decompose(const DenseMatrix& b);

}  // namespace lrsdp
