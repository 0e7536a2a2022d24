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

#include <Eigen/Dense>
#include <cstddef>

namespace lrsdp {

/// Complex dense matrix used for every small factorization (p x p sketches,
/// r x r surrogates) and by the dense reference code.
using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Largest dimension accepted by svd, eigh and qr.
inline constexpr std::size_t kMaxDenseDim = 10000;

struct SvdResult {
  DenseMatrix u;     // rows x k, orthonormal columns
  RealVector sigma;  // k = min(rows, cols), nonincreasing
  DenseMatrix v;     // cols x k, orthonormal columns
};

struct EighResult {
  DenseMatrix vectors;  // unitary, column k pairs with values(k)
  RealVector values;    // descending
};

struct QrResult {
  DenseMatrix q;  // rows x rows unitary
  DenseMatrix r;  // rows x cols upper triangular, real nonnegative diagonal
};

/// Thin SVD, singular values descending (ties keep the input order).
SvdResult svd(const DenseMatrix& m);

/// Spectral decomposition of a Hermitian matrix. Raises HermiticityError
/// when m deviates from m^dagger by more than `tolerance` in any entry.
EighResult eigh(const DenseMatrix& m, double tolerance = 1e-10);

QrResult qr(const DenseMatrix& m);

[[nodiscard]] bool is_hermitian(const DenseMatrix& m, double tolerance);
/// (m + m^dagger) / 2.
[[nodiscard]] DenseMatrix hermitian_part(const DenseMatrix& m);
/// Largest singular value.
[[nodiscard]] double spectral_norm(const DenseMatrix& m);

}  // namespace lrsdp
