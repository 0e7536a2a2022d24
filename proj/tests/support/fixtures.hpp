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

// Shared fixtures for the unit and acceptance suites.

#include <cmath>
#include <memory>
#include <vector>

#include "lrsdp/random.hpp"
#include "lrsdp/sampling_store.hpp"
#include "lrsdp/smalldense.hpp"

namespace lrsdp::fixtures {

inline DenseMatrix gaussian(std::size_t rows, std::size_t cols, RandomStream& rng) {
  DenseMatrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = Complex(rng.normal(), rng.normal());
  }
  return g;
}

/// n x k matrix with orthonormal columns, Haar-like.
inline DenseMatrix orthonormal_columns(std::size_t n, std::size_t k, RandomStream& rng) {
  return qr(gaussian(n, k, rng)).q.leftCols(static_cast<Eigen::Index>(k));
}

/// Q diag(values) Q^dagger with random orthonormal Q.
inline DenseMatrix with_spectrum(std::size_t n, const std::vector<double>& values,
                                 RandomStream& rng) {
  const DenseMatrix q = orthonormal_columns(n, values.size(), rng);
  RealVector d(static_cast<Eigen::Index>(values.size()));
  for (std::size_t k = 0; k < values.size(); ++k) d(static_cast<Eigen::Index>(k)) = values[k];
  return hermitian_part(q * d.asDiagonal() * q.adjoint());
}

/// Rank-r Hermitian matrix with eigenvalues uniform in [lo, hi].
inline DenseMatrix low_rank(std::size_t n, std::size_t r, RandomStream& rng, double lo = -1.0,
                            double hi = 1.0) {
  std::vector<double> values(r);
  for (auto& v : values) v = lo + (hi - lo) * rng.uniform();
  return with_spectrum(n, values, rng);
}

/// Rank-r Hermitian matrix whose eigenvalues have random signs and
/// magnitudes uniform in [min_abs, 1].
inline DenseMatrix signed_low_rank(std::size_t n, std::size_t r, RandomStream& rng,
                                   double min_abs = 0.5) {
  std::vector<double> values(r);
  for (auto& v : values) {
    v = min_abs + (1.0 - min_abs) * rng.uniform();
    if (rng.uniform() < 0.5) v = -v;
  }
  return with_spectrum(n, values, rng);
}

/// Hermitian matrix with `pairs` random off-diagonal entries and `diag`
/// random real diagonal entries (positions may repeat and merge).
inline DenseMatrix sparse_hermitian(std::size_t n, std::size_t pairs, std::size_t diag,
                                    RandomStream& rng) {
  const auto ni = static_cast<Eigen::Index>(n);
  DenseMatrix m = DenseMatrix::Zero(ni, ni);
  for (std::size_t k = 0; k < diag; ++k) {
    const auto i = static_cast<Eigen::Index>(rng.uniform_index(n));
    m(i, i) = Complex(rng.normal(), 0.0);
  }
  for (std::size_t k = 0; k < pairs; ++k) {
    auto i = static_cast<Eigen::Index>(rng.uniform_index(n));
    auto j = static_cast<Eigen::Index>(rng.uniform_index(n));
    if (i == j) j = (j + 1) % ni;
    const Complex v(rng.normal(), rng.normal());
    m(i, j) = v;
    m(j, i) = std::conj(v);
  }
  return m;
}

inline std::vector<MatrixEntry> upper_entries(const DenseMatrix& m) {
  std::vector<MatrixEntry> out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i; j < m.cols(); ++j) {
      if (m(i, j) != Complex(0.0, 0.0)) {
        out.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), m(i, j)});
      }
    }
  }
  return out;
}

inline SampledMatrix store(const DenseMatrix& m, std::size_t rank_hint = 1) {
  const auto entries = upper_entries(m);
  return SampledMatrix::build(entries, static_cast<std::size_t>(m.rows()), rank_hint);
}

inline std::shared_ptr<const SampledMatrix> shared_store(const DenseMatrix& m,
                                                         std::size_t rank_hint = 1) {
  return std::make_shared<const SampledMatrix>(store(m, rank_hint));
}

inline SampledMatrix diagonal(const std::vector<double>& values) {
  std::vector<MatrixEntry> entries;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != 0.0) entries.push_back({i, i, Complex(values[i], 0.0)});
  }
  return SampledMatrix::build(entries, values.size(), values.size());
}

/// e_k e_k^T in dimension n.
inline std::shared_ptr<const SampledMatrix> basis_projector(std::size_t n, std::size_t k) {
  const std::vector<MatrixEntry> entries{{k, k, Complex(1.0, 0.0)}};
  return std::make_shared<const SampledMatrix>(SampledMatrix::build(entries, n, 1));
}

/// Frobenius distance between Hermitian matrices, relative to |a|_F.
inline double relative_error(const DenseMatrix& a, const DenseMatrix& b) {
  return (a - b).norm() / a.norm();
}

}  // namespace lrsdp::fixtures
