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

#include "lrsdp/smalldense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "lrsdp/error.hpp"

namespace lrsdp {

namespace {

void check_input(const DenseMatrix& m, const char* what) {
  if (static_cast<std::size_t>(m.rows()) > kMaxDenseDim ||
      static_cast<std::size_t>(m.cols()) > kMaxDenseDim) {
    throw SizeError(std::string(what) + ": dimension exceeds " + std::to_string(kMaxDenseDim));
  }
  if (!m.allFinite()) throw NumericalError(std::string(what) + ": input has non-finite entries");
}

// Order that sorts `values` descending; equal values keep their input order.
std::vector<Eigen::Index> descending_order(const RealVector& values) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });
  return order;
}

}  // namespace

SvdResult svd(const DenseMatrix& m) {
  check_input(m, "svd");
  SvdResult out;
  if (m.size() == 0) {
    const Eigen::Index k = std::min(m.rows(), m.cols());
    out.u = DenseMatrix::Zero(m.rows(), k);
    out.sigma = RealVector::Zero(k);
    out.v = DenseMatrix::Zero(m.cols(), k);
    return out;
  }
  Eigen::BDCSVD<DenseMatrix> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (solver.info() != Eigen::Success) throw NumericalError("svd did not converge");
  const RealVector& s = solver.singularValues();
  const auto order = descending_order(s);
  const Eigen::Index k = s.size();
  out.u.resize(m.rows(), k);
  out.v.resize(m.cols(), k);
  out.sigma.resize(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    out.sigma(c) = std::max(0.0, s(order[static_cast<std::size_t>(c)]));
    out.u.col(c) = solver.matrixU().col(order[static_cast<std::size_t>(c)]);
    out.v.col(c) = solver.matrixV().col(order[static_cast<std::size_t>(c)]);
  }
  if (!out.u.allFinite() || !out.v.allFinite()) throw NumericalError("svd produced non-finite factors");
  return out;
}

EighResult eigh(const DenseMatrix& m, double tolerance) {
  check_input(m, "eigh");
  if (m.rows() != m.cols()) throw ShapeError("eigh: matrix is not square");
  if (!is_hermitian(m, tolerance)) throw HermiticityError("eigh: matrix is not Hermitian");
  EighResult out;
  if (m.size() == 0) {
    out.vectors = DenseMatrix(0, 0);
    out.values = RealVector(0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) throw NumericalError("eigh did not converge");
  // Eigen reports ascending values; flip so ties keep their relative order.
  const Eigen::Index k = m.rows();
  RealVector flipped(k);
  DenseMatrix flipped_vectors(k, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    flipped(c) = solver.eigenvalues()(k - 1 - c);
    flipped_vectors.col(c) = solver.eigenvectors().col(k - 1 - c);
  }
  const auto order = descending_order(flipped);
  out.values.resize(k);
  out.vectors.resize(k, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    out.values(c) = flipped(order[static_cast<std::size_t>(c)]);
    out.vectors.col(c) = flipped_vectors.col(order[static_cast<std::size_t>(c)]);
  }
  return out;
}

QrResult qr(const DenseMatrix& m) {
  check_input(m, "qr");
  Eigen::HouseholderQR<DenseMatrix> solver(m);
  QrResult out;
  out.q = solver.householderQ() * DenseMatrix::Identity(m.rows(), m.rows());
  out.r = solver.matrixQR().triangularView<Eigen::Upper>();
  // Rotate phases so that diag(R) is real and nonnegative.
  const Eigen::Index k = std::min(m.rows(), m.cols());
  for (Eigen::Index c = 0; c < k; ++c) {
    const auto d = out.r(c, c);
    const double mag = std::abs(d);
    if (mag == 0.0) continue;
    const auto phase = d / mag;
    out.r.row(c) *= std::conj(phase);
    out.q.col(c) *= phase;
  }
  return out;
}

bool is_hermitian(const DenseMatrix& m, double tolerance) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tolerance) return false;
    }
  }
  return true;
}

DenseMatrix hermitian_part(const DenseMatrix& m) { return (m + m.adjoint()) * 0.5; }

double spectral_norm(const DenseMatrix& m) {
  if (m.size() == 0) return 0.0;
  return svd(m).sigma(0);
}

}  // namespace lrsdp
