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

#include "lrsdp/dense_oracle.hpp"

#include <cmath>
#include <string>

#include "lrsdp/error.hpp"

namespace lrsdp {

namespace {

void check_dim(std::size_t n, std::size_t cap, const char* what) {
  if (n > cap) {
    throw SizeError(std::string(what) + ": dimension " + std::to_string(n) +
                    " exceeds the dense limit " + std::to_string(cap));
  }
}

// f(D) in the eigenbasis of a Hermitian matrix.
template <class F>
DenseMatrix spectral_map(const DenseMatrix& m, F f) {
  const EighResult e = eigh(m, 1e-9);
  RealVector mapped(e.values.size());
  for (Eigen::Index k = 0; k < e.values.size(); ++k) mapped(k) = f(e.values(k));
  return e.vectors * mapped.asDiagonal() * e.vectors.adjoint();
}

}  // namespace

DenseMatrix dense_matrix(const SampledMatrix& m) {
  check_dim(m.dim(), kMaxRealizeDim, "dense_matrix");
  const auto n = static_cast<Eigen::Index>(m.dim());
  DenseMatrix out = DenseMatrix::Zero(n, n);
  for (const auto& e : m.stored_entries()) {
    out(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) = e.value;
  }
  return out;
}

DenseMatrix dense_realize(const MatrixSum& ms) {
  check_dim(ms.dim(), kMaxRealizeDim, "dense_realize");
  const auto n = static_cast<Eigen::Index>(ms.dim());
  DenseMatrix out = DenseMatrix::Zero(n, n);
  for (std::size_t k = 0; k < ms.distinct(); ++k) {
    const SumTerm& t = ms.term(k);
    const double w = static_cast<double>(t.sign) * static_cast<double>(t.multiplicity);
    out += w * dense_matrix(*t.matrix);
  }
  return out;
}

DenseMatrix dense_v(const VDescription& v) {
  check_dim(v.dim(), kMaxRealizeDim, "dense_v");
  DenseMatrix out(static_cast<Eigen::Index>(v.dim()), static_cast<Eigen::Index>(v.rank()));
  std::vector<Complex> row(v.rank());
  for (std::size_t l = 0; l < v.dim(); ++l) {
    v_row(v, l, row);
    for (std::size_t k = 0; k < v.rank(); ++k) {
      out(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) = row[k];
    }
  }
  return out;
}

DenseMatrix dense_state(const GibbsDescription& g) {
  const std::size_t n = g.dim();
  check_dim(n, kMaxRealizeDim, "dense_state");
  std::vector<std::vector<Complex>> rows(n, std::vector<Complex>(g.rank()));
  for (std::size_t l = 0; l < n; ++l) g.vu_row(l, rows[l]);
  DenseMatrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t j = 0; j < n; ++j) {
      out(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) =
          g.entry_from_rows(rows[l], rows[j], l == j);
    }
  }
  return out;
}

DenseMatrix dense_gibbs(const DenseMatrix& a, double beta) {
  const EighResult e = eigh(a, 1e-9);
  const Eigen::Index n = e.values.size();
  if (n == 0) return DenseMatrix(0, 0);
  // Shift by the smallest eigenvalue so the largest weight is 1.
  const double low = e.values(n - 1);
  RealVector w(n);
  for (Eigen::Index k = 0; k < n; ++k) w(k) = std::exp(-beta * (e.values(k) - low));
  w /= w.sum();
  return e.vectors * w.asDiagonal() * e.vectors.adjoint();
}

DenseMatrix psd_sqrt(const DenseMatrix& m) {
  return spectral_map(hermitian_part(m), [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

double trace_norm(const DenseMatrix& m) {
  if (m.size() == 0) return 0.0;
  return svd(m).sigma.sum();
}

double fidelity(const DenseMatrix& rho, const DenseMatrix& sigma) {
  const DenseMatrix root = psd_sqrt(rho);
  const DenseMatrix inner = hermitian_part(root * sigma * root);
  return psd_sqrt(inner).trace().real();
}

double real_trace_product(const DenseMatrix& a, const DenseMatrix& b) {
  return (a.transpose().cwiseProduct(b)).sum().real();
}

DenseOutcome dense_mmw(const FeasibilityProblem& problem, std::optional<std::size_t> max_iterations,
                       double beta_scale, std::optional<double> threshold) {
  problem.validate();
  check_dim(problem.n, kMaxMmwDim, "dense_mmw");
  if (problem.m() > kMaxMmwConstraints) {
    throw SizeError("dense_mmw: " + std::to_string(problem.m()) + " constraints exceed the limit " +
                    std::to_string(kMaxMmwConstraints));
  }
  const double eps = problem.epsilon;
  const double slack = threshold.value_or(eps);
  const double beta = beta_scale * eps;
  const auto n = static_cast<Eigen::Index>(problem.n);

  std::vector<DenseMatrix> mats;
  for (const auto& c : problem.constraints) {
    mats.push_back(static_cast<double>(c.sign) * dense_matrix(*c.matrix));
  }

  DenseOutcome out;
  out.iteration_limit = max_iterations.value_or(default_iterations(problem.n, eps));
  DenseMatrix rho = DenseMatrix::Identity(n, n) / static_cast<double>(n);
  DenseMatrix exponent = DenseMatrix::Zero(n, n);
  for (std::size_t t = 1; t <= out.iteration_limit; ++t) {
    out.iterations_used = t;
    std::optional<std::size_t> violated;
    double value = 0.0;
    for (std::size_t j = 0; j < mats.size(); ++j) {
      value = real_trace_product(mats[j], rho);
      if (value > problem.constraints[j].bound + slack) {
        violated = j;
        break;
      }
    }
    if (!violated) {
      out.verdict = Verdict::Feasible;
      out.witness = rho;
      return out;
    }
    out.violations.push_back({t, *violated, value});
    exponent += mats[*violated];
    rho = dense_gibbs(exponent, beta);
  }
  out.verdict = Verdict::Infeasible;
  return out;
}

}  // namespace lrsdp
