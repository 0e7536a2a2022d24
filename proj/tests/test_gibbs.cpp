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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "lrsdp/dense_oracle.hpp"
#include "lrsdp/error.hpp"
#include "lrsdp/gibbs.hpp"
#include "sketch_family.hpp"

using namespace lrsdp;

namespace {

SpectralSurrogate identity_surrogate(const std::vector<double>& d) {
  const auto r = static_cast<Eigen::Index>(d.size());
  SpectralSurrogate s{DenseMatrix::Identity(r, r), RealVector(r)};
  for (Eigen::Index k = 0; k < r; ++k) s.d(k) = d[static_cast<std::size_t>(k)];
  return s;
}

// X diag(f) X^dagger plus c0 I, over N, straight from the dense factors.
DenseMatrix dense_formula(const GibbsDescription& g) {
  const DenseMatrix x = dense_v(*g.v()) * g.surrogate().u;
  RealVector f(static_cast<Eigen::Index>(g.rank()));
  for (std::size_t k = 0; k < g.rank(); ++k) f(static_cast<Eigen::Index>(k)) = g.coefficients()[k];
  const auto n = static_cast<Eigen::Index>(g.dim());
  return (g.identity_weight() * DenseMatrix::Identity(n, n) + x * f.cast<Complex>().asDiagonal() * x.adjoint()) /
         g.normalizer();
}

struct Sketched {
  std::shared_ptr<const MatrixSum> ms;
  std::shared_ptr<const VDescription> v;
  SpectralSurrogate s;
};

Sketched sketched(std::size_t n, std::uint64_t seed, bool shared) {
  RandomStream rng(seed);
  Sketched out;
  out.ms = shared ? fixtures::shared_range_sum(n, 2, 2, rng) : fixtures::low_rank_sum(n, 2, 2, rng);
  RandomStream sr = rng.split(1);
  RandomStream er = rng.split(2);
  out.v = std::make_shared<const VDescription>(build_sketch(out.ms, {200, 1e-4}, sr));
  out.s = decompose(estimate_vav(*out.v, 0.05, 0.05, er));
  return out;
}

}  // namespace

TEST_CASE("normalizer") {
  SUBCASE("single zero eigenvalue") {
    const auto g = GibbsDescription::make(fixtures::exact_diagonal_v({1.0}), identity_surrogate({0.0}), 3.7);
    CHECK(g.eta() == 1.0);
  }
  SUBCASE("D = (1, -1), beta = ln 2") {
    const auto g = GibbsDescription::make(fixtures::exact_diagonal_v({1.0, -1.0}), identity_surrogate({1.0, -1.0}),
                                          std::log(2.0));
    CHECK(g.eta() == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(g.eta_mantissa() == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(g.eta_log_scale() == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  }
  SUBCASE("no underflow for large beta * D") {
    const auto g = GibbsDescription::make(fixtures::exact_diagonal_v({1.0, -1.0}), identity_surrogate({1.0, -1.0}),
                                          2000.0);
    CHECK(std::isfinite(g.eta_mantissa()));
    CHECK(g.eta_log_scale() == 2000.0);
    const DenseMatrix rho = dense_state(g);
    CHECK(rho.allFinite());
    CHECK(rho.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("beta = 0 gives the subspace projector over r") {
    const auto sk = sketched(16, 21, false);
    const auto g = GibbsDescription::make(sk.v, sk.s, 0.0, GibbsCompletion::Subspace);
    CHECK(g.eta() == doctest::Approx(static_cast<double>(sk.s.rank())));
    const DenseMatrix x = dense_v(*sk.v) * sk.s.u;
    const DenseMatrix want = x * x.adjoint() / static_cast<double>(sk.s.rank());
    CHECK((dense_state(g) - want).norm() <= 1e-10);
  }
}

TEST_CASE("completions on an exact two-dimensional V") {
  // V = (e1, e2) in dimension 4, D = (1, -1).
  const auto v = fixtures::exact_diagonal_v({1.0, -1.0, 0.0, 0.0});
  const double beta = 0.7;
  const auto full = GibbsDescription::make(v, identity_surrogate({1.0, -1.0}), beta);
  CHECK(full.completion() == GibbsCompletion::Full);
  DenseMatrix a = DenseMatrix::Zero(4, 4);
  a(0, 0) = 1.0;
  a(1, 1) = -1.0;
  CHECK((dense_state(full) - dense_gibbs(a, beta)).norm() <= 1e-14);

  const auto sub = GibbsDescription::make(v, identity_surrogate({1.0, -1.0}), beta, GibbsCompletion::Subspace);
  const double eta = std::exp(-beta) + std::exp(beta);
  CHECK(query_solution_entry(sub, 0, 0).real() == doctest::Approx(std::exp(-beta) / eta));
  CHECK(query_solution_entry(sub, 1, 1).real() == doctest::Approx(std::exp(beta) / eta));
  CHECK(query_solution_entry(sub, 2, 2) == Complex(0.0, 0.0));

  CHECK(parse_completion("full") == GibbsCompletion::Full);
  CHECK(parse_completion(to_string(GibbsCompletion::Subspace)) == GibbsCompletion::Subspace);
  CHECK_THROWS_AS(parse_completion("partial"), ConfigError);
}

TEST_CASE("uniform state") {
  const auto g = GibbsDescription::uniform(4);
  CHECK(g.uniform_fallback());
  for (std::size_t l = 0; l < 4; ++l) {
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(query_solution_entry(g, l, j) == Complex(l == j ? 0.25 : 0.0, 0.0));
    }
  }
  CHECK(g.frobenius_bound() == 0.5);
  CHECK_THROWS_AS(query_solution_entry(g, 4, 0), IndexError);

  SUBCASE("trace against a basis projector") {
    const auto a = fixtures::basis_projector(16, 0);
    const auto u = GibbsDescription::uniform(16);
    int good = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      RandomStream rng(seed);
      good += std::abs(estimate_constraint_trace(u, *a, 0.02, 0.05, rng) - 0.0625) <= 0.02 ? 1 : 0;
    }
    CHECK(good >= 95);
  }
}

TEST_CASE("constraint orthogonal to the surrogate") {
  const auto v = fixtures::exact_diagonal_v({1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
  const auto a = fixtures::basis_projector(8, 1);
  const auto sub = GibbsDescription::make(v, identity_surrogate({-1.0}), 1.0, GibbsCompletion::Subspace);
  RandomStream rng(3);
  CHECK(std::abs(estimate_constraint_trace(sub, *a, 0.05, 0.05, rng)) <= 0.05);
  // The full completion puts weight c0 / N on e2.
  const auto full = GibbsDescription::make(v, identity_surrogate({-1.0}), 1.0);
  const double want = 1.0 / (std::exp(1.0) + 7.0);
  CHECK(std::abs(estimate_constraint_trace(full, *a, 0.05, 0.05, rng) - want) <= 0.05);
  CHECK(query_solution_entry(full, 1, 1).real() == doctest::Approx(want));
}

TEST_CASE("entries match the dense formula and are exactly Hermitian") {
  for (const auto completion : {GibbsCompletion::Full, GibbsCompletion::Subspace}) {
    const auto sk = sketched(24, 31, false);
    const auto g = GibbsDescription::make(sk.v, sk.s, 1.5, completion);
    const DenseMatrix rho = dense_state(g);
    CHECK((rho - dense_formula(g)).norm() <= 1e-8);
    for (std::size_t l = 0; l < 24; ++l) {
      for (std::size_t j = 0; j < 24; ++j) {
        CHECK(query_solution_entry(g, l, j) == std::conj(query_solution_entry(g, j, l)));
      }
    }
    const auto op = g.as_operator();
    const auto oracle = op.make_oracle();
    CHECK(oracle(3, 7) == query_solution_entry(g, 3, 7));
    CHECK(oracle(7, 3) == query_solution_entry(g, 7, 3));
  }
}

TEST_CASE("trace normalization, positivity and the Frobenius bound") {
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    const auto sk = sketched(64, 5000 + trial, true);
    const DenseMatrix x = dense_v(*sk.v) * sk.s.u;
    const auto id = DenseMatrix::Identity(x.cols(), x.cols());
    const double iso = (x.adjoint() * x - id).norm();
    for (const auto completion : {GibbsCompletion::Full, GibbsCompletion::Subspace}) {
      const auto g = GibbsDescription::make(sk.v, sk.s, 1.0, completion);
      const DenseMatrix rho = dense_state(g);
      const double trace = rho.trace().real();
      if (completion == GibbsCompletion::Subspace) {
        RealVector w(static_cast<Eigen::Index>(g.rank()));
        for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = std::exp(-1.0 * sk.s.d(k));
        const double want = (x.adjoint() * x * w.cast<Complex>().asDiagonal()).trace().real() / g.eta();
        CHECK(trace == doctest::Approx(want).epsilon(1e-10));
      }
      CHECK(std::abs(trace - 1.0) <= iso + 1e-12);
      CHECK(eigh(hermitian_part(rho)).values.minCoeff() >= -0.02);
      CHECK(rho.norm() <= g.frobenius_bound());
    }
  }
}

TEST_CASE("constraint traces against the dense Gibbs state") {
  int good = 0;
  const int trials = 30;
  for (int trial = 0; trial < trials; ++trial) {
    const auto sk = sketched(32, 900 + static_cast<std::uint64_t>(trial), false);
    const auto g = GibbsDescription::make(sk.v, sk.s, 3.0);
    const SampledMatrix& al = *sk.ms->term(0).matrix;
    const double truth = real_trace_product(dense_matrix(al), dense_gibbs(dense_realize(*sk.ms), 3.0));
    RandomStream rng(77 + static_cast<std::uint64_t>(trial));
    good += std::abs(estimate_constraint_trace(g, al, 0.1, 0.05, rng) - truth) <= 0.1 ? 1 : 0;
  }
  CHECK(good >= 27);
}

TEST_CASE("sign argument negates the estimate") {
  const auto sk = sketched(16, 41, false);
  const auto g = GibbsDescription::make(sk.v, sk.s, 1.0);
  RandomStream r1(5);
  RandomStream r2(5);
  const SampledMatrix& a = *sk.ms->term(1).matrix;
  CHECK(estimate_constraint_trace(g, a, 0.1, 0.1, r1, 1, -1) == -estimate_constraint_trace(g, a, 0.1, 0.1, r2));
}

TEST_CASE("invalid construction") {
  const auto v = fixtures::exact_diagonal_v({1.0, -1.0});
  CHECK_THROWS_AS(GibbsDescription::make(v, identity_surrogate({1.0}), 1.0), ShapeError);
  CHECK_THROWS_AS(GibbsDescription::make(v, identity_surrogate({1.0, -1.0}), -1.0), ConfigError);
  CHECK_THROWS_AS(GibbsDescription::make(nullptr, identity_surrogate({}), 1.0), ShapeError);
}
