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

#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "lrsdp/error.hpp"
#include "lrsdp/smalldense.hpp"

using namespace lrsdp;

namespace {

double unitarity_error(const DenseMatrix& u) {
  return (u.adjoint() * u - DenseMatrix::Identity(u.cols(), u.cols())).norm();
}

}  // namespace

TEST_CASE("svd") {
  SUBCASE("diagonal") {
    DenseMatrix m = DenseMatrix::Zero(2, 2);
    m(0, 0) = 3.0;
    m(1, 1) = 1.0;
    const auto s = svd(m);
    CHECK(s.sigma(0) == doctest::Approx(3.0));
    CHECK(s.sigma(1) == doctest::Approx(1.0));
    CHECK(std::abs(s.u(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(s.v(1, 1)) == doctest::Approx(1.0));
  }
  SUBCASE("zero matrix") {
    const auto s = svd(DenseMatrix::Zero(3, 3));
    CHECK(s.sigma.maxCoeff() == 0.0);
  }
  SUBCASE("random 6x6 and rectangular shapes") {
    RandomStream rng(6);
    for (const auto& shape : {std::pair{6, 6}, std::pair{7, 3}, std::pair{3, 9}}) {
      const DenseMatrix m = fixtures::gaussian(shape.first, shape.second, rng);
      const auto s = svd(m);
      const DenseMatrix back = s.u * s.sigma.cast<Complex>().asDiagonal() * s.v.adjoint();
      CHECK((back - m).norm() <= 1e-8 * m.norm());
      CHECK(unitarity_error(s.u) <= 1e-8);
      CHECK(unitarity_error(s.v) <= 1e-8);
      for (Eigen::Index k = 1; k < s.sigma.size(); ++k) CHECK(s.sigma(k) <= s.sigma(k - 1));
      CHECK(s.sigma.minCoeff() >= 0.0);
    }
  }
  SUBCASE("non-finite input") {
    DenseMatrix m = DenseMatrix::Identity(2, 2);
    m(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(svd(m), NumericalError);
  }
}

TEST_CASE("eigh") {
  SUBCASE("signs are preserved") {
    DenseMatrix m = DenseMatrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    const auto e = eigh(m);
    CHECK(e.values(0) == doctest::Approx(1.0));
    CHECK(e.values(1) == doctest::Approx(-1.0));
  }
  SUBCASE("identity") {
    const auto e = eigh(DenseMatrix::Identity(2, 2));
    CHECK(e.values(0) == doctest::Approx(1.0));
    CHECK(e.values(1) == doctest::Approx(1.0));
    CHECK(unitarity_error(e.vectors) <= 1e-12);
  }
  SUBCASE("random 8x8") {
    RandomStream rng(8);
    const DenseMatrix g = fixtures::gaussian(8, 8, rng);
    const DenseMatrix m = hermitian_part(g);
    const auto e = eigh(m);
    CHECK(unitarity_error(e.vectors) <= 1e-8);
    const DenseMatrix back = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    CHECK((back - m).norm() <= 1e-8 * m.norm());
    for (Eigen::Index k = 1; k < 8; ++k) CHECK(e.values(k) <= e.values(k - 1));
  }
  SUBCASE("shift covariance") {
    RandomStream rng(9);
    const DenseMatrix m = hermitian_part(fixtures::gaussian(6, 6, rng));
    const double c = 2.75;
    const auto a = eigh(m);
    const auto b = eigh(m + c * DenseMatrix::Identity(6, 6));
    for (Eigen::Index k = 0; k < 6; ++k) CHECK(b.values(k) - a.values(k) == doctest::Approx(c).epsilon(1e-8));
  }
  SUBCASE("non-Hermitian input") {
    DenseMatrix m = DenseMatrix::Identity(2, 2);
    m(0, 1) = 1e-6;
    CHECK_THROWS_AS(eigh(m), HermiticityError);
  }
}

TEST_CASE("svd and eigh agree on PSD matrices") {
  RandomStream rng(10);
  for (int trial = 0; trial < 5; ++trial) {
    const DenseMatrix g = fixtures::gaussian(6, 6, rng);
    const DenseMatrix m = hermitian_part(g * g.adjoint());
    const auto s = svd(m);
    const auto e = eigh(m);
    for (Eigen::Index k = 0; k < 6; ++k) CHECK(std::abs(s.sigma(k) - e.values(k)) <= 1e-7);
  }
}

TEST_CASE("qr") {
  SUBCASE("identity") {
    const auto f = qr(DenseMatrix::Identity(3, 3));
    CHECK((f.q - DenseMatrix::Identity(3, 3)).norm() <= 1e-14);
    CHECK((f.r - DenseMatrix::Identity(3, 3)).norm() <= 1e-14);
  }
  SUBCASE("single column") {
    DenseMatrix m(2, 1);
    m << 3.0, 4.0;
    const auto f = qr(m);
    CHECK(f.r(0, 0).real() == doctest::Approx(5.0));
    CHECK(f.r(0, 0).imag() == 0.0);
  }
  SUBCASE("random 6x3") {
    RandomStream rng(11);
    const DenseMatrix m = fixtures::gaussian(6, 3, rng);
    const auto f = qr(m);
    CHECK(unitarity_error(f.q) <= 1e-8);
    CHECK((f.q * f.r - m).norm() <= 1e-8 * m.norm());
    for (Eigen::Index k = 0; k < 3; ++k) {
      CHECK(f.r(k, k).real() >= 0.0);
      CHECK(f.r(k, k).imag() == 0.0);
      for (Eigen::Index i = k + 1; i < 6; ++i) CHECK(std::abs(f.r(i, k)) <= 1e-12);
    }
  }
}

TEST_CASE("helpers") {
  DenseMatrix m(2, 2);
  m << Complex(1, 0), Complex(2, 1), Complex(0, 0), Complex(3, 0);
  CHECK_FALSE(is_hermitian(m, 1e-10));
  const DenseMatrix h = hermitian_part(m);
  CHECK(is_hermitian(h, 0.0));
  CHECK(h(0, 1) == Complex(1.0, 0.5));
  DenseMatrix d = DenseMatrix::Zero(2, 2);
  d(0, 0) = -4.0;
  d(1, 1) = 2.0;
  CHECK(spectral_norm(d) == doctest::Approx(4.0));
}

TEST_CASE("size cap") {
  CHECK_THROWS_AS(svd(DenseMatrix::Zero(static_cast<Eigen::Index>(kMaxDenseDim) + 1, 1)), SizeError);
}
