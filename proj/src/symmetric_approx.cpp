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

#include "lrsdp/symmetric_approx.hpp"

#include <deque>
#include <memory>
#include <vector>

#include "lrsdp/error.hpp"
#include "lrsdp/trace_estimator.hpp"

namespace lrsdp {

namespace {

// Lazily computed rows of V, one cache per worker.
class RowCache {
 public:
  explicit RowCache(const VDescription& v) : v_(v), slot_(v.dim(), kEmpty) {}

  const std::vector<Complex>& row(std::size_t l) {
    if (slot_[l] == kEmpty) {
      slot_[l] = rows_.size();
      rows_.emplace_back(v_.rank());
      v_row(v_, l, rows_.back());
    }
    return rows_[slot_[l]];
  }

 private:
  static constexpr std::size_t kEmpty = static_cast<std::size_t>(-1);
  const VDescription& v_;
  std::vector<std::size_t> slot_;
  std::deque<std::vector<Complex>> rows_;
};

}  // namespace

double default_vav_precision(double epsilon, std::size_t rank_bound) {
  const auto r = static_cast<double>(rank_bound);
  return epsilon / (400.0 * r * r);
}

DenseMatrix estimate_vav(const VDescription& v, double eps_s, double delta, RandomStream& rng,
                         std::size_t threads) {
  if (!(eps_s > 0.0)) throw ConfigError("V^dagger A V precision must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  const std::size_t rank = v.rank();
  const auto rk = static_cast<Eigen::Index>(rank);
  DenseMatrix b = DenseMatrix::Zero(rk, rk);
  if (rank == 0) return b;
  const RandomStream base = rng.split(rng.next());
  const MatrixSum& ms = *v.sum;

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < rank; ++i) {
    for (std::size_t j = i; j < rank; ++j) pairs.emplace_back(i, j);
  }
  const auto rd = static_cast<double>(rank);
  const auto distinct = static_cast<double>(ms.distinct());
  const double entry_error = eps_s / (rd * static_cast<double>(ms.tau()));
  const double entry_delta = 2.0 * delta / (distinct * (rd * rd + rd));
  const double b_bound_sq = kIsometrySlack * kIsometrySlack * kIsometrySlack * kIsometrySlack;

  for (std::size_t k = 0; k < ms.distinct(); ++k) {
    const SumTerm& term = ms.term(k);
    const SampledMatrix& a = *term.matrix;
    const double a_mass = a.frobenius_norm_squared();
    if (a_mass == 0.0) continue;
    const std::size_t batches = EstimatorConfig::batch_count(entry_delta);
    const std::size_t size = EstimatorConfig::batch_size(a_mass, b_bound_sq, entry_error);

    // Tr[A_k V(., j) V(., i)^dagger] sampled at (x, y):
    // V(y, j) conj(V(x, i)) |A|^2 / conj(A(x, y)).
    auto make_kernel = [&]() -> TallyKernel {
      auto cache = std::make_shared<RowCache>(v);
      return [&, cache](const SampledEntry& e, double count, std::span<Complex> acc) {
        const std::vector<Complex>& vx = cache->row(e.row);
        const std::vector<Complex>& vy = cache->row(e.col);
        const Complex scale = e.value * (count * a_mass / std::norm(e.value));
        for (std::size_t q = 0; q < pairs.size(); ++q) {
          const auto [i, j] = pairs[q];
          acc[q] += vy[j] * std::conj(vx[i]) * scale;
        }
      };
    };
    const std::vector<Complex> est = tallied_median_of_means(a, pairs.size(), batches, size,
                                                             make_kernel, base.split(k), threads);
    const double weight = static_cast<double>(term.sign) * static_cast<double>(term.multiplicity);
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      const auto [i, j] = pairs[q];
      b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += weight * est[q];
    }
  }
  for (Eigen::Index i = 0; i < rk; ++i) {
    b(i, i) = Complex(b(i, i).real(), 0.0);
    for (Eigen::Index j = i + 1; j < rk; ++j) b(j, i) = std::conj(b(i, j));
  }
  return hermitian_part(b);
}

SpectralSurrogate decompose(const DenseMatrix& b) {
  const EighResult e = eigh(b);
  return {e.vectors, e.values};
}

}  // namespace lrsdp
