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

#include "lrsdp/trace_estimator.hpp"

#include <algorithm>
#include <cstdint>
#include <exception>
#include <cmath>
#include <memory>
#include <string>
#include <thread>
#include <utility>

#include "lrsdp/error.hpp"

namespace lrsdp {

QueryableOperator QueryableOperator::from_function(std::size_t n, double frobenius_bound,
                                                   bool hermitian, EntryOracle entry) {
  QueryableOperator op;
  op.n = n;
  op.frobenius_bound = frobenius_bound;
  op.hermitian = hermitian;
  auto shared = std::make_shared<EntryOracle>(std::move(entry));
  op.make_oracle = [shared]() -> EntryOracle {
    return [shared](std::size_t i, std::size_t j) { return (*shared)(i, j); };
  };
  return op;
}

QueryableOperator QueryableOperator::scaled_identity(std::size_t n, double scale) {
  return from_function(n, std::abs(scale) * std::sqrt(static_cast<double>(n)), true,
                       [scale](std::size_t i, std::size_t j) {
                         return i == j ? Complex(scale, 0.0) : Complex(0.0, 0.0);
                       });
}

QueryableOperator QueryableOperator::dense(DenseMatrix m) {
  const auto n = static_cast<std::size_t>(m.rows());
  if (m.rows() != m.cols()) throw ShapeError("dense operator must be square");
  const double bound = m.norm();
  const bool herm = is_hermitian(m, 0.0);
  auto shared = std::make_shared<const DenseMatrix>(std::move(m));
  return from_function(n, bound, herm, [shared](std::size_t i, std::size_t j) {
    return (*shared)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  });
}

std::size_t EstimatorConfig::batch_count(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  return static_cast<std::size_t>(std::ceil(18.0 * std::log(1.0 / delta)));
}

std::size_t EstimatorConfig::batch_size(double a_frobenius_sq, double b_frobenius_sq,
                                        double epsilon) {
  if (!(epsilon > 0.0)) throw ConfigError("estimator precision must be positive");
  const double size = std::ceil(6.0 * a_frobenius_sq * b_frobenius_sq / (epsilon * epsilon));
  if (!std::isfinite(size) || size > kMaxSamplesPerEstimate) {
    throw ConfigError("estimator batch size too large: " + std::to_string(size));
  }
  return std::max<std::size_t>(1, static_cast<std::size_t>(size));
}

namespace {

double median_in_place(std::vector<double>& values) {
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(),
                                         values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

namespace {

// Runs `work(begin, end)` over [0, batches) split into contiguous ranges.
template <class Work>
void for_batches(std::size_t batches, std::size_t threads, Work&& work) {
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, batches);
  if (workers == 1) {
    work(std::size_t{0}, batches);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = batches * w / workers;
    const std::size_t end = batches * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] {
      try {
        work(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void check_budget(std::size_t batches, std::size_t batch_size) {
  if (batches == 0 || batch_size == 0) throw ConfigError("median of means needs samples");
  if (static_cast<double>(batches) * static_cast<double>(batch_size) > kMaxSamplesPerEstimate) {
    throw ConfigError("estimate needs more than 1e11 samples");
  }
}

std::vector<Complex> medians(const std::vector<Complex>& means, std::size_t outputs,
                             std::size_t batches) {
  std::vector<Complex> result(outputs);
  std::vector<double> re(batches);
  std::vector<double> im(batches);
  for (std::size_t k = 0; k < outputs; ++k) {
    for (std::size_t b = 0; b < batches; ++b) {
      re[b] = means[b * outputs + k].real();
      im[b] = means[b * outputs + k].imag();
    }
    result[k] = Complex(median_in_place(re), median_in_place(im));
  }
  return result;
}

}  // namespace

std::vector<Complex> median_of_means(std::size_t outputs, std::size_t batches,
                                     std::size_t batch_size,
                                     const std::function<SampleKernel()>& make_kernel,
                                     const RandomStream& stream, std::size_t threads) {
  check_budget(batches, batch_size);
  std::vector<Complex> means(batches * outputs);
  const double inv = 1.0 / static_cast<double>(batch_size);
  for_batches(batches, threads, [&](std::size_t begin, std::size_t end) {
    SampleKernel kernel = make_kernel();
    for (std::size_t b = begin; b < end; ++b) {
      RandomStream rng = stream.split(b);
      std::span<Complex> acc(means.data() + b * outputs, outputs);
      for (std::size_t s = 0; s < batch_size; ++s) kernel(rng, acc);
      for (auto& x : acc) x *= inv;
    }
  });
  return medians(means, outputs, batches);
}

std::vector<Complex> tallied_median_of_means(const SampledMatrix& a, std::size_t outputs,
                                             std::size_t batches, std::size_t batch_size,
                                             const std::function<TallyKernel()>& make_kernel,
                                             const RandomStream& stream, std::size_t threads) {
  check_budget(batches, batch_size);
  std::vector<Complex> means(batches * outputs);
  const double inv = 1.0 / static_cast<double>(batch_size);
  for_batches(batches, threads, [&](std::size_t begin, std::size_t end) {
    TallyKernel kernel = make_kernel();
    std::vector<std::pair<SampledEntry, std::uint64_t>> tally;
    for (std::size_t b = begin; b < end; ++b) {
      RandomStream rng = stream.split(b);
      std::span<Complex> acc(means.data() + b * outputs, outputs);
      tally.clear();
      a.sample_tally(batch_size, rng, tally);
      for (const auto& [e, hits] : tally) kernel(e, static_cast<double>(hits), acc);
      for (auto& x : acc) x *= inv;
    }
  });
  return medians(means, outputs, batches);
}

Complex trace_sample_value(const SampledMatrix& a, const EntryOracle& b, std::size_t i,
                           std::size_t j) {
  const Complex v = a.query(i, j);
  return b(j, i) * (v * (a.frobenius_norm_squared() / std::norm(v)));
}

Complex estimate_trace_product(const SampledMatrix& a, const QueryableOperator& b,
                               const EstimatorConfig& cfg, RandomStream& rng) {
  if (a.dim() != b.n) {
    throw ShapeError("trace product of " + std::to_string(a.dim()) + "x" +
                     std::to_string(a.dim()) + " and " + std::to_string(b.n) + "x" +
                     std::to_string(b.n) + " matrices");
  }
  const RandomStream base = rng.split(rng.next());
  const double a_mass = a.frobenius_norm_squared();
  if (a_mass == 0.0) return {};
  if (!(b.frobenius_bound > 0.0)) {
    throw ZeroMassError("query operator declares a zero Frobenius bound");
  }
  const std::size_t batches = EstimatorConfig::batch_count(cfg.delta);
  const std::size_t size =
      EstimatorConfig::batch_size(a_mass, b.frobenius_bound * b.frobenius_bound, cfg.epsilon);

  auto make_kernel = [&]() -> TallyKernel {
    return [a_mass, oracle = b.make_oracle()](const SampledEntry& e, double hits,
                                              std::span<Complex> acc) {
      // |A|^2 / conj(v) = |A|^2 v / |v|^2, avoiding a full complex division.
      acc[0] += oracle(e.col, e.row) * (e.value * (hits * a_mass / std::norm(e.value)));
    };
  };
  Complex z = tallied_median_of_means(a, 1, batches, size, make_kernel, base, cfg.threads)[0];
  if (b.hermitian) z = Complex(z.real(), 0.0);
  return z;
}

}  // namespace lrsdp
