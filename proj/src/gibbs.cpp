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

#include "lrsdp/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <utility>

#include "lrsdp/error.hpp"

namespace lrsdp {

namespace {

// Entry caches are used below this dimension; larger states cache rows only.
constexpr std::size_t kDenseCacheDim = 256;

}  // namespace

std::string_view to_string(GibbsCompletion c) {
  return c == GibbsCompletion::Full ? "full" : "subspace";
}

GibbsCompletion parse_completion(std::string_view text) {
  if (text == "full") return GibbsCompletion::Full;
  if (text == "subspace") return GibbsCompletion::Subspace;
  throw ConfigError("unknown completion '" + std::string(text) + "' (expected full|subspace)");
}

GibbsDescription GibbsDescription::uniform(std::size_t n) {
  if (n == 0) throw ShapeError("state dimension must be positive");
  GibbsDescription g;
  g.n_ = n;
  g.identity_weight_ = 1.0;
  g.normalizer_ = static_cast<double>(n);
  g.eta_mantissa_ = static_cast<double>(n);
  return g;
}

GibbsDescription GibbsDescription::make(std::shared_ptr<const VDescription> v,
                                        SpectralSurrogate s, double beta,
                                        GibbsCompletion completion) {
  if (!v) throw ShapeError("Gibbs description needs a V description");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be finite and >= 0");
  if (s.rank() != v->rank() || static_cast<std::size_t>(s.u.rows()) != s.rank() ||
      static_cast<std::size_t>(s.u.cols()) != s.rank()) {
    throw ShapeError("surrogate rank does not match the V description");
  }
  const std::size_t n = v->dim();
  if (s.rank() == 0) {
    GibbsDescription g = uniform(n);
    g.beta_ = beta;
    g.completion_ = completion;
    g.eta_mantissa_ = 0.0;
    return g;
  }
  GibbsDescription g;
  g.n_ = n;
  g.beta_ = beta;
  g.completion_ = completion;
  g.v_ = std::move(v);
  g.s_ = std::move(s);

  const std::size_t rank = g.s_.rank();
  const double d_min = g.s_.d(static_cast<Eigen::Index>(rank - 1));
  g.eta_log_scale_ = -beta * d_min;
  g.eta_mantissa_ = 0.0;
  for (std::size_t k = 0; k < rank; ++k) {
    g.eta_mantissa_ += std::exp(-beta * (g.s_.d(static_cast<Eigen::Index>(k)) - d_min));
  }

  g.coefficients_.resize(rank);
  if (completion == GibbsCompletion::Subspace) {
    g.identity_weight_ = 0.0;
    for (std::size_t k = 0; k < rank; ++k) {
      g.coefficients_[k] = std::exp(-beta * (g.s_.d(static_cast<Eigen::Index>(k)) - d_min));
    }
    g.normalizer_ = g.eta_mantissa_;
  } else {
    // Common scale so the largest of e^{-beta D_k} and e^0 becomes 1.
    const double scale = std::max(g.eta_log_scale_, 0.0);
    g.identity_weight_ = std::exp(-scale);
    double total = 0.0;
    for (std::size_t k = 0; k < rank; ++k) {
      const double w = std::exp(-beta * g.s_.d(static_cast<Eigen::Index>(k)) - scale);
      total += w;
      g.coefficients_[k] = w - g.identity_weight_;
    }
    const double rest = n > rank ? static_cast<double>(n - rank) : 0.0;
    g.normalizer_ = total + rest * g.identity_weight_;
  }
  return g;
}

double GibbsDescription::eta() const { return eta_mantissa_ * std::exp(eta_log_scale_); }

double GibbsDescription::frobenius_bound() const {
  if (uniform_fallback()) return 1.0 / std::sqrt(static_cast<double>(n_));
  // N rho = c0 (I - X X^dagger) + X diag(w) X^dagger. With |X| <= kappa and
  // kappa^2 <= 2, every eigenvalue of I - X X^dagger lies in [-1, 1], so
  // |I - X X^dagger|_F <= sqrt(n), and the second term is at most kappa^2 |w|_2.
  const double slack2 = kIsometrySlack * kIsometrySlack;
  double w_norm = 0.0;
  for (const double f : coefficients_) {
    const double w = f + identity_weight_;
    w_norm += w * w;
  }
  w_norm = std::sqrt(w_norm);
  return (identity_weight_ * std::sqrt(static_cast<double>(n_)) + slack2 * w_norm) / normalizer_;
}

void GibbsDescription::vu_row(std::size_t l, std::span<Complex> out) const {
  if (l >= n_) throw IndexError("state row " + std::to_string(l + 1) + " out of range");
  const std::size_t rank = this->rank();
  if (out.size() != rank) throw ShapeError("X row buffer has the wrong length");
  if (rank == 0) return;
  std::vector<Complex> vrow(rank);
  v_row(*v_, l, vrow);
  for (std::size_t k = 0; k < rank; ++k) {
    Complex total;
    for (std::size_t q = 0; q < rank; ++q) {
      total += vrow[q] * s_.u(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(k));
    }
    out[k] = total;
  }
}

Complex GibbsDescription::entry_from_rows(std::span<const Complex> xl,
                                          std::span<const Complex> xj, bool diagonal) const {
  // Real arithmetic on a * conj(b): exchanging a and b negates the imaginary
  // part exactly, so rho(j, l) == conj(rho(l, j)) bit for bit.
  double re = 0.0;
  double im = 0.0;
  for (std::size_t k = 0; k < coefficients_.size(); ++k) {
    const Complex a = xl[k];
    const Complex b = xj[k];
    const double f = coefficients_[k];
    re += (a.real() * b.real() + a.imag() * b.imag()) * f;
    im += (a.imag() * b.real() - a.real() * b.imag()) * f;
  }
  if (diagonal) {
    re += identity_weight_;
    im = 0.0;
  }
  return {re / normalizer_, im / normalizer_};
}

Complex GibbsDescription::entry(std::size_t l, std::size_t j) const {
  if (l >= n_ || j >= n_) {
    throw IndexError("state entry (" + std::to_string(l + 1) + ", " + std::to_string(j + 1) +
                     ") outside a " + std::to_string(n_) + "x" + std::to_string(n_) + " matrix");
  }
  std::vector<Complex> xl(rank());
  std::vector<Complex> xj(rank());
  vu_row(l, xl);
  vu_row(j, xj);
  return entry_from_rows(xl, xj, l == j);
}

QueryableOperator GibbsDescription::as_operator() const {
  QueryableOperator op;
  op.n = n_;
  op.frobenius_bound = frobenius_bound();
  op.hermitian = true;
  auto self = std::make_shared<const GibbsDescription>(*this);
  op.make_oracle = [self]() -> EntryOracle {
    const std::size_t n = self->dim();
    if (self->uniform_fallback()) {
      const double diag = self->identity_weight() / self->normalizer();
      return [diag](std::size_t i, std::size_t j) {
        return i == j ? Complex(diag, 0.0) : Complex(0.0, 0.0);
      };
    }
    struct Cache {
      std::unordered_map<std::size_t, std::vector<Complex>> rows;
      std::vector<Complex> entries;
      std::vector<char> known;
    };
    auto cache = std::make_shared<Cache>();
    if (n <= kDenseCacheDim) {
      cache->entries.resize(n * n);
      cache->known.assign(n * n, 0);
    }
    return [self, cache, n](std::size_t i, std::size_t j) -> Complex {
      const std::size_t slot = i * n + j;
      if (!cache->known.empty() && cache->known[slot]) return cache->entries[slot];
      auto row = [&](std::size_t l) -> const std::vector<Complex>& {
        auto it = cache->rows.find(l);
        if (it == cache->rows.end()) {
          std::vector<Complex> x(self->rank());
          self->vu_row(l, x);
          it = cache->rows.emplace(l, std::move(x)).first;
        }
        return it->second;
      };
      const Complex value = self->entry_from_rows(row(i), row(j), i == j);
      if (!cache->known.empty()) {
        cache->entries[slot] = value;
        cache->known[slot] = 1;
      }
      return value;
    };
  };
  return op;
}

Complex query_solution_entry(const GibbsDescription& g, std::size_t l, std::size_t j) {
  return g.entry(l, j);
}

double estimate_constraint_trace(const GibbsDescription& g, const SampledMatrix& a,
                                 double epsilon, double delta, RandomStream& rng,
                                 std::size_t threads, int sign, double precision_fraction) {
  if (!(epsilon > 0.0)) throw ConfigError("trace precision must be positive");
  if (!(precision_fraction > 0.0 && precision_fraction <= 1.0)) {
    throw ConfigError("precision fraction must lie in (0, 1]");
  }
  EstimatorConfig cfg;
  cfg.epsilon = g.uniform_fallback() ? epsilon : epsilon * precision_fraction;
  cfg.delta = delta;
  cfg.threads = threads;
  const Complex z = estimate_trace_product(a, g.as_operator(), cfg, rng);
  return static_cast<double>(sign) * z.real();
}

}  // namespace lrsdp
