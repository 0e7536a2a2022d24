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

#include "lrsdp/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "lrsdp/error.hpp"

namespace lrsdp {

MatrixSum::MatrixSum(std::vector<SumTerm> terms, std::size_t rank_bound)
    : terms_(std::move(terms)), rank_bound_(rank_bound) {
  if (terms_.empty()) throw ShapeError("matrix sum needs at least one summand");
  if (rank_bound_ == 0) throw ShapeError("rank bound must be positive");
  std::vector<double> mass;
  mass.reserve(terms_.size());
  for (const auto& t : terms_) {
    if (!t.matrix) throw ShapeError("matrix sum has a null summand");
    if (t.sign != 1 && t.sign != -1) throw ShapeError("summand sign must be +1 or -1");
    if (t.multiplicity == 0) throw ShapeError("summand multiplicity must be positive");
    if (n_ == 0) n_ = t.matrix->dim();
    if (t.matrix->dim() != n_) throw ShapeError("summands have different dimensions");
    tau_ += t.multiplicity;
    mass.push_back(static_cast<double>(t.multiplicity) * t.matrix->frobenius_norm_squared());
  }
  term_tree_ = SumTree(mass);
}

MatrixSum MatrixSum::of(const std::vector<std::shared_ptr<const SampledMatrix>>& summands,
                        std::size_t rank_bound) {
  std::vector<SumTerm> terms;
  terms.reserve(summands.size());
  for (const auto& m : summands) terms.push_back({m, 1, 1});
  return MatrixSum(std::move(terms), rank_bound);
}

double MatrixSum::row_mass(std::size_t i) const {
  double total = 0.0;
  for (const auto& t : terms_) {
    total += static_cast<double>(t.multiplicity) * t.matrix->row_norm_squared(i);
  }
  return total;
}

Complex MatrixSum::query(std::size_t i, std::size_t j) const {
  Complex total;
  for (const auto& t : terms_) {
    total += static_cast<double>(t.sign * static_cast<long long>(t.multiplicity)) *
             t.matrix->query(i, j);
  }
  return total;
}

double MatrixSum::row_probability(std::size_t i) const {
  const double total = frobenius_mass();
  return total > 0.0 ? row_mass(i) / total : 0.0;
}

double MatrixSum::column_probability(std::size_t i, std::size_t j) const {
  const double mass = row_mass(i);
  if (!(mass > 0.0)) return 0.0;
  double hit = 0.0;
  for (const auto& t : terms_) {
    hit += static_cast<double>(t.multiplicity) * std::norm(t.matrix->query(i, j));
  }
  return hit / mass;
}

std::size_t MatrixSum::sample_term(RandomStream& rng) const {
  if (!(frobenius_mass() > 0.0)) throw ZeroMassError("matrix sum is zero");
  return term_tree_.sample(rng.uniform());
}

std::size_t MatrixSum::sample_row(RandomStream& rng) const {
  return terms_[sample_term(rng)].matrix->sample_row(rng);
}

std::size_t MatrixSum::sample_column(std::size_t i, RandomStream& rng) const {
  const double mass = row_mass(i);
  if (!(mass > 0.0)) {
    throw ZeroMassError("row " + std::to_string(i + 1) + " of the matrix sum has zero mass");
  }
  double target = rng.uniform() * mass;
  std::size_t chosen = terms_.size();
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    const double w =
        static_cast<double>(terms_[k].multiplicity) * terms_[k].matrix->row_norm_squared(i);
    if (w <= 0.0) continue;
    chosen = k;
    if (target < w) break;
    target -= w;
  }
  return terms_[chosen].matrix->sample_entry_in_row(i, rng);
}

SketchParams SketchParams::scaled(std::size_t tau, std::size_t r, double epsilon,
                                  std::size_t p_cap) {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  const double t2r2 = static_cast<double>(tau) * static_cast<double>(tau) *
                      static_cast<double>(r) * static_cast<double>(r);
  SketchParams out;
  const double p = std::ceil(50.0 * t2r2 / (epsilon * epsilon));
  out.p = p >= static_cast<double>(p_cap) ? p_cap : static_cast<std::size_t>(p);
  out.gamma = epsilon * epsilon / (30.0 * t2r2);
  return out;
}

double SketchParams::paper_p(std::size_t tau, std::size_t r, double epsilon) {
  const auto t = static_cast<double>(tau);
  const auto rr = static_cast<double>(r);
  return 2e20 * std::pow(t, 12) * std::pow(rr, 19) / std::pow(epsilon, 6);
}

double SketchParams::paper_gamma(std::size_t tau, std::size_t r, double epsilon) {
  const auto t = static_cast<double>(tau);
  const auto rr = static_cast<double>(r);
  return epsilon * epsilon / (3e6 * t * t * std::pow(rr, 6));
}

SketchParams SketchParams::paper(std::size_t tau, std::size_t r, double epsilon) {
  const double p = std::ceil(paper_p(tau, r, epsilon));
  if (!(p <= static_cast<double>(kMaxSketchSize))) {
    throw ConfigError("paper sketch size p = " + std::to_string(p) + " exceeds " +
                      std::to_string(kMaxSketchSize));
  }
  return {static_cast<std::size_t>(p), paper_gamma(tau, r, epsilon)};
}

RowSample sample_rows(const MatrixSum& ms, std::size_t p, RandomStream& rng) {
  if (!(ms.frobenius_mass() > 0.0)) throw ZeroMassError("cannot sample rows of a zero sum");
  RowSample out;
  out.rows.reserve(p);
  out.probabilities.reserve(p);
  for (std::size_t t = 0; t < p; ++t) {
    const std::size_t i = ms.sample_row(rng);
    const double prob = ms.row_probability(i);
    if (!(prob > 0.0)) throw InternalError("sampled a row with zero probability");
    out.rows.push_back(i);
    out.probabilities.push_back(prob);
  }
  return out;
}

std::vector<std::size_t> sample_cols(const MatrixSum& ms, std::span<const std::size_t> rows,
                                     std::size_t p, RandomStream& rng) {
  if (rows.empty()) throw ShapeError("column sampling needs sampled rows");
  std::vector<std::size_t> out;
  out.reserve(p);
  for (std::size_t s = 0; s < p; ++s) {
    const std::size_t t = rng.uniform_index(rows.size());
    out.push_back(ms.sample_column(rows[t], rng));
  }
  return out;
}

double column_mixture_probability(const MatrixSum& ms, std::span<const std::size_t> rows,
                                  std::size_t j) {
  double total = 0.0;
  for (const std::size_t i : rows) total += ms.column_probability(i, j);
  return total / static_cast<double>(rows.size());
}

ColumnSketch column_sketch(const MatrixSum& ms, std::span<const std::size_t> rows,
                           std::span<const double> row_probabilities,
                           std::span<const std::size_t> cols,
                           std::span<const double> col_probabilities) {
  const auto p = static_cast<double>(rows.size());
  ColumnSketch out;
  out.w = DenseMatrix::Zero(static_cast<Eigen::Index>(rows.size()),
                            static_cast<Eigen::Index>(cols.size()));
  for (std::size_t s = 0; s < rows.size(); ++s) {
    for (std::size_t t = 0; t < cols.size(); ++t) {
      const double scale2 = p * row_probabilities[s] * p * col_probabilities[t];
      double mass = 0.0;
      for (std::size_t k = 0; k < ms.distinct(); ++k) {
        mass += static_cast<double>(ms.term(k).multiplicity) *
                std::norm(ms.term(k).matrix->query(rows[s], cols[t]));
      }
      out.summand_mass += mass / scale2;
      out.w(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) =
          ms.query(rows[s], cols[t]) / std::sqrt(scale2);
    }
  }
  return out;
}

namespace {

struct Grouped {
  std::vector<std::size_t> keys;          // distinct indices, ascending
  std::vector<double> counts;             // occurrences of each key
  std::vector<std::size_t> slot;          // position of each draw in keys
};

Grouped group(std::span<const std::size_t> draws) {
  Grouped g;
  std::map<std::size_t, std::size_t> index;
  for (const std::size_t d : draws) index.emplace(d, 0);
  for (auto& [key, pos] : index) {
    pos = g.keys.size();
    g.keys.push_back(key);
  }
  g.counts.assign(g.keys.size(), 0.0);
  g.slot.reserve(draws.size());
  for (const std::size_t d : draws) {
    const std::size_t pos = index[d];
    g.counts[pos] += 1.0;
    g.slot.push_back(pos);
  }
  return g;
}

}  // namespace

VDescription build_sketch(std::shared_ptr<const MatrixSum> ms, const SketchParams& params,
                          RandomStream& rng) {
  if (!ms) throw ShapeError("build_sketch needs a matrix sum");
  if (params.p == 0 || params.p > SketchParams::kMaxSketchSize) {
    throw ConfigError("sketch size p must lie in [1, " +
                      std::to_string(SketchParams::kMaxSketchSize) + "]");
  }
  if (!(params.gamma > 0.0)) throw ConfigError("sketch threshold gamma must be positive");
  const std::size_t p = params.p;
  const auto pd = static_cast<double>(p);

  VDescription v;
  v.sum = ms;
  RowSample rs = sample_rows(*ms, p, rng);
  v.rows = std::move(rs.rows);
  v.probabilities = std::move(rs.probabilities);
  v.columns = sample_cols(*ms, v.rows, p, rng);

  // Repeated draws give identical rows (columns) of W. Collapsing them into
  // one row scaled by sqrt(count) leaves the singular values and right
  // vectors unchanged; u_k(s) is recovered as y_k(row of s) / sqrt(count).
  const Grouped gr = group(v.rows);
  const Grouped gc = group(v.columns);
  std::vector<double> row_prob(gr.keys.size());
  for (std::size_t r = 0; r < gr.keys.size(); ++r) row_prob[r] = ms->row_probability(gr.keys[r]);

  // Q_{j|i} for every distinct (row, column) pair.
  std::vector<double> col_prob(gc.keys.size(), 0.0);
  for (std::size_t c = 0; c < gc.keys.size(); ++c) {
    double total = 0.0;
    for (std::size_t r = 0; r < gr.keys.size(); ++r) {
      total += gr.counts[r] * ms->column_probability(gr.keys[r], gc.keys[c]);
    }
    col_prob[c] = total / pd;
    if (!(col_prob[c] > 0.0)) throw InternalError("sampled a column with zero probability");
  }
  v.column_probabilities.reserve(p);
  for (const std::size_t c : gc.slot) v.column_probabilities.push_back(col_prob[c]);

  const auto rows_m = static_cast<Eigen::Index>(gr.keys.size());
  const auto cols_m = static_cast<Eigen::Index>(gc.keys.size());
  DenseMatrix m(rows_m, cols_m);
  double summand_mass = 0.0;
  for (Eigen::Index r = 0; r < rows_m; ++r) {
    const std::size_t i = gr.keys[static_cast<std::size_t>(r)];
    const double cr = gr.counts[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < cols_m; ++c) {
      const std::size_t j = gc.keys[static_cast<std::size_t>(c)];
      const double dc = gc.counts[static_cast<std::size_t>(c)];
      const double scale2 =
          pd * row_prob[static_cast<std::size_t>(r)] * pd * col_prob[static_cast<std::size_t>(c)];
      Complex value;
      double mass = 0.0;
      for (std::size_t k = 0; k < ms->distinct(); ++k) {
        const SumTerm& t = ms->term(k);
        const Complex a = t.matrix->query(i, j);
        const auto mult = static_cast<double>(t.multiplicity);
        value += mult * static_cast<double>(t.sign) * a;
        mass += mult * std::norm(a);
      }
      summand_mass += cr * dc * mass / scale2;
      m(r, c) = std::sqrt(cr * dc / scale2) * value;
    }
  }

  const SvdResult f = svd(m);
  const std::size_t rank_cap =
      std::min({p, ms->tau() * ms->rank_bound(), static_cast<std::size_t>(f.sigma.size())});
  const double floor = params.gamma * summand_mass;
  std::size_t kept = 0;
  while (kept < rank_cap && f.sigma(static_cast<Eigen::Index>(kept)) > 0.0 &&
         f.sigma(static_cast<Eigen::Index>(kept)) * f.sigma(static_cast<Eigen::Index>(kept)) >=
             floor) {
    ++kept;
  }
  if (kept == 0) throw EmptySketchError("every singular value of the sketch was filtered out");

  v.sigma.resize(kept);
  v.u.resize(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(kept));
  for (std::size_t k = 0; k < kept; ++k) {
    v.sigma[k] = f.sigma(static_cast<Eigen::Index>(k));
    for (std::size_t s = 0; s < p; ++s) {
      const std::size_t r = gr.slot[s];
      v.u(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(k)) =
          f.u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) /
          std::sqrt(gr.counts[r]);
    }
  }
  return v;
}

void v_row(const VDescription& v, std::size_t l, std::span<Complex> out) {
  if (l >= v.dim()) {
    throw IndexError("V row " + std::to_string(l + 1) + " outside [1, " +
                     std::to_string(v.dim()) + "]");
  }
  const std::size_t rank = v.rank();
  if (out.size() != rank) throw ShapeError("V row buffer has the wrong length");
  std::fill(out.begin(), out.end(), Complex{});
  const auto pd = static_cast<double>(v.p());
  for (std::size_t s = 0; s < v.p(); ++s) {
    const Complex a = v.sum->query(v.rows[s], l);
    if (a == Complex{}) continue;
    const Complex weight = std::conj(a) / std::sqrt(pd * v.probabilities[s]);
    for (std::size_t k = 0; k < rank; ++k) {
      out[k] += weight * v.u(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(k));
    }
  }
  for (std::size_t k = 0; k < rank; ++k) out[k] /= v.sigma[k];
}

Complex query_v_entry(const VDescription& v, std::size_t l, std::size_t k) {
  if (k >= v.rank()) {
    throw IndexError("V column " + std::to_string(k + 1) + " outside [1, " +
                     std::to_string(v.rank()) + "]");
  }
  std::vector<Complex> row(v.rank());
  v_row(v, l, row);
  return row[k];
}

}  // namespace lrsdp
