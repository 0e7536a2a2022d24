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

#include "lrsdp/solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "lrsdp/error.hpp"
#include "lrsdp/sketch.hpp"
#include "lrsdp/symmetric_approx.hpp"

namespace lrsdp {

std::size_t FeasibilityProblem::rank_bound() const {
  std::size_t r = 1;
  for (const auto& c : constraints) {
    if (c.matrix) r = std::max(r, c.matrix->rank_hint());
  }
  return r;
}

void FeasibilityProblem::validate() const {
  if (n == 0) throw ShapeError("problem dimension must be positive");
  if (constraints.empty()) throw ShapeError("problem needs at least one constraint");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const auto& c = constraints[i];
    if (!c.matrix) throw ShapeError("constraint " + std::to_string(i + 1) + " has no matrix");
    if (c.matrix->dim() != n) {
      throw ShapeError("constraint " + std::to_string(i + 1) + " has dimension " +
                       std::to_string(c.matrix->dim()) + ", expected " + std::to_string(n));
    }
    if (c.sign != 1 && c.sign != -1) throw ShapeError("constraint sign must be +1 or -1");
    if (!std::isfinite(c.bound)) throw ConfigError("constraint bound must be finite");
  }
}

std::string_view to_string(SketchPreset p) { return p == SketchPreset::Paper ? "paper" : "scaled"; }

SketchPreset parse_preset(std::string_view text) {
  if (text == "paper") return SketchPreset::Paper;
  if (text == "scaled") return SketchPreset::Scaled;
  throw ConfigError("unknown preset '" + std::string(text) + "' (expected paper|scaled)");
}

std::string_view to_string(Verdict v) { return v == Verdict::Feasible ? "feasible" : "infeasible"; }

void SolverConfig::validate() const {
  if (!(delta_total > 0.0 && delta_total < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (!(estimator_fraction > 0.0) || !(margin_fraction > 0.0) ||
      !(estimator_fraction + margin_fraction < 1.0)) {
    throw ConfigError("estimator precision plus violation margin must be below epsilon");
  }
  if (!(trace_precision_fraction > 0.0 && trace_precision_fraction <= 1.0)) {
    throw ConfigError("trace precision fraction must lie in (0, 1]");
  }
  if (!(beta_scale >= 0.0) || !std::isfinite(beta_scale)) {
    throw ConfigError("beta scale must be finite and >= 0");
  }
  if (!(vav_precision > 0.0)) throw ConfigError("V^dagger A V precision must be positive");
  if (p && (*p == 0 || *p > SketchParams::kMaxSketchSize)) {
    throw ConfigError("p must lie in [1, " + std::to_string(SketchParams::kMaxSketchSize) + "]");
  }
  if (gamma && !(*gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (p_cap == 0) throw ConfigError("p cap must be positive");
  if (max_iterations && *max_iterations == 0) throw ConfigError("max iterations must be positive");
  if (threads == 0) throw ConfigError("thread count must be positive");
}

std::size_t default_iterations(std::size_t n, double epsilon) {
  const double t = std::ceil(16.0 * std::log(static_cast<double>(n)) / (epsilon * epsilon));
  return std::max<std::size_t>(1, static_cast<std::size_t>(t));
}

std::size_t witness_bits(std::size_t t, std::size_t m) {
  const std::size_t index_bits =
      m <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(m - 1));
  return t * (index_bits + 1);
}

GibbsDescription sketch_state(const FeasibilityProblem& problem,
                              std::span<const std::pair<std::size_t, std::size_t>> terms,
                              const SolverConfig& cfg, double beta, double delta,
                              RandomStream& rng, std::size_t* p_used, double* gamma_used) {
  if (terms.empty()) return GibbsDescription::uniform(problem.n);
  std::vector<SumTerm> sum_terms;
  sum_terms.reserve(terms.size());
  for (const auto& [j, mult] : terms) {
    const Constraint& c = problem.constraints.at(j);
    sum_terms.push_back({c.matrix, c.sign, mult});
  }
  const std::size_t r = problem.rank_bound();
  auto ms = std::make_shared<const MatrixSum>(std::move(sum_terms), r);
  const std::size_t tau = ms->tau();

  SketchParams params = cfg.preset == SketchPreset::Paper
                            ? SketchParams::paper(tau, r, problem.epsilon)
                            : SketchParams::scaled(tau, r, problem.epsilon, cfg.p_cap);
  if (cfg.p) params.p = *cfg.p;
  if (cfg.gamma) params.gamma = *cfg.gamma;
  if (p_used) *p_used = params.p;
  if (gamma_used) *gamma_used = params.gamma;

  RandomStream sketch_rng = rng.split(0);
  std::shared_ptr<const VDescription> v;
  try {
    v = std::make_shared<const VDescription>(build_sketch(ms, params, sketch_rng));
  } catch (const EmptySketchError&) {
    return GibbsDescription::uniform(problem.n);
  }
  const double eps_s = cfg.preset == SketchPreset::Paper
                           ? default_vav_precision(problem.epsilon, r)
                           : cfg.vav_precision * static_cast<double>(tau);
  RandomStream vav_rng = rng.split(1);
  const DenseMatrix b = estimate_vav(*v, eps_s, delta, vav_rng, cfg.threads);
  return GibbsDescription::make(v, decompose(b), beta, cfg.completion);
}

FeasibilityOutcome test_feasibility(const FeasibilityProblem& problem, const SolverConfig& cfg) {
  problem.validate();
  cfg.validate();
  FeasibilityOutcome out;
  const std::size_t m = problem.m();
  const std::size_t limit = cfg.max_iterations.value_or(default_iterations(problem.n, problem.epsilon));
  out.iteration_limit = limit;

  const double eps = problem.epsilon;
  const double eps_est = cfg.estimator_fraction * eps;
  const double margin = cfg.margin_fraction * eps;
  const double beta = cfg.beta_scale * eps;
  const double delta = cfg.delta_total / (static_cast<double>(limit) * static_cast<double>(std::max<std::size_t>(m, 1)));
  const RandomStream root(cfg.seed);

  GibbsDescription state = GibbsDescription::uniform(problem.n);
  std::map<std::size_t, std::size_t> counts;
  for (std::size_t t = 1; t <= limit; ++t) {
    const RandomStream round = root.split(t);
    std::optional<std::size_t> violated;
    double violated_zeta = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const Constraint& c = problem.constraints[j];
      RandomStream check = round.split(j);
      const double zeta = estimate_constraint_trace(state, *c.matrix, eps_est, delta, check,
                                                    cfg.threads, c.sign,
                                                    cfg.trace_precision_fraction);
      if (zeta > c.bound + margin) {
        violated = j;
        violated_zeta = zeta;
        break;
      }
    }
    out.iterations_used = t;
    if (!violated) {
      out.verdict = Verdict::Feasible;
      out.witness = std::move(state);
      out.witness_terms.assign(counts.begin(), counts.end());
      return out;
    }
    out.violations.push_back({t, *violated, violated_zeta});
    ++counts[*violated];
    if (t == limit) break;
    const std::vector<std::pair<std::size_t, std::size_t>> terms(counts.begin(), counts.end());
    RandomStream rebuild = round.split(m);
    state = sketch_state(problem, terms, cfg, beta, delta, rebuild, &out.last_p, &out.last_gamma);
  }
  out.verdict = Verdict::Infeasible;
  return out;
}

FeasibilityProblem shadow_to_feasibility(
    std::span<const std::shared_ptr<const SampledMatrix>> observables,
    std::span<const double> values, double epsilon) {
  if (observables.size() != values.size()) {
    throw ShapeError("shadow problem has " + std::to_string(observables.size()) +
                     " observables but " + std::to_string(values.size()) + " values");
  }
  if (observables.empty()) throw ShapeError("shadow problem needs at least one observable");
  FeasibilityProblem problem;
  problem.epsilon = epsilon;
  problem.n = observables.front() ? observables.front()->dim() : 0;
  for (std::size_t i = 0; i < observables.size(); ++i) {
    if (!(std::abs(values[i]) <= 1.0)) {
      throw ConfigError("shadow value " + std::to_string(i + 1) + " must satisfy |p| <= 1");
    }
    problem.constraints.push_back({observables[i], 1, values[i]});
  }
  for (std::size_t i = 0; i < observables.size(); ++i) {
    problem.constraints.push_back({observables[i], -1, -values[i]});
  }
  problem.validate();
  return problem;
}

std::size_t search_calls(double eps_outer) {
  if (!(eps_outer > 0.0 && eps_outer < 1.0)) throw ConfigError("outer epsilon must lie in (0, 1)");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::log2(1.0 / eps_outer))));
}

OptimizationResult optimize(const OptimizationProblem& problem, double eps_outer,
                            const SolverConfig& cfg, const FeasibilityOracle& oracle) {
  if (!problem.cost) throw ShapeError("optimization problem has no cost matrix");
  if (!(problem.rp >= 1.0) || !(problem.rd >= 1.0)) {
    throw ConfigError("width bounds R_p and R_d must be at least 1");
  }
  const std::size_t calls = search_calls(eps_outer);
  OptimizationResult result;
  double c = 0.0;
  double step = 0.5;
  for (std::size_t k = 0; k < calls; ++k) {
    FeasibilityProblem instance = problem.constraints;
    if (instance.n == 0) instance.n = problem.cost->dim();
    instance.constraints.push_back({problem.cost, -1, -c});
    SolverConfig call_cfg = cfg;
    call_cfg.seed = RandomStream(cfg.seed).split(k).key();
    FeasibilityOutcome outcome = oracle(instance, call_cfg);
    result.steps.push_back({c, outcome.verdict});
    if (outcome.verdict == Verdict::Feasible) {
      result.best_outcome = outcome;
      result.best_problem = instance;
      c += step;
    } else {
      c -= step;
    }
    step *= 0.5;
    result.last_outcome = std::move(outcome);
  }
  result.value = c;
  return result;
}

}  // namespace lrsdp
