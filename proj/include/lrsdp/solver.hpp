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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lrsdp/gibbs.hpp"
#include "lrsdp/sampling_store.hpp"

namespace lrsdp {

/// Tr[sign * A X] <= bound.
struct Constraint {
  std::shared_ptr<const SampledMatrix> matrix;
  int sign = 1;
  double bound = 0.0;
};

/// Find a density matrix X with Tr[A_i X] <= a_i + epsilon for every i, or
/// report that none exists with slack 0.
struct FeasibilityProblem {
  std::size_t n = 0;
  double epsilon = 0.1;
  std::vector<Constraint> constraints;

  [[nodiscard]] std::size_t m() const { return constraints.size(); }
  /// Largest declared rank over the constraint matrices.
  [[nodiscard]] std::size_t rank_bound() const;
  void validate() const;
};

enum class SketchPreset { Scaled, Paper };
std::string_view to_string(SketchPreset p);
SketchPreset parse_preset(std::string_view text);

struct SolverConfig {
  std::uint64_t seed = 0;
  /// Replaces T = ceil(16 ln n / eps^2) when set.
  std::optional<std::size_t> max_iterations;
  SketchPreset preset = SketchPreset::Scaled;
  std::optional<std::size_t> p;   // overrides the preset's p
  std::optional<double> gamma;    // overrides the preset's gamma
  /// Upper limit on the scaled preset's p.
  std::size_t p_cap = 256;
  double delta_total = 1.0 / 6.0;
  /// Constraint traces are estimated to estimator_fraction * eps ...
  double estimator_fraction = 0.25;
  /// ... and a constraint counts as violated when zeta > a_j + margin_fraction * eps.
  double margin_fraction = 0.5;
  /// Fraction of the estimator precision spent on sampling for sketched
  /// states. The verdict only needs accuracy against the witness itself, so
  /// the full estimator precision goes to sampling by default.
  double trace_precision_fraction = 1.0;
  /// beta = beta_scale * eps.
  double beta_scale = 0.25;
  /// Scaled preset: V^dagger A V is estimated to Frobenius error
  /// vav_precision * tau. The paper preset uses eps / (400 r^2).
  double vav_precision = 0.5;
  GibbsCompletion completion = GibbsCompletion::Full;
  std::size_t threads = 1;

  void validate() const;
};

enum class Verdict { Feasible, Infeasible };
std::string_view to_string(Verdict v);

struct Violation {
  std::size_t iteration = 0;   // 1-based
  std::size_t constraint = 0;  // 0-based
  double zeta = 0.0;
};

struct FeasibilityOutcome {
  Verdict verdict = Verdict::Infeasible;
  /// Present when feasible: the state that passed every check.
  std::optional<GibbsDescription> witness;
  /// Constraint indices and multiplicities behind the witness's exponent.
  std::vector<std::pair<std::size_t, std::size_t>> witness_terms;
  std::size_t iterations_used = 0;
  std::size_t iteration_limit = 0;
  std::vector<Violation> violations;
  /// Sketch parameters of the last rebuild (0 when none happened).
  std::size_t last_p = 0;
  double last_gamma = 0.0;
};

/// ceil(16 ln n / eps^2), at least 1.
std::size_t default_iterations(std::size_t n, double epsilon);

/// Bits needed to store the exponent's indices after t iterations over m
/// constraints: t (ceil(log2 m) + 1).
std::size_t witness_bits(std::size_t t, std::size_t m);

/// Builds the Gibbs description for the exponent sum over the given
/// (constraint, multiplicity) terms, at inverse temperature beta.
GibbsDescription sketch_state(const FeasibilityProblem& problem,
                              std::span<const std::pair<std::size_t, std::size_t>> terms,
                              const SolverConfig& cfg, double beta, double delta,
                              RandomStream& rng, std::size_t* p_used = nullptr,
                              double* gamma_used = nullptr);

FeasibilityOutcome test_feasibility(const FeasibilityProblem& problem, const SolverConfig& cfg);

/// A = E_i with bound p_i and A = -E_i with bound -p_i, i.e.
/// |Tr[sigma E_i] - p_i| <= eps.
FeasibilityProblem shadow_to_feasibility(
    std::span<const std::shared_ptr<const SampledMatrix>> observables,
    std::span<const double> values, double epsilon);

/// max Tr[C X] subject to Tr[A_i X] <= b_i, X a density matrix, with
/// R_p R_d bounding the primal and dual widths.
struct OptimizationProblem {
  std::shared_ptr<const SampledMatrix> cost;
  FeasibilityProblem constraints;  // may hold zero constraints
  double rp = 1.0;
  double rd = 1.0;
};

using FeasibilityOracle =
    std::function<FeasibilityOutcome(const FeasibilityProblem&, const SolverConfig&)>;

struct SearchStep {
  double candidate = 0.0;
  Verdict verdict = Verdict::Infeasible;
};

struct OptimizationResult {
  double value = 0.0;
  std::vector<SearchStep> steps;
  FeasibilityOutcome last_outcome;
  /// The outcome of the last feasible call, with the problem it solved.
  std::optional<FeasibilityOutcome> best_outcome;
  std::optional<FeasibilityProblem> best_problem;
};

/// Binary search on c in [-1, 1] over ceil(log2(1/eps_outer)) feasibility
/// calls, each adding Tr[-C X] <= -c. Starts at c = 0 with steps 1/2, 1/4, ...
OptimizationResult optimize(const OptimizationProblem& problem, double eps_outer,
                            const SolverConfig& cfg,
                            const FeasibilityOracle& oracle = test_feasibility);

/// ceil(log2(1 / eps)), at least 1.
std::size_t search_calls(double eps_outer);

}  // namespace lrsdp
