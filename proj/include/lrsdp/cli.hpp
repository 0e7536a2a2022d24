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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lrsdp/gibbs.hpp"
#include "lrsdp/sampling_store.hpp"
#include "lrsdp/smalldense.hpp"
#include "lrsdp/solver.hpp"

namespace lrsdp::cli {

enum class Mode { Feasibility, Optimize, Shadow };
std::string_view to_string(Mode m);
Mode parse_mode(std::string_view text);

struct ManifestConstraint {
  std::size_t index = 0;  // 1-based, as written
  std::string path;
  std::optional<double> bound;
};

/// Key-value problem description. One key per line, '#' comments:
///
///     n 32
///     m 2
///     epsilon 0.2
///     constraint 1 a1.mat 0.5
///     constraint 2 a2.mat -0.1
///     values 0.5 -0.1          (shadow mode, instead of per-line bounds)
///     cost c.mat               (optimize mode)
///     rp 1
///     rd 1
///     mode feasibility|optimize|shadow
struct Manifest {
  std::size_t n = 0;
  std::size_t m = 0;
  double epsilon = 0.1;
  std::vector<ManifestConstraint> constraints;  // ordered by index
  std::optional<std::vector<double>> values;
  std::optional<std::string> cost;
  double rp = 1.0;
  double rd = 1.0;
  Mode mode = Mode::Feasibility;
  /// Matrix paths are resolved against this directory.
  std::filesystem::path base_dir;
};

Manifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir = {});
Manifest load_manifest(const std::filesystem::path& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::uint64_t hash_file(const std::filesystem::path& path);

struct InputFile {
  std::string role;  // "manifest", "constraint_3", "cost"
  std::string path;  // as written in the manifest
  std::uint64_t hash = 0;
};

/// A manifest with every matrix loaded and hashed.
struct Instance {
  Manifest manifest;
  std::vector<std::shared_ptr<const SampledMatrix>> matrices;
  std::shared_ptr<const SampledMatrix> cost;
  std::vector<InputFile> inputs;
};

Instance load_instance(const std::filesystem::path& manifest_path);

/// Tr[A_i X] <= a_i for every listed constraint.
FeasibilityProblem feasibility_problem(const Instance& inst, double epsilon);
/// |Tr[X E_i] - p_i| <= eps, from the per-line bounds or the `values` list.
FeasibilityProblem shadow_problem(const Instance& inst, double epsilon);
OptimizationProblem optimization_problem(const Instance& inst, double epsilon);
/// epsilon / (rp rd): the precision the optimize mode actually runs at.
double renormalized_epsilon(const Manifest& m, double epsilon);

struct RunOptions {
  SolverConfig solver;
  std::optional<double> epsilon;  // overrides the manifest
  bool timings = false;
};

struct CommandResult {
  int exit_code = 2;
  std::string report;
};

/// Exit codes: 0 feasible, 1 infeasible. Errors propagate as exceptions.
CommandResult cmd_feastest(const std::filesystem::path& manifest, const RunOptions& opts);
CommandResult cmd_shadow(const std::filesystem::path& manifest, const RunOptions& opts);
/// 0 when some candidate was feasible, 1 otherwise.
CommandResult cmd_optimize(const std::filesystem::path& manifest, const RunOptions& opts);
/// Exact multiplicative weights on the manifest's mode (optimize runs the
/// binary search over the exact oracle).
CommandResult cmd_oracle(const std::filesystem::path& manifest, const RunOptions& opts);

/// Witness recovered from a report: a sketched or uniform Gibbs description,
/// or the dense state of an oracle run.
struct ReportWitness {
  std::optional<GibbsDescription> gibbs;
  std::optional<DenseMatrix> dense;

  [[nodiscard]] std::size_t dim() const;
  /// rho(l, j), 0-based.
  [[nodiscard]] Complex entry(std::size_t l, std::size_t j) const;
};

/// Rebuilds the witness from report text alone. ParseError when the report
/// has no witness or is malformed.
ReportWitness read_witness(std::istream& report);
ReportWitness load_witness(const std::filesystem::path& report);

/// `re im` with 17 significant digits; l and j are 1-based.
std::string cmd_entry(const std::filesystem::path& report, std::size_t l, std::size_t j);
std::string format_entry(Complex z);

/// Writes the witness section of a report.
void write_witness(std::ostream& out, const GibbsDescription& g);

}  // namespace lrsdp::cli
