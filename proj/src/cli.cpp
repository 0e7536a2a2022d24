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


#include "lrsdp/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "lrsdp/dense_oracle.hpp"
#include "lrsdp/error.hpp"

namespace lrsdp::cli {

namespace {

constexpr std::string_view kReportMagic = "lrsdp-report";
constexpr int kReportVersion = 1;
// Side of the top-left block of rho echoed into every report.
constexpr std::size_t kEchoBlock = 4;

std::string num(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

std::string hex(std::uint64_t x) {
  char buffer[24];
  std::snprintf(buffer, sizeof(buffer), "%016" PRIx64, x);
  return buffer;
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

double parse_double(const std::string& token, const std::string& where) {
  std::istringstream in(token);
  double x = 0.0;
  std::string rest;
  if (!(in >> x) || (in >> rest)) throw ParseError(where + ": '" + token + "' is not a number");
  return x;
}

std::size_t parse_count(const std::string& token, const std::string& where) {
  if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) {
    throw ParseError(where + ": '" + token + "' is not a non-negative integer");
  }
  try {
    return static_cast<std::size_t>(std::stoull(token));
  } catch (const std::out_of_range&) {
    throw ParseError(where + ": '" + token + "' is too large");
  }
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string token;
  while (in >> token) out.push_back(token);
  return out;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

class ReportWriter {
 public:
  explicit ReportWriter(std::ostream& out) : out_(out) {}

  template <typename... Fields>
  void line(std::string_view key, const Fields&... fields) {
    out_ << key;
    ((out_ << ' ' << fields), ...);
    out_ << '\n';
  }

 private:
  std::ostream& out_;
};

void write_header(ReportWriter& w, std::string_view command, const Instance& inst,
                  const RunOptions& opts, double epsilon) {
  const SolverConfig& cfg = opts.solver;
  w.line(kReportMagic, kReportVersion);
  w.line("command", command);
  w.line("mode", to_string(inst.manifest.mode));
  for (const auto& f : inst.inputs) w.line("input", f.role, f.path, hex(f.hash));
  w.line("n", inst.manifest.n);
  w.line("m", inst.manifest.m);
  w.line("epsilon", num(epsilon));
  w.line("seed", cfg.seed);
  w.line("preset", to_string(cfg.preset));
  w.line("p", cfg.p ? std::to_string(*cfg.p) : std::string("auto"));
  w.line("gamma", cfg.gamma ? num(*cfg.gamma) : std::string("auto"));
  w.line("p_cap", cfg.p_cap);
  w.line("beta_scale", num(cfg.beta_scale));
  w.line("delta_total", num(cfg.delta_total));
  w.line("max_iters", cfg.max_iterations ? std::to_string(*cfg.max_iterations) : "auto");
  w.line("completion", to_string(cfg.completion));
  w.line("vav_precision", num(cfg.vav_precision));
  w.line("estimator_fraction", num(cfg.estimator_fraction));
  w.line("margin_fraction", num(cfg.margin_fraction));
}

void write_violations(ReportWriter& w, const std::vector<Violation>& log) {
  for (const auto& v : log) w.line("violation", v.iteration, v.constraint + 1, num(v.zeta));
}

void write_outcome(ReportWriter& w, const FeasibilityProblem& problem,
                   const FeasibilityOutcome& out) {
  w.line("constraints", problem.m());
  w.line("verdict", to_string(out.verdict));
  w.line("iterations", out.iterations_used);
  w.line("iteration_limit", out.iteration_limit);
  w.line("last_p", out.last_p);
  w.line("last_gamma", num(out.last_gamma));
  write_violations(w, out.violations);
}

void write_state_echo(ReportWriter& w, std::size_t n, const auto& entry) {
  const std::size_t block = std::min(n, kEchoBlock);
  for (std::size_t l = 0; l < block; ++l) {
    for (std::size_t j = 0; j < block; ++j) w.line("state_entry", l + 1, j + 1, format_entry(entry(l, j)));
  }
}

void write_gibbs_witness(std::ostream& out, const FeasibilityOutcome& outcome) {
  ReportWriter w(out);
  for (const auto& [j, k] : outcome.witness_terms) w.line("witness_term", j + 1, k);
  write_witness(out, *outcome.witness);
  write_state_echo(w, outcome.witness->dim(),
                   [&](std::size_t l, std::size_t j) { return outcome.witness->entry(l, j); });
}

void write_dense_witness(ReportWriter& w, const DenseMatrix& x) {
  const auto n = static_cast<std::size_t>(x.rows());
  w.line("witness", "dense");
  w.line("witness_dim", n);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = i; j < x.cols(); ++j) {
      w.line("witness_entry", i + 1, j + 1, num(x(i, j).real()), num(x(i, j).imag()));
    }
  }
  write_state_echo(w, n, [&](std::size_t l, std::size_t j) {
    return x(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j));
  });
}

void write_timings(ReportWriter& w, const RunOptions& opts,
                   const std::vector<std::pair<std::string, double>>& stages) {
  if (!opts.timings) return;
  char buffer[32];
  for (const auto& [stage, s] : stages) {
    std::snprintf(buffer, sizeof(buffer), "%.6f", s);
    w.line("timing", stage, buffer);
  }
}

double effective_epsilon(const Instance& inst, const RunOptions& opts) {
  return opts.epsilon.value_or(inst.manifest.epsilon);
}

void require_mode(const Instance& inst, Mode want, std::string_view command) {
  if (inst.manifest.mode != want) {
    throw ConfigError("the " + std::string(command) + " command needs mode " +
                      std::string(to_string(want)) + ", but the manifest declares mode " +
                      std::string(to_string(inst.manifest.mode)));
  }
}

CommandResult run_feasibility(std::string_view command, const std::filesystem::path& path,
                              const RunOptions& opts, Mode mode) {
  opts.solver.validate();
  auto start = Clock::now();
  const Instance inst = load_instance(path);
  require_mode(inst, mode, command);
  const double eps = effective_epsilon(inst, opts);
  const FeasibilityProblem problem =
      mode == Mode::Shadow ? shadow_problem(inst, eps) : feasibility_problem(inst, eps);
  std::vector<std::pair<std::string, double>> stages{{"load", seconds_since(start)}};

  start = Clock::now();
  const FeasibilityOutcome out = test_feasibility(problem, opts.solver);
  stages.emplace_back("solve", seconds_since(start));

  std::ostringstream text;
  ReportWriter w(text);
  write_header(w, command, inst, opts, eps);
  write_outcome(w, problem, out);
  if (out.witness) write_gibbs_witness(text, out);
  write_timings(w, opts, stages);
  w.line("end");
  return {out.verdict == Verdict::Feasible ? 0 : 1, text.str()};
}

FeasibilityOutcome from_dense(const DenseOutcome& d) {
  FeasibilityOutcome out;
  out.verdict = d.verdict;
  out.iterations_used = d.iterations_used;
  out.iteration_limit = d.iteration_limit;
  out.violations = d.violations;
  return out;
}

}  // namespace

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Feasibility:
      return "feasibility";
    case Mode::Optimize:
      return "optimize";
    case Mode::Shadow:
      return "shadow";
  }
  return "feasibility";
}

Mode parse_mode(std::string_view text) {
  if (text == "feasibility") return Mode::Feasibility;
  if (text == "optimize") return Mode::Optimize;
  if (text == "shadow") return Mode::Shadow;
  throw ParseError("unknown mode '" + std::string(text) + "' (expected feasibility|optimize|shadow)");
}

Manifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir) {
  Manifest m;
  m.base_dir = base_dir;
  std::set<std::string> seen;
  std::map<std::size_t, ManifestConstraint> by_index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto f = split(line);
    if (f.empty()) continue;
    const std::string where = "manifest line " + std::to_string(line_no);
    const std::string& key = f[0];
    const auto arity = [&](std::size_t lo, std::size_t hi) {
      if (f.size() - 1 < lo || f.size() - 1 > hi) throw ParseError(where + ": wrong number of fields for '" + key + "'");
    };
    if (key != "constraint") {
      if (!seen.insert(key).second) throw ParseError(where + ": '" + key + "' given twice");
    }
    if (key == "n") {
      arity(1, 1);
      m.n = parse_count(f[1], where);
    } else if (key == "m") {
      arity(1, 1);
      m.m = parse_count(f[1], where);
    } else if (key == "epsilon") {
      arity(1, 1);
      m.epsilon = parse_double(f[1], where);
    } else if (key == "constraint") {
      arity(2, 3);
      ManifestConstraint c;
      c.index = parse_count(f[1], where);
      c.path = f[2];
      if (f.size() == 4) c.bound = parse_double(f[3], where);
      if (c.index == 0) throw ParseError(where + ": constraint indices start at 1");
      if (!by_index.emplace(c.index, c).second) {
        throw ParseError(where + ": constraint " + std::to_string(c.index) + " given twice");
      }
    } else if (key == "values") {
      std::vector<double> values;
      for (std::size_t k = 1; k < f.size(); ++k) values.push_back(parse_double(f[k], where));
      m.values = std::move(values);
    } else if (key == "cost") {
      arity(1, 1);
      m.cost = f[1];
    } else if (key == "rp") {
      arity(1, 1);
      m.rp = parse_double(f[1], where);
    } else if (key == "rd") {
      arity(1, 1);
      m.rd = parse_double(f[1], where);
    } else if (key == "mode") {
      arity(1, 1);
      m.mode = parse_mode(f[1]);
    } else {
      throw ParseError(where + ": unknown key '" + key + "'");
    }
  }

  if (!seen.contains("n") || m.n == 0) throw ParseError("manifest needs a positive 'n'");
  if (!seen.contains("m")) throw ParseError("manifest needs 'm'");
  if (by_index.size() != m.m) {
    throw ParseError("manifest declares m = " + std::to_string(m.m) + " but lists " +
                     std::to_string(by_index.size()) + " constraints");
  }
  for (auto& [index, c] : by_index) {
    if (index > m.m) {
      throw ParseError("constraint index " + std::to_string(index) + " exceeds m = " +
                       std::to_string(m.m));
    }
    m.constraints.push_back(std::move(c));
  }
  if (!(m.rp >= 1.0) || !(m.rd >= 1.0)) throw ParseError("rp and rd must be at least 1");

  if (m.mode == Mode::Shadow && m.values) {
    if (m.values->size() != m.m) {
      throw ParseError("manifest lists " + std::to_string(m.values->size()) + " values for " +
                       std::to_string(m.m) + " observables");
    }
    for (const auto& c : m.constraints) {
      if (c.bound) throw ParseError("shadow values given both per constraint and in 'values'");
    }
  } else {
    if (m.values) throw ParseError("'values' is only used in shadow mode");
    for (const auto& c : m.constraints) {
      if (!c.bound) throw ParseError("constraint " + std::to_string(c.index) + " has no bound");
    }
  }
  if (m.mode == Mode::Optimize && !m.cost) throw ParseError("optimize mode needs 'cost'");
  if (m.mode != Mode::Optimize && m.cost) throw ParseError("'cost' is only used in optimize mode");
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open manifest " + path.string());
  try {
    return parse_manifest(in, path.parent_path());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t hash_file(const std::filesystem::path& path) { return fnv1a(read_all(path)); }

Instance load_instance(const std::filesystem::path& manifest_path) {
  Instance inst;
  inst.manifest = load_manifest(manifest_path);
  inst.inputs.push_back({"manifest", manifest_path.filename().string(), hash_file(manifest_path)});
  const auto load = [&](const std::string& role, const std::string& rel) {
    std::filesystem::path full(rel);
    if (full.is_relative()) full = inst.manifest.base_dir / full;
    const std::string bytes = read_all(full);
    std::istringstream in(bytes);
    SampledMatrix m;
    try {
      m = parse_matrix(in);
    } catch (const ParseError& e) {
      throw ParseError(full.string() + ": " + e.what());
    }
    if (m.dim() != inst.manifest.n) {
      throw ShapeError(role + " (" + rel + ") has dimension " + std::to_string(m.dim()) +
                       ", manifest says n = " + std::to_string(inst.manifest.n));
    }
    inst.inputs.push_back({role, rel, fnv1a(bytes)});
    return std::make_shared<const SampledMatrix>(std::move(m));
  };
  for (const auto& c : inst.manifest.constraints) {
    inst.matrices.push_back(load("constraint_" + std::to_string(c.index), c.path));
  }
  if (inst.manifest.cost) inst.cost = load("cost", *inst.manifest.cost);
  return inst;
}

FeasibilityProblem feasibility_problem(const Instance& inst, double epsilon) {
  FeasibilityProblem p;
  p.n = inst.manifest.n;
  p.epsilon = epsilon;
  for (std::size_t i = 0; i < inst.matrices.size(); ++i) {
    p.constraints.push_back({inst.matrices[i], 1, *inst.manifest.constraints[i].bound});
  }
  p.validate();
  return p;
}

FeasibilityProblem shadow_problem(const Instance& inst, double epsilon) {
  std::vector<double> values;
  if (inst.manifest.values) {
    values = *inst.manifest.values;
  } else {
    for (const auto& c : inst.manifest.constraints) values.push_back(*c.bound);
  }
  return shadow_to_feasibility(inst.matrices, values, epsilon);
}

double renormalized_epsilon(const Manifest& m, double epsilon) { return epsilon / (m.rp * m.rd); }

OptimizationProblem optimization_problem(const Instance& inst, double epsilon) {
  OptimizationProblem p;
  p.cost = inst.cost;
  p.rp = inst.manifest.rp;
  p.rd = inst.manifest.rd;
  p.constraints.n = inst.manifest.n;
  p.constraints.epsilon = renormalized_epsilon(inst.manifest, epsilon);
  for (std::size_t i = 0; i < inst.matrices.size(); ++i) {
    p.constraints.constraints.push_back({inst.matrices[i], 1, *inst.manifest.constraints[i].bound});
  }
  return p;
}

CommandResult cmd_feastest(const std::filesystem::path& manifest, const RunOptions& opts) {
  return run_feasibility("feastest", manifest, opts, Mode::Feasibility);
}

CommandResult cmd_shadow(const std::filesystem::path& manifest, const RunOptions& opts) {
  return run_feasibility("shadow", manifest, opts, Mode::Shadow);
}

CommandResult cmd_optimize(const std::filesystem::path& manifest, const RunOptions& opts) {
  opts.solver.validate();
  auto start = Clock::now();
  const Instance inst = load_instance(manifest);
  require_mode(inst, Mode::Optimize, "optimize");
  const double eps = effective_epsilon(inst, opts);
  const OptimizationProblem problem = optimization_problem(inst, eps);
  const double inner = problem.constraints.epsilon;
  std::vector<std::pair<std::string, double>> stages{{"load", seconds_since(start)}};

  start = Clock::now();
  const OptimizationResult result = optimize(problem, inner, opts.solver);
  stages.emplace_back("solve", seconds_since(start));

  std::ostringstream text;
  ReportWriter w(text);
  write_header(w, "optimize", inst, opts, eps);
  w.line("rp", num(inst.manifest.rp));
  w.line("rd", num(inst.manifest.rd));
  w.line("renormalized_epsilon", num(inner));
  for (std::size_t k = 0; k < result.steps.size(); ++k) {
    w.line("search_step", k + 1, num(result.steps[k].candidate), to_string(result.steps[k].verdict));
  }
  w.line("value", num(result.value));
  if (result.best_outcome) {
    w.line("witness_candidate", num(-result.best_problem->constraints.back().bound));
    write_outcome(w, *result.best_problem, *result.best_outcome);
    write_gibbs_witness(text, *result.best_outcome);
  }
  write_timings(w, opts, stages);
  w.line("end");
  return {result.best_outcome ? 0 : 1, text.str()};
}

CommandResult cmd_oracle(const std::filesystem::path& manifest, const RunOptions& opts) {
  opts.solver.validate();
  auto start = Clock::now();
  const Instance inst = load_instance(manifest);
  const double eps = effective_epsilon(inst, opts);
  std::vector<std::pair<std::string, double>> stages{{"load", seconds_since(start)}};
  const auto& cfg = opts.solver;

  std::ostringstream text;
  ReportWriter w(text);
  start = Clock::now();
  if (inst.manifest.mode == Mode::Optimize) {
    const OptimizationProblem problem = optimization_problem(inst, eps);
    const double inner = problem.constraints.epsilon;
    std::optional<DenseMatrix> best;
    std::optional<DenseOutcome> best_outcome;
    std::optional<FeasibilityProblem> best_problem;
    const FeasibilityOracle exact = [&](const FeasibilityProblem& p, const SolverConfig& c) {
      DenseOutcome d = dense_mmw(p, c.max_iterations, c.beta_scale);
      if (d.verdict == Verdict::Feasible) {
        best_outcome = d;
        best_problem = p;
      }
      return from_dense(d);
    };
    const OptimizationResult result = optimize(problem, inner, cfg, exact);
    stages.emplace_back("solve", seconds_since(start));
    write_header(w, "oracle", inst, opts, eps);
    w.line("rp", num(inst.manifest.rp));
    w.line("rd", num(inst.manifest.rd));
    w.line("renormalized_epsilon", num(inner));
    for (std::size_t k = 0; k < result.steps.size(); ++k) {
      w.line("search_step", k + 1, num(result.steps[k].candidate),
             to_string(result.steps[k].verdict));
    }
    w.line("value", num(result.value));
    if (best_outcome) {
      w.line("witness_candidate", num(-best_problem->constraints.back().bound));
      write_outcome(w, *best_problem, from_dense(*best_outcome));
      write_dense_witness(w, best_outcome->witness);
    }
    write_timings(w, opts, stages);
    w.line("end");
    return {best_outcome ? 0 : 1, text.str()};
  }

  const FeasibilityProblem problem = inst.manifest.mode == Mode::Shadow
                                         ? shadow_problem(inst, eps)
                                         : feasibility_problem(inst, eps);
  const DenseOutcome out = dense_mmw(problem, cfg.max_iterations, cfg.beta_scale);
  stages.emplace_back("solve", seconds_since(start));
  write_header(w, "oracle", inst, opts, eps);
  write_outcome(w, problem, from_dense(out));
  if (out.verdict == Verdict::Feasible) write_dense_witness(w, out.witness);
  write_timings(w, opts, stages);
  w.line("end");
  return {out.verdict == Verdict::Feasible ? 0 : 1, text.str()};
}

void write_witness(std::ostream& out, const GibbsDescription& g) {
  ReportWriter w(out);
  if (g.uniform_fallback()) {
    w.line("witness", "uniform");
    w.line("witness_dim", g.dim());
    return;
  }
  const VDescription& v = *g.v();
  const SpectralSurrogate& s = g.surrogate();
  const std::size_t rank = g.rank();
  w.line("witness", "sketched");
  w.line("witness_dim", g.dim());
  w.line("witness_completion", to_string(g.completion()));
  w.line("witness_beta", num(g.beta()));
  w.line("witness_rank", rank);
  w.line("witness_samples", v.p());
  w.line("witness_eta", num(g.eta_mantissa()), num(g.eta_log_scale()));
  for (std::size_t k = 0; k < rank; ++k) w.line("witness_sigma", k + 1, num(v.sigma[k]));
  for (std::size_t k = 0; k < rank; ++k) {
    w.line("witness_d", k + 1, num(s.d(static_cast<Eigen::Index>(k))));
  }
  for (std::size_t k = 0; k < rank; ++k) {
    out << "witness_unitary " << k + 1;
    for (std::size_t c = 0; c < rank; ++c) {
      const Complex z = s.u(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c));
      out << ' ' << num(z.real()) << ' ' << num(z.imag());
    }
    out << '\n';
  }
  for (std::size_t t = 0; t < v.p(); ++t) {
    out << "witness_sample " << t + 1 << ' ' << v.rows[t] + 1 << ' ' << num(v.probabilities[t]);
    for (std::size_t k = 0; k < rank; ++k) {
      const Complex z = v.u(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k));
      out << ' ' << num(z.real()) << ' ' << num(z.imag());
    }
    out << '\n';
  }
  // The summed matrix on every sampled row; V needs nothing else.
  const std::set<std::size_t> rows(v.rows.begin(), v.rows.end());
  for (const std::size_t i : rows) {
    std::set<std::size_t> cols;
    for (std::size_t k = 0; k < v.sum->distinct(); ++k) {
      const auto c = v.sum->term(k).matrix->row_columns(i);
      cols.insert(c.begin(), c.end());
    }
    for (const std::size_t j : cols) {
      const Complex a = v.sum->query(i, j);
      if (a == Complex{}) continue;
      w.line("witness_value", i + 1, j + 1, num(a.real()), num(a.imag()));
    }
  }
}

std::size_t ReportWitness::dim() const {
  if (gibbs) return gibbs->dim();
  return dense ? static_cast<std::size_t>(dense->rows()) : 0;
}

Complex ReportWitness::entry(std::size_t l, std::size_t j) const {
  if (l >= dim() || j >= dim()) {
    throw IndexError("entry (" + std::to_string(l + 1) + ", " + std::to_string(j + 1) +
                     ") outside [1, " + std::to_string(dim()) + "]");
  }
  if (gibbs) return query_solution_entry(*gibbs, l, j);
  return (*dense)(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j));
}

ReportWitness read_witness(std::istream& report) {
  std::string line;
  std::size_t line_no = 0;
  std::string kind;
  std::size_t n = 0;
  std::size_t rank = 0;
  std::size_t samples = 0;
  double beta = 0.0;
  GibbsCompletion completion = GibbsCompletion::Full;
  double eta_mantissa = 0.0;
  double eta_log_scale = 0.0;
  std::map<std::size_t, double> sigma;
  std::map<std::size_t, double> d;
  std::map<std::size_t, std::vector<Complex>> unitary;
  struct Sample {
    std::size_t row = 0;
    double probability = 0.0;
    std::vector<Complex> u;
  };
  std::map<std::size_t, Sample> sample_rows;
  std::vector<MatrixEntry> values;
  std::vector<MatrixEntry> dense_entries;
  bool magic = false;

  const auto complexes = [](const std::vector<std::string>& f, std::size_t from,
                            const std::string& where) {
    if ((f.size() - from) % 2 != 0) throw ParseError(where + ": odd number of components");
    std::vector<Complex> out;
    for (std::size_t k = from; k < f.size(); k += 2) {
      out.emplace_back(parse_double(f[k], where), parse_double(f[k + 1], where));
    }
    return out;
  };

  while (std::getline(report, line)) {
    ++line_no;
    const auto f = split(line);
    if (f.empty()) continue;
    const std::string where = "report line " + std::to_string(line_no);
    const std::string& key = f[0];
    const auto need = [&](std::size_t count) {
      if (f.size() != count + 1) throw ParseError(where + ": wrong number of fields for '" + key + "'");
    };
    if (key == kReportMagic) {
      need(1);
      if (parse_count(f[1], where) != kReportVersion) throw ParseError(where + ": unsupported report version");
      magic = true;
    } else if (key == "witness") {
      need(1);
      kind = f[1];
    } else if (key == "witness_dim") {
      need(1);
      n = parse_count(f[1], where);
    } else if (key == "witness_completion") {
      need(1);
      completion = parse_completion(f[1]);
    } else if (key == "witness_beta") {
      need(1);
      beta = parse_double(f[1], where);
    } else if (key == "witness_rank") {
      need(1);
      rank = parse_count(f[1], where);
    } else if (key == "witness_samples") {
      need(1);
      samples = parse_count(f[1], where);
    } else if (key == "witness_eta") {
      need(2);
      eta_mantissa = parse_double(f[1], where);
      eta_log_scale = parse_double(f[2], where);
    } else if (key == "witness_sigma") {
      need(2);
      sigma[parse_count(f[1], where)] = parse_double(f[2], where);
    } else if (key == "witness_d") {
      need(2);
      d[parse_count(f[1], where)] = parse_double(f[2], where);
    } else if (key == "witness_unitary") {
      if (f.size() < 2) throw ParseError(where + ": missing row index");
      unitary[parse_count(f[1], where)] = complexes(f, 2, where);
    } else if (key == "witness_sample") {
      if (f.size() < 4) throw ParseError(where + ": truncated sample");
      Sample s;
      s.row = parse_count(f[2], where);
      s.probability = parse_double(f[3], where);
      s.u = complexes(f, 4, where);
      sample_rows[parse_count(f[1], where)] = std::move(s);
    } else if (key == "witness_value" || key == "witness_entry") {
      need(4);
      const std::size_t i = parse_count(f[1], where);
      const std::size_t j = parse_count(f[2], where);
      if (i == 0 || j == 0) throw ParseError(where + ": indices start at 1");
      const MatrixEntry e{i - 1, j - 1, {parse_double(f[3], where), parse_double(f[4], where)}};
      (key == "witness_value" ? values : dense_entries).push_back(e);
    }
  }
  if (!magic) throw ParseError("not a report (missing '" + std::string(kReportMagic) + "' line)");
  if (kind.empty()) throw ParseError("report has no witness");
  if (n == 0) throw ParseError("report witness has no dimension");

  ReportWitness out;
  if (kind == "uniform") {
    out.gibbs = GibbsDescription::uniform(n);
    return out;
  }
  if (kind == "dense") {
    const auto ni = static_cast<Eigen::Index>(n);
    DenseMatrix x = DenseMatrix::Zero(ni, ni);
    for (const auto& e : dense_entries) {
      if (e.row >= n || e.col >= n || e.row > e.col) throw ParseError("dense witness entry out of place");
      const auto i = static_cast<Eigen::Index>(e.row);
      const auto j = static_cast<Eigen::Index>(e.col);
      x(i, j) = e.value;
      x(j, i) = std::conj(e.value);
    }
    out.dense = std::move(x);
    return out;
  }
  if (kind != "sketched") throw ParseError("unknown witness kind '" + kind + "'");

  const auto dense_index = [&](const auto& map, const char* what) {
    if (map.size() != rank || (rank > 0 && (map.begin()->first != 1 || map.rbegin()->first != rank))) {
      throw ParseError(std::string("report witness has incomplete ") + what);
    }
  };
  dense_index(sigma, "singular values");
  dense_index(d, "surrogate spectrum");
  dense_index(unitary, "unitary");
  if (sample_rows.size() != samples || samples == 0 || sample_rows.begin()->first != 1 ||
      sample_rows.rbegin()->first != samples) {
    throw ParseError("report witness has incomplete samples");
  }

  auto v = std::make_shared<VDescription>();
  const auto ri = static_cast<Eigen::Index>(rank);
  v->u = DenseMatrix(static_cast<Eigen::Index>(samples), ri);
  for (const auto& [t, s] : sample_rows) {
    if (s.row == 0 || s.row > n) throw ParseError("sample row outside the witness dimension");
    if (s.u.size() != rank) throw ParseError("sample " + std::to_string(t) + " has the wrong rank");
    v->rows.push_back(s.row - 1);
    v->probabilities.push_back(s.probability);
    for (std::size_t k = 0; k < rank; ++k) {
      v->u(static_cast<Eigen::Index>(t - 1), static_cast<Eigen::Index>(k)) = s.u[k];
    }
  }
  for (const auto& [k, x] : sigma) v->sigma.push_back(x);
  const auto store = std::make_shared<const SampledMatrix>(SampledMatrix::build(values, n, 1));
  v->sum = std::make_shared<const MatrixSum>(std::vector<SumTerm>{{store}}, 1);

  SpectralSurrogate s;
  s.d = RealVector(ri);
  s.u = DenseMatrix(ri, ri);
  for (const auto& [k, x] : d) s.d(static_cast<Eigen::Index>(k - 1)) = x;
  for (const auto& [k, row] : unitary) {
    if (row.size() != rank) throw ParseError("unitary row " + std::to_string(k) + " has the wrong length");
    for (std::size_t c = 0; c < rank; ++c) {
      s.u(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(c)) = row[c];
    }
  }
  GibbsDescription g = GibbsDescription::make(std::move(v), std::move(s), beta, completion);
  if (g.eta_mantissa() != eta_mantissa || g.eta_log_scale() != eta_log_scale) {
    throw ParseError("report witness normalizer does not match its spectrum");
  }
  out.gibbs = std::move(g);
  return out;
}

ReportWitness load_witness(const std::filesystem::path& report) {
  std::ifstream in(report);
  if (!in) throw ParseError("cannot open report " + report.string());
  try {
    return read_witness(in);
  } catch (const ParseError& e) {
    throw ParseError(report.string() + ": " + e.what());
  }
}

std::string format_entry(Complex z) {
  // Adding zero folds -0 into 0.
  return num(z.real() + 0.0) + " " + num(z.imag() + 0.0);
}

std::string cmd_entry(const std::filesystem::path& report, std::size_t l, std::size_t j) {
  if (l == 0 || j == 0) throw IndexError("entry indices start at 1");
  return format_entry(load_witness(report).entry(l - 1, j - 1));
}

}  // namespace lrsdp::cli
