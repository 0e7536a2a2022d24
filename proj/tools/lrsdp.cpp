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


#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lrsdp/cli.hpp"
#include "lrsdp/error.hpp"
#include "lrsdp/gibbs.hpp"
#include "lrsdp/solver.hpp"

namespace {

constexpr int kExitError = 2;

struct Flags {
  std::uint64_t seed = 0;
  std::optional<double> epsilon;
  std::optional<std::size_t> p;
  std::optional<double> gamma;
  double beta_scale = 0.25;
  double delta = 1.0 / 6.0;
  std::string preset = "scaled";
  std::string out;
  std::optional<std::size_t> max_iters;
  std::size_t threads = 1;
  bool timings = false;
  std::string completion = "full";
  double vav_precision = 0.5;
};

void add_run_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--seed", f.seed, "Random seed")->capture_default_str();
  cmd->add_option("--epsilon", f.epsilon, "Precision; overrides the manifest");
  cmd->add_option("--p", f.p, "Rows sampled by the sketch; overrides the preset");
  cmd->add_option("--gamma", f.gamma, "Singular value filter; overrides the preset");
  cmd->add_option("--beta-scale", f.beta_scale, "beta = beta_scale * epsilon")->capture_default_str();
  cmd->add_option("--delta", f.delta, "Total failure probability")->capture_default_str();
  cmd->add_option("--preset", f.preset, "Sketch sizes")
      ->check(CLI::IsMember({"scaled", "paper"}))
      ->capture_default_str();
  cmd->add_option("--out", f.out, "Write the report here instead of stdout");
  cmd->add_option("--max-iters", f.max_iters, "Iteration cap replacing ceil(16 ln n / eps^2)");
  cmd->add_option("--threads", f.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_flag("--timings", f.timings, "Append wall-clock seconds per stage");
  cmd->add_option("--completion", f.completion, "Gibbs state outside the sketched span")
      ->check(CLI::IsMember({"full", "subspace"}))
      ->capture_default_str();
  cmd->add_option("--vav-precision", f.vav_precision, "Per-summand precision of V^dagger A V")
      ->capture_default_str();
}

lrsdp::cli::RunOptions to_options(const Flags& f) {
  lrsdp::cli::RunOptions o;
  o.solver.seed = f.seed;
  o.solver.p = f.p;
  o.solver.gamma = f.gamma;
  o.solver.beta_scale = f.beta_scale;
  o.solver.delta_total = f.delta;
  o.solver.preset = lrsdp::parse_preset(f.preset);
  o.solver.max_iterations = f.max_iters;
  o.solver.threads = f.threads;
  o.solver.completion = lrsdp::parse_completion(f.completion);
  o.solver.vav_precision = f.vav_precision;
  o.epsilon = f.epsilon;
  o.timings = f.timings;
  return o;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream file(out, std::ios::binary);
  if (!file) throw lrsdp::ParseError("cannot write " + out);
  file << text;
  if (!file.flush()) throw lrsdp::ParseError("failed writing " + out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank SDP feasibility, optimization and shadow tomography"};
  app.require_subcommand(1);

  Flags flags;
  std::string manifest;
  const auto run_cmd = [&](const char* name, const char* help) {
    CLI::App* cmd = app.add_subcommand(name, help);
    cmd->add_option("manifest", manifest, "Problem manifest")->required()->check(CLI::ExistingFile);
    add_run_flags(cmd, flags);
    return cmd;
  };
  CLI::App* feastest = run_cmd("feastest", "Test feasibility");
  CLI::App* shadow = run_cmd("shadow", "Find a state matching the listed expectation values");
  CLI::App* optimize = run_cmd("optimize", "Binary search on the cost");
  CLI::App* oracle = run_cmd("oracle", "Exact dense multiplicative weights");

  std::string report;
  std::size_t l = 0;
  std::size_t j = 0;
  CLI::App* entry = app.add_subcommand("entry", "Print rho(l, j) from a report as 're im'");
  entry->add_option("report", report, "Report file")->required()->check(CLI::ExistingFile);
  entry->add_option("l", l, "Row, 1-based")->required();
  entry->add_option("j", j, "Column, 1-based")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (entry->parsed()) {
      std::cout << lrsdp::cli::cmd_entry(report, l, j) << '\n';
      return 0;
    }
    const lrsdp::cli::RunOptions opts = to_options(flags);
    lrsdp::cli::CommandResult result;
    if (feastest->parsed()) result = lrsdp::cli::cmd_feastest(manifest, opts);
    if (shadow->parsed()) result = lrsdp::cli::cmd_shadow(manifest, opts);
    if (optimize->parsed()) result = lrsdp::cli::cmd_optimize(manifest, opts);
    if (oracle->parsed()) result = lrsdp::cli::cmd_oracle(manifest, opts);
    emit(result.report, flags.out);
    return result.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "lrsdp: error: %s\n", e.what());
    return kExitError;
  }
}
