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


#include <filesystem>
#include <fstream>
#include <sstream>
#include <memory>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "lrsdp/cli.hpp"
#include "lrsdp/error.hpp"

using namespace lrsdp;
using namespace lrsdp::cli;

namespace {

const std::filesystem::path kData = LRSDP_TEST_DATA;

Manifest parse(const std::string& text) {
  std::istringstream in(text);
  return parse_manifest(in);
}

std::string field(const std::string& report, const std::string& key) {
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + " ", 0) == 0) return line.substr(key.size() + 1);
  }
  return {};
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("lrsdp_test_cli_" + name);
}

void save(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("manifest parsing") {
  const Manifest m = parse(
      "# two constraints\n"
      "n 8\nm 2\nepsilon 0.25\n"
      "constraint 2 b.mat -0.5\n"
      "constraint 1 a.mat 0.125   # listed out of order\n"
      "rp 2\nrd 3\n");
  CHECK(m.n == 8);
  CHECK(m.m == 2);
  CHECK(m.epsilon == 0.25);
  REQUIRE(m.constraints.size() == 2);
  CHECK(m.constraints[0].path == "a.mat");
  CHECK(*m.constraints[0].bound == 0.125);
  CHECK(m.constraints[1].index == 2);
  CHECK(m.mode == Mode::Feasibility);
  CHECK(renormalized_epsilon(m, 0.3) == doctest::Approx(0.05));

  const Manifest s = parse("n 4\nm 2\nconstraint 1 a.mat\nconstraint 2 b.mat\nvalues 0.5 -0.25\nmode shadow\n");
  CHECK(s.values->size() == 2);
  const Manifest o = parse("n 4\nm 0\ncost c.mat\nmode optimize\n");
  CHECK(o.cost == "c.mat");
}

TEST_CASE("manifest errors") {
  const char* bad[] = {
      "m 1\nconstraint 1 a.mat 0\n",                                  // no n
      "n 4\nconstraint 1 a.mat 0\n",                                  // no m
      "n 4\nm 2\nconstraint 1 a.mat 0\n",                             // too few constraints
      "n 4\nm 1\nconstraint 2 a.mat 0\n",                             // index past m
      "n 4\nm 1\nconstraint 1 a.mat 0\nconstraint 1 a.mat 0\n",       // duplicate index
      "n 4\nm 1\nconstraint 1 a.mat\n",                               // missing bound
      "n 4\nn 4\nm 1\nconstraint 1 a.mat 0\n",                        // repeated key
      "n 4\nm 1\nconstraint 1 a.mat 0\nwidth 3\n",                    // unknown key
      "n 4\nm 1\nconstraint 1 a.mat zero\n",                          // bad number
      "n 4\nm 1\nconstraint 1 a.mat 0\nvalues 0.5\n",                 // values outside shadow mode
      "n 4\nm 1\nconstraint 1 a.mat\nvalues 0.5 0.25\nmode shadow\n",  // mismatched value list
      "n 4\nm 1\nconstraint 1 a.mat 0.5\nvalues 0.5\nmode shadow\n",  // values given twice
      "n 4\nm 0\nmode optimize\n",                                    // optimize without cost
      "n 4\nm 1\nconstraint 1 a.mat 0\ncost c.mat\n",                 // cost outside optimize
      "n 4\nm 1\nconstraint 1 a.mat 0\nrp 0.5\n",                     // width below 1
      "n 4\nm 1\nconstraint 1 a.mat 0\nmode maximize\n",              // unknown mode
  };
  for (const char* text : bad) {
    INFO(text);
    CHECK_THROWS_AS(parse(text), ParseError);
  }
}

TEST_CASE("fnv-1a") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("trivial manifests") {
  RunOptions opts;
  const auto slack = cmd_feastest(kData / "slack.manifest", opts);
  CHECK(slack.exit_code == 0);
  CHECK(field(slack.report, "verdict") == "feasible");
  CHECK(field(slack.report, "witness") == "uniform");

  const auto none = cmd_feastest(kData / "impossible.manifest", opts);
  CHECK(none.exit_code == 1);
  CHECK(field(none.report, "verdict") == "infeasible");
  CHECK(field(none.report, "iterations") == std::to_string(default_iterations(4, 0.1)));
  CHECK(field(none.report, "witness").empty());

  const auto shadow = cmd_shadow(kData / "shadow.manifest", opts);
  CHECK(shadow.exit_code == 0);
  CHECK(field(shadow.report, "constraints") == "2");

  const auto best = cmd_optimize(kData / "optimize.manifest", opts);
  CHECK(best.exit_code == 0);
  CHECK(std::stod(field(best.report, "value")) >= 0.5);

  CHECK_THROWS_AS(cmd_shadow(kData / "shadow_mismatch.manifest", opts), ParseError);
  CHECK_THROWS_AS(cmd_shadow(kData / "slack.manifest", opts), ConfigError);
  CHECK_THROWS_AS(cmd_oracle(kData / "big.manifest", opts), SizeError);
  opts.solver.preset = SketchPreset::Paper;
  CHECK_THROWS_AS(cmd_shadow(kData / "shadow.manifest", opts), ConfigError);
}

TEST_CASE("oracle agrees on the trivial manifests") {
  const RunOptions opts;
  for (const char* name : {"slack.manifest", "impossible.manifest", "shadow.manifest"}) {
    INFO(name);
    const auto exact = cmd_oracle(kData / name, opts);
    const auto sampled = std::string(name) == "shadow.manifest" ? cmd_shadow(kData / name, opts)
                                                                 : cmd_feastest(kData / name, opts);
    CHECK(exact.exit_code == sampled.exit_code);
    CHECK(field(exact.report, "verdict") == field(sampled.report, "verdict"));
    CHECK(cmd_oracle(kData / name, opts).report == exact.report);
  }
  const auto best = cmd_oracle(kData / "optimize.manifest", opts);
  CHECK(best.exit_code == 0);
  CHECK(field(best.report, "witness") == "dense");
}

TEST_CASE("entries from a report") {
  const auto path = scratch("uniform.report");
  save(path, cmd_feastest(kData / "slack.manifest", {}).report);
  CHECK(cmd_entry(path, 1, 1) == "0.25 0");
  CHECK(cmd_entry(path, 1, 2) == "0 0");
  CHECK_THROWS_AS(cmd_entry(path, 5, 1), IndexError);
  CHECK_THROWS_AS(cmd_entry(path, 0, 1), IndexError);

  save(path, cmd_feastest(kData / "impossible.manifest", {}).report);
  CHECK_THROWS_AS(cmd_entry(path, 1, 1), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("sketched witness round trip") {
  RandomStream rng(21);
  const std::vector<std::shared_ptr<const SampledMatrix>> obs{
      fixtures::basis_projector(16, 0), fixtures::shared_store(fixtures::low_rank(16, 2, rng), 2)};
  const std::vector<double> values{0.8, 0.0};
  SolverConfig cfg;
  cfg.seed = 5;
  const auto out = test_feasibility(shadow_to_feasibility(obs, values, 0.2), cfg);
  REQUIRE(out.verdict == Verdict::Feasible);
  REQUIRE(out.witness.has_value());
  REQUIRE_FALSE(out.witness->uniform_fallback());

  std::stringstream text;
  text << "lrsdp-report 1\n";
  write_witness(text, *out.witness);
  const ReportWitness back = read_witness(text);
  REQUIRE(back.gibbs.has_value());
  int mismatches = 0;
  for (std::size_t l = 0; l < 16; ++l) {
    for (std::size_t j = 0; j < 16; ++j) {
      mismatches += back.entry(l, j) == out.witness->entry(l, j) ? 0 : 1;
    }
  }
  CHECK(mismatches == 0);

  std::string tampered = text.str();
  const auto at = tampered.find("witness_eta ");
  REQUIRE(at != std::string::npos);
  tampered.replace(at, tampered.find('\n', at) - at, "witness_eta 2 0.5");
  std::istringstream bad(tampered);
  CHECK_THROWS_AS(read_witness(bad), ParseError);
}

TEST_CASE("report echo matches the entry command") {
  const auto path = scratch("shadow.report");
  const auto run = cmd_shadow(kData / "shadow.manifest", {});
  save(path, run.report);
  std::istringstream in(run.report);
  std::string line;
  int checked = 0;
  while (std::getline(in, line)) {
    std::istringstream f(line);
    std::string key;
    std::size_t l = 0;
    std::size_t j = 0;
    f >> key;
    if (key != "state_entry") continue;
    f >> l >> j;
    std::string rest;
    std::getline(f, rest);
    CHECK(" " + cmd_entry(path, l, j) == rest);
    ++checked;
  }
  CHECK(checked == 16);
  std::filesystem::remove(path);
}

TEST_CASE("reports do not depend on the thread count") {
  RunOptions one;
  one.solver.seed = 3;
  RunOptions many = one;
  many.solver.threads = 4;
  CHECK(cmd_shadow(kData / "shadow.manifest", one).report ==
        cmd_shadow(kData / "shadow.manifest", many).report);
  RunOptions timed = one;
  timed.timings = true;
  CHECK_FALSE(field(cmd_shadow(kData / "shadow.manifest", timed).report, "timing").empty());
  CHECK(field(cmd_shadow(kData / "shadow.manifest", one).report, "timing").empty());
}
