// Copyright 2026 The dbsde Authors
// SPDX-License-Identifier: Apache-2.0
//
// dbsde: train / oracle / eval entry points.
//
// Exit codes: 0 success, 2 configuration error, 3 numeric failure,
// 4 I/O failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dbsde/archive.hpp"
#include "dbsde/config.hpp"
#include "dbsde/error.hpp"
#include "dbsde/oracle.hpp"
#include "dbsde/problems.hpp"
#include "dbsde/sde.hpp"
#include "dbsde/train.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

struct TrainArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

struct OracleArgs {
  std::string problem;
  std::size_t d = 1;
  std::string x0 = "0";
  std::size_t samples = 100000;
  std::optional<double> lambda;
  std::optional<std::string> grid;
  std::optional<double> horizon;
  std::size_t steps = 20;
  std::uint64_t seed = 1;
  std::string out = "oracle_summary.json";
};

struct EvalArgs {
  std::string params;
  std::string problem;
  std::size_t samples = 10000;
  std::uint64_t seed = 7;
};

int run_train_command(const TrainArgs& args) {
  dbsde::RunConfig config = dbsde::parse_config(args.config);
  if (args.seed) config.seed = *args.seed;
  if (args.out) config.output_dir = *args.out;
  const dbsde::TrainResult result = dbsde::run_train(config);
  const auto& r = result.final_record;
  std::printf("step %llu  loss %.6g  y0 %.10g  grad_norm %.4g  elapsed %.2fs\n",
              static_cast<unsigned long long>(r.step), r.loss, r.y0, r.grad_norm, r.elapsed_s);
  std::printf("artifacts written to %s\n", result.output_dir.string().c_str());
  return 0;
}

int run_oracle_command(const OracleArgs& args) {
  dbsde::Overrides overrides;
  if (args.lambda) overrides["lambda"] = dbsde::format_real(*args.lambda);
  if (args.horizon) overrides["T"] = dbsde::format_real(*args.horizon);
  const dbsde::ProblemSpec problem = dbsde::get_problem(args.problem, args.d, overrides);
  const std::vector<double> x0 = dbsde::parse_real_list("x0", args.x0, args.d);
  dbsde::RngStream stream(args.seed);

  dbsde::OracleEstimate estimate;
  std::string method;
  if (args.grid || args.problem == "allen_cahn") {
    if (args.d != 1) throw dbsde::ConfigError("the finite-difference oracle requires --d 1");
    std::size_t M = 800, K = 0;
    double L = dbsde::default_fd_half_width(problem, x0[0]);
    if (args.grid) {
      const auto parts = dbsde::parse_real_list("grid", *args.grid, 3);
      if (parts[0] < 4 || parts[1] < 1 || parts[2] <= 0) {
        throw dbsde::ConfigError("--grid expects M,K,L with M >= 4, K >= 1, L > 0");
      }
      M = static_cast<std::size_t>(parts[0]);
      K = static_cast<std::size_t>(parts[1]);
      L = parts[2];
    }
    if (K == 0) K = dbsde::fd_min_time_steps(problem, x0[0], L, M);
    estimate = dbsde::fd_semilinear_1d(problem, x0[0], L, M, K);
    method = "fd_semilinear_1d";
  } else if (args.problem == "hjb") {
    estimate = dbsde::cole_hopf_mc(dbsde::hjb_cole_hopf_coefficient(problem), problem.terminal, x0,
                                   problem.horizon, args.samples, stream);
    method = "cole_hopf_mc";
  } else {
    const dbsde::TimeGrid grid = dbsde::make_uniform_grid(problem.horizon, args.steps);
    estimate = dbsde::mc_feynman_kac(problem, x0, args.samples, grid, stream);
    method = "mc_feynman_kac";
  }

  std::printf("%s u(0, x0) = %.10g +/- %.3g  (%s)\n", args.problem.c_str(), estimate.value, estimate.std_error,
              estimate.provenance.c_str());
  nlohmann::ordered_json doc;
  doc["problem"] = args.problem;
  doc["d"] = args.d;
  doc["method"] = method;
  doc["x0"] = x0;
  doc["T"] = problem.horizon;
  doc["value"] = estimate.value;
  doc["stderr"] = estimate.std_error;
  doc["provenance"] = estimate.provenance;
  std::ofstream out(args.out, std::ios::trunc);
  out << doc.dump(2) << '\n';
  if (!out) throw dbsde::IoError("cannot write oracle summary '" + args.out + "'");
  return 0;
}

int run_eval_command(const EvalArgs& args) {
  const dbsde::LoadedArchive archive = dbsde::load_params(args.params);
  if (archive.config.problem != args.problem) {
    throw dbsde::ConfigError("archive was trained on problem '" + archive.config.problem + "', not '" +
                             args.problem + "'");
  }
  const dbsde::EvalResult r = dbsde::evaluate_params(archive.config, archive.bank, args.samples, args.seed);
  std::printf("u0 = %.10g (stddev %.3g over %zu starting points)\n", r.u0_mean, r.u0_stddev, r.samples);
  std::printf("terminal-matching loss = %.6g over %zu paths\n", r.loss, r.samples);
  if (r.exact_u0) std::printf("exact u(0, x0) = %.10g  relative error %.3e\n", *r.exact_u0,
                              std::abs(r.u0_mean - *r.exact_u0) / std::abs(*r.exact_u0));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep BSDE solver for semilinear parabolic PDEs"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train a solver from a config file");
  train_cmd->add_option("--config", train.config, "config file (key = value lines)")->required();
  train_cmd->add_option("--seed", train.seed, "override the config seed");
  train_cmd->add_option("--out", train.out, "override the output directory");

  OracleArgs oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "compute a reference value u(0, x0)");
  oracle_cmd->add_option("--problem", oracle.problem, "heat, hjb or allen_cahn")->required();
  oracle_cmd->add_option("--d", oracle.d, "dimension")->required();
  oracle_cmd->add_option("--x0", oracle.x0, "evaluation point: one value or d comma-separated values");
  oracle_cmd->add_option("--samples", oracle.samples, "Monte Carlo samples");
  oracle_cmd->add_option("--lambda", oracle.lambda, "hjb coefficient");
  oracle_cmd->add_option("--grid", oracle.grid, "finite-difference grid M,K,L (d = 1)");
  oracle_cmd->add_option("--T", oracle.horizon, "horizon");
  oracle_cmd->add_option("--steps", oracle.steps, "Euler steps for the Feynman-Kac oracle");
  oracle_cmd->add_option("--seed", oracle.seed, "random seed");
  oracle_cmd->add_option("--out", oracle.out, "summary JSON path");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a parameter archive");
  eval_cmd->add_option("--params", eval.params, "parameter archive (params.json)")->required();
  eval_cmd->add_option("--problem", eval.problem, "problem the archive was trained on")->required();
  eval_cmd->add_option("--samples", eval.samples, "evaluation samples");
  eval_cmd->add_option("--seed", eval.seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*train_cmd) return run_train_command(train);
    if (*oracle_cmd) return run_oracle_command(oracle);
    if (*eval_cmd) return run_eval_command(eval);
  } catch (const dbsde::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const dbsde::DimensionError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const dbsde::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kExitNumeric;
  } catch (const dbsde::IoError& e) {
    std::fprintf(stderr, "I/O failure: %s\n", e.what());
    return kExitIo;
  }
  return 0;
}
