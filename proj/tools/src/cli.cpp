#include <stls/harness/cli.hpp>

#include <stls/alm.hpp>
#include <stls/error.hpp>
#include <stls/harness/experiment.hpp>
#include <stls/harness/io.hpp>
#include <stls/heterogeneity.hpp>
#include <stls/tls.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace stls::cli {

namespace fs = std::filesystem;
using harness::ExperimentSpec;
using harness::TrialRecord;
using nlohmann::json;

namespace {

int exit_code_for(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::io:
    case ErrorCategory::parse:
      return kExitIo;
    default:
      return kExitSolver;
  }
}

int report(std::ostream& err, const std::string& category, const std::string& message,
           int code) {
  err << json{{"error", category}, {"message", message}}.dump() << '\n';
  return code;
}

void add_solver_options(CLI::App* app, SolverConfig& cfg) {
  app->add_option("--mu-growth", cfg.mu_growth, "penalty growth factor per iteration")
      ->check(CLI::Validator(
          [](std::string& v) {
            double x = 0.0;
            const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
            return ec == std::errc() && ptr == v.data() + v.size() && x > 1.0
                       ? std::string()
                       : "value must be a number > 1";
          },
          "NUMBER > 1"));
  app->add_option("--mu-init", cfg.mu_init, "initial penalty")->check(CLI::PositiveNumber);
  app->add_option("--delta", cfg.delta, "reweighting regularizer")->check(CLI::PositiveNumber);
  app->add_option("--max-reweights", cfg.max_reweights, "reweighting rounds after the first")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--max-iters", cfg.alm_max_iters, "iterations per ALM run")
      ->check(CLI::PositiveNumber);
  app->add_option("--feas-tol", cfg.feas_tol, "relative feasibility tolerance")
      ->check(CLI::PositiveNumber);
  app->add_option("--rank-tol", cfg.rank_tol, "relative singular value cutoff")
      ->check(CLI::PositiveNumber);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size())
      throw CLI::ValidationError("list", "'" + item + "' is not a number");
    out.push_back(v);
  }
  return out;
}

json diagnostics_json(const StlsSolution& sol) {
  const auto& d = sol.diagnostics;
  json j;
  j["alpha"] = sol.alpha;
  j["iterations"] = d.total_iterations;
  j["feas_residual"] = d.feas_residual;
  j["rank"] = d.numerical_rank;
  j["converged"] = d.converged;
  return j;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::io, "cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

StlsSolution run_method(const SolveOptions& opts, const StlsProblem& p) {
  if (opts.method == "svd") return plain_tls(p);
  if (opts.method == "logdet") return logdet_tls(p.a_bar);
  if (opts.method == "nn") return nn_stls(p, opts.solver).first;
  return reweighted_stls(p, opts.solver).first;
}

int experiment_cmd(const ExperimentSpec& spec, const std::string& out, const std::string& summary,
                   bool timing) {
  const std::vector<TrialRecord> records = harness::run_experiment(spec);
  if (out.empty() || out == "-") {
    harness::write_records_csv(std::cout, records, timing);
  } else {
    std::ofstream f(out);
    if (!f) throw Error(ErrorCategory::io, "cannot open " + out + " for writing");
    harness::write_records_csv(f, records, timing);
  }
  if (!summary.empty()) {
    const auto rows = harness::summarize(records);
    if (summary == "-") {
      harness::write_summary_csv(std::cerr, rows);
    } else {
      std::ofstream f(summary);
      if (!f) throw Error(ErrorCategory::io, "cannot open " + summary + " for writing");
      harness::write_summary_csv(f, rows);
    }
  }
  return kExitOk;
}

struct HeteroOptions {
  std::string input;
  Index genes = 14;
  Index states = 2;
  Index conditions = 6;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string method = "stls";
  std::string out;
  std::string write_instance;
  bool simplex = false;
  SolverConfig solver;
};

int hetero_cmd(const HeteroOptions& o) {
  const hetero::Instance inst =
      o.input.empty() ? hetero::synthesize(o.genes, o.states, o.conditions, o.noise, o.seed)
                      : io::read_instance(o.input);
  if (!o.write_instance.empty()) io::write_instance(o.write_instance, inst);

  const hetero::Solution sol =
      o.method == "svd" ? hetero::solve_noiseless(inst) : hetero::solve_noisy(inst, o.solver);
  const Matrix u = o.simplex ? hetero::simplex_normalize(sol.u) : sol.u;

  json j;
  j["genes"] = inst.genes();
  j["states"] = inst.states();
  j["conditions"] = inst.conditions();
  j["nullspace_gap"] = sol.nullspace_gap;
  j["identifiable"] = sol.identifiable;
  j["scale_convention"] = o.simplex ? "simplex-columns" : sol.scale_convention;
  j["lambda"] = std::vector<double>(sol.lambda_vec.begin(), sol.lambda_vec.end());
  if (sol.cosine_to_truth) j["cosine_to_truth"] = *sol.cosine_to_truth;
  j["warnings"] = sol.warnings;
  for (const auto& w : sol.warnings) std::cerr << "warning: " << w << '\n';

  if (o.out.empty()) {
    std::cout << j.dump(2) << '\n';
    return kExitOk;
  }
  fs::create_directories(o.out);
  io::write_matrix(fs::path(o.out) / "U.csv", u, io::MatrixFormat::csv);
  io::write_matrix(fs::path(o.out) / "lambda.csv", Matrix(sol.lambda_vec), io::MatrixFormat::csv);
  if (sol.x_error)
    io::write_matrix(fs::path(o.out) / "x_error.csv", *sol.x_error, io::MatrixFormat::csv);
  write_json(fs::path(o.out) / "summary.json", j);
  return kExitOk;
}

}  // namespace

std::uint64_t default_seed(std::uint64_t fallback) {
  const char* env = std::getenv("STLS_SEED");
  if (env == nullptr) return fallback;
  const std::string_view text(env);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  return ec == std::errc() && ptr == text.data() + text.size() ? v : fallback;
}

int solve_cmd(const SolveOptions& opts, std::ostream& err) {
  if (opts.method != "svd" && opts.method != "nn" && opts.method != "rwnn" &&
      opts.method != "logdet")
    return report(err, "usage", "unknown method '" + opts.method + "'", kExitUsage);
  const bool masked = opts.structure.rfind("mask:", 0) == 0;
  if (opts.structure != "none" && opts.structure != "toeplitz" && !masked)
    return report(err, "usage", "structure must be none, toeplitz or mask:PATH", kExitUsage);
  if ((opts.method == "svd" || opts.method == "logdet") && opts.structure != "none")
    return report(err, "usage", opts.method + " handles unstructured problems only", kExitUsage);
  if (opts.out.empty()) return report(err, "usage", "--out is required", kExitUsage);

  try {
    StlsProblem p = StlsProblem::make(io::read_matrix(opts.input));
    if (masked) {
      const Matrix mask = io::read_matrix(opts.structure.substr(5));
      if (mask.rows() != p.rows() || mask.cols() != p.cols())
        throw Error(ErrorCategory::invalid_input, "mask shape does not match the input");
      p.structure = FixedMask::from_indicator(mask);
    } else if (opts.structure == "toeplitz") {
      p.structure = Toeplitz{};
    }
    if (!opts.weights.empty()) p.weights = io::read_matrix(opts.weights);
    if (opts.target_rank) p.target_rank = *opts.target_rank;

    const StlsSolution sol = run_method(opts, p);
    const fs::path out(opts.out);
    fs::create_directories(out);
    io::write_matrix(out / "a_hat.csv", sol.a_hat, io::MatrixFormat::csv);
    io::write_matrix(out / "e_hat.csv", sol.e_hat, io::MatrixFormat::csv);
    io::write_matrix(out / "null_vec.csv", Matrix(sol.null_vec), io::MatrixFormat::csv);
    write_json(out / "diagnostics.json", diagnostics_json(sol));
    return kExitOk;
  } catch (const Error& e) {
    return report(err, std::string(category_name(e.category())), e.what(), exit_code_for(e.category()));
  } catch (const fs::filesystem_error& e) {
    return report(err, "io", e.what(), kExitIo);
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Structured total least squares via reweighted nuclear norms"};
  app.require_subcommand(1);

  SolveOptions solve;
  auto* solve_app = app.add_subcommand("solve", "solve one STLS problem");
  solve_app->add_option("--input", solve.input, "matrix file (.csv or .mtx)")->required();
  solve_app->add_option("--structure", solve.structure, "none, toeplitz or mask:PATH");
  solve_app->add_option("--weights", solve.weights, "element-wise weights on E");
  solve_app->add_option("--method", solve.method, "svd, nn, rwnn or logdet");
  solve_app->add_option("--target-rank", solve.target_rank, "rank bound (default N-1)");
  solve_app->add_option("--out", solve.out, "output directory")->required();
  solve_app->add_option("--seed", solve.seed, "accepted for compatibility; unused");
  add_solver_options(solve_app, solve.solver);

  ExperimentSpec spec;
  spec.seed = default_seed();
  std::string sizes_text, levels_text, exp_out, summary;
  bool timing = false;
  auto* exp_app = app.add_subcommand("experiment", "run a seeded experiment, emit CSV");
  exp_app->add_option("name", spec.name, "fig1a, fig1b, fig2a, fig2b, fig3 or hetero")
      ->required();
  exp_app->add_option("--sizes", sizes_text, "comma-separated N values");
  exp_app->add_option("--levels", levels_text, "outlier magnitudes or noise levels");
  exp_app->add_option("--trials", spec.trials, "trials per configuration");
  exp_app->add_option("--seed", spec.seed, "master seed (default STLS_SEED or 0)");
  exp_app->add_option("--threads", spec.threads, "worker threads, 0 for all cores");
  exp_app->add_option("--out", exp_out, "records CSV (default stdout)");
  exp_app->add_option("--summary", summary, "summary CSV ('-' for stderr)");
  exp_app->add_flag("--timing", timing, "add a wall_time column");
  add_solver_options(exp_app, spec.solver);

  HeteroOptions het;
  het.seed = default_seed();
  auto* het_app = app.add_subcommand("hetero", "cell heterogeneity from population averages");
  het_app->add_option("--input", het.input, "instance directory with S.csv and X.csv");
  het_app->add_option("--genes", het.genes, "synthetic: genes M");
  het_app->add_option("--states", het.states, "synthetic: states K");
  het_app->add_option("--conditions", het.conditions, "synthetic: conditions N");
  het_app->add_option("--noise", het.noise, "synthetic: relative noise level");
  het_app->add_option("--seed", het.seed, "synthetic: seed (default STLS_SEED or 0)");
  het_app->add_option("--method", het.method, "svd or stls")
      ->check(CLI::IsMember({"svd", "stls"}));
  het_app->add_option("--out", het.out, "output directory (default: JSON on stdout)");
  het_app->add_option("--write-instance", het.write_instance, "save the instance here");
  het_app->add_flag("--simplex", het.simplex, "rescale U columns to sum to one");
  add_solver_options(het_app, het.solver);

  try {
    app.parse(argc, argv);
    if (!sizes_text.empty())
      for (const double v : parse_list(sizes_text)) spec.sizes.push_back(static_cast<Index>(v));
    if (!levels_text.empty()) spec.levels = parse_list(levels_text);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*solve_app) return solve_cmd(solve, std::cerr);
    if (*exp_app) return experiment_cmd(spec, exp_out, summary, timing);
    return hetero_cmd(het);
  } catch (const ValidationError& e) {
    return report(std::cerr, std::string(category_name(e.category())), e.what(), kExitUsage);
  } catch (const Error& e) {
    return report(std::cerr, std::string(category_name(e.category())), e.what(),
                  exit_code_for(e.category()));
  } catch (const fs::filesystem_error& e) {
    return report(std::cerr, "io", e.what(), kExitIo);
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> storage = args;
  storage.insert(storage.begin(), "stls");
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace stls::cli
