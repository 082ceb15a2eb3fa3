#pragma once

#include <stls/model.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace stls::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitSolver = 4;

struct SolveOptions {
  std::string input;
  /// "none", "toeplitz" or "mask:PATH".
  std::string structure = "none";
  std::string weights;
  /// svd, nn, rwnn or logdet.
  std::string method = "rwnn";
  std::optional<Index> target_rank;
  std::string out;
  std::optional<std::uint64_t> seed;
  SolverConfig solver;
};

/// Writes a_hat.csv, e_hat.csv, null_vec.csv and diagnostics.json into
/// `opts.out`. Returns the process exit status; failures print one JSON
/// line {"error": category, "message": ...} to `err`.
int solve_cmd(const SolveOptions& opts, std::ostream& err);

/// Full command line: solve, experiment or hetero.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

/// STLS_SEED when set and numeric, else `fallback`.
std::uint64_t default_seed(std::uint64_t fallback = 0);

}  // namespace stls::cli
