#pragma once

#include <stls/model.hpp>

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace stls::harness {

/// fig1a, fig1b, fig2a, fig2b, fig3, hetero.
const std::vector<std::string>& experiment_names();

struct ExperimentSpec {
  std::string name;
  /// Matrix sizes N (number of conditions for hetero). Empty means the
  /// experiment's defaults.
  std::vector<Index> sizes;
  int trials = 100;
  std::uint64_t seed = 0;
  SolverConfig solver;
  /// Outlier magnitudes (fig3) or relative noise levels (hetero). Empty
  /// means the defaults; ignored elsewhere.
  std::vector<double> levels;
  /// Worker threads; 0 picks the hardware concurrency.
  int threads = 1;
};

struct TrialRecord {
  std::string experiment;
  Index n = 0;
  double level = 0.0;
  int trial = 0;
  std::string method;  ///< SVD, NN, RW-NN or LOGDET
  std::string metric;  ///< relative_error or cosine
  double value = 0.0;
  double wall_time = 0.0;
  /// "ok", or the error category of a failed trial.
  std::string status = "ok";

  bool ok() const noexcept { return status == "ok"; }
};

std::vector<Index> default_sizes(std::string_view experiment);
std::vector<double> default_levels(std::string_view experiment);

/// Throws ValidationError for unknown names, trials < 1, empty or invalid
/// sizes, negative levels.
void validate_spec(const ExperimentSpec& spec);

/// Pure function of its arguments; independent of execution order.
std::uint64_t trial_seed(std::uint64_t master, std::string_view experiment, Index n,
                         std::size_t level_index, int trial);

/// Records in (size, level, trial, method) order regardless of threading.
/// Solver failures become records with a non-"ok" status.
std::vector<TrialRecord> run_experiment(const ExperimentSpec& spec);

/// One record per row. Wall time is written only when `timing` is set, so
/// repeated runs are byte-identical by default.
void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records,
                       bool timing = false);

struct Summary {
  std::string experiment;
  Index n = 0;
  double level = 0.0;
  std::string method;
  std::string metric;
  int count = 0;
  int failed = 0;
  double min = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double q90 = 0.0;
};

/// Statistics over successful trials per (experiment, n, level, method,
/// metric), in first-appearance order.
std::vector<Summary> summarize(const std::vector<TrialRecord>& records);
void write_summary_csv(std::ostream& out, const std::vector<Summary>& rows);

/// Linear-interpolation quantile of an unsorted sample, q in [0, 1].
double quantile(std::vector<double> values, double q);

// Instance generators, one per experiment family.

Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng);
/// Toeplitz matrix whose first row and column are i.i.d. Gaussian.
Matrix gaussian_toeplitz(Index n, std::mt19937_64& rng);
/// Indicator of entries fixed independently with probability p.
Matrix random_mask(Index rows, Index cols, double p, std::mt19937_64& rng);

struct OutlierOptions {
  Index n = 20;
  Index block = 5;
  double outlier_fraction = 0.05;
  double outlier_weight = 0.01;
  /// Dense Gaussian noise on free entries, relative to the data RMS.
  double noise = 0.01;
};

struct OutlierInstance {
  StlsProblem problem;
  /// Unit null vector of the exact rank-(n-1) matrix.
  Vector true_null;
  /// Indicator of the corrupted entries.
  Matrix outliers;
};

/// Exact rank-(n-1) matrix with errors confined to diagonal blocks, a
/// fraction of which carry outliers of size `magnitude` times the data RMS.
/// Outlier positions get the small weight; everything off the blocks is
/// fixed.
OutlierInstance outlier_instance(double magnitude, std::uint64_t seed,
                                 const OutlierOptions& opts = {});

}  // namespace stls::harness
