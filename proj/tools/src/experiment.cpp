#include <stls/harness/experiment.hpp>

#include <stls/alm.hpp>
#include <stls/error.hpp>
#include <stls/heterogeneity.hpp>
#include <stls/linalg.hpp>
#include <stls/tls.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

namespace stls::harness {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Job {
  Index n = 0;
  std::size_t level_index = 0;
  double level = 0.0;
  int trial = 0;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Runs `body` and turns it into one record; failures keep the category.
TrialRecord measure(const std::string& experiment, const Job& job, std::string method,
                    std::string metric, const std::function<double()>& body) {
  TrialRecord r;
  r.experiment = experiment;
  r.n = job.n;
  r.level = job.level;
  r.trial = job.trial;
  r.method = std::move(method);
  r.metric = std::move(metric);
  const auto t0 = Clock::now();
  try {
    r.value = body();
    if (!std::isfinite(r.value)) {
      r.status = "non-finite";
      r.value = 0.0;
    }
  } catch (const Error& e) {
    r.status = category_name(e.category());
    r.value = 0.0;
  }
  r.wall_time = seconds_since(t0);
  return r;
}

std::vector<TrialRecord> nn_vs_rwnn(const std::string& name, const Job& job,
                                    const StlsProblem& p, const SolverConfig& cfg) {
  std::vector<TrialRecord> out;
  out.push_back(measure(name, job, "NN", "relative_error", [&] {
    return relative_error(p, nn_stls(p, cfg).first);
  }));
  out.push_back(measure(name, job, "RW-NN", "relative_error", [&] {
    return relative_error(p, reweighted_stls(p, cfg).first);
  }));
  return out;
}

std::vector<TrialRecord> run_trial(const ExperimentSpec& spec, const Job& job) {
  const std::uint64_t seed = trial_seed(spec.seed, spec.name, job.n, job.level_index, job.trial);
  std::mt19937_64 rng(seed);
  const SolverConfig& cfg = spec.solver;
  const std::string& name = spec.name;

  if (name == "fig1a") {
    return nn_vs_rwnn(name, job, StlsProblem::make(gaussian_matrix(job.n, job.n, rng)), cfg);
  }
  if (name == "fig1b") {
    const Matrix a = gaussian_matrix(job.n, job.n, rng);
    return {measure(name, job, "LOGDET", "relative_error",
                    [&] { return relative_error(a, logdet_tls(a).a_hat); })};
  }
  if (name == "fig2a") {
    const Matrix a = gaussian_matrix(job.n, job.n, rng);
    const Matrix mask = random_mask(job.n, job.n, 0.5, rng);
    return nn_vs_rwnn(name, job, StlsProblem::make(a, FixedMask::from_indicator(mask)), cfg);
  }
  if (name == "fig2b") {
    return nn_vs_rwnn(name, job, StlsProblem::make(gaussian_toeplitz(job.n, rng), Toeplitz{}),
                      cfg);
  }
  if (name == "fig3") {
    OutlierOptions opts;
    opts.n = job.n;
    const OutlierInstance inst = outlier_instance(job.level, seed, opts);
    std::vector<TrialRecord> out;
    out.push_back(measure(name, job, "SVD", "cosine", [&] {
      return hetero::cosine(min_right_singular_vector(inst.problem.a_bar), inst.true_null);
    }));
    out.push_back(measure(name, job, "RW-NN", "cosine", [&] {
      return hetero::cosine(reweighted_stls(inst.problem, cfg).first.null_vec, inst.true_null);
    }));
    return out;
  }
  // hetero: N conditions, default gene/state counts
  const hetero::Instance inst = hetero::synthesize(14, 2, job.n, job.level, seed);
  std::vector<TrialRecord> out;
  out.push_back(measure(name, job, "SVD", "cosine", [&] {
    return *hetero::solve_noiseless(inst).cosine_to_truth;
  }));
  out.push_back(measure(name, job, "RW-NN", "cosine", [&] {
    return *hetero::solve_noisy(inst, cfg).cosine_to_truth;
  }));
  return out;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"fig1a", "fig1b", "fig2a",
                                                 "fig2b", "fig3",  "hetero"};
  return names;
}

std::vector<Index> default_sizes(std::string_view experiment) {
  if (experiment == "fig1a" || experiment == "fig1b") return {10, 20, 30};
  if (experiment == "fig2a" || experiment == "fig2b") return {10, 20};
  if (experiment == "fig3") return {20};
  if (experiment == "hetero") return {6};
  return {};
}

std::vector<double> default_levels(std::string_view experiment) {
  if (experiment == "fig3") return {1.0, 5.0, 10.0, 20.0};
  if (experiment == "hetero") return {0.0, 0.001, 0.01, 0.05};
  return {0.0};
}

void validate_spec(const ExperimentSpec& spec) {
  std::vector<std::string> v;
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), spec.name) == names.end())
    v.push_back("unknown experiment '" + spec.name + "'");
  if (spec.trials < 1) v.push_back("trials must be >= 1");
  if (spec.threads < 0) v.push_back("threads must be >= 0");
  const std::vector<Index> sizes = spec.sizes.empty() ? default_sizes(spec.name) : spec.sizes;
  if (sizes.empty()) v.push_back("sizes must be nonempty");
  for (const Index n : sizes) {
    const Index smallest = spec.name == "hetero" ? 1 : 2;
    if (n < smallest) v.push_back("size " + std::to_string(n) + " is too small");
    if (spec.name == "fig3" && n % OutlierOptions{}.block != 0)
      v.push_back("fig3 sizes must be multiples of the block size 5");
  }
  for (const double l : spec.levels)
    if (!(l >= 0.0) || !std::isfinite(l)) v.push_back("levels must be finite and >= 0");
  if (!v.empty()) throw ValidationError(std::move(v));
}

std::uint64_t trial_seed(std::uint64_t master, std::string_view experiment, Index n,
                         std::size_t level_index, int trial) {
  std::uint64_t h = splitmix64(master ^ fnv1a(experiment));
  h = splitmix64(h ^ static_cast<std::uint64_t>(n));
  h = splitmix64(h ^ static_cast<std::uint64_t>(level_index));
  return splitmix64(h ^ static_cast<std::uint64_t>(trial));
}

std::vector<TrialRecord> run_experiment(const ExperimentSpec& spec) {
  validate_spec(spec);
  const std::vector<Index> sizes = spec.sizes.empty() ? default_sizes(spec.name) : spec.sizes;
  const std::vector<double> levels =
      spec.levels.empty() || (spec.name != "fig3" && spec.name != "hetero")
          ? default_levels(spec.name)
          : spec.levels;

  std::vector<Job> jobs;
  for (const Index n : sizes)
    for (std::size_t li = 0; li < levels.size(); ++li)
      for (int t = 0; t < spec.trials; ++t) jobs.push_back({n, li, levels[li], t});

  std::vector<std::vector<TrialRecord>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) results[i] = run_trial(spec, jobs[i]);
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const auto threads = static_cast<std::size_t>(
      std::min<std::size_t>(spec.threads == 0 ? hw : static_cast<unsigned>(spec.threads),
                            jobs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  std::vector<TrialRecord> out;
  for (auto& r : results) std::move(r.begin(), r.end(), std::back_inserter(out));
  return out;
}

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records,
                       bool timing) {
  out << "experiment,n,level,trial,method,metric,value,status";
  if (timing) out << ",wall_time";
  out << '\n';
  for (const auto& r : records) {
    out << r.experiment << ',' << r.n << ',' << format17(r.level) << ',' << r.trial << ','
        << r.method << ',' << r.metric << ',' << (r.ok() ? format17(r.value) : "") << ','
        << r.status;
    if (timing) out << ',' << format17(r.wall_time);
    out << '\n';
  }
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<Summary> summarize(const std::vector<TrialRecord>& records) {
  using Key = std::tuple<std::string, Index, double, std::string, std::string>;
  std::vector<Key> order;
  std::map<Key, std::pair<std::vector<double>, int>> groups;
  for (const auto& r : records) {
    const Key key{r.experiment, r.n, r.level, r.method, r.metric};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    if (r.ok())
      it->second.first.push_back(r.value);
    else
      ++it->second.second;
  }
  std::vector<Summary> out;
  for (const auto& key : order) {
    const auto& [values, failed] = groups.at(key);
    Summary s;
    std::tie(s.experiment, s.n, s.level, s.method, s.metric) = key;
    s.count = static_cast<int>(values.size());
    s.failed = failed;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.min = values.empty() ? nan : *std::min_element(values.begin(), values.end());
    s.mean = values.empty() ? nan
                            : std::accumulate(values.begin(), values.end(), 0.0) /
                                  static_cast<double>(values.size());
    s.median = quantile(values, 0.5);
    s.q90 = quantile(values, 0.9);
    out.push_back(std::move(s));
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<Summary>& rows) {
  out << "experiment,n,level,method,metric,count,failed,min,mean,median,q90\n";
  for (const auto& s : rows)
    out << s.experiment << ',' << s.n << ',' << format17(s.level) << ',' << s.method << ','
        << s.metric << ',' << s.count << ',' << s.failed << ',' << format17(s.min) << ','
        << format17(s.mean) << ',' << format17(s.median) << ',' << format17(s.q90) << '\n';
}

Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = g(rng);
  return m;
}

Matrix gaussian_toeplitz(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  // diagonal offset k = col - row from -(n-1) to n-1
  Vector diag(2 * n - 1);
  for (Index k = 0; k < diag.size(); ++k) diag(k) = g(rng);
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = diag(j - i + n - 1);
  return m;
}

Matrix random_mask(Index rows, Index cols, double p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = u(rng) < p ? 1.0 : 0.0;
  return m;
}

OutlierInstance outlier_instance(double magnitude, std::uint64_t seed,
                                 const OutlierOptions& opts) {
  const Index n = opts.n;
  if (n < 2 || opts.block < 1 || n % opts.block != 0)
    throw Error(ErrorCategory::invalid_input,
                "outlier_instance: n must be a positive multiple of the block size");
  if (!(magnitude >= 0.0))
    throw Error(ErrorCategory::invalid_input, "outlier_instance: magnitude must be >= 0");
  std::mt19937_64 rng(seed);

  const Matrix exact = gaussian_matrix(n, n - 1, rng) * gaussian_matrix(n - 1, n, rng) /
                       std::sqrt(static_cast<double>(n - 1));
  const double rms = exact.norm() / static_cast<double>(n);

  Matrix free = Matrix::Zero(n, n);
  for (Index b = 0; b < n; b += opts.block) free.block(b, b, opts.block, opts.block).setOnes();
  std::vector<Index> positions;
  for (Index k = 0; k < free.size(); ++k)
    if (free(k) != 0.0) positions.push_back(k);

  std::normal_distribution<double> g(0.0, 1.0);
  Matrix noisy = exact;
  for (const Index k : positions) noisy(k) += opts.noise * rms * g(rng);

  std::shuffle(positions.begin(), positions.end(), rng);
  const auto count = static_cast<std::size_t>(
      std::lround(opts.outlier_fraction * static_cast<double>(positions.size())));
  OutlierInstance inst;
  inst.outliers = Matrix::Zero(n, n);
  std::bernoulli_distribution sign(0.5);
  for (std::size_t i = 0; i < count && i < positions.size(); ++i) {
    const Index k = positions[i];
    noisy(k) += (sign(rng) ? 1.0 : -1.0) * magnitude * rms;
    inst.outliers(k) = 1.0;
  }

  inst.problem = StlsProblem::make(noisy, FixedMask::from_indicator(Matrix::Ones(n, n) - free));
  for (Index k = 0; k < inst.outliers.size(); ++k)
    if (inst.outliers(k) != 0.0) inst.problem.weights(k) = opts.outlier_weight;
  inst.true_null = min_right_singular_vector(exact);
  return inst;
}

}  // namespace stls::harness
