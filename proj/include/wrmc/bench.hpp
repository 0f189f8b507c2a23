#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wrmc/chain.hpp"
#include "wrmc/exact.hpp"

namespace wrmc {

struct BenchConfig {
  std::vector<std::size_t> n_list{1, 2, 5, 10, 100, 1000};
  std::size_t reps = 10000;
  double level = 0.95;
  std::uint64_t seed = 0;
  ChainInit init = ChainInit::stationary();
  bool include_wr = true;        // waste-recycling column + paired difference
  bool include_adaptive = false;
  bool include_ppsi = false;
  bool scale_by_n = true;        // report n * Var(estimator); see README
  bool parallel = true;          // OpenMP over replications
  /// Budget on total simulated steps (sum over rows of n * reps); the
  /// WRMC_MAX_STEPS environment variable overrides it.
  std::size_t max_steps = 1000000000ULL;
};

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double v) const { return lo <= v && v <= hi; }
};

struct BenchColumn {
  std::string name;  // "mh", "wr", "adaptive", "ppsi"
  ConfidenceInterval var;
  /// Paired-difference interval mh - <this column>; only on "wr".
  std::optional<ConfidenceInterval> diff;
};

struct BenchRow {
  std::size_t n = 0;
  std::vector<BenchColumn> columns;
  const BenchColumn* find(const std::string& name) const;
};

struct BenchTable {
  BenchConfig cfg;
  double exact_sigma2 = 0.0;                // annotation from the exact engine
  std::optional<double> exact_sigma2_cv;    // when the wr column is present
  std::vector<BenchRow> rows;
};

/// Replicated variance study: for each n, `reps` independent chains (one
/// RNG stream per replication), the scaled sample variance of each
/// estimator with an asymptotic-normality confidence interval, and the
/// paired difference between the plain and waste-recycling estimators.
/// Deterministic in (model, f, psi, cfg) regardless of thread count.
BenchTable run_bench(const Model& m, const Vec& f, const Vec& psi, const BenchConfig& cfg);

/// Plain-loop reference implementation; produces bit-identical tables and
/// exists so the parallel path can be checked and timed against it.
BenchTable run_bench_serial(const Model& m, const Vec& f, const Vec& psi, BenchConfig cfg);

/// Built-in 3-state single-proposal model (explicit acceptance
/// probabilities) whose waste-recycling estimator has a strictly larger
/// asymptotic variance than the plain one, together with the observable
/// f(x) = 1_{x=c} - p(x,c) integrating to zero.
struct CounterExample {
  Model model;
  Vec f;
};

CounterExample counterexample_model();

/// Standard normal quantile (Acklam's rational approximation, |eps| < 2e-9).
double normal_quantile(double p);

std::string format_bench_text(const BenchTable& t);
std::string format_bench_csv(const BenchTable& t);

}  // namespace wrmc
