#pragma once

#include <optional>

#include "wrmc/chain.hpp"
#include "wrmc/exact.hpp"

namespace wrmc {

/// All estimates extracted from one realized chain.
struct EstimateReport {
  double i_n = 0.0;                     // plain empirical mean of f
  double j_n = 0.0;                     // control-variate correction for psi
  double i_n_cv = 0.0;                  // i_n + j_n, computed as that sum
  std::optional<double> b_hat;          // plug-in optimal coefficient
  double i_n_adaptive = 0.0;            // i_n + b_hat * J_n(f); i_n if b_hat absent
  std::optional<double> i_n_ppsi;       // mean of f - psi + P psi (needs P)
  std::optional<double> j_prime_n;      // correction under an alternate kernel
  std::size_t n = 0;
};

/// An alternate selection kernel kappa' for the same (pi, Q). Construction
/// verifies the reversibility condition, so corrections built from it keep
/// the estimator consistent.
struct AlternateKernel {
  SelectionKernelSpec spec;
  std::vector<std::vector<Vec>> kappa;  // aligned with kernel.support
};

/// Validates kappa' against the model (reversibility within 1e-12, rows
/// normalized) and precomputes its tables. Throws ValidationError.
AlternateKernel make_alternate_kernel(const Model& m, const SelectionKernelSpec& spec);

/// Streaming fold of every estimator over chain steps. The offline
/// estimate() calls and the streaming harness share this class, so the two
/// paths agree bit-for-bit on the same realization.
class EstimatorAccumulator {
 public:
  /// p_psi: precomputed (P psi)(x), enables i_n_ppsi. alt: enables j_prime.
  EstimatorAccumulator(const Model& m, const Vec& f, const Vec& psi, const Vec* p_psi,
                       const AlternateKernel* alt);

  void start(int x0);
  void step(std::size_t k, int prev, const SingleStep& s);
  void step(std::size_t k, int prev, const MultiStepView& s);

  EstimateReport report() const;

 private:
  const Model* model_;
  const Vec* f_;
  const Vec* psi_;
  Vec g_ppsi_;  // f - psi + P psi, when p_psi given
  const AlternateKernel* alt_;
  bool has_ppsi_ = false;

  KahanSum sum_f_, sum_f2_, sum_lag_, sum_j_psi_, sum_j_f_, sum_g_, sum_jp_;
  std::size_t steps_ = 0;
};

/// Folds a recorded trace. psi defaults to f when null.
EstimateReport estimate(const ChainTrace& trace, const Model& m, const Vec& f, const Vec& psi);

/// Same, with the transition matrix supplied so the report carries
/// i_n_ppsi, and optionally an alternate kernel for j_prime_n.
EstimateReport estimate(const ChainTrace& trace, const Model& m, const Vec& f, const Vec& psi,
                        const Matrix* p, const AlternateKernel* alt);

/// Plug-in estimator of the optimal coefficient:
/// (I_n(f^2) - I_n(f)^2) / (I_n(f^2) - (1/n) sum f(X_{k-1}) f(X_k)).
/// Absent when the denominator is below 1e-12 in magnitude.
std::optional<double> b_hat(const ChainTrace& trace, const Model& m, const Vec& f);

/// I_n(f - psi + P psi). For psi = F (Poisson solution) this is the exact
/// target value on every trace.
double estimate_ppsi(const ChainTrace& trace, const Model& m, const Vec& f, const Vec& psi,
                     const Matrix& p);

/// Correction term built from kappa' instead of the chain's kernel:
/// (1/n) sum_k [ <kappa'(X_k, A_{k+1}, .), psi> - psi(X_{k+1}) ].
/// Multi-proposal traces only.
double j_prime(const ChainTrace& trace, const Model& m, const Vec& psi,
               const AlternateKernel& alt);

/// Streaming equivalent of run_chain + estimate: folds estimators online
/// without materializing the trace. Bit-identical to the offline path for
/// the same (model, n, seed, init).
EstimateReport simulate_and_estimate(const Model& m, std::size_t n, std::uint64_t seed,
                                     const ChainInit& init, const Vec& f, const Vec& psi,
                                     const Matrix* p = nullptr,
                                     const AlternateKernel* alt = nullptr);

}  // namespace wrmc
