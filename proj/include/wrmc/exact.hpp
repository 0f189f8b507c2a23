#pragma once

#include <optional>

#include "wrmc/model.hpp"

namespace wrmc {

/// Row-stochastic transition matrix, reversible w.r.t. the target.
/// Constructed only through the build_p_* routines, which verify
/// stochasticity (1e-12), reversibility (1e-12) and invariance (1e-12).
struct TransitionMatrix {
  Matrix p;
};

/// p(x,y) = q(x,y) rho(x,y) off the diagonal, rows completed to 1.
TransitionMatrix build_p_single(const Vec& pi, const Matrix& q, const AcceptanceRule& rule);

/// p(x,y) = sum_{A containing x,y} Q(x,A) kappa(x,A,y).
/// Fails with a ComputeError naming unreachable ordered pairs when the
/// resulting chain is not irreducible.
TransitionMatrix build_p_multi(const Vec& pi, const MultiProposalKernel& kernel,
                               const SelectionKernelSpec& spec);

TransitionMatrix build_p(const Model& m);

/// Selection weights kappa(x, subset, .) as a probability vector aligned
/// with `subset`. Works for any admissible (x, subset) pair under the
/// Metropolis/Boltzmann rules; explicit tables require the subset to be in
/// x's support.
Vec kappa_of(const Vec& pi, const MultiProposalKernel& kernel, const SelectionKernelSpec& spec,
             int x, const std::vector<int>& subset);

/// Solution of F - PF = f - <pi,f> normalized to <pi,F> = 0.
struct PoissonSolution {
  Vec f_centered;
  Vec F;
  double residual;  // max |F - PF - f_centered|, < 1e-10 by contract
};

PoissonSolution solve_poisson(const Matrix& p, const Vec& pi, const Vec& f);

/// Asymptotic variance of the plain empirical mean: <pi,F^2> - <pi,(PF)^2>.
double sigma2(const Vec& pi, const Matrix& p, const Vec& f);

/// Asymptotic variance of the waste-recycling/control-variate estimator
/// with correction function psi, single-proposal chain.
double sigma2_cv_single(const Vec& pi, const Matrix& q, const AcceptanceRule& rule, const Vec& f,
                        const Vec& psi);

/// Same quantity for a multi-proposal chain:
/// sigma2 + sum_{x,A} pi(x) Q(x,A) [Var_kappa(psi - F) - Var_kappa(F)].
double sigma2_cv_multi(const Vec& pi, const MultiProposalKernel& kernel,
                       const SelectionKernelSpec& spec, const Vec& f, const Vec& psi);

double sigma2_cv(const Model& m, const Vec& f, const Vec& psi);

/// Minimal achievable control-variate variance (correction = F):
/// sum_x pi(x) Var_{Q(x,.)}(A -> <kappa_{x,A}, F>).
double sigma2_opt(const Vec& pi, const Matrix& q, const AcceptanceRule& rule, const Vec& f);
double sigma2_opt(const Vec& pi, const MultiProposalKernel& kernel,
                  const SelectionKernelSpec& spec, const Vec& f);
double sigma2_opt(const Model& m, const Vec& f);

/// Optimal coefficient for the parametric correction b*f:
/// Var_pi(f) / <pi, f^2 - f Pf>. Absent when f is constant.
std::optional<double> b_star(const Vec& pi, const Matrix& p, const Vec& f);

/// 0.5 sum_{x,y} pi(x) p(x,y) (f0(x) + f0(y))^2 with f0 = f - <pi,f>.
double delta_f(const Vec& pi, const Matrix& p, const Vec& f);

double var_pi(const Vec& pi, const Vec& f);

/// Asymptotic variance of the estimator whose per-step correction
/// conditions on the current state only (the A-marginalized variant).
double sigma2_tilde(const Vec& pi, const MultiProposalKernel& kernel,
                    const SelectionKernelSpec& spec, const Vec& f, const Vec& psi);

/// <pi, h Ph + (alpha-1) h^2> under a constant-sum acceptance rule
/// (rho(x,y) + rho(y,x) == alpha on the off-diagonal support). Errors when
/// the rule is not constant-sum.
double hph_form(const Vec& pi, const Matrix& q, const AcceptanceRule& rule, const Vec& h);

/// The constant alpha of a constant-sum rule, verified constant across all
/// admissible pairs within 1e-12. Throws ComputeError otherwise.
double constant_sum_alpha(const Vec& pi, const Matrix& q, const AcceptanceRule& rule);

/// Every closed-form quantity for one (model, f[, psi]) problem.
struct VarianceReport {
  double sigma2 = 0.0;
  std::optional<double> sigma2_cv;     // psi supplied
  double sigma2_opt = 0.0;
  double delta_f = 0.0;
  std::optional<double> b_star;        // absent for constant f
  double var_pi_f = 0.0;
  std::optional<double> sigma2_tilde;  // requested, multi-proposal only
};

VarianceReport variance_report(const Model& m, const Vec& f, const Vec* psi, bool want_tilde);

}  // namespace wrmc
