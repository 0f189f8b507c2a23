#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wrmc/errors.hpp"
#include "wrmc/linalg.hpp"

namespace wrmc {

/// Ordered finite state space; states are addressed by index everywhere,
/// labels only appear at the file-format boundary.
struct StateSpace {
  std::vector<std::string> labels;

  std::size_t size() const { return labels.size(); }
  /// Index of a label, -1 if unknown.
  int index_of(const std::string& label) const;
};

struct TargetDistribution {
  Vec pi;  // strictly positive, sums to 1
};

/// Proposal transition matrix of the single-proposal sampler.
/// Rows are stochastic, support is zero-symmetric and strongly connected.
struct SelectionMatrix {
  Matrix q;
};

enum class AcceptanceVariant { kMetropolis, kAlphaBarker, kExplicitRho };

/// Acceptance probability rule. Metropolis uses gamma(u) = min(1,u),
/// AlphaBarker uses gamma(u) = alpha*u/(1+u) with alpha in (0,2), and
/// ExplicitRho supplies the probabilities directly (they must satisfy the
/// detailed-balance precondition against pi and Q).
struct AcceptanceRule {
  AcceptanceVariant variant = AcceptanceVariant::kMetropolis;
  double alpha = 1.0;  // AlphaBarker only
  Matrix rho;          // ExplicitRho only; entries meaningful where q > 0
};

/// One proposal set with its selection weight. Member indices are sorted
/// and distinct and always include the owning state.
struct ProposalSet {
  std::vector<int> states;
  double prob = 0.0;
};

/// Distribution over proposal sets, per starting state.
struct MultiProposalKernel {
  std::vector<std::vector<ProposalSet>> support;

  /// Q(x, A); zero when A is not in x's support.
  double weight(int x, const std::vector<int>& set) const;
  /// Position of A in x's support list, -1 if absent.
  int set_index(int x, const std::vector<int>& set) const;
};

enum class SelectionVariant { kMetropolisKappa, kBoltzmannKappa, kExplicitKappa };

/// Rule choosing the next state inside a proposal set.
struct SelectionKernelSpec {
  SelectionVariant variant = SelectionVariant::kBoltzmannKappa;
  /// ExplicitKappa only: table[x][s] is the probability vector on
  /// kernel.support[x][s].states.
  std::vector<std::vector<Vec>> table;
};

struct SingleProposal {
  SelectionMatrix selection;
  AcceptanceRule acceptance;
  /// Compiled acceptance probabilities for every q(x,y) > 0 pair
  /// (filled by compile_model; identical to rho_matrix output).
  Matrix rho;
};

struct MultiProposal {
  MultiProposalKernel kernel;
  SelectionKernelSpec selection;
  /// Compiled selection weights: kappa[x][s] lives on support[x][s].states.
  std::vector<std::vector<Vec>> kappa;
};

/// A validated sampling problem: target plus exactly one proposal mechanism.
/// Immutable after construction; safe to share across threads.
struct Model {
  StateSpace states;
  TargetDistribution target;
  std::optional<SingleProposal> single;
  std::optional<MultiProposal> multi;

  bool is_single() const { return single.has_value(); }
  std::size_t size() const { return states.size(); }
};

struct ValidationCheck {
  std::string name;
  bool pass = false;
  double residual = 0.0;  // max absolute residual where meaningful
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool ok() const;
  /// "name: detail" of the first failing check, empty when all pass.
  std::string first_failure() const;
};

/// Structural parse of the JSON model format. Shapes, labels and number
/// syntax are enforced here; probabilistic invariants are left to
/// validate_model. Throws ParseError.
Model parse_model_json(const std::string& text);

/// Runs every named invariant check and reports pass/fail with residuals.
/// Never throws on a bad model; failures are report entries.
ValidationReport validate_model(const Model& m);

/// parse + validate + compile. Throws ParseError or ValidationError
/// (naming the violated invariant).
Model load_model(const std::string& text);
Model load_model_file(const std::string& path);

/// Fills the compiled acceptance/selection caches. Assumes a valid model.
void compile_model(Model& m);

/// Acceptance probabilities for all pairs with q(x,y) > 0 (including the
/// diagonal). Entries at q(x,y) = 0 are left at zero and are meaningless.
Matrix rho_matrix(const Vec& pi, const Matrix& q, const AcceptanceRule& rule);

/// Embeds a single-proposal model as a multi-proposal one over pair sets:
/// Q(x,{x,y}) = q(x,y), kappa(x,{x,y},y) = rho(x,y). Reproduces the same
/// chain and all variance quantities.
Model pair_embedding(const Model& m);

/// Function file: JSON object mapping every state label to a value.
/// A missing or extra label is an error. Values may be numbers or exact
/// rational strings like "21/60".
Vec parse_function_json(const std::string& text, const StateSpace& states);
Vec load_function_file(const std::string& path, const StateSpace& states);

}  // namespace wrmc
