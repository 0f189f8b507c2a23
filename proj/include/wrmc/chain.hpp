#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "wrmc/model.hpp"
#include "wrmc/rng.hpp"

namespace wrmc {

/// Initial distribution: exact inverse-CDF draw from pi, or a point mass.
class ChainInit {
 public:
  static ChainInit stationary() { return ChainInit(true, 0); }
  static ChainInit at_state(int state) { return ChainInit(false, state); }

  bool is_stationary() const { return stationary_; }
  int state() const { return state_; }

 private:
  ChainInit(bool s, int x) : stationary_(s), state_(x) {}
  bool stationary_;
  int state_;
};

/// One transition of the single-proposal chain.
struct SingleStep {
  int proposal;
  double acceptance_prob;
  bool accepted;
  int next_state;
};

/// One transition of the multi-proposal chain (owning storage, used in
/// recorded traces).
struct MultiStep {
  int set_index;  // position in support[prev_state]
  std::vector<int> set;
  Vec weights;  // kappa(prev, set, .) aligned with `set`
  int next_state;
};

/// Non-owning view of a multi-proposal step; what estimator folds consume.
/// Streaming mode points straight into the model's compiled tables.
struct MultiStepView {
  int set_index;
  std::span<const int> set;
  std::span<const double> weights;
  int next_state;
};

inline MultiStepView view_of(const MultiStep& s) {
  return MultiStepView{s.set_index, s.set, s.weights, s.next_state};
}

/// Recorded realization of a chain: the initial state plus every step.
struct ChainTrace {
  bool is_single = true;
  int initial_state = 0;
  std::vector<SingleStep> single_steps;
  std::vector<MultiStep> multi_steps;

  std::size_t length() const { return is_single ? single_steps.size() : multi_steps.size(); }
};

/// Initial state draw. Consumes one uniform when stationary.
inline int draw_initial(const Model& m, SplitRng& rng, const ChainInit& init) {
  if (!init.is_stationary()) return init.state();
  return static_cast<int>(sample_discrete(m.target.pi, rng.next_unit()));
}

/// Drives the single-proposal chain for n steps, invoking
/// visitor.start(x0) then visitor.step(k, prev, const SingleStep&) for
/// k = 0..n-1. Pure function of (model, n, rng state, init).
template <class Visitor>
void walk_chain_single(const Model& m, std::size_t n, SplitRng rng, const ChainInit& init,
                       Visitor&& visitor) {
  const SingleProposal& sp = *m.single;
  const std::size_t size = m.size();
  int x = draw_initial(m, rng, init);
  visitor.start(x);
  std::vector<double> row(size);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t y = 0; y < size; ++y) row[y] = sp.selection.q(x, y);
    const int proposal = static_cast<int>(sample_discrete(row, rng.next_unit()));
    const double rho = sp.rho(x, proposal);
    const bool accepted = rng.next_unit() < rho;
    const SingleStep s{proposal, rho, accepted, accepted ? proposal : x};
    visitor.step(k, x, s);
    x = s.next_state;
  }
}

/// Multi-proposal counterpart; visitor.step receives a MultiStepView.
template <class Visitor>
void walk_chain_multi(const Model& m, std::size_t n, SplitRng rng, const ChainInit& init,
                      Visitor&& visitor) {
  const MultiProposal& mp = *m.multi;
  int x = draw_initial(m, rng, init);
  visitor.start(x);
  std::vector<double> set_probs;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& sets = mp.kernel.support[x];
    set_probs.resize(sets.size());
    for (std::size_t s = 0; s < sets.size(); ++s) set_probs[s] = sets[s].prob;
    const int s = static_cast<int>(sample_discrete(set_probs, rng.next_unit()));
    const ProposalSet& chosen = sets[s];
    const Vec& kappa = mp.kappa[x][s];
    const std::size_t pos = sample_discrete(kappa, rng.next_unit());
    const MultiStepView view{s, chosen.states, kappa, chosen.states[pos]};
    visitor.step(k, x, view);
    x = view.next_state;
  }
}

/// Runs the chain and records every step. Deterministic in
/// (model, n, seed, init).
ChainTrace run_chain(const Model& m, std::size_t n, std::uint64_t seed, const ChainInit& init);

/// Recomputes every stored acceptance probability / selection weight from
/// the model and checks the step invariants (tolerance 1e-15). Returns
/// false and fills `why` (if given) on the first mismatch.
bool replay_matches(const Model& m, const ChainTrace& trace, std::string* why = nullptr);

/// Debug dump, one tab-separated record per line:
/// step, state, proposal-or-set, accepted/selected flag.
void write_trace_tsv(std::ostream& os, const Model& m, const ChainTrace& trace);

}  // namespace wrmc
