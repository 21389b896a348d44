#pragma once

// Lagrangian decomposition of a pairwise model into chain subproblems and
// pairwise max-marginal averaging between subproblems sharing a feature.

#include <functional>
#include <optional>
#include <vector>

#include "convmp/maxaff.hpp"
#include "convmp/mrf.hpp"

namespace convmp {

/// Global feature index: unary (v, x) -> v*L + x; pairwise (e, x, y) ->
/// V*L + (e*L + x)*L + y with x the label of edges()[e].u.
struct FeatureIndex {
  std::size_t num_nodes;
  std::size_t num_labels;
  std::size_t num_edges;

  std::size_t size() const { return num_nodes * num_labels + num_edges * num_labels * num_labels; }
  std::size_t unary(std::size_t v, std::size_t x) const { return v * num_labels + x; }
  std::size_t pairwise(std::size_t e, std::size_t x, std::size_t y) const {
    return num_nodes * num_labels + (e * num_labels + x) * num_labels + y;
  }
  bool is_unary(std::size_t f) const { return f < num_nodes * num_labels; }
};

/// Chain over nodes[0..n-1]; edge k joins nodes[k] and nodes[k+1] and its
/// weight table is oriented (label of nodes[k], label of nodes[k+1]).
struct ChainSubproblem {
  std::size_t num_labels = 0;
  std::vector<std::size_t> nodes;
  std::vector<std::size_t> edges;    // base-model edge ids, size n-1
  std::vector<double> unary;         // n * L
  std::vector<double> pairwise;      // (n-1) * L * L

  std::size_t length() const { return nodes.size(); }
  double& unary_at(std::size_t k, std::size_t x) { return unary[k * num_labels + x]; }
  double unary_at(std::size_t k, std::size_t x) const { return unary[k * num_labels + x]; }
  double& pairwise_at(std::size_t k, std::size_t x, std::size_t y) {
    return pairwise[(k * num_labels + x) * num_labels + y];
  }
  double pairwise_at(std::size_t k, std::size_t x, std::size_t y) const {
    return pairwise[(k * num_labels + x) * num_labels + y];
  }
  double labeling_value(std::span<const std::size_t> labels) const;
};

/// Feature local to a chain: a unary (position, label) or a pairwise
/// (position of the left node, left label, right label).
struct ChainFeature {
  bool pairwise = false;
  std::size_t pos = 0;
  std::size_t x = 0;
  std::size_t y = 0;
};

/// max over chain labelings, by forward max-sum dynamic programming.
double chain_value(const ChainSubproblem& chain);

/// Max-marginal of a local feature: best value over labelings activating it.
double chain_max_marginal(const ChainSubproblem& chain, const ChainFeature& feature);

/// Forward/backward tables, reusable for many max-marginals of one chain.
class ChainMessages {
 public:
  explicit ChainMessages(const ChainSubproblem& chain);
  double value() const { return value_; }
  double max_marginal(const ChainFeature& feature) const;

 private:
  const ChainSubproblem* chain_;
  std::vector<double> fwd_;  // best prefix value ending at (k, x), excluding unary k
  std::vector<double> bwd_;  // best suffix value starting at (k, x), excluding unary k
  double value_ = 0.0;
};

struct Membership {
  std::size_t sub;
  ChainFeature local;
};

class DecomposedModel {
 public:
  /// Splits each feature's weight evenly over the chains containing it.
  /// Every feature of the base model must belong to at least one chain.
  DecomposedModel(PairwiseModel base, std::vector<ChainSubproblem> chains);

  const PairwiseModel& base() const { return base_; }
  const FeatureIndex& features() const { return index_; }
  const std::vector<ChainSubproblem>& subproblems() const { return chains_; }
  /// S_i, ordered by subproblem id.
  const std::vector<Membership>& members(std::size_t feature) const { return members_[feature]; }
  /// E_i is the path S_i[0] -> S_i[1] -> ...; edge k of feature i has
  /// message index message_begin(i) + k.
  std::size_t message_begin(std::size_t feature) const { return message_begin_[feature]; }
  std::size_t num_feature_edges(std::size_t feature) const {
    return members_[feature].empty() ? 0 : members_[feature].size() - 1;
  }
  std::size_t num_messages() const { return message_begin_.back(); }

 private:
  PairwiseModel base_;
  FeatureIndex index_;
  std::vector<ChainSubproblem> chains_;
  std::vector<std::vector<Membership>> members_;
  std::vector<std::size_t> message_begin_;
};

/// One row chain per grid row (when the grid has >= 2 columns) and one
/// column chain per grid column (when it has >= 2 rows); a 1x1 grid gets a
/// single one-node chain. Throws InputError if the model's edges are not
/// exactly the rows x cols 4-neighbourhood grid.
DecomposedModel build_rows_cols_decomposition(const PairwiseModel& model, std::size_t rows, std::size_t cols);

/// Finds rows x cols (smallest rows first) whose grid matches the model.
std::pair<std::size_t, std::size_t> infer_grid_shape(const PairwiseModel& model);

/// Message-adjusted chain weights theta^delta_s.
std::vector<ChainSubproblem> apply_messages(const DecomposedModel& decomp, const std::vector<double>& delta);

/// Feature-wise sum over subproblems of chain weights, in global feature order.
std::vector<double> sum_of_subproblems(const DecomposedModel& decomp, const std::vector<ChainSubproblem>& chains);

/// Mutable run state: messages and the current theta^delta_s.
struct MmaState {
  std::vector<double> delta;
  std::vector<ChainSubproblem> chains;
};

MmaState make_mma_state(const DecomposedModel& decomp);

/// d = (F_i(theta_t) - F_i(theta_s)) / 2 on the k-th edge (s, t) of E_i;
/// delta_{st,i} += d, theta_{s,i} += d, theta_{t,i} -= d.
double mma_update(const DecomposedModel& decomp, MmaState& state, std::size_t feature, std::size_t edge);

double mma_residual(const DecomposedModel& decomp, const std::vector<ChainSubproblem>& chains);

/// max_s F(theta_s) and sum_s F(theta_s)
struct DecompositionBounds {
  double max_value;
  double sum_value;
};
DecompositionBounds decomposition_bounds(const std::vector<ChainSubproblem>& chains);

struct MmaEvent {
  std::size_t sweep;
  std::size_t update;
  std::size_t feature;
  std::size_t edge;  // position in E_i
  double step;
  double eta;
  const MmaState& state;
};

struct MmaOptions {
  double eps = 1e-9;
  std::optional<std::size_t> max_sweeps = 10000;
  std::function<void(const MmaEvent&)> observer;
};

struct MmaReport {
  Verdict verdict = Verdict::MaxSweepsReached;
  MmaState state;
  std::size_t sweeps = 0;
  std::size_t updates = 0;
  double eta = 0.0;
  DecompositionBounds bounds{};
  double residual = 0.0;
};

MmaReport run_mma(const DecomposedModel& decomp, const MmaOptions& options);

}  // namespace convmp
