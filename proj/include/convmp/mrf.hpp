#pragma once

// Pairwise max-sum problems F(theta) = max_x sum_i theta_{i,x_i} + sum_{ij} theta_{ij,x_i x_j}
// and their message reparameterizations.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "convmp/numeric.hpp"

namespace convmp {

struct Edge {
  std::size_t u;  // u < v
  std::size_t v;
};

/// One direction of an edge as seen from `node`.
struct Arc {
  std::size_t node;      // i
  std::size_t neighbor;  // j
  std::size_t edge;      // index into edges()
  std::size_t reverse;   // arc index of (j, i)
};

class PairwiseModel {
 public:
  PairwiseModel() = default;
  PairwiseModel(std::size_t num_nodes, std::size_t num_labels);

  /// Adds {i,j}; `weights` is |L|x|L| row-major with rows indexed by the
  /// label of i. Stored with the smaller endpoint first.
  std::size_t add_edge(std::size_t i, std::size_t j, std::vector<double> weights);

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_labels() const { return num_labels_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }

  double unary(std::size_t i, std::size_t x) const { return unary_[i * num_labels_ + x]; }
  double& unary(std::size_t i, std::size_t x) { return unary_[i * num_labels_ + x]; }
  /// theta_{e, xy} with x the label of edges()[e].u.
  double pairwise(std::size_t e, std::size_t x, std::size_t y) const {
    return pairwise_[(e * num_labels_ + x) * num_labels_ + y];
  }
  double& pairwise(std::size_t e, std::size_t x, std::size_t y) {
    return pairwise_[(e * num_labels_ + x) * num_labels_ + y];
  }
  /// theta_{ij, xy} for arc (i, j): x is the label of i whatever the storage orientation.
  double arc_pairwise(std::size_t arc, std::size_t x, std::size_t y) const;

  std::span<const double> unary_weights() const { return unary_; }
  std::span<const double> pairwise_weights() const { return pairwise_; }
  std::span<double> unary_weights() { return unary_; }
  std::span<double> pairwise_weights() { return pairwise_; }

  /// Directed arcs grouped by node (i ascending, j ascending within N_i).
  /// Valid after finalize().
  const std::vector<Arc>& arcs() const { return arcs_; }
  std::span<const Arc> arcs_of(std::size_t i) const {
    return std::span<const Arc>(arcs_).subspan(arc_begin_[i], arc_begin_[i + 1] - arc_begin_[i]);
  }
  std::size_t arc_begin(std::size_t i) const { return arc_begin_[i]; }
  std::size_t degree(std::size_t i) const { return arc_begin_[i + 1] - arc_begin_[i]; }

  /// Builds the arc structure and rejects duplicate edges. Must be called
  /// after the last add_edge and before any arc access.
  void finalize();

  /// Checks finiteness; throws InputError otherwise.
  void validate() const;

  /// Objective of a labeling.
  double labeling_value(std::span<const std::size_t> labeling) const;

  /// |L|^|V|, saturating at UINT64_MAX.
  std::uint64_t num_labelings() const;

 private:
  std::size_t num_nodes_ = 0;
  std::size_t num_labels_ = 0;
  std::vector<double> unary_;
  std::vector<Edge> edges_;
  std::vector<double> pairwise_;
  std::vector<Arc> arcs_;
  std::vector<std::size_t> arc_begin_;
};

/// Messages delta_{ij,x}, one per triplet (i, j, x) in canonical order:
/// index = arc * |L| + x.
struct MessageVector {
  std::vector<double> values;

  static MessageVector zeros(const PairwiseModel& model) {
    return {std::vector<double>(model.arcs().size() * model.num_labels(), 0.0)};
  }
};

/// Triplet (i, j, x) addressed by arc index and label.
struct Triplet {
  std::size_t arc;
  std::size_t label;
};

std::size_t triplet_index(const PairwiseModel& model, Triplet t);

/// theta^delta: unary -= sum_j delta_{ij,x}; pairwise += delta_{ij,x} + delta_{ji,y}.
PairwiseModel reparameterize(const PairwiseModel& model, const MessageVector& delta);

/// sum_i max_x theta_{i,x} + sum_{ij} max_{xy} theta_{ij,xy}
double bound_u1(const PairwiseModel& model);
/// max over all weights
double bound_u2(const PairwiseModel& model);

/// |L| * sum_{i,x} theta_{i,x} + sum_{ij,xy} theta_{ij,xy}: a non-negative
/// combination of the weights that no message changes.
double invariant_weight_sum(const PairwiseModel& model);

/// sum over triplets (i,j,x) of (|L| theta_{i,x} + sum_y theta_{ij,xy}),
/// taken literally; message-invariant only when every node has degree 2.
double triplet_weight_sum(const PairwiseModel& model);

/// Builds an R x C grid (node r*C + c, 4-neighbourhood) with zero weights.
PairwiseModel make_grid(std::size_t rows, std::size_t cols, std::size_t num_labels);

}  // namespace convmp
