#include "convmp/mrf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "convmp/kernels.hpp"

namespace convmp {

PairwiseModel::PairwiseModel(std::size_t num_nodes, std::size_t num_labels)
    : num_nodes_(num_nodes), num_labels_(num_labels), unary_(num_nodes * num_labels, 0.0) {
  if (num_labels == 0) throw InputError("label set must be non-empty");
  finalize();
}

std::size_t PairwiseModel::add_edge(std::size_t i, std::size_t j, std::vector<double> weights) {
  const std::size_t L = num_labels_;
  if (i >= num_nodes_ || j >= num_nodes_) throw InputError("edge endpoint out of range");
  if (i == j) throw InputError("self-loop on node " + std::to_string(i));
  if (weights.size() != L * L) throw InputError("edge weight table must have |L|*|L| entries");
  if (i > j) {
    std::vector<double> t(L * L);
    for (std::size_t x = 0; x < L; ++x)
      for (std::size_t y = 0; y < L; ++y) t[y * L + x] = weights[x * L + y];
    weights = std::move(t);
    std::swap(i, j);
  }
  edges_.push_back({i, j});
  pairwise_.insert(pairwise_.end(), weights.begin(), weights.end());
  return edges_.size() - 1;
}

void PairwiseModel::finalize() {
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(num_nodes_);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    adj[edges_[e].u].push_back({edges_[e].v, e});
    adj[edges_[e].v].push_back({edges_[e].u, e});
  }
  arcs_.clear();
  arc_begin_.assign(num_nodes_ + 1, 0);
  for (std::size_t i = 0; i < num_nodes_; ++i) {
    auto& nb = adj[i];
    std::sort(nb.begin(), nb.end());
    for (std::size_t k = 1; k < nb.size(); ++k) {
      if (nb[k].first == nb[k - 1].first) {
        throw InputError("duplicate edge {" + std::to_string(i) + "," + std::to_string(nb[k].first) + "}");
      }
    }
    arc_begin_[i] = arcs_.size();
    for (const auto& [j, e] : nb) arcs_.push_back({i, j, e, 0});
  }
  arc_begin_[num_nodes_] = arcs_.size();
  for (std::size_t a = 0; a < arcs_.size(); ++a) {
    const auto j = arcs_[a].neighbor;
    const auto begin = arcs_.begin() + static_cast<std::ptrdiff_t>(arc_begin_[j]);
    const auto end = arcs_.begin() + static_cast<std::ptrdiff_t>(arc_begin_[j + 1]);
    const auto it = std::lower_bound(begin, end, arcs_[a].node,
                                     [](const Arc& arc, std::size_t node) { return arc.neighbor < node; });
    arcs_[a].reverse = static_cast<std::size_t>(it - arcs_.begin());
  }
}

double PairwiseModel::arc_pairwise(std::size_t arc, std::size_t x, std::size_t y) const {
  const Arc& a = arcs_[arc];
  return a.node == edges_[a.edge].u ? pairwise(a.edge, x, y) : pairwise(a.edge, y, x);
}

void PairwiseModel::validate() const {
  for (const double w : unary_)
    if (!std::isfinite(w)) throw InputError("non-finite unary weight");
  for (const double w : pairwise_)
    if (!std::isfinite(w)) throw InputError("non-finite pairwise weight");
}

double PairwiseModel::labeling_value(std::span<const std::size_t> labeling) const {
  if (labeling.size() != num_nodes_) throw std::invalid_argument("labeling length mismatch");
  double v = 0.0;
  for (std::size_t i = 0; i < num_nodes_; ++i) v += unary(i, labeling[i]);
  for (std::size_t e = 0; e < edges_.size(); ++e) v += pairwise(e, labeling[edges_[e].u], labeling[edges_[e].v]);
  return v;
}

std::uint64_t PairwiseModel::num_labelings() const {
  constexpr auto cap = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < num_nodes_; ++i) {
    if (count > cap / num_labels_) return cap;
    count *= num_labels_;
  }
  return count;
}

std::size_t triplet_index(const PairwiseModel& model, Triplet t) { return t.arc * model.num_labels() + t.label; }

PairwiseModel reparameterize(const PairwiseModel& model, const MessageVector& delta) {
  const std::size_t L = model.num_labels();
  if (delta.values.size() != model.arcs().size() * L) throw std::invalid_argument("message vector size mismatch");
  PairwiseModel out = model;
  for (std::size_t a = 0; a < model.arcs().size(); ++a) {
    const Arc& arc = model.arcs()[a];
    const bool forward = arc.node == model.edges()[arc.edge].u;
    for (std::size_t x = 0; x < L; ++x) {
      const double d = delta.values[a * L + x];
      out.unary(arc.node, x) -= d;
      for (std::size_t y = 0; y < L; ++y) {
        if (forward) {
          out.pairwise(arc.edge, x, y) += d;
        } else {
          out.pairwise(arc.edge, y, x) += d;
        }
      }
    }
  }
  return out;
}

double bound_u1(const PairwiseModel& model) {
  // Summed serially so the result does not depend on the thread count.
  const auto maxima = parallel::block_maxima(model);
  double total = 0.0;
  for (const double v : maxima) total += v;
  return total;
}

double bound_u2(const PairwiseModel& model) {
  const auto maxima = parallel::block_maxima(model);
  if (maxima.empty()) throw std::invalid_argument("U2 of an empty model");
  return *std::max_element(maxima.begin(), maxima.end());
}

double invariant_weight_sum(const PairwiseModel& model) {
  double total = 0.0;
  for (const double w : model.unary_weights()) total += static_cast<double>(model.num_labels()) * w;
  for (const double w : model.pairwise_weights()) total += w;
  return total;
}

double triplet_weight_sum(const PairwiseModel& model) {
  const std::size_t L = model.num_labels();
  double total = 0.0;
  for (std::size_t a = 0; a < model.arcs().size(); ++a) {
    const Arc& arc = model.arcs()[a];
    for (std::size_t x = 0; x < L; ++x) {
      total += static_cast<double>(L) * model.unary(arc.node, x);
      for (std::size_t y = 0; y < L; ++y) total += model.arc_pairwise(a, x, y);
    }
  }
  return total;
}

PairwiseModel make_grid(std::size_t rows, std::size_t cols, std::size_t num_labels) {
  if (rows == 0 || cols == 0) throw InputError("grid dimensions must be positive");
  PairwiseModel model(rows * cols, num_labels);
  const std::vector<double> zeros(num_labels * num_labels, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t v = r * cols + c;
      if (c + 1 < cols) model.add_edge(v, v + 1, zeros);
      if (r + 1 < rows) model.add_edge(v, v + cols, zeros);
    }
  }
  model.finalize();
  return model;
}

}  // namespace convmp
