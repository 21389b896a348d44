#include "convmp/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

namespace convmp {

namespace {

double& local_weight(ChainSubproblem& chain, const ChainFeature& f) {
  return f.pairwise ? chain.pairwise_at(f.pos, f.x, f.y) : chain.unary_at(f.pos, f.x);
}

double local_weight(const ChainSubproblem& chain, const ChainFeature& f) {
  return f.pairwise ? chain.pairwise_at(f.pos, f.x, f.y) : chain.unary_at(f.pos, f.x);
}

}  // namespace

double ChainSubproblem::labeling_value(std::span<const std::size_t> labels) const {
  if (labels.size() != length()) throw std::invalid_argument("chain labeling length mismatch");
  double v = 0.0;
  for (std::size_t k = 0; k < length(); ++k) v += unary_at(k, labels[k]);
  for (std::size_t k = 0; k + 1 < length(); ++k) v += pairwise_at(k, labels[k], labels[k + 1]);
  return v;
}

ChainMessages::ChainMessages(const ChainSubproblem& chain) : chain_(&chain) {
  const std::size_t n = chain.length();
  const std::size_t L = chain.num_labels;
  if (n == 0) throw std::invalid_argument("empty chain");
  constexpr double lowest = -std::numeric_limits<double>::infinity();
  fwd_.assign(n * L, 0.0);
  bwd_.assign(n * L, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    for (std::size_t y = 0; y < L; ++y) {
      double best = lowest;
      for (std::size_t x = 0; x < L; ++x) {
        best = std::max(best, fwd_[k * L + x] + chain.unary_at(k, x) + chain.pairwise_at(k, x, y));
      }
      fwd_[(k + 1) * L + y] = best;
    }
  }
  for (std::size_t k = n - 1; k-- > 0;) {
    for (std::size_t x = 0; x < L; ++x) {
      double best = lowest;
      for (std::size_t y = 0; y < L; ++y) {
        best = std::max(best, chain.pairwise_at(k, x, y) + chain.unary_at(k + 1, y) + bwd_[(k + 1) * L + y]);
      }
      bwd_[k * L + x] = best;
    }
  }
  value_ = lowest;
  for (std::size_t x = 0; x < L; ++x) value_ = std::max(value_, fwd_[(n - 1) * L + x] + chain.unary_at(n - 1, x));
}

double ChainMessages::max_marginal(const ChainFeature& f) const {
  const ChainSubproblem& c = *chain_;
  const std::size_t L = c.num_labels;
  if (f.x >= L || (f.pairwise && f.y >= L)) throw std::out_of_range("label out of range");
  if (!f.pairwise) {
    if (f.pos >= c.length()) throw std::out_of_range("feature not in chain");
    return fwd_[f.pos * L + f.x] + c.unary_at(f.pos, f.x) + bwd_[f.pos * L + f.x];
  }
  if (f.pos + 1 >= c.length()) throw std::out_of_range("feature not in chain");
  return fwd_[f.pos * L + f.x] + c.unary_at(f.pos, f.x) + c.pairwise_at(f.pos, f.x, f.y) +
         c.unary_at(f.pos + 1, f.y) + bwd_[(f.pos + 1) * L + f.y];
}

double chain_value(const ChainSubproblem& chain) { return ChainMessages(chain).value(); }

double chain_max_marginal(const ChainSubproblem& chain, const ChainFeature& feature) {
  return ChainMessages(chain).max_marginal(feature);
}

DecomposedModel::DecomposedModel(PairwiseModel base, std::vector<ChainSubproblem> chains)
    : base_(std::move(base)),
      index_{base_.num_nodes(), base_.num_labels(), base_.num_edges()},
      chains_(std::move(chains)),
      members_(index_.size()) {
  const std::size_t L = base_.num_labels();
  for (std::size_t s = 0; s < chains_.size(); ++s) {
    ChainSubproblem& c = chains_[s];
    const std::size_t n = c.length();
    if (n == 0) throw InputError("subproblem " + std::to_string(s) + " is empty");
    if (c.edges.size() + 1 != n) throw InputError("subproblem " + std::to_string(s) + ": edge count mismatch");
    c.num_labels = L;
    c.unary.assign(n * L, 0.0);
    c.pairwise.assign((n - 1) * L * L, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      if (c.nodes[k] >= base_.num_nodes()) throw InputError("subproblem node out of range");
      for (std::size_t x = 0; x < L; ++x) members_[index_.unary(c.nodes[k], x)].push_back({s, {false, k, x, 0}});
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const std::size_t e = c.edges[k];
      if (e >= base_.num_edges()) throw InputError("subproblem edge out of range");
      const Edge& edge = base_.edges()[e];
      const bool forward = edge.u == c.nodes[k] && edge.v == c.nodes[k + 1];
      const bool backward = edge.v == c.nodes[k] && edge.u == c.nodes[k + 1];
      if (!forward && !backward) throw InputError("subproblem " + std::to_string(s) + ": edge does not join its nodes");
      for (std::size_t x = 0; x < L; ++x) {
        for (std::size_t y = 0; y < L; ++y) {
          const std::size_t f = forward ? index_.pairwise(e, x, y) : index_.pairwise(e, y, x);
          members_[f].push_back({s, {true, k, x, y}});
        }
      }
    }
  }

  message_begin_.assign(index_.size() + 1, 0);
  for (std::size_t f = 0; f < index_.size(); ++f) {
    const auto& mem = members_[f];
    if (mem.empty()) throw InputError("feature " + std::to_string(f) + " is not covered by any subproblem");
    for (std::size_t k = 1; k < mem.size(); ++k) {
      if (mem[k].sub == mem[k - 1].sub) throw InputError("a subproblem contains feature " + std::to_string(f) + " twice");
    }
    message_begin_[f + 1] = message_begin_[f] + mem.size() - 1;
    const double w = index_.is_unary(f)
                         ? base_.unary_weights()[f]
                         : base_.pairwise_weights()[f - index_.num_nodes * index_.num_labels];
    const double share = w / static_cast<double>(mem.size());
    for (const auto& m : mem) local_weight(chains_[m.sub], m.local) = share;
  }
}

std::pair<std::size_t, std::size_t> infer_grid_shape(const PairwiseModel& model) {
  const std::size_t V = model.num_nodes();
  std::set<std::pair<std::size_t, std::size_t>> have;
  for (const auto& e : model.edges()) have.insert({e.u, e.v});
  for (std::size_t r = 1; r <= V; ++r) {
    if (V % r != 0) continue;
    const std::size_t c = V / r;
    if (have.size() != r * (c - 1) + (r - 1) * c) continue;
    bool ok = true;
    for (std::size_t i = 0; i < r && ok; ++i) {
      for (std::size_t j = 0; j < c && ok; ++j) {
        const std::size_t v = i * c + j;
        if (j + 1 < c && !have.count({v, v + 1})) ok = false;
        if (i + 1 < r && !have.count({v, v + c})) ok = false;
      }
    }
    if (ok) return {r, c};
  }
  throw InputError("model graph is not a grid");
}

DecomposedModel build_rows_cols_decomposition(const PairwiseModel& model, std::size_t rows, std::size_t cols) {
  if (rows * cols != model.num_nodes()) throw InputError("grid shape does not match the node count");
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_id;
  for (std::size_t e = 0; e < model.num_edges(); ++e) edge_id[{model.edges()[e].u, model.edges()[e].v}] = e;
  if (edge_id.size() != rows * (cols - 1) + (rows - 1) * cols) throw InputError("model graph is not the requested grid");
  auto find_edge = [&](std::size_t a, std::size_t b) {
    const auto it = edge_id.find({a, b});
    if (it == edge_id.end()) throw InputError("model graph is not the requested grid");
    return it->second;
  };

  std::vector<ChainSubproblem> chains;
  if (cols >= 2 || rows == 1) {
    for (std::size_t r = 0; r < rows; ++r) {
      ChainSubproblem c;
      for (std::size_t j = 0; j < cols; ++j) {
        c.nodes.push_back(r * cols + j);
        if (j > 0) c.edges.push_back(find_edge(r * cols + j - 1, r * cols + j));
      }
      chains.push_back(std::move(c));
    }
  }
  if (rows >= 2) {
    for (std::size_t j = 0; j < cols; ++j) {
      ChainSubproblem c;
      for (std::size_t r = 0; r < rows; ++r) {
        c.nodes.push_back(r * cols + j);
        if (r > 0) c.edges.push_back(find_edge((r - 1) * cols + j, r * cols + j));
      }
      chains.push_back(std::move(c));
    }
  }
  return DecomposedModel(model, std::move(chains));
}

std::vector<ChainSubproblem> apply_messages(const DecomposedModel& decomp, const std::vector<double>& delta) {
  if (delta.size() != decomp.num_messages()) throw std::invalid_argument("message vector size mismatch");
  std::vector<ChainSubproblem> out = decomp.subproblems();
  for (std::size_t f = 0; f < decomp.features().size(); ++f) {
    const auto& mem = decomp.members(f);
    for (std::size_t k = 0; k + 1 < mem.size(); ++k) {
      const double d = delta[decomp.message_begin(f) + k];
      local_weight(out[mem[k].sub], mem[k].local) += d;
      local_weight(out[mem[k + 1].sub], mem[k + 1].local) -= d;
    }
  }
  return out;
}

std::vector<double> sum_of_subproblems(const DecomposedModel& decomp, const std::vector<ChainSubproblem>& chains) {
  std::vector<double> total(decomp.features().size(), 0.0);
  for (std::size_t f = 0; f < total.size(); ++f) {
    for (const auto& m : decomp.members(f)) {
      total[f] += local_weight(chains[m.sub], m.local);
    }
  }
  return total;
}

MmaState make_mma_state(const DecomposedModel& decomp) {
  return {std::vector<double>(decomp.num_messages(), 0.0), decomp.subproblems()};
}

double mma_update(const DecomposedModel& decomp, MmaState& state, std::size_t feature, std::size_t edge) {
  const auto& mem = decomp.members(feature);
  if (edge + 1 >= mem.size()) throw std::out_of_range("edge not in E_i");
  const Membership& s = mem[edge];
  const Membership& t = mem[edge + 1];
  const double fs = chain_max_marginal(state.chains[s.sub], s.local);
  const double ft = chain_max_marginal(state.chains[t.sub], t.local);
  const double d = 0.5 * (ft - fs);
  state.delta[decomp.message_begin(feature) + edge] += d;
  local_weight(state.chains[s.sub], s.local) += d;
  local_weight(state.chains[t.sub], t.local) -= d;
  return d;
}

double mma_residual(const DecomposedModel& decomp, const std::vector<ChainSubproblem>& chains) {
  std::vector<ChainMessages> msgs;
  msgs.reserve(chains.size());
  for (const auto& c : chains) msgs.emplace_back(c);
  double worst = 0.0;
  for (std::size_t f = 0; f < decomp.features().size(); ++f) {
    const auto& mem = decomp.members(f);
    for (std::size_t k = 0; k + 1 < mem.size(); ++k) {
      const double a = msgs[mem[k].sub].max_marginal(mem[k].local);
      const double b = msgs[mem[k + 1].sub].max_marginal(mem[k + 1].local);
      worst = std::max(worst, std::fabs(a - b));
    }
  }
  return worst;
}

DecompositionBounds decomposition_bounds(const std::vector<ChainSubproblem>& chains) {
  DecompositionBounds b{-std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& c : chains) {
    const double v = chain_value(c);
    b.max_value = std::max(b.max_value, v);
    b.sum_value += v;
  }
  return b;
}

MmaReport run_mma(const DecomposedModel& decomp, const MmaOptions& options) {
  if (options.eps < 0) throw InputError("eps must be non-negative");
  if (options.eps == 0 && !options.max_sweeps) throw InputError("eps = 0 requires a finite sweep limit");
  MmaReport report;
  report.state = make_mma_state(decomp);
  while (true) {
    if (options.max_sweeps && report.sweeps >= *options.max_sweeps) {
      report.verdict = Verdict::MaxSweepsReached;
      break;
    }
    ++report.sweeps;
    report.eta = 0.0;
    for (std::size_t f = 0; f < decomp.features().size(); ++f) {
      for (std::size_t k = 0; k < decomp.num_feature_edges(f); ++k) {
        const double d = mma_update(decomp, report.state, f, k);
        report.eta = std::max(report.eta, std::fabs(d));
        ++report.updates;
        if (options.observer) options.observer({report.sweeps, report.updates, f, k, d, report.eta, report.state});
      }
    }
    if (report.eta < options.eps) {
      report.verdict = Verdict::Converged;
      break;
    }
  }
  report.bounds = decomposition_bounds(report.state.chains);
  report.residual = mma_residual(decomp, report.state.chains);
  return report;
}

}  // namespace convmp
