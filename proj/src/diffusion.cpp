#include "convmp/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace convmp {

double reparam_unary(const PairwiseModel& model, const MessageVector& delta, std::size_t node, std::size_t label) {
  const std::size_t L = model.num_labels();
  double v = model.unary(node, label);
  const std::size_t begin = model.arc_begin(node);
  for (std::size_t a = begin; a < begin + model.degree(node); ++a) v -= delta.values[a * L + label];
  return v;
}

double reparam_arc_max(const PairwiseModel& model, const MessageVector& delta, Triplet t) {
  const std::size_t L = model.num_labels();
  const std::size_t rev = model.arcs()[t.arc].reverse;
  const double own = delta.values[t.arc * L + t.label];
  double best = 0.0;
  for (std::size_t y = 0; y < L; ++y) {
    const double v = model.arc_pairwise(t.arc, t.label, y) + own + delta.values[rev * L + y];
    if (y == 0 || v > best) best = v;
  }
  return best;
}

double diffusion_update(const PairwiseModel& model, MessageVector& delta, Triplet t) {
  const std::size_t node = model.arcs()[t.arc].node;
  const double d = 0.5 * (reparam_unary(model, delta, node, t.label) - reparam_arc_max(model, delta, t));
  delta.values[triplet_index(model, t)] += d;
  return d;
}

double diffusion_residual(const PairwiseModel& model, const MessageVector& delta) {
  const std::size_t L = model.num_labels();
  const auto count = static_cast<std::ptrdiff_t>(model.arcs().size() * L);
  double worst = 0.0;
#pragma omp parallel for reduction(max : worst) schedule(static) if (count >= 4096)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const Triplet t{static_cast<std::size_t>(k) / L, static_cast<std::size_t>(k) % L};
    const std::size_t node = model.arcs()[t.arc].node;
    worst = std::max(worst, std::fabs(reparam_unary(model, delta, node, t.label) - reparam_arc_max(model, delta, t)));
  }
  return worst;
}

DiffusionReport run_diffusion(const PairwiseModel& model, MessageVector delta0, const DiffusionOptions& options) {
  const std::size_t L = model.num_labels();
  const std::size_t count = model.arcs().size() * L;
  if (delta0.values.size() != count) throw std::invalid_argument("message vector size mismatch");
  if (options.eps < 0) throw InputError("eps must be non-negative");
  if (options.eps == 0 && !options.max_sweeps) throw InputError("eps = 0 requires a finite sweep limit");

  std::vector<std::size_t> order = options.order;
  if (order.empty()) {
    order.resize(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
  } else {
    std::vector<std::size_t> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      if (sorted[k] != k || sorted.size() != count) throw InputError("triplet order is not a permutation");
    }
  }

  DiffusionReport report;
  report.delta = std::move(delta0);
  while (true) {
    if (options.max_sweeps && report.sweeps >= *options.max_sweeps) {
      report.verdict = Verdict::MaxSweepsReached;
      break;
    }
    ++report.sweeps;
    report.eta = 0.0;
    for (const auto k : order) {
      const Triplet t{k / L, k % L};
      const double d = diffusion_update(model, report.delta, t);
      report.eta = std::max(report.eta, std::fabs(d));
      ++report.updates;
      if (options.observer) options.observer({report.sweeps, report.updates, t, d, report.eta, report.delta});
    }
    if (report.eta < options.eps) {
      report.verdict = Verdict::Converged;
      break;
    }
  }
  report.u2 = bound_u2(reparameterize(model, report.delta));
  report.residual = diffusion_residual(model, report.delta);
  return report;
}

DiffusionEncoding encode_to_maxaff(const PairwiseModel& model) {
  const std::size_t V = model.num_nodes();
  const std::size_t L = model.num_labels();
  std::vector<AffineRow<double>> rows;
  rows.reserve(V * L + model.num_edges() * L * L);
  for (std::size_t i = 0; i < V; ++i) {
    for (std::size_t x = 0; x < L; ++x) {
      AffineRow<double> row{model.unary(i, x), {}};
      for (std::size_t a = model.arc_begin(i); a < model.arc_begin(i) + model.degree(i); ++a) {
        row.terms.push_back({a * L + x, -1.0});
      }
      rows.push_back(std::move(row));
    }
  }
  // Arc of (u, v) and (v, u) for every stored edge.
  std::vector<std::size_t> forward_arc(model.num_edges());
  for (std::size_t a = 0; a < model.arcs().size(); ++a) {
    const Arc& arc = model.arcs()[a];
    if (arc.node == model.edges()[arc.edge].u) forward_arc[arc.edge] = a;
  }
  for (std::size_t e = 0; e < model.num_edges(); ++e) {
    const std::size_t fwd = forward_arc[e];
    const std::size_t bwd = model.arcs()[fwd].reverse;
    for (std::size_t x = 0; x < L; ++x) {
      for (std::size_t y = 0; y < L; ++y) {
        rows.push_back({model.pairwise(e, x, y), {{fwd * L + x, 1.0}, {bwd * L + y, 1.0}}});
      }
    }
  }
  return {MaxAffInstance<double>(model.arcs().size() * L, std::move(rows)), V * L};
}

}  // namespace convmp
