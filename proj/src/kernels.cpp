#include "convmp/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "convmp/mrf.hpp"

namespace convmp {

namespace {

// Below these sizes the parallel kernels fall back to one thread.
constexpr std::size_t kMinParallelRows = 4096;
constexpr std::uint64_t kMinParallelLabelings = 1u << 14;

bool better(const LabelingBest& a, const LabelingBest& b) {
  return a.value > b.value || (a.value == b.value && a.index < b.index);
}

// Decodes index into labels (node 0 most significant), honouring the fixed
// node by skipping it in the radix.
void decode(std::uint64_t index, std::size_t L, int fix_node, std::size_t fix_label, std::vector<std::size_t>& lab) {
  for (std::size_t k = lab.size(); k-- > 0;) {
    if (static_cast<int>(k) == fix_node) {
      lab[k] = fix_label;
      continue;
    }
    lab[k] = static_cast<std::size_t>(index % L);
    index /= L;
  }
}

// Advances the odometer; returns false after the last labeling.
bool advance(std::vector<std::size_t>& lab, std::size_t L, int fix_node) {
  for (std::size_t k = lab.size(); k-- > 0;) {
    if (static_cast<int>(k) == fix_node) continue;
    if (++lab[k] < L) return true;
    lab[k] = 0;
  }
  return false;
}

std::uint64_t scan_count(const PairwiseModel& model, int fix_node) {
  if (fix_node >= static_cast<int>(model.num_nodes())) throw std::invalid_argument("fixed node out of range");
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < model.num_nodes(); ++i) {
    if (static_cast<int>(i) != fix_node) count *= model.num_labels();
  }
  return count;
}

LabelingBest scan_range(const PairwiseModel& model, int fix_node, std::size_t fix_label, std::uint64_t begin,
                        std::uint64_t end) {
  LabelingBest best{0.0, end};
  if (begin >= end) return best;
  std::vector<std::size_t> lab(model.num_nodes());
  decode(begin, model.num_labels(), fix_node, fix_label, lab);
  for (std::uint64_t idx = begin; idx < end; ++idx) {
    const LabelingBest cand{model.labeling_value(lab), idx};
    if (idx == begin || better(cand, best)) best = cand;
    advance(lab, model.num_labels(), fix_node);
  }
  return best;
}

}  // namespace

std::vector<std::size_t> decode_labeling(const PairwiseModel& model, std::uint64_t index, int fix_node,
                                         std::size_t fix_label) {
  std::vector<std::size_t> lab(model.num_nodes());
  decode(index, model.num_labels(), fix_node, fix_label, lab);
  return lab;
}

namespace serial {

LabelingBest labeling_scan(const PairwiseModel& model, int fix_node, std::size_t fix_label) {
  return scan_range(model, fix_node, fix_label, 0, scan_count(model, fix_node));
}

std::vector<double> block_maxima(const PairwiseModel& model) {
  const std::size_t V = model.num_nodes();
  const std::size_t L = model.num_labels();
  std::vector<double> out(V + model.num_edges());
  for (std::size_t i = 0; i < V; ++i) {
    const auto u = model.unary_weights().subspan(i * L, L);
    out[i] = *std::max_element(u.begin(), u.end());
  }
  for (std::size_t e = 0; e < model.num_edges(); ++e) {
    const auto p = model.pairwise_weights().subspan(e * L * L, L * L);
    out[V + e] = *std::max_element(p.begin(), p.end());
  }
  return out;
}

}  // namespace serial

namespace parallel {

double affine_values(std::span<const AffineRow<double>> rows, std::span<const double> x, std::span<double> y) {
  const auto m = static_cast<std::ptrdiff_t>(rows.size());
  double best = -std::numeric_limits<double>::infinity();
#pragma omp parallel for reduction(max : best) schedule(static) if (rows.size() >= kMinParallelRows)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    double v = row.offset;
    for (const auto& t : row.terms) v += t.coef * x[t.col];
    y[static_cast<std::size_t>(i)] = v;
    best = std::max(best, v);
  }
  return best;
}

LabelingBest labeling_scan(const PairwiseModel& model, int fix_node, std::size_t fix_label) {
  const std::uint64_t count = scan_count(model, fix_node);
  if (count < kMinParallelLabelings) return scan_range(model, fix_node, fix_label, 0, count);

  const int threads = omp_get_max_threads();
  std::vector<LabelingBest> partial(static_cast<std::size_t>(threads), LabelingBest{0.0, count});
  std::vector<char> filled(static_cast<std::size_t>(threads), 0);
#pragma omp parallel num_threads(threads)
  {
    const int t = omp_get_thread_num();
    const int nt = omp_get_num_threads();
    const std::uint64_t begin = count * static_cast<std::uint64_t>(t) / static_cast<std::uint64_t>(nt);
    const std::uint64_t end = count * static_cast<std::uint64_t>(t + 1) / static_cast<std::uint64_t>(nt);
    if (begin < end) {
      partial[static_cast<std::size_t>(t)] = scan_range(model, fix_node, fix_label, begin, end);
      filled[static_cast<std::size_t>(t)] = 1;
    }
  }
  LabelingBest best{0.0, count};
  bool any = false;
  for (std::size_t t = 0; t < partial.size(); ++t) {
    if (!filled[t]) continue;
    if (!any || better(partial[t], best)) best = partial[t];
    any = true;
  }
  return best;
}

std::vector<double> block_maxima(const PairwiseModel& model) {
  const std::size_t V = model.num_nodes();
  const std::size_t L = model.num_labels();
  const std::size_t total = V + model.num_edges();
  std::vector<double> out(total);
  const auto n = static_cast<std::ptrdiff_t>(total);
#pragma omp parallel for schedule(static) if (total >= kMinParallelRows)
  for (std::ptrdiff_t b = 0; b < n; ++b) {
    const auto k = static_cast<std::size_t>(b);
    const auto w = k < V ? model.unary_weights().subspan(k * L, L)
                         : model.pairwise_weights().subspan((k - V) * L * L, L * L);
    out[k] = *std::max_element(w.begin(), w.end());
  }
  return out;
}

}  // namespace parallel

}  // namespace convmp
