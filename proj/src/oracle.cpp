#include "convmp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>
#include <stdexcept>

#include "convmp/kernels.hpp"

namespace convmp {

namespace {

void guard(std::uint64_t count) {
  if (count > kEnumerationLimit) throw std::length_error("enumeration size guard exceeded");
}

std::uint64_t chain_labelings(const ChainSubproblem& chain) {
  std::uint64_t count = 1;
  for (std::size_t k = 0; k < chain.length(); ++k) {
    if (count > kEnumerationLimit) break;
    count *= chain.num_labels;
  }
  return count;
}

// Odometer over labels[0..n-1], last position fastest. Returns false after the last labeling.
bool next_labeling(std::vector<std::size_t>& labels, std::size_t num_labels) {
  for (std::size_t k = labels.size(); k-- > 0;) {
    if (++labels[k] < num_labels) return true;
    labels[k] = 0;
  }
  return false;
}

}  // namespace

MapResult brute_force_map(const PairwiseModel& model) {
  guard(model.num_labelings());
  const LabelingBest best = parallel::labeling_scan(model);
  return {best.value, decode_labeling(model, best.index)};
}

std::vector<std::uint8_t> feature_map(const PairwiseModel& model, const std::vector<std::size_t>& labeling) {
  const FeatureIndex idx{model.num_nodes(), model.num_labels(), model.num_edges()};
  std::vector<std::uint8_t> phi(idx.size(), 0);
  for (std::size_t v = 0; v < model.num_nodes(); ++v) phi[idx.unary(v, labeling[v])] = 1;
  for (std::size_t e = 0; e < model.num_edges(); ++e) {
    const Edge& edge = model.edges()[e];
    phi[idx.pairwise(e, labeling[edge.u], labeling[edge.v])] = 1;
  }
  return phi;
}

double brute_force_max_marginal(const PairwiseModel& model, std::size_t feature) {
  guard(model.num_labelings());
  const FeatureIndex idx{model.num_nodes(), model.num_labels(), model.num_edges()};
  if (feature >= idx.size()) throw std::out_of_range("feature index out of range");
  std::vector<std::size_t> labels(model.num_nodes(), 0);
  double best = -std::numeric_limits<double>::infinity();
  bool found = false;
  do {
    if (feature_map(model, labels)[feature]) {
      const double v = model.labeling_value(labels);
      if (!found || v > best) best = v;
      found = true;
    }
  } while (next_labeling(labels, model.num_labels()));
  if (!found) throw std::domain_error("no labeling activates the feature");
  return best;
}

double brute_force_chain_value(const ChainSubproblem& chain) {
  guard(chain_labelings(chain));
  std::vector<std::size_t> labels(chain.length(), 0);
  double best = -std::numeric_limits<double>::infinity();
  do {
    best = std::max(best, chain.labeling_value(labels));
  } while (next_labeling(labels, chain.num_labels));
  return best;
}

double brute_force_chain_max_marginal(const ChainSubproblem& chain, const ChainFeature& feature) {
  guard(chain_labelings(chain));
  std::vector<std::size_t> labels(chain.length(), 0);
  double best = -std::numeric_limits<double>::infinity();
  bool found = false;
  do {
    const bool active = feature.pairwise
                            ? labels[feature.pos] == feature.x && labels[feature.pos + 1] == feature.y
                            : labels[feature.pos] == feature.x;
    if (active) {
      best = std::max(best, chain.labeling_value(labels));
      found = true;
    }
  } while (next_labeling(labels, chain.num_labels));
  if (!found) throw std::domain_error("no labeling activates the feature");
  return best;
}

template <class T>
ReferenceMinimum<T> reference_envelope(const MaxAffInstance<T>& inst, const std::vector<T>& x, std::size_t j,
                                       bool ignore_constant_rows) {
  if (j >= inst.num_cols()) throw std::out_of_range("coordinate index out of range");
  const auto ev = evaluate(inst, std::span<const T>(x));
  std::vector<T> slope(inst.num_rows(), T(0));
  std::vector<bool> in_col(inst.num_rows(), false);
  for (const auto& e : inst.column(j)) {
    slope[e.row] = e.coef;
    in_col[e.row] = true;
  }
  std::vector<std::pair<T, T>> lines;
  bool rising = false, falling = false;
  for (std::size_t i = 0; i < inst.num_rows(); ++i) {
    if (ignore_constant_rows && !in_col[i]) continue;
    lines.emplace_back(slope[i], T(ev.y[i] - slope[i] * x[j]));
    rising = rising || slope[i] > 0;
    falling = falling || slope[i] < 0;
  }
  if (!rising || !falling) throw std::domain_error("unbounded minimizer set");

  auto f = [&](const T& t) {
    T best = lines[0].first * t + lines[0].second;
    for (const auto& [a, b] : lines) {
      const T v = a * t + b;
      if (v > best) best = v;
    }
    return best;
  };
  // The minimum of a bounded piecewise-linear convex function is attained at
  // a breakpoint, and every breakpoint is an intersection of two lines.
  std::vector<T> candidates;
  for (std::size_t p = 0; p < lines.size(); ++p) {
    for (std::size_t q = p + 1; q < lines.size(); ++q) {
      if (lines[p].first == lines[q].first) continue;
      candidates.push_back(T((lines[q].second - lines[p].second) / (lines[p].first - lines[q].first)));
    }
  }
  ReferenceMinimum<T> out{f(candidates.front()), candidates.front(), candidates.front()};
  for (const auto& t : candidates) {
    const T v = f(t);
    if (v < out.value) out = {v, t, t};
    else if (v == out.value) {
      if (t < out.lower) out.lower = t;
      if (t > out.upper) out.upper = t;
    }
  }
  if constexpr (std::is_same_v<T, double>) {
    // Rounding can leave near-ties; keep every candidate within a tiny band.
    const double tol = 1e-12 * (1.0 + std::abs(out.value));
    for (const auto& t : candidates) {
      if (f(t) <= out.value + tol) {
        out.lower = std::min(out.lower, t);
        out.upper = std::max(out.upper, t);
      }
    }
  }
  return out;
}

MaxAffInstance<double> encode_mma_to_maxaff(const DecomposedModel& decomp) {
  const FeatureIndex& idx = decomp.features();
  const PairwiseModel& base = decomp.base();
  std::uint64_t total = 0;
  for (const auto& chain : decomp.subproblems()) {
    total += chain_labelings(chain);
    guard(total);
  }
  std::vector<AffineRow<double>> rows;
  for (std::size_t s = 0; s < decomp.subproblems().size(); ++s) {
    const ChainSubproblem& chain = decomp.subproblems()[s];
    std::vector<std::size_t> labels(chain.length(), 0);
    do {
      std::vector<std::size_t> active;
      for (std::size_t k = 0; k < chain.length(); ++k) active.push_back(idx.unary(chain.nodes[k], labels[k]));
      for (std::size_t k = 0; k + 1 < chain.length(); ++k) {
        const std::size_t e = chain.edges[k];
        const bool forward = base.edges()[e].u == chain.nodes[k];
        active.push_back(forward ? idx.pairwise(e, labels[k], labels[k + 1])
                                 : idx.pairwise(e, labels[k + 1], labels[k]));
      }
      AffineRow<double> row{chain.labeling_value(labels), {}};
      for (const std::size_t f : active) {
        const auto& mem = decomp.members(f);
        std::size_t p = 0;
        while (mem[p].sub != s) ++p;
        if (p > 0) row.terms.push_back({decomp.message_begin(f) + p - 1, -1.0});
        if (p + 1 < mem.size()) row.terms.push_back({decomp.message_begin(f) + p, 1.0});
      }
      rows.push_back(std::move(row));
    } while (next_labeling(labels, chain.num_labels));
  }
  return MaxAffInstance<double>(decomp.num_messages(), std::move(rows));
}

template ReferenceMinimum<double> reference_envelope(const MaxAffInstance<double>&, const std::vector<double>&,
                                                     std::size_t, bool);
template ReferenceMinimum<Rational> reference_envelope(const MaxAffInstance<Rational>&, const std::vector<Rational>&,
                                                       std::size_t, bool);

}  // namespace convmp
