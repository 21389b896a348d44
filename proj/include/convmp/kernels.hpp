#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// convmp::serial that the OpenMP version in convmp::parallel must reproduce
// bit-for-bit; tests/test_kernels.cpp checks this and bench/ times both.

#include <cstdint>
#include <span>
#include <vector>

#include "convmp/maxaff.hpp"

namespace convmp {

class PairwiseModel;

/// Result of scanning a range of labelings: best value and the smallest
/// labeling index attaining it.
struct LabelingBest {
  double value;
  std::uint64_t index;
};

/// Inverse of the labeling index used by labeling_scan.
std::vector<std::size_t> decode_labeling(const PairwiseModel& model, std::uint64_t index, int fix_node = -1,
                                         std::size_t fix_label = 0);

namespace serial {

/// y_i = a_i . x + b_i for every row; returns max_i y_i.
template <class T>
T affine_values(std::span<const AffineRow<T>> rows, std::span<const T> x, std::span<T> y) {
  T best = T(0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    T v = rows[i].offset;
    for (const auto& t : rows[i].terms) v += t.coef * x[t.col];
    y[i] = v;
    if (i == 0 || v > best) best = v;
  }
  return best;
}

/// Max of <theta, phi(x)> over all labelings, or over those where node
/// `fix_node` takes `fix_label`. Labelings are indexed in mixed radix with
/// node 0 most significant (the fixed node skipped); ties keep the smallest
/// index.
LabelingBest labeling_scan(const PairwiseModel& model, int fix_node = -1, std::size_t fix_label = 0);

/// Per-node max_x theta_{i,x} followed by per-edge max_{x,y} theta_{ij,xy}.
std::vector<double> block_maxima(const PairwiseModel& model);

}  // namespace serial

namespace parallel {

double affine_values(std::span<const AffineRow<double>> rows, std::span<const double> x, std::span<double> y);

LabelingBest labeling_scan(const PairwiseModel& model, int fix_node = -1, std::size_t fix_label = 0);

std::vector<double> block_maxima(const PairwiseModel& model);

}  // namespace parallel

}  // namespace convmp
