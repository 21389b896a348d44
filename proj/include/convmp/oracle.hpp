#pragma once

// Brute-force references for tests and --check-oracle. Deliberately slow
// and independent of the production algorithms.

#include <cstdint>
#include <vector>

#include "convmp/decomposition.hpp"
#include "convmp/maxaff.hpp"
#include "convmp/mrf.hpp"

namespace convmp {

inline constexpr std::uint64_t kEnumerationLimit = 1'000'000;

struct MapResult {
  double value;
  std::vector<std::size_t> labeling;  // first maximizer in mixed-radix order, node 0 most significant
};

/// Throws std::length_error when |L|^|V| exceeds kEnumerationLimit.
MapResult brute_force_map(const PairwiseModel& model);

/// feature is a global index (see FeatureIndex).
double brute_force_max_marginal(const PairwiseModel& model, std::size_t feature);

double brute_force_chain_value(const ChainSubproblem& chain);
double brute_force_chain_max_marginal(const ChainSubproblem& chain, const ChainFeature& feature);

/// 0/1 feature indicator of a labeling over the global feature index.
std::vector<std::uint8_t> feature_map(const PairwiseModel& model, const std::vector<std::size_t>& labeling);

template <class T>
struct ReferenceMinimum {
  T value;
  T lower;
  T upper;
};

/// Minimum of t -> max_i (slope_i t + intercept_i) by evaluating at every
/// pairwise intersection. With ignore_constant_rows the rows with zero
/// slope in x_j are dropped first. Throws std::domain_error if unbounded.
template <class T>
ReferenceMinimum<T> reference_envelope(const MaxAffInstance<T>& inst, const std::vector<T>& x, std::size_t j,
                                       bool ignore_constant_rows = false);

extern template ReferenceMinimum<double> reference_envelope(const MaxAffInstance<double>&, const std::vector<double>&,
                                                            std::size_t, bool);
extern template ReferenceMinimum<Rational> reference_envelope(const MaxAffInstance<Rational>&,
                                                              const std::vector<Rational>&, std::size_t, bool);

/// max_s F(theta^delta_s) as a max-affine function of the messages: one row
/// per (subproblem, chain labeling), variables in message-index order.
/// Throws std::length_error if the rows exceed kEnumerationLimit.
MaxAffInstance<double> encode_mma_to_maxaff(const DecomposedModel& decomp);

}  // namespace convmp
