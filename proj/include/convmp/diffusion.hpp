#pragma once

// Max-sum diffusion: coordinate descent on U2(theta^delta) over the messages,
// one triplet (i, j, x) at a time.

#include <functional>
#include <optional>
#include <vector>

#include "convmp/maxaff.hpp"
#include "convmp/mrf.hpp"

namespace convmp {

/// theta^delta_{i,x}
double reparam_unary(const PairwiseModel& model, const MessageVector& delta, std::size_t node, std::size_t label);

/// max_y theta^delta_{ij,xy} for the triplet's arc (i, j) and label x.
double reparam_arc_max(const PairwiseModel& model, const MessageVector& delta, Triplet t);

/// delta_{ij,x} += (theta^delta_{i,x} - max_y theta^delta_{ij,xy}) / 2; returns the increment.
double diffusion_update(const PairwiseModel& model, MessageVector& delta, Triplet t);

/// max over triplets of |theta^delta_{i,x} - max_y theta^delta_{ij,xy}|
double diffusion_residual(const PairwiseModel& model, const MessageVector& delta);

struct DiffusionEvent {
  std::size_t sweep;
  std::size_t update;
  Triplet triplet;
  double step;
  double eta;
  const MessageVector& delta;
};

struct DiffusionOptions {
  double eps = 1e-9;
  std::optional<std::size_t> max_sweeps = 10000;
  std::vector<std::size_t> order;  // permutation of triplet indices; empty = canonical
  std::function<void(const DiffusionEvent&)> observer;
};

struct DiffusionReport {
  Verdict verdict = Verdict::MaxSweepsReached;
  MessageVector delta;
  std::size_t sweeps = 0;
  std::size_t updates = 0;
  double eta = 0.0;
  double u2 = 0.0;
  double residual = 0.0;
};

DiffusionReport run_diffusion(const PairwiseModel& model, MessageVector delta0, const DiffusionOptions& options);

/// Variables are the messages in triplet order; one row per unary weight
/// (coefficient -1 on each delta_{ij,x}) and one per pairwise weight
/// (+1 on delta_{ij,x} and delta_{ji,y}). max of the rows is U2(theta^delta).
struct DiffusionEncoding {
  MaxAffInstance<double> instance;
  std::size_t num_unary_rows;  // rows [0, num_unary_rows) are (i, x) in order; the rest (e, x, y)
};

DiffusionEncoding encode_to_maxaff(const PairwiseModel& model);

}  // namespace convmp
