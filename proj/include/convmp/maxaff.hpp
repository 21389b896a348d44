#pragma once

// Coordinate descent on f(x) = max_i (a_i . x + b_i) where, for each
// coordinate, the rows constant in that coordinate are ignored when picking
// the coordinate minimizer.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "convmp/numeric.hpp"

namespace convmp {

template <class T>
struct Term {
  std::size_t col;
  T coef;
};

template <class T>
struct AffineRow {
  T offset;
  std::vector<Term<T>> terms;  // sorted by column
};

template <class T>
struct ColumnEntry {
  std::size_t row;
  T coef;
};

/// Sparse max-of-affine objective. Immutable after construction.
template <class T>
class MaxAffInstance {
 public:
  MaxAffInstance() = default;

  /// Validates and indexes the rows: coefficients must be finite and
  /// nonzero, column indices < n, no duplicate (row, column) pairs.
  MaxAffInstance(std::size_t n, std::vector<AffineRow<T>> rows);

  std::size_t num_rows() const { return rows_.size(); }
  std::size_t num_cols() const { return columns_.size(); }
  const std::vector<AffineRow<T>>& rows() const { return rows_; }
  const AffineRow<T>& row(std::size_t i) const { return rows_[i]; }
  std::span<const ColumnEntry<T>> column(std::size_t j) const { return columns_[j]; }
  std::size_t num_nonzeros() const;

  /// max_i |b_i|
  T max_abs_offset() const;

 private:
  std::vector<AffineRow<T>> rows_;
  std::vector<std::vector<ColumnEntry<T>>> columns_;
};

template <class U, class T>
MaxAffInstance<U> convert_instance(const MaxAffInstance<T>& in);

template <class T>
struct Evaluation {
  std::vector<T> y;
  T f;
};

template <class T>
Evaluation<T> evaluate(const MaxAffInstance<T>& inst, std::span<const T> x);

template <class T>
T max_value(std::span<const T> y);

struct ColumnSigns {
  bool has_pos = false;
  bool has_neg = false;
  bool consistent() const { return has_pos && has_neg; }
};

template <class T>
std::vector<ColumnSigns> check_sign_consistency(const MaxAffInstance<T>& inst);

enum class PruneVerdict { Ok, UnboundedAfterPrune, ConstantAfterPrune };

template <class T>
struct PruneResult {
  PruneVerdict verdict = PruneVerdict::Ok;
  MaxAffInstance<T> instance;           // rows and columns that survived
  std::vector<std::size_t> kept_rows;   // new row -> original row
  std::vector<std::size_t> kept_cols;   // new column -> original column
  std::optional<T> constant_value;      // set for ConstantAfterPrune
};

/// Deletes rows touching sign-inconsistent columns until every remaining
/// column has coefficients of both signs, then drops empty columns.
template <class T>
PruneResult<T> prune(const MaxAffInstance<T>& inst);

template <class T>
struct IterateState {
  std::vector<T> x;
  std::vector<T> y;  // maintained A x + b
  std::size_t sweep = 0;
  T eta = T(0);
  std::size_t updates_done = 0;
};

template <class T>
IterateState<T> make_state(const MaxAffInstance<T>& inst, std::vector<T> x0);

/// Unique minimizer of x_j -> max over rows with a_ij != 0. Throws
/// std::invalid_argument if column j lacks a positive or a negative entry.
template <class T>
T coordinate_minimizer(const MaxAffInstance<T>& inst, const IterateState<T>& state, std::size_t j);

/// Closed form for a column whose nonzeros are all +1 or -1.
template <class T>
T closed_form_minimizer(const MaxAffInstance<T>& inst, const IterateState<T>& state, std::size_t j);

/// x_j <- x*_j with incremental update of y; returns the step x*_j - x_j.
template <class T>
T apply_update(const MaxAffInstance<T>& inst, IterateState<T>& state, std::size_t j);

/// Moves x_j to `target` and patches y, eta and the update counter.
template <class T>
T move_coordinate(const MaxAffInstance<T>& inst, IterateState<T>& state, std::size_t j, const T& target);

template <class T>
T fixed_point_residual(const MaxAffInstance<T>& inst, const IterateState<T>& state);

enum class Verdict { Converged, MaxSweepsReached, Diverging, UnboundedAfterPrune, ConstantAfterPrune };

std::string to_string(Verdict v);

template <class T>
struct UpdateEvent {
  std::size_t sweep;   // 1-based outer sweep
  std::size_t update;  // 1-based running update counter
  std::size_t coord;
  const T& step;
  const T& eta;        // running max |step| within the sweep
  std::span<const T> y;
  const T& objective;  // max_i y_i after the update
};

template <class T>
using UpdateObserver = std::function<void(const UpdateEvent<T>&)>;

template <class T>
struct RunOptions {
  T eps = T(1) / T(1000000000);
  std::optional<std::size_t> max_sweeps = 10000;
  std::vector<std::size_t> order;           // empty = cyclic 0..n-1
  std::optional<T> divergence_budget;       // default 1000 * (1 + max|b|)
  UpdateObserver<T> observer;
};

template <class T>
struct RunReport {
  Verdict verdict = Verdict::MaxSweepsReached;
  std::vector<T> x;
  std::vector<T> y;
  std::size_t sweeps = 0;
  std::size_t updates = 0;
  T eta = T(0);
  T objective = T(0);
};

std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed);

template <class T>
RunReport<T> run(const MaxAffInstance<T>& inst, std::vector<T> x0, const RunOptions<T>& options);

/// Prunes to satisfy sign consistency, runs on the remainder and maps x back
/// (dropped variables keep their initial value). y and the objective refer to
/// the pruned instance.
template <class T>
RunReport<T> solve(const MaxAffInstance<T>& inst, std::vector<T> x0, const RunOptions<T>& options);

#define CONVMP_MAXAFF_EXTERN(T)                                                                          \
  extern template class MaxAffInstance<T>;                                                               \
  extern template Evaluation<T> evaluate(const MaxAffInstance<T>&, std::span<const T>);                  \
  extern template T max_value(std::span<const T>);                                                       \
  extern template std::vector<ColumnSigns> check_sign_consistency(const MaxAffInstance<T>&);             \
  extern template PruneResult<T> prune(const MaxAffInstance<T>&);                                        \
  extern template IterateState<T> make_state(const MaxAffInstance<T>&, std::vector<T>);                  \
  extern template T coordinate_minimizer(const MaxAffInstance<T>&, const IterateState<T>&, std::size_t); \
  extern template T closed_form_minimizer(const MaxAffInstance<T>&, const IterateState<T>&, std::size_t); \
  extern template T apply_update(const MaxAffInstance<T>&, IterateState<T>&, std::size_t);               \
  extern template T move_coordinate(const MaxAffInstance<T>&, IterateState<T>&, std::size_t, const T&);  \
  extern template T fixed_point_residual(const MaxAffInstance<T>&, const IterateState<T>&);               \
  extern template RunReport<T> run(const MaxAffInstance<T>&, std::vector<T>, const RunOptions<T>&);      \
  extern template RunReport<T> solve(const MaxAffInstance<T>&, std::vector<T>, const RunOptions<T>&);

CONVMP_MAXAFF_EXTERN(double)
CONVMP_MAXAFF_EXTERN(Rational)

extern template MaxAffInstance<Rational> convert_instance(const MaxAffInstance<double>&);
extern template MaxAffInstance<double> convert_instance(const MaxAffInstance<Rational>&);

}  // namespace convmp
