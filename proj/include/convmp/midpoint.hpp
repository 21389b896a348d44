#pragma once

// Coordinate descent that moves each coordinate to the middle of the full
// interval of minimizers of x_j -> f(x) (constant rows included), and a
// built-in instance on which this rule cycles with period 6.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "convmp/maxaff.hpp"

namespace convmp {

template <class T>
struct MinimizerInterval {
  T lower;
  T upper;
  T value;  // min of x_j -> f(x)

  T midpoint() const { return T((lower + upper) / T(2)); }
};

/// Exact minimizer interval of x_j -> f(x) over all rows. Throws
/// std::domain_error if the minimizer set is unbounded.
template <class T>
MinimizerInterval<T> minimizer_interval(const MaxAffInstance<T>& inst, const IterateState<T>& state, std::size_t j);

/// x_j <- midpoint of the minimizer interval; returns the step.
template <class T>
T midpoint_update(const MaxAffInstance<T>& inst, IterateState<T>& state, std::size_t j);

template <class T>
struct MidpointTrajectory {
  std::vector<std::vector<T>> iterates;  // iterates[0] = x0, then one per update
  bool converged = false;                // a full sweep left x unchanged (or eta < eps)
  std::optional<std::size_t> cycle_start;  // update index where the cycle begins
  std::optional<std::size_t> period;       // in updates
  std::size_t sweeps = 0;
};

/// Cyclic sweeps until a fixed point, a repeated (state, next coordinate)
/// pair, or max_updates.
template <class T>
MidpointTrajectory<T> run_midpoint(const MaxAffInstance<T>& inst, std::vector<T> x0, std::size_t max_updates,
                                   const T& eps = T(0));

/// The 12 extreme points, the 12 supporting halfspaces (halfspace k is
/// tight exactly at point k) and f(x) = max{0, max_k (a_k . x - b_k)}.
struct CycleInstance {
  std::array<std::array<Rational, 3>, 12> points;
  std::array<std::array<Rational, 3>, 12> normals;
  std::array<Rational, 12> bounds;
  std::array<std::array<Rational, 3>, 7> expected_trajectory;
  MaxAffInstance<Rational> objective;
};

const CycleInstance& cycle_instance();

struct CycleVerification {
  bool points_feasible = false;       // every point satisfies every halfspace
  bool tight_exactly_once = false;    // halfspace k tight at point k only
  bool trajectory_matches = false;    // updates 1..7 reproduce the table
  bool period_six = false;            // recurrence detected with period 6
  MidpointTrajectory<Rational> trajectory;
  std::vector<std::string> failures;

  bool ok() const { return points_feasible && tight_exactly_once && trajectory_matches && period_six; }
};

CycleVerification verify_cycle_instance();

#define CONVMP_MIDPOINT_EXTERN(T)                                                                                  \
  extern template MinimizerInterval<T> minimizer_interval(const MaxAffInstance<T>&, const IterateState<T>&,      \
                                                          std::size_t);                                         \
  extern template T midpoint_update(const MaxAffInstance<T>&, IterateState<T>&, std::size_t);                    \
  extern template MidpointTrajectory<T> run_midpoint(const MaxAffInstance<T>&, std::vector<T>, std::size_t,      \
                                                     const T&);

CONVMP_MIDPOINT_EXTERN(double)
CONVMP_MIDPOINT_EXTERN(Rational)

}  // namespace convmp
