#include "convmp/midpoint.hpp"

#include <map>
#include <utility>

#include "convmp/envelope.hpp"

namespace convmp {

template <class T>
MinimizerInterval<T> minimizer_interval(const MaxAffInstance<T>& inst, const IterateState<T>& state, std::size_t j) {
  if (j >= inst.num_cols()) throw std::out_of_range("coordinate index out of range");
  std::vector<T> slope(inst.num_rows(), T(0));
  for (const auto& e : inst.column(j)) slope[e.row] = e.coef;
  std::vector<Line<T>> lines;
  lines.reserve(inst.num_rows());
  for (std::size_t i = 0; i < inst.num_rows(); ++i) {
    lines.push_back({slope[i], T(state.y[i] - slope[i] * state.x[j])});
  }
  const auto m = minimize_envelope(UpperEnvelope<T>(std::move(lines)));
  return {m.lower, m.upper, m.value};
}

template <class T>
T midpoint_update(const MaxAffInstance<T>& inst, IterateState<T>& state, std::size_t j) {
  const T target = minimizer_interval(inst, state, j).midpoint();
  return move_coordinate(inst, state, j, target);
}

template <class T>
MidpointTrajectory<T> run_midpoint(const MaxAffInstance<T>& inst, std::vector<T> x0, std::size_t max_updates,
                                   const T& eps) {
  const std::size_t n = inst.num_cols();
  if (n == 0) throw InputError("instance has no variables");
  MidpointTrajectory<T> out;
  IterateState<T> state = make_state(inst, std::move(x0));
  out.iterates.push_back(state.x);

  std::map<std::pair<std::size_t, std::vector<T>>, std::size_t> seen;
  seen.emplace(std::make_pair(std::size_t{0}, state.x), 0);

  std::size_t updates = 0;
  while (updates < max_updates) {
    const std::size_t j = updates % n;
    if (j == 0) {
      ++out.sweeps;
      state.eta = T(0);
    }
    midpoint_update(inst, state, j);
    ++updates;
    out.iterates.push_back(state.x);

    const std::size_t phase = updates % n;
    const auto [it, inserted] = seen.emplace(std::make_pair(phase, state.x), updates);
    if (phase == 0 && (state.eta == 0 || state.eta < eps)) {
      out.converged = true;
      break;
    }
    if (!inserted) {
      out.cycle_start = it->second;
      out.period = updates - it->second;
      break;
    }
  }
  return out;
}

namespace {

Rational q(const char* s) { return parse_rational(s); }

CycleInstance build_cycle_instance() {
  CycleInstance c;
  const char* pts[12][3] = {{"-2", "0", "0"}, {"2", "0", "0"},  {"0", "-1", "0"}, {"0", "3", "0"},
                            {"0", "1", "-1"}, {"0", "1", "3"},  {"-1", "1", "1"}, {"3", "1", "1"},
                            {"1", "-2", "1"}, {"1", "2", "1"},  {"1", "0", "-2"}, {"1", "0", "2"}};
  // Halfspace k is the supporting halfspace of point k.
  const char* normals[12][3] = {{"-1", "0", "0"},      {"8", "-5", "-3.5"},   {"-3.5", "-8", "-5"},
                                {"0", "1", "0"},       {"-5", "3.5", "-8"},   {"0", "0", "1"},
                                {"-8", "5", "3.5"},    {"1", "0", "0"},       {"0", "-1", "0"},
                                {"3.5", "8", "5"},     {"0", "0", "-1"},      {"5", "-3.5", "8"}};
  const char* rhs[12] = {"2", "16", "8", "3", "11.5", "3", "16.5", "3", "2", "24.5", "2", "21"};
  const char* traj[7][3] = {{"0", "0", "0"}, {"0", "1", "0"}, {"0", "1", "1"}, {"1", "1", "1"},
                            {"1", "0", "1"}, {"1", "0", "0"}, {"0", "0", "0"}};
  for (std::size_t k = 0; k < 12; ++k) {
    for (std::size_t d = 0; d < 3; ++d) {
      c.points[k][d] = q(pts[k][d]);
      c.normals[k][d] = q(normals[k][d]);
    }
    c.bounds[k] = q(rhs[k]);
  }
  for (std::size_t k = 0; k < 7; ++k)
    for (std::size_t d = 0; d < 3; ++d) c.expected_trajectory[k][d] = q(traj[k][d]);

  std::vector<AffineRow<Rational>> rows;
  rows.push_back({Rational(0), {}});
  for (std::size_t k = 0; k < 12; ++k) {
    AffineRow<Rational> row{Rational(-c.bounds[k]), {}};
    for (std::size_t d = 0; d < 3; ++d) {
      if (c.normals[k][d] != 0) row.terms.push_back({d, c.normals[k][d]});
    }
    rows.push_back(std::move(row));
  }
  c.objective = MaxAffInstance<Rational>(3, std::move(rows));
  return c;
}

}  // namespace

const CycleInstance& cycle_instance() {
  static const CycleInstance instance = build_cycle_instance();
  return instance;
}

CycleVerification verify_cycle_instance() {
  const CycleInstance& c = cycle_instance();
  CycleVerification v;
  auto lhs = [&](std::size_t h, std::size_t p) {
    Rational s = 0;
    for (std::size_t d = 0; d < 3; ++d) s += c.normals[h][d] * c.points[p][d];
    return s;
  };

  v.points_feasible = true;
  v.tight_exactly_once = true;
  for (std::size_t h = 0; h < 12; ++h) {
    for (std::size_t p = 0; p < 12; ++p) {
      const Rational s = lhs(h, p);
      if (s > c.bounds[h]) {
        v.points_feasible = false;
        v.failures.push_back("point " + std::to_string(p) + " violates halfspace " + std::to_string(h));
      }
      if ((s == c.bounds[h]) != (p == h)) {
        v.tight_exactly_once = false;
        v.failures.push_back("halfspace " + std::to_string(h) + (p == h ? " not tight at " : " also tight at ") +
                             "point " + std::to_string(p));
      }
    }
  }

  std::vector<Rational> x0(3, Rational(0));
  v.trajectory = run_midpoint(c.objective, x0, 60);
  // The table lists the iterate after each of updates 1..7; update 1 leaves
  // x1 at 0, so the recurrence is first seen between updates 1 and 7.
  v.trajectory_matches = v.trajectory.iterates.size() >= 8;
  for (std::size_t k = 0; k < 7 && v.trajectory_matches; ++k) {
    for (std::size_t d = 0; d < 3; ++d) {
      if (v.trajectory.iterates[k + 1][d] != c.expected_trajectory[k][d]) {
        v.trajectory_matches = false;
        v.failures.push_back("iterate after update " + std::to_string(k + 1) + " differs from the expected cycle");
        break;
      }
    }
  }
  v.period_six = v.trajectory.period == std::optional<std::size_t>(6) && v.trajectory.cycle_start == 1u;
  if (!v.period_six) v.failures.push_back("no period-6 recurrence detected");
  return v;
}

#define CONVMP_MIDPOINT_INSTANTIATE(T)                                                                              \
  template MinimizerInterval<T> minimizer_interval(const MaxAffInstance<T>&, const IterateState<T>&, std::size_t); \
  template T midpoint_update(const MaxAffInstance<T>&, IterateState<T>&, std::size_t);                            \
  template MidpointTrajectory<T> run_midpoint(const MaxAffInstance<T>&, std::vector<T>, std::size_t, const T&);

CONVMP_MIDPOINT_INSTANTIATE(double)
CONVMP_MIDPOINT_INSTANTIATE(Rational)

}  // namespace convmp
