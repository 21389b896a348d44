#include "convmp/maxaff.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <type_traits>

#include "convmp/envelope.hpp"
#include "convmp/kernels.hpp"

namespace convmp {

template <class T>
MaxAffInstance<T>::MaxAffInstance(std::size_t n, std::vector<AffineRow<T>> rows)
    : rows_(std::move(rows)), columns_(n) {
  using Traits = ScalarTraits<T>;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    auto& terms = rows_[i].terms;
    if (!Traits::finite(rows_[i].offset)) {
      throw InputError("row " + std::to_string(i) + ": non-finite offset");
    }
    std::sort(terms.begin(), terms.end(), [](const Term<T>& a, const Term<T>& b) { return a.col < b.col; });
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const auto& t = terms[k];
      if (t.col >= n) {
        throw InputError("row " + std::to_string(i) + ": column " + std::to_string(t.col) + " out of range");
      }
      if (t.coef == 0) {
        throw InputError("row " + std::to_string(i) + ": zero coefficient at column " + std::to_string(t.col));
      }
      if (!Traits::finite(t.coef)) {
        throw InputError("row " + std::to_string(i) + ": non-finite coefficient");
      }
      if (k > 0 && terms[k - 1].col == t.col) {
        throw InputError("row " + std::to_string(i) + ": duplicate column " + std::to_string(t.col));
      }
      columns_[t.col].push_back({i, t.coef});
    }
  }
}

template <class T>
std::size_t MaxAffInstance<T>::num_nonzeros() const {
  std::size_t nnz = 0;
  for (const auto& c : columns_) nnz += c.size();
  return nnz;
}

template <class T>
T MaxAffInstance<T>::max_abs_offset() const {
  T best = T(0);
  for (const auto& r : rows_) {
    const T a = ScalarTraits<T>::abs(r.offset);
    if (a > best) best = a;
  }
  return best;
}

template <class U, class T>
MaxAffInstance<U> convert_instance(const MaxAffInstance<T>& in) {
  auto conv = [](const T& v) -> U {
    if constexpr (std::is_same_v<U, double>) {
      return ScalarTraits<T>::to_double(v);
    } else {
      return ScalarTraits<U>::from_double(ScalarTraits<T>::to_double(v));
    }
  };
  std::vector<AffineRow<U>> rows;
  rows.reserve(in.num_rows());
  for (const auto& r : in.rows()) {
    AffineRow<U> out{conv(r.offset), {}};
    for (const auto& t : r.terms) out.terms.push_back({t.col, conv(t.coef)});
    rows.push_back(std::move(out));
  }
  return MaxAffInstance<U>(in.num_cols(), std::move(rows));
}

template <class T>
T max_value(std::span<const T> y) {
  if (y.empty()) throw std::invalid_argument("max of an empty vector");
  T best = y[0];
  for (const auto& v : y) {
    if (v > best) best = v;
  }
  return best;
}

template <class T>
Evaluation<T> evaluate(const MaxAffInstance<T>& inst, std::span<const T> x) {
  if (x.size() != inst.num_cols()) {
    throw InputError("dimension mismatch: x has " + std::to_string(x.size()) + " entries, instance has " +
                     std::to_string(inst.num_cols()) + " variables");
  }
  if (inst.num_rows() == 0) throw InputError("cannot evaluate an instance without rows");
  for (const auto& v : x) {
    if (!ScalarTraits<T>::finite(v)) throw InputError("non-finite entry in x");
  }
  Evaluation<T> out{std::vector<T>(inst.num_rows()), T(0)};
  if constexpr (std::is_same_v<T, double>) {
    out.f = parallel::affine_values(inst.rows(), x, out.y);
  } else {
    out.f = serial::affine_values<T>(inst.rows(), x, out.y);
  }
  return out;
}

template <class T>
std::vector<ColumnSigns> check_sign_consistency(const MaxAffInstance<T>& inst) {
  std::vector<ColumnSigns> out(inst.num_cols());
  for (std::size_t j = 0; j < inst.num_cols(); ++j) {
    for (const auto& e : inst.column(j)) {
      if (e.coef > 0) out[j].has_pos = true;
      if (e.coef < 0) out[j].has_neg = true;
    }
  }
  return out;
}

template <class T>
PruneResult<T> prune(const MaxAffInstance<T>& inst) {
  const std::size_t m = inst.num_rows();
  const std::size_t n = inst.num_cols();
  std::vector<char> alive(m, 1);

  for (bool changed = true; changed;) {
    changed = false;
    std::vector<ColumnSigns> signs(n);
    for (std::size_t j = 0; j < n; ++j) {
      for (const auto& e : inst.column(j)) {
        if (!alive[e.row]) continue;
        if (e.coef > 0) signs[j].has_pos = true;
        if (e.coef < 0) signs[j].has_neg = true;
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (signs[j].consistent()) continue;
      for (const auto& e : inst.column(j)) {
        if (alive[e.row]) {
          alive[e.row] = 0;
          changed = true;
        }
      }
    }
  }

  PruneResult<T> out;
  std::vector<std::size_t> new_col(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const bool used = std::any_of(inst.column(j).begin(), inst.column(j).end(),
                                  [&](const ColumnEntry<T>& e) { return alive[e.row] != 0; });
    if (used) {
      new_col[j] = out.kept_cols.size();
      out.kept_cols.push_back(j);
    }
  }
  std::vector<AffineRow<T>> rows;
  for (std::size_t i = 0; i < m; ++i) {
    if (!alive[i]) continue;
    out.kept_rows.push_back(i);
    AffineRow<T> r{inst.row(i).offset, {}};
    for (const auto& t : inst.row(i).terms) r.terms.push_back({new_col[t.col], t.coef});
    rows.push_back(std::move(r));
  }
  out.instance = MaxAffInstance<T>(out.kept_cols.size(), std::move(rows));

  if (out.kept_rows.empty()) {
    out.verdict = PruneVerdict::UnboundedAfterPrune;
  } else if (out.kept_cols.empty()) {
    out.verdict = PruneVerdict::ConstantAfterPrune;
    T best = out.instance.row(0).offset;
    for (const auto& r : out.instance.rows()) {
      if (r.offset > best) best = r.offset;
    }
    out.constant_value = best;
  }
  return out;
}

template <class T>
IterateState<T> make_state(const MaxAffInstance<T>& inst, std::vector<T> x0) {
  auto ev = evaluate<T>(inst, x0);
  IterateState<T> s;
  s.x = std::move(x0);
  s.y = std::move(ev.y);
  return s;
}

namespace {

template <class T>
void column_lines(const MaxAffInstance<T>& inst, const IterateState<T>& state, std::size_t j,
                  std::vector<Line<T>>& rising, std::vector<Line<T>>& falling) {
  for (const auto& e : inst.column(j)) {
    // Value of row i as a function of x_j alone: a_ij * t + (y_i - a_ij x_j).
    Line<T> line{e.coef, T(state.y[e.row] - e.coef * state.x[j])};
    (e.coef > 0 ? rising : falling).push_back(std::move(line));
  }
  if (rising.empty() || falling.empty()) {
    throw std::invalid_argument("column " + std::to_string(j) +
                                " is not sign-consistent; prune the instance first");
  }
}

}  // namespace

template <class T>
T coordinate_minimizer(const MaxAffInstance<T>& inst, const IterateState<T>& state, std::size_t j) {
  if (j >= inst.num_cols()) throw std::out_of_range("coordinate index out of range");
  std::vector<Line<T>> rising;
  std::vector<Line<T>> falling;
  column_lines(inst, state, j, rising, falling);
  return solve_crossing(UpperEnvelope<T>(std::move(rising)), UpperEnvelope<T>(std::move(falling)));
}

template <class T>
T closed_form_minimizer(const MaxAffInstance<T>& inst, const IterateState<T>& state, std::size_t j) {
  std::vector<Line<T>> rising;
  std::vector<Line<T>> falling;
  column_lines(inst, state, j, rising, falling);
  auto best_intercept = [](const std::vector<Line<T>>& lines, int expected_slope) {
    T best = lines.front().intercept;
    for (const auto& l : lines) {
      if (l.slope != expected_slope) throw std::invalid_argument("closed form requires coefficients in {-1,+1}");
      if (l.intercept > best) best = l.intercept;
    }
    return best;
  };
  const T neg = best_intercept(falling, -1);
  const T pos = best_intercept(rising, 1);
  return T((neg - pos) / T(2));
}

template <class T>
T move_coordinate(const MaxAffInstance<T>& inst, IterateState<T>& state, std::size_t j, const T& target) {
  const T step = target - state.x[j];
  state.x[j] = target;
  if (step != 0) {
    for (const auto& e : inst.column(j)) state.y[e.row] += e.coef * step;
  }
  const T mag = ScalarTraits<T>::abs(step);
  if (mag > state.eta) state.eta = mag;
  ++state.updates_done;
  return step;
}

template <class T>
T apply_update(const MaxAffInstance<T>& inst, IterateState<T>& state, std::size_t j) {
  const T target = coordinate_minimizer(inst, state, j);
  return move_coordinate(inst, state, j, target);
}

template <class T>
T fixed_point_residual(const MaxAffInstance<T>& inst, const IterateState<T>& state) {
  T worst = T(0);
  for (std::size_t j = 0; j < inst.num_cols(); ++j) {
    const T d = ScalarTraits<T>::abs(T(coordinate_minimizer(inst, state, j) - state.x[j]));
    if (d > worst) worst = d;
  }
  return worst;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Converged: return "Converged";
    case Verdict::MaxSweepsReached: return "MaxSweepsReached";
    case Verdict::Diverging: return "Diverging";
    case Verdict::UnboundedAfterPrune: return "UnboundedAfterPrune";
    case Verdict::ConstantAfterPrune: return "ConstantAfterPrune";
  }
  return "Unknown";
}

std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

template <class T>
RunReport<T> run(const MaxAffInstance<T>& inst, std::vector<T> x0, const RunOptions<T>& options) {
  const std::size_t n = inst.num_cols();
  if (options.eps < 0) throw InputError("eps must be non-negative");
  if (options.eps == 0 && !options.max_sweeps) throw InputError("eps = 0 requires a finite sweep limit");

  std::vector<std::size_t> order = options.order;
  if (order.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
  } else {
    std::vector<char> seen(n, 0);
    if (order.size() != n) throw InputError("update order is not a permutation of the variables");
    for (const auto j : order) {
      if (j >= n || seen[j]) throw InputError("update order is not a permutation of the variables");
      seen[j] = 1;
    }
  }

  IterateState<T> state = make_state(inst, std::move(x0));
  const T budget = options.divergence_budget ? *options.divergence_budget
                                             : T(T(1000) * (T(1) + inst.max_abs_offset()));
  const T floor = T(*std::min_element(state.y.begin(), state.y.end()) - budget);

  RunReport<T> report;
  while (true) {
    if (options.max_sweeps && state.sweep >= *options.max_sweeps) {
      report.verdict = Verdict::MaxSweepsReached;
      break;
    }
    ++state.sweep;
    state.eta = T(0);
    for (const auto j : order) {
      const T step = apply_update(inst, state, j);
      if (options.observer) {
        const T objective = max_value<T>(state.y);
        options.observer(UpdateEvent<T>{state.sweep, state.updates_done, j, step, state.eta, state.y, objective});
      }
    }
    if (state.eta < options.eps) {
      report.verdict = Verdict::Converged;
      break;
    }
    if (*std::min_element(state.y.begin(), state.y.end()) < floor) {
      report.verdict = Verdict::Diverging;
      break;
    }
  }
  report.objective = max_value<T>(state.y);
  report.sweeps = state.sweep;
  report.updates = state.updates_done;
  report.eta = state.eta;
  report.x = std::move(state.x);
  report.y = std::move(state.y);
  return report;
}

template <class T>
RunReport<T> solve(const MaxAffInstance<T>& inst, std::vector<T> x0, const RunOptions<T>& options) {
  if (x0.size() != inst.num_cols()) throw InputError("dimension mismatch between x0 and instance");
  auto pruned = prune(inst);
  RunReport<T> report;
  if (pruned.verdict == PruneVerdict::UnboundedAfterPrune) {
    report.verdict = Verdict::UnboundedAfterPrune;
    report.x = std::move(x0);
    return report;
  }
  if (pruned.verdict == PruneVerdict::ConstantAfterPrune) {
    report.verdict = Verdict::ConstantAfterPrune;
    report.x = std::move(x0);
    report.y = evaluate<T>(pruned.instance, std::vector<T>{}).y;
    report.objective = *pruned.constant_value;
    return report;
  }
  std::vector<T> sub_x0;
  sub_x0.reserve(pruned.kept_cols.size());
  for (const auto j : pruned.kept_cols) sub_x0.push_back(x0[j]);

  RunOptions<T> sub_options = options;
  if (!options.order.empty()) {
    // Keep the relative order of surviving variables.
    std::vector<std::size_t> new_index(inst.num_cols(), inst.num_cols());
    for (std::size_t k = 0; k < pruned.kept_cols.size(); ++k) new_index[pruned.kept_cols[k]] = k;
    sub_options.order.clear();
    for (const auto j : options.order) {
      if (j < new_index.size() && new_index[j] != inst.num_cols()) sub_options.order.push_back(new_index[j]);
    }
  }
  if (options.observer) {
    // Observers see original column ids; y stays in the pruned row space.
    sub_options.observer = [&](const UpdateEvent<T>& e) {
      UpdateEvent<T> mapped = e;
      mapped.coord = pruned.kept_cols[e.coord];
      options.observer(mapped);
    };
  }
  report = run(pruned.instance, std::move(sub_x0), sub_options);
  std::vector<T> full = std::move(x0);
  for (std::size_t k = 0; k < pruned.kept_cols.size(); ++k) full[pruned.kept_cols[k]] = report.x[k];
  report.x = std::move(full);
  return report;
}

#define CONVMP_MAXAFF_INSTANTIATE(T)                                                          \
  template class MaxAffInstance<T>;                                                           \
  template Evaluation<T> evaluate(const MaxAffInstance<T>&, std::span<const T>);              \
  template T max_value(std::span<const T>);                                                   \
  template std::vector<ColumnSigns> check_sign_consistency(const MaxAffInstance<T>&);         \
  template PruneResult<T> prune(const MaxAffInstance<T>&);                                    \
  template IterateState<T> make_state(const MaxAffInstance<T>&, std::vector<T>);              \
  template T coordinate_minimizer(const MaxAffInstance<T>&, const IterateState<T>&, std::size_t); \
  template T closed_form_minimizer(const MaxAffInstance<T>&, const IterateState<T>&, std::size_t); \
  template T apply_update(const MaxAffInstance<T>&, IterateState<T>&, std::size_t);           \
  template T move_coordinate(const MaxAffInstance<T>&, IterateState<T>&, std::size_t, const T&); \
  template T fixed_point_residual(const MaxAffInstance<T>&, const IterateState<T>&);           \
  template RunReport<T> run(const MaxAffInstance<T>&, std::vector<T>, const RunOptions<T>&);  \
  template RunReport<T> solve(const MaxAffInstance<T>&, std::vector<T>, const RunOptions<T>&);

CONVMP_MAXAFF_INSTANTIATE(double)
CONVMP_MAXAFF_INSTANTIATE(Rational)

template MaxAffInstance<Rational> convert_instance(const MaxAffInstance<double>&);
template MaxAffInstance<double> convert_instance(const MaxAffInstance<Rational>&);

}  // namespace convmp
