#pragma once

#include <algorithm>
#include <cassert>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace convmp {

template <class T>
struct Line {
  T slope;
  T intercept;

  T at(const T& t) const { return T(slope * t + intercept); }
};

// Intersection abscissa of two lines with distinct slopes.
template <class T>
T intersection(const Line<T>& a, const Line<T>& b) {
  return T((b.intercept - a.intercept) / (a.slope - b.slope));
}

/// Upper envelope t -> max_k (slope_k t + intercept_k) of a finite set of
/// lines, stored as the dominating lines in slope order together with the
/// breakpoints between consecutive ones (strictly increasing).
template <class T>
class UpperEnvelope {
 public:
  explicit UpperEnvelope(std::vector<Line<T>> lines) {
    if (lines.empty()) throw std::invalid_argument("upper envelope of an empty line set");
    std::sort(lines.begin(), lines.end(), [](const Line<T>& a, const Line<T>& b) {
      if (a.slope != b.slope) return a.slope < b.slope;
      return a.intercept < b.intercept;
    });
    for (const auto& line : lines) {
      // Equal slopes: the later one has the larger intercept.
      if (!lines_.empty() && lines_.back().slope == line.slope) {
        lines_.pop_back();
        if (!breaks_.empty()) breaks_.pop_back();
      }
      while (!lines_.empty()) {
        const T x_new = intersection(lines_.back(), line);
        if (breaks_.empty() || x_new > breaks_.back()) {
          breaks_.push_back(x_new);
          break;
        }
        lines_.pop_back();
        breaks_.pop_back();
      }
      lines_.push_back(line);
    }
    assert(breaks_.size() + 1 == lines_.size());
  }

  std::span<const Line<T>> lines() const { return lines_; }
  std::span<const T> breakpoints() const { return breaks_; }

  /// Index of the line active on the open segment immediately left of t.
  std::size_t index_left_of(const T& t) const {
    return static_cast<std::size_t>(std::lower_bound(breaks_.begin(), breaks_.end(), t) - breaks_.begin());
  }

  T value(const T& t) const {
    const auto k = static_cast<std::size_t>(std::upper_bound(breaks_.begin(), breaks_.end(), t) - breaks_.begin());
    return lines_[k].at(t);
  }

 private:
  std::vector<Line<T>> lines_;
  std::vector<T> breaks_;
};

/// Unique t with rising(t) = falling(t), where every line of `rising` has
/// positive slope and every line of `falling` negative slope. The difference
/// is strictly increasing, so the crossing segment is located over the merged
/// breakpoints and its single linear equation solved directly.
template <class T>
T solve_crossing(const UpperEnvelope<T>& rising, const UpperEnvelope<T>& falling) {
  assert(rising.lines().front().slope > 0);
  assert(falling.lines().back().slope < 0);
  std::vector<T> merged;
  merged.reserve(rising.breakpoints().size() + falling.breakpoints().size());
  std::merge(rising.breakpoints().begin(), rising.breakpoints().end(), falling.breakpoints().begin(),
             falling.breakpoints().end(), std::back_inserter(merged));

  const auto first_nonneg = std::partition_point(merged.begin(), merged.end(), [&](const T& t) {
    return rising.value(t) < falling.value(t);
  });

  std::size_t r_idx = rising.lines().size() - 1;
  std::size_t f_idx = falling.lines().size() - 1;
  if (first_nonneg != merged.end()) {
    const T& p = *first_nonneg;
    if (rising.value(p) == falling.value(p)) return p;
    r_idx = rising.index_left_of(p);
    f_idx = falling.index_left_of(p);
  }
  const Line<T>& r = rising.lines()[r_idx];
  const Line<T>& f = falling.lines()[f_idx];
  return T((f.intercept - r.intercept) / (r.slope - f.slope));
}

/// Minimum value and minimizer interval of a convex piecewise-linear
/// function given as the upper envelope of lines. Requires at least one
/// positive and one negative slope (bounded minimizer set).
template <class T>
struct EnvelopeMinimum {
  T value;
  T lower;
  T upper;
};

template <class T>
EnvelopeMinimum<T> minimize_envelope(const UpperEnvelope<T>& env) {
  const auto lines = env.lines();
  const auto breaks = env.breakpoints();
  if (lines.front().slope >= 0 || lines.back().slope <= 0) {
    throw std::domain_error("minimizer set is unbounded");
  }
  // First line with non-negative slope on the envelope.
  std::size_t k = 0;
  while (lines[k].slope < 0) ++k;
  const T& left = breaks[k - 1];
  if (lines[k].slope == 0) {
    const T& right = breaks[k];
    return {lines[k].intercept, left, right};
  }
  return {lines[k].at(left), left, left};
}

}  // namespace convmp
