#include "convmp/energy.hpp"

#include <algorithm>
#include <stdexcept>

namespace convmp {

SlopeBounds slopes(const MaxAffInstance<Rational>& inst) {
  bool any = false;
  Rational lo;
  Rational hi;
  for (const auto& row : inst.rows()) {
    for (const auto& t : row.terms) {
      const Rational a = abs(t.coef);
      if (!any || a < lo) lo = a;
      if (!any || a > hi) hi = a;
      any = true;
    }
  }
  if (!any) throw std::invalid_argument("slope bounds of an instance without coefficients");
  Rational k = 1 + hi / lo;
  k.canonicalize();
  return {lo, hi, k};
}

namespace {

// Horner from the largest term: k*(s_1 + k*(s_2 + ... + k*s_m)).
Rational horner(std::span<const Rational> sorted, const Rational& k) {
  Rational acc = 0;
  for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) acc = k * (*it + acc);
  return acc;
}

}  // namespace

Rational energy(std::span<const Rational> y, const Rational& k) {
  std::vector<Rational> sorted(y.begin(), y.end());
  std::sort(sorted.begin(), sorted.end());
  return horner(sorted, k);
}

Rational energy_for_permutation(std::span<const Rational> y, std::span<const std::size_t> perm, const Rational& k) {
  if (perm.size() != y.size()) throw std::invalid_argument("permutation size mismatch");
  std::vector<Rational> ordered;
  ordered.reserve(y.size());
  for (const auto p : perm) ordered.push_back(y[p]);
  return horner(ordered, k);
}

StepCertificate certify_step(std::span<const Rational> y_before, std::span<const Rational> y_after,
                             const SlopeBounds& bounds, const Rational& step_size) {
  if (y_before.size() != y_after.size()) throw std::invalid_argument("dimension mismatch in certify_step");
  const Rational decrease = energy(y_before, bounds.k) - energy(y_after, bounds.k);
  const Rational margin = decrease - bounds.c * abs(step_size);
  return {margin >= 0, decrease, margin};
}

EnergyAuditor::EnergyAuditor(SlopeBounds bounds, std::vector<Rational> y0)
    : bounds_(std::move(bounds)), y_(std::move(y0)), energy_(energy(y_, bounds_.k)) {}

void EnergyAuditor::operator()(const UpdateEvent<Rational>& event) {
  const Rational after = energy(event.y, bounds_.k);
  const Rational step = abs(event.step);
  const Rational decrease = energy_ - after;
  const Rational margin = decrease - bounds_.c * step;
  ++checked_;
  if (margin < 0) ++violations_;
  if (step != 0 && decrease <= 0) ++non_strict_;
  total_decrease_ += decrease;
  total_step_ += step;
  if (keep_ledger_) {
    ledger_.push_back({event.update, to_decimal_string(step), to_decimal_string(energy_), to_decimal_string(after),
                       to_decimal_string(margin)});
  }
  energy_ = after;
  y_.assign(event.y.begin(), event.y.end());
}

}  // namespace convmp
