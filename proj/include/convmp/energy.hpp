#pragma once

// Energy certificate for the coordinate-descent iterates:
//   E_k(y) = sum_{i=1..m} k^i sort(y)_i   (ascending sort),
// with k = 1 + C/c from the extreme coefficient magnitudes. Every inner
// update of the solver lowers E_k(Ax + b) by at least c |step|.
//
// Exact rationals only; k^m grows quickly, so this is an analysis tool for
// small instances, never part of the solver loop.

#include <span>
#include <string>
#include <vector>

#include "convmp/maxaff.hpp"
#include "convmp/numeric.hpp"

namespace convmp {

struct SlopeBounds {
  Rational c;  // min nonzero |a_ij|
  Rational C;  // max |a_ij|
  Rational k;  // 1 + C/c
};

SlopeBounds slopes(const MaxAffInstance<Rational>& inst);

Rational energy(std::span<const Rational> y, const Rational& k);

/// Same as energy() but for an explicit ordering: sum_i k^i y_{perm[i-1]}.
Rational energy_for_permutation(std::span<const Rational> y, std::span<const std::size_t> perm, const Rational& k);

struct StepCertificate {
  bool pass;
  Rational decrease;  // E_k(before) - E_k(after)
  Rational margin;    // decrease - c |step|
};

StepCertificate certify_step(std::span<const Rational> y_before, std::span<const Rational> y_after,
                             const SlopeBounds& bounds, const Rational& step_size);

/// One ledger row per inner update; fields rendered as decimal strings.
struct EnergyLedgerRow {
  std::size_t update;
  std::string step;
  std::string energy_before;
  std::string energy_after;
  std::string margin;
};

/// Observer that certifies every update of an exact run and records the
/// ledger. Construct with the instance's bounds and the initial y.
class EnergyAuditor {
 public:
  EnergyAuditor(SlopeBounds bounds, std::vector<Rational> y0);

  void operator()(const UpdateEvent<Rational>& event);

  std::size_t checked() const { return checked_; }
  std::size_t violations() const { return violations_; }
  /// Strictly positive margin missing on some nonzero step.
  std::size_t non_strict() const { return non_strict_; }
  const Rational& total_decrease() const { return total_decrease_; }
  const Rational& total_step() const { return total_step_; }
  const Rational& current_energy() const { return energy_; }
  const std::vector<EnergyLedgerRow>& ledger() const { return ledger_; }
  void keep_ledger(bool on) { keep_ledger_ = on; }

 private:
  SlopeBounds bounds_;
  std::vector<Rational> y_;
  Rational energy_;
  Rational total_decrease_ = 0;
  Rational total_step_ = 0;
  std::size_t checked_ = 0;
  std::size_t violations_ = 0;
  std::size_t non_strict_ = 0;
  bool keep_ledger_ = false;
  std::vector<EnergyLedgerRow> ledger_;
};

}  // namespace convmp
