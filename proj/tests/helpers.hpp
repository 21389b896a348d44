#pragma once

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "convmp/maxaff.hpp"
#include "convmp/mrf.hpp"

namespace testutil {

using convmp::Rational;

inline Rational q(const char* s) { return convmp::parse_rational(s); }

struct RowSpec {
  const char* b;
  std::vector<std::pair<std::size_t, const char*>> terms;
};

// Builds an instance from decimal strings so the same data serves both modes.
template <class T>
convmp::MaxAffInstance<T> make(std::size_t n, std::initializer_list<RowSpec> rows) {
  std::vector<convmp::AffineRow<T>> out;
  for (const auto& r : rows) {
    convmp::AffineRow<T> row{convmp::ScalarTraits<T>::parse(r.b), {}};
    for (const auto& [j, a] : r.terms) row.terms.push_back({j, convmp::ScalarTraits<T>::parse(a)});
    out.push_back(std::move(row));
  }
  return convmp::MaxAffInstance<T>(n, std::move(out));
}

template <class T>
std::vector<T> vec(std::initializer_list<const char*> xs) {
  std::vector<T> out;
  for (const char* x : xs) out.push_back(convmp::ScalarTraits<T>::parse(x));
  return out;
}

// max{x1, x2, -x1-x2}
template <class T>
convmp::MaxAffInstance<T> three_lines() {
  return make<T>(2, {{"0", {{0, "1"}}}, {"0", {{1, "1"}}}, {"0", {{0, "-1"}, {1, "-1"}}}});
}

// max{x1-x2-x3, x1+4, x1+x2+x3, -x1+x2+2}; y drifts to -infinity under cyclic updates.
template <class T>
convmp::MaxAffInstance<T> drifting() {
  return make<T>(3, {{"0", {{0, "1"}, {1, "-1"}, {2, "-1"}}},
                     {"4", {{0, "1"}}},
                     {"0", {{0, "1"}, {1, "1"}, {2, "1"}}},
                     {"2", {{0, "-1"}, {1, "1"}}}});
}

// Two nodes, two labels, zero unaries, Potts-like pairwise [[4,0],[0,4]].
inline convmp::PairwiseModel two_node_potts() {
  convmp::PairwiseModel m(2, 2);
  m.add_edge(0, 1, {4, 0, 0, 4});
  m.finalize();
  return m;
}

}  // namespace testutil
