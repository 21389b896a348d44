#include <doctest.h>

#include <random>

#include "convmp/io.hpp"
#include "convmp/midpoint.hpp"
#include "convmp/oracle.hpp"
#include "helpers.hpp"

using namespace convmp;

TEST_SUITE("midpoint") {
  TEST_CASE("interval of {x1, 1, -x1-1}") {
    const auto inst = testutil::make<Rational>(1, {{"0", {{0, "1"}}}, {"1", {}}, {"-1", {{0, "-1"}}}});
    const auto iv = minimizer_interval(inst, make_state(inst, testutil::vec<Rational>({"7"})), 0);
    CHECK(iv.value == 1);
    CHECK(iv.lower == -2);
    CHECK(iv.upper == 1);
    CHECK(iv.midpoint() == Rational(-1, 2));
  }

  TEST_CASE("interval of {t, -t}") {
    const auto inst = testutil::make<Rational>(1, {{"0", {{0, "1"}}}, {"0", {{0, "-1"}}}});
    const auto iv = minimizer_interval(inst, make_state(inst, testutil::vec<Rational>({"3"})), 0);
    CHECK(iv.value == 0);
    CHECK(iv.lower == 0);
    CHECK(iv.upper == 0);
  }

  TEST_CASE("unbounded interval is an error") {
    const auto inst = testutil::make<Rational>(2, {{"0", {{0, "1"}}}, {"0", {{0, "-1"}}}, {"5", {}}});
    CHECK_THROWS_AS(minimizer_interval(inst, make_state(inst, testutil::vec<Rational>({"0", "0"})), 1),
                    std::domain_error);
  }

  TEST_CASE("cycle instance single steps") {
    const auto& c = cycle_instance();
    auto st = make_state(c.objective, testutil::vec<Rational>({"0", "0", "0"}));
    CHECK(minimizer_interval(c.objective, st, 1).midpoint() == 1);
    CHECK(midpoint_update(c.objective, st, 0) == 0);
    CHECK(st.x[0] == 0);
  }

  TEST_CASE("cycle instance verification") {
    const auto v = verify_cycle_instance();
    CHECK(v.points_feasible);
    CHECK(v.tight_exactly_once);
    CHECK(v.trajectory_matches);
    CHECK(v.period_six);
    CHECK(v.failures.empty());
    const auto& c = cycle_instance();
    CHECK(c.normals[0][0] == -1);
    CHECK(c.bounds[0] == 2);
    CHECK(c.points[0][0] == -2);
    CHECK(c.normals[3][1] == 1);
    CHECK(c.bounds[3] == 3);
    CHECK(c.points[3][1] == 3);
    for (std::size_t k = 0; k < 12; ++k) {
      Rational dot = 0;
      for (std::size_t d = 0; d < 3; ++d) dot += c.normals[k][d] * c.points[k][d];
      CHECK(dot == c.bounds[k]);
    }
    CHECK(c.bounds[4] == Rational(23, 2));
  }

  TEST_CASE("run from (3, 5) on max{x1, -x1, x2, -x2}") {
    const auto inst = testutil::make<Rational>(
        2, {{"0", {{0, "1"}}}, {"0", {{0, "-1"}}}, {"0", {{1, "1"}}}, {"0", {{1, "-1"}}}});
    const auto t = run_midpoint(inst, testutil::vec<Rational>({"3", "5"}), 100);
    CHECK(t.converged);
    CHECK(t.iterates[2] == testutil::vec<Rational>({"0", "0"}));
    CHECK(t.iterates.back() == testutil::vec<Rational>({"0", "0"}));
    CHECK(t.sweeps == 2);
  }

  TEST_CASE("property: midpoint lands in the reference interval and f never rises") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      MaxAffGenParams p;
      p.rows = 10;
      p.cols = 4;
      p.coeffs = {-2, -1, 1, 3};
      const auto inst = convert_instance<Rational>(generate_maxaff(p, seed));
      auto st = make_state(inst, std::vector<Rational>(inst.num_cols(), Rational(1, 3)));
      for (std::size_t u = 0; u < 40; ++u) {
        const std::size_t j = u % inst.num_cols();
        const auto ref = reference_envelope(inst, st.x, j);
        const Rational f_before = max_value<Rational>(st.y);
        midpoint_update(inst, st, j);
        REQUIRE(st.x[j] == (ref.lower + ref.upper) / 2);
        CHECK(max_value<Rational>(st.y) == ref.value);
        CHECK(max_value<Rational>(st.y) <= f_before);
      }
    }
  }

  TEST_CASE("three lines") {
    const auto three = testutil::three_lines<Rational>();
    const auto t = run_midpoint(three, testutil::vec<Rational>({"1", "1"}), 4);
    CHECK(t.iterates[1] == testutil::vec<Rational>({"-1/2", "1"}));
    CHECK(t.iterates[2] == testutil::vec<Rational>({"-1/2", "1/4"}));
  }
}
