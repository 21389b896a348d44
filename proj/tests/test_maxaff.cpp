#include <doctest.h>

#include <map>
#include <random>

#include "convmp/io.hpp"
#include "convmp/maxaff.hpp"
#include "convmp/oracle.hpp"
#include "helpers.hpp"

using namespace convmp;
using testutil::q;

namespace {

MaxAffInstance<Rational> random_exact(std::uint64_t seed, std::vector<int> coeffs = {-3, -2, -1, 1, 2, 3}) {
  std::mt19937_64 rng(seed);
  MaxAffGenParams p;
  p.rows = 2 + rng() % 20;
  p.cols = 1 + rng() % 6;
  p.density = 0.3 + 0.1 * static_cast<double>(rng() % 6);
  p.coeffs = std::move(coeffs);
  return convert_instance<Rational>(generate_maxaff(p, seed));
}

std::vector<Rational> random_point(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> d(-20, 20);
  std::vector<Rational> x;
  for (std::size_t j = 0; j < n; ++j) {
    Rational v(d(rng), 4);
    v.canonicalize();
    x.push_back(v);
  }
  return x;
}

}  // namespace

TEST_SUITE("maxaff") {
  TEST_CASE("evaluate") {
    const auto inst = testutil::three_lines<Rational>();
    const auto ev = evaluate(inst, std::span<const Rational>(testutil::vec<Rational>({"1", "1"})));
    CHECK(ev.y == testutil::vec<Rational>({"1", "1", "-2"}));
    CHECK(ev.f == 1);

    const auto sym = testutil::make<double>(1, {{"0", {{0, "1"}}}, {"0", {{0, "-1"}}}});
    CHECK(evaluate(sym, std::span<const double>(std::vector<double>{0.0})).f == 0.0);

    const auto drift = testutil::drifting<Rational>();
    const auto ev2 = evaluate(drift, std::span<const Rational>(testutil::vec<Rational>({"0", "0", "0"})));
    CHECK(ev2.y == testutil::vec<Rational>({"0", "4", "0", "2"}));
    CHECK(ev2.f == 4);

    CHECK_THROWS_AS(evaluate(inst, std::span<const Rational>(testutil::vec<Rational>({"1"}))), InputError);
    CHECK_THROWS_AS(evaluate(sym, std::span<const double>(std::vector<double>{std::nan("")})), InputError);
  }

  TEST_CASE("instance validation") {
    CHECK_THROWS_AS(testutil::make<double>(1, {{"0", {{1, "1"}}}}), InputError);
    CHECK_THROWS_AS(testutil::make<double>(2, {{"0", {{0, "1"}, {0, "2"}}}}), InputError);
    CHECK_THROWS_AS(testutil::make<double>(1, {{"0", {{0, "0"}}}}), InputError);
    const auto inst = testutil::make<double>(2, {{"1", {{1, "2"}, {0, "-1"}}}, {"-3", {{0, "4"}}}});
    REQUIRE(inst.column(0).size() == 2);
    CHECK(inst.column(0)[0].row == 0);
    CHECK(inst.column(0)[0].coef == -1.0);
    CHECK(inst.column(0)[1].coef == 4.0);
    CHECK(inst.column(1).size() == 1);
    CHECK(inst.row(0).terms[0].col == 0);
    CHECK(inst.num_nonzeros() == 3);
  }

  TEST_CASE("sign consistency") {
    const auto inst = testutil::make<Rational>(2, {{"0", {{0, "1"}}}, {"0", {{0, "-1"}}}, {"0", {{0, "1"}, {1, "1"}}}});
    const auto s = check_sign_consistency(inst);
    CHECK(s[0].consistent());
    CHECK_FALSE(s[1].consistent());
    CHECK(s[1].has_pos);
    CHECK_FALSE(s[1].has_neg);

    const auto empty = testutil::make<Rational>(2, {{"0", {{0, "1"}}}, {"0", {{0, "-1"}}}});
    const auto e = check_sign_consistency(empty);
    CHECK_FALSE(e[1].has_pos);
    CHECK_FALSE(e[1].has_neg);
  }

  TEST_CASE("prune drops rows touching inconsistent columns") {
    const auto inst = testutil::make<Rational>(2, {{"0", {{0, "1"}}}, {"0", {{0, "-1"}}}, {"0", {{0, "1"}, {1, "1"}}}});
    const auto p = prune(inst);
    CHECK(p.verdict == PruneVerdict::Ok);
    CHECK(p.instance.num_rows() == 2);
    CHECK(p.instance.num_cols() == 1);
    CHECK(p.kept_rows == std::vector<std::size_t>{0, 1});
    CHECK(p.kept_cols == std::vector<std::size_t>{0});
  }

  TEST_CASE("prune verdicts") {
    CHECK(prune(testutil::make<Rational>(1, {{"0", {{0, "1"}}}})).verdict == PruneVerdict::UnboundedAfterPrune);
    const auto cascade = testutil::make<Rational>(2, {{"0", {{0, "1"}, {1, "1"}}}, {"0", {{0, "-1"}}}});
    CHECK(prune(cascade).verdict == PruneVerdict::UnboundedAfterPrune);
    const auto constant = testutil::make<Rational>(1, {{"3", {}}, {"-1", {}}});
    const auto pc = prune(constant);
    CHECK(pc.verdict == PruneVerdict::ConstantAfterPrune);
    CHECK(*pc.constant_value == 3);
  }

  TEST_CASE("solve reports the prune verdicts") {
    RunOptions<Rational> opt;
    CHECK(solve(testutil::make<Rational>(1, {{"0", {{0, "1"}}}}), testutil::vec<Rational>({"0"}), opt).verdict ==
          Verdict::UnboundedAfterPrune);
    const auto r = solve(testutil::make<Rational>(1, {{"3", {}}, {"-1", {}}}), testutil::vec<Rational>({"0"}), opt);
    CHECK(r.verdict == Verdict::ConstantAfterPrune);
    CHECK(r.objective == 3);
  }

  TEST_CASE("coordinate minimizer on three lines") {
    const auto inst = testutil::three_lines<Rational>();
    auto st = make_state(inst, testutil::vec<Rational>({"1", "1"}));
    CHECK(coordinate_minimizer(inst, st, 0) == Rational(-1, 2));
    CHECK(apply_update(inst, st, 0) == Rational(-3, 2));
    CHECK(st.x[0] == Rational(-1, 2));
    CHECK(max_value<Rational>(st.y) == 1);
    CHECK(coordinate_minimizer(inst, st, 1) == Rational(1, 4));
    apply_update(inst, st, 1);
    CHECK(st.x[1] == Rational(1, 4));
    CHECK(max_value<Rational>(st.y) == Rational(1, 4));
    CHECK(st.eta == Rational(3, 2));
  }

  TEST_CASE("two-line minimizer") {
    // max{2t, -t + 3}
    const auto inst = testutil::make<Rational>(1, {{"0", {{0, "2"}}}, {"3", {{0, "-1"}}}});
    const auto st = make_state(inst, testutil::vec<Rational>({"0"}));
    CHECK(coordinate_minimizer(inst, st, 0) == 1);
  }

  TEST_CASE("drifting instance: one sweep lowers every y by one") {
    const auto inst = testutil::drifting<Rational>();
    auto st = make_state(inst, testutil::vec<Rational>({"0", "0", "0"}));
    for (std::size_t j = 0; j < 3; ++j) apply_update(inst, st, j);
    CHECK(st.x == testutil::vec<Rational>({"-1", "-2", "2"}));
    CHECK(st.y == testutil::vec<Rational>({"-1", "3", "-1", "1"}));
  }

  TEST_CASE("fixed point residual") {
    const auto inst = testutil::three_lines<Rational>();
    CHECK(fixed_point_residual(inst, make_state(inst, testutil::vec<Rational>({"1", "1"}))) == Rational(3, 2));
    CHECK(fixed_point_residual(inst, make_state(inst, testutil::vec<Rational>({"0", "0"}))) == 0);
  }

  TEST_CASE("run converges on three lines") {
    RunOptions<double> opt;
    opt.eps = 1e-9;
    const auto r = run(testutil::three_lines<double>(), {1.0, 1.0}, opt);
    CHECK(r.verdict == Verdict::Converged);
    CHECK(r.eta < 1e-9);
    CHECK(std::abs(r.x[0]) <= 1e-8);
    CHECK(std::abs(r.x[1]) <= 1e-8);
    CHECK(r.sweeps <= 200);
  }

  TEST_CASE("points on the diagonal are fixed although f is unbounded below") {
    // max{x1 - 2 x2, x2 - 2 x1}
    const auto inst = testutil::make<Rational>(2, {{"0", {{0, "1"}, {1, "-2"}}}, {"0", {{0, "-2"}, {1, "1"}}}});
    RunOptions<Rational> opt;
    const auto r = run(inst, testutil::vec<Rational>({"5", "5"}), opt);
    CHECK(r.verdict == Verdict::Converged);
    CHECK(r.sweeps == 1);
    CHECK(r.eta == 0);
    CHECK(r.x == testutil::vec<Rational>({"5", "5"}));
  }

  TEST_CASE("drifting instance is reported as diverging") {
    RunOptions<double> opt;
    const auto r = run(testutil::drifting<double>(), {0.0, 0.0, 0.0}, opt);
    CHECK(r.verdict == Verdict::Diverging);
    RunOptions<double> small;
    small.divergence_budget = 10.0;
    const auto r2 = run(testutil::drifting<double>(), {0.0, 0.0, 0.0}, small);
    CHECK(r2.verdict == Verdict::Diverging);
    CHECK(r2.sweeps == 11);
  }

  TEST_CASE("run rejects bad options") {
    RunOptions<double> opt;
    opt.order = {0, 0};
    CHECK_THROWS_AS(run(testutil::three_lines<double>(), {1.0, 1.0}, opt), InputError);
    RunOptions<double> zero;
    zero.eps = 0.0;
    zero.max_sweeps.reset();
    CHECK_THROWS_AS(run(testutil::three_lines<double>(), {1.0, 1.0}, zero), InputError);
  }

  TEST_CASE("shuffled order is a seeded permutation") {
    const auto a = shuffled_order(10, 7);
    CHECK(a == shuffled_order(10, 7));
    auto sorted = a;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < 10; ++k) CHECK(sorted[k] == k);
  }

  TEST_CASE("property: f never increases and y stays consistent (exact)") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
      const auto inst = random_exact(seed);
      const auto x0 = random_point(inst.num_cols(), seed);
      RunOptions<Rational> opt;
      opt.max_sweeps = 30;
      Rational prev = evaluate(inst, std::span<const Rational>(x0)).f;
      std::vector<Rational> x = x0;
      bool ok = true;
      opt.observer = [&](const UpdateEvent<Rational>& e) {
        if (e.objective > prev) ok = false;
        prev = e.objective;
        x[e.coord] += e.step;
        if (evaluate(inst, std::span<const Rational>(x)).y != std::vector<Rational>(e.y.begin(), e.y.end()))
          ok = false;
      };
      run(inst, x0, opt);
      CHECK_MESSAGE(ok, "seed " << seed);
    }
  }

  TEST_CASE("property: f never increases and y stays consistent (float)") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
      MaxAffGenParams p;
      p.rows = 25;
      p.cols = 8;
      p.coeffs = {-3, -2, -1, 1, 2, 3};
      const auto inst = generate_maxaff(p, seed);
      std::vector<double> x0(inst.num_cols(), 0.5);
      RunOptions<double> opt;
      opt.max_sweeps = 200;
      double prev = evaluate(inst, std::span<const double>(x0)).f;
      std::vector<double> x = x0;
      bool monotone = true, consistent = true;
      opt.observer = [&](const UpdateEvent<double>& e) {
        if (e.objective > prev + 1e-12 * (1.0 + std::abs(prev))) monotone = false;
        prev = e.objective;
        x[e.coord] += e.step;
        const auto fresh = evaluate(inst, std::span<const double>(x)).y;
        double ymax = 0.0;
        for (const double v : e.y) ymax = std::max(ymax, std::abs(v));
        for (std::size_t i = 0; i < fresh.size(); ++i)
          if (std::abs(fresh[i] - e.y[i]) > 1e-9 * (1.0 + ymax)) consistent = false;
      };
      run(inst, x0, opt);
      CHECK_MESSAGE(monotone, "seed " << seed);
      CHECK_MESSAGE(consistent, "seed " << seed);
    }
  }

  TEST_CASE("property: closed form equals the envelope solver on unit coefficients") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
      const auto inst = random_exact(seed, {-1, 1});
      auto st = make_state(inst, random_point(inst.num_cols(), seed + 1000));
      for (std::size_t sweep = 0; sweep < 3; ++sweep) {
        for (std::size_t j = 0; j < inst.num_cols(); ++j) {
          CHECK(coordinate_minimizer(inst, st, j) == closed_form_minimizer(inst, st, j));
          apply_update(inst, st, j);
        }
      }
    }
  }

  TEST_CASE("property: minimizer is the unique g_j minimizer and lies in the f interval") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
      const auto inst = random_exact(seed);
      const auto x = random_point(inst.num_cols(), seed + 7);
      const auto st = make_state(inst, x);
      for (std::size_t j = 0; j < inst.num_cols(); ++j) {
        const Rational t = coordinate_minimizer(inst, st, j);
        const auto g = reference_envelope(inst, x, j, true);
        CHECK(g.lower == g.upper);
        CHECK(g.lower == t);
        const auto f = reference_envelope(inst, x, j, false);
        CHECK(f.lower <= t);
        CHECK(t <= f.upper);
      }
    }
  }

  TEST_CASE("property: identical inputs give identical trajectories") {
    MaxAffGenParams p;
    p.rows = 30;
    p.cols = 10;
    p.coeffs = {-3, -1, 2, 5};
    const auto inst = generate_maxaff(p, 99);
    auto trajectory = [&](std::uint64_t seed) {
      RunOptions<double> opt;
      opt.max_sweeps = 50;
      opt.order = shuffled_order(inst.num_cols(), seed);
      std::vector<double> steps;
      opt.observer = [&](const UpdateEvent<double>& e) { steps.push_back(e.step); };
      run(inst, std::vector<double>(inst.num_cols(), 0.0), opt);
      return steps;
    };
    const auto a = trajectory(3);
    const auto b = trajectory(3);
    REQUIRE(a.size() == b.size());
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
  }

  TEST_CASE("property: exact iterates never recur unless the run has stalled") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      const auto inst = random_exact(seed);
      const std::size_t n = inst.num_cols();
      auto st = make_state(inst, random_point(n, seed + 3));
      std::map<std::pair<std::size_t, std::vector<Rational>>, std::size_t> seen;
      std::vector<Rational> steps;
      bool ok = true;
      for (std::size_t u = 0; u < 40 * n; ++u) {
        steps.push_back(apply_update(inst, st, u % n));
        const auto [it, fresh] = seen.emplace(std::make_pair((u + 1) % n, st.x), u + 1);
        if (!fresh) {
          for (std::size_t k = it->second; k <= u; ++k) ok = ok && steps[k] == 0;
        }
      }
      CHECK_MESSAGE(ok, "seed " << seed);
    }
  }
}
