// Serial reference vs OpenMP kernels. Reports the best of --reps runs.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#include <CLI11.hpp>
#include <omp.h>

#include "convmp/io.hpp"
#include "convmp/kernels.hpp"

using namespace convmp;

namespace {

double best_seconds(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const char* name, double serial_s, double parallel_s, bool same) {
  std::printf("%-28s %12.6f %12.6f %8.2fx  %s\n", name, serial_s, parallel_s, serial_s / parallel_s,
              same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time serial and OpenMP kernels"};
  int reps = 3, threads = 0;
  std::size_t rows = 200000, cols = 200, grid = 5;
  app.add_option("--reps", reps, "repetitions per kernel")->capture_default_str();
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)")->capture_default_str();
  app.add_option("--rows", rows, "rows of the max-affine instance")->capture_default_str();
  app.add_option("--cols", cols, "columns of the max-affine instance")->capture_default_str();
  app.add_option("--grid", grid, "side of the square grid for labeling scans (labels = 2)")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  if (threads > 0) omp_set_num_threads(threads);

  MaxAffGenParams p;
  p.rows = rows;
  p.cols = cols;
  p.density = 0.05;
  p.coeffs = {-3, -2, -1, 1, 2, 3};
  const auto inst = generate_maxaff(p, 1);
  std::vector<double> x(inst.num_cols());
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& v : x) v = u(rng);
  std::vector<double> ys(inst.num_rows()), yp(inst.num_rows());

  const PairwiseModel scan_model = generate_grid({grid, grid, 2, -1.0, 1.0}, 3);
  const PairwiseModel block_model = generate_grid({300, 300, 8, -1.0, 1.0}, 4);

  std::printf("threads: %d, instance %zu x %zu (%zu nonzeros), scan over 2^%zu labelings\n", omp_get_max_threads(),
              inst.num_rows(), inst.num_cols(), inst.num_nonzeros(), grid * grid);
  std::printf("%-28s %12s %12s %9s\n", "kernel", "serial [s]", "parallel [s]", "speedup");

  double fs = 0, fp = 0;
  const double a_s = best_seconds(reps, [&] {
    fs = serial::affine_values<double>(inst.rows(), x, ys);
  });
  const double a_p = best_seconds(reps, [&] {
    fp = parallel::affine_values(inst.rows(), x, yp);
  });
  report("affine_values", a_s, a_p, fs == fp && ys == yp);

  LabelingBest ls{}, lp{};
  const double l_s = best_seconds(reps, [&] { ls = serial::labeling_scan(scan_model); });
  const double l_p = best_seconds(reps, [&] { lp = parallel::labeling_scan(scan_model); });
  report("labeling_scan", l_s, l_p, ls.value == lp.value && ls.index == lp.index);

  std::vector<double> bs, bp;
  const double b_s = best_seconds(reps, [&] { bs = serial::block_maxima(block_model); });
  const double b_p = best_seconds(reps, [&] { bp = parallel::block_maxima(block_model); });
  report("block_maxima", b_s, b_p, bs == bp);
  return 0;
}
