// convmp: command-line front end for the max-affine coordinate-descent
// solvers, max-sum diffusion, max-marginal averaging and the midpoint demo.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "convmp/decomposition.hpp"
#include "convmp/diffusion.hpp"
#include "convmp/energy.hpp"
#include "convmp/io.hpp"
#include "convmp/maxaff.hpp"
#include "convmp/midpoint.hpp"
#include "convmp/oracle.hpp"

using namespace convmp;

namespace {

enum Exit { kOk = 0, kInputError = 1, kDiverging = 2, kMaxSweeps = 3 };

struct Common {
  std::string input;
  double eps = 1e-9;
  std::size_t max_sweeps = 10000;
  bool exact = false;
  std::string trace;
  std::uint64_t seed = 0;
  std::string order = "cyclic";
  bool check_oracle = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--eps", c.eps, "stop when a sweep's largest step is below eps")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--max-sweeps", c.max_sweeps, "sweep limit")->capture_default_str();
  cmd->add_flag("--exact", c.exact, "exact rational arithmetic");
  cmd->add_option("--trace", c.trace, "write a per-update CSV trace");
  cmd->add_option("--seed", c.seed, "seed for --order shuffle")->capture_default_str();
  cmd->add_option("--order", c.order, "coordinate order")
      ->check(CLI::IsMember({"cyclic", "shuffle"}))
      ->capture_default_str();
  cmd->add_flag("--check-oracle", c.check_oracle, "cross-check the result against brute-force references");
}

int exit_for(Verdict v) {
  switch (v) {
    case Verdict::Converged:
    case Verdict::ConstantAfterPrune:
      return kOk;
    case Verdict::Diverging:
    case Verdict::UnboundedAfterPrune:
      return kDiverging;
    case Verdict::MaxSweepsReached:
      return kMaxSweeps;
  }
  return kInputError;
}

std::unique_ptr<std::ofstream> open_trace(const std::string& path) {
  if (path.empty()) return nullptr;
  auto out = std::make_unique<std::ofstream>(path);
  if (!*out) throw InputError("cannot write trace " + path);
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s = "(";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + ScalarTraits<T>::to_string(v[k]);
  return s + ")";
}

template <class T>
int run_solve(const Common& c) {
  auto doc = load_maxaff<T>(c.input);
  const auto& inst = doc.instance;
  std::vector<T> x0 = doc.x0.value_or(std::vector<T>(inst.num_cols(), T(0)));

  RunOptions<T> opt;
  opt.eps = ScalarTraits<T>::parse(to_decimal_string(c.eps));
  opt.max_sweeps = c.max_sweeps;
  if (c.order == "shuffle") opt.order = shuffled_order(inst.num_cols(), c.seed);

  auto trace_file = open_trace(c.trace);
  std::optional<TraceWriter> trace;
  if (trace_file) trace.emplace(*trace_file);

  // Energy columns need the pruned instance the solver runs on.
  std::optional<EnergyAuditor> auditor;
  if constexpr (ScalarTraits<T>::exact) {
    if (trace) {
      const auto pruned = prune(inst);
      if (pruned.verdict == PruneVerdict::Ok) {
        std::vector<T> sub_x0;
        for (const auto j : pruned.kept_cols) sub_x0.push_back(x0[j]);
        auditor.emplace(slopes(pruned.instance), evaluate(pruned.instance, std::span<const T>(sub_x0)).y);
        auditor->keep_ledger(true);
      }
    }
  }
  if (trace) {
    opt.observer = [&](const UpdateEvent<T>& e) {
      TraceRow row{e.sweep, e.update, "maxaff", std::to_string(e.coord), ScalarTraits<T>::to_string(e.step),
                   ScalarTraits<T>::to_string(e.eta), ScalarTraits<T>::to_string(e.objective), "", ""};
      if constexpr (ScalarTraits<T>::exact) {
        if (auditor) {
          (*auditor)(e);
          row.energy_before = auditor->ledger().back().energy_before;
          row.energy_after = auditor->ledger().back().energy_after;
        }
      }
      trace->write(row);
    };
  }

  const auto report = solve(inst, x0, opt);
  std::cout << "verdict: " << to_string(report.verdict) << '\n'
            << "sweeps: " << report.sweeps << '\n'
            << "updates: " << report.updates << '\n'
            << "eta: " << ScalarTraits<T>::to_string(report.eta) << '\n'
            << "f: " << ScalarTraits<T>::to_string(report.objective) << '\n'
            << "x: " << join(report.x) << '\n';
  if (auditor) {
    std::cout << "energy violations: " << auditor->violations() << " of " << auditor->checked() << '\n';
  }

  if (c.check_oracle && report.verdict != Verdict::UnboundedAfterPrune &&
      report.verdict != Verdict::ConstantAfterPrune) {
    const auto pruned = prune(inst);
    std::vector<T> sub_x;
    for (const auto j : pruned.kept_cols) sub_x.push_back(report.x[j]);
    const auto state = make_state(pruned.instance, sub_x);
    std::size_t agree = 0;
    for (std::size_t j = 0; j < pruned.instance.num_cols(); ++j) {
      const T t = coordinate_minimizer(pruned.instance, state, j);
      const auto ref = reference_envelope(pruned.instance, sub_x, j, true);
      if (ref.lower <= t && t <= ref.upper) ++agree;
    }
    std::cout << "oracle: coordinate minimizer inside reference interval on " << agree << " of "
              << pruned.instance.num_cols() << " coordinates\n";
    if (agree != pruned.instance.num_cols()) return kInputError;
  }
  return exit_for(report.verdict);
}

template <class T>
int run_midpoint_cmd(const Common& c) {
  auto doc = load_maxaff<T>(c.input);
  const auto& inst = doc.instance;
  std::vector<T> x0 = doc.x0.value_or(std::vector<T>(inst.num_cols(), T(0)));
  const auto traj =
      run_midpoint(inst, x0, c.max_sweeps * inst.num_cols(), ScalarTraits<T>::parse(to_decimal_string(c.eps)));

  if (auto trace_file = open_trace(c.trace)) {
    TraceWriter trace(*trace_file);
    const std::size_t n = inst.num_cols();
    T eta = T(0);
    for (std::size_t u = 1; u < traj.iterates.size(); ++u) {
      const std::size_t j = (u - 1) % n;
      if (j == 0) eta = T(0);
      const T step = traj.iterates[u][j] - traj.iterates[u - 1][j];
      if (ScalarTraits<T>::abs(step) > eta) eta = ScalarTraits<T>::abs(step);
      const T f = evaluate(inst, std::span<const T>(traj.iterates[u])).f;
      trace.write({(u - 1) / n + 1, u, "midpoint", std::to_string(j), ScalarTraits<T>::to_string(step),
                   ScalarTraits<T>::to_string(eta), ScalarTraits<T>::to_string(f), "", ""});
    }
  }

  const std::size_t shown = std::min<std::size_t>(traj.iterates.size(), 50);
  for (std::size_t u = 0; u < shown; ++u) std::cout << u << ": " << join(traj.iterates[u]) << '\n';
  if (shown < traj.iterates.size()) std::cout << "... " << traj.iterates.size() - shown << " more iterates\n";
  if (traj.converged) {
    std::cout << "verdict: Converged\n";
    return kOk;
  }
  if (traj.period) {
    std::cout << "verdict: Cycle (period " << *traj.period << " updates from update " << *traj.cycle_start << ")\n";
    return kMaxSweeps;
  }
  std::cout << "verdict: MaxSweepsReached\n";
  return kMaxSweeps;
}

PairwiseModel load_model(const std::string& input, const std::string& uai, bool log_domain) {
  if (!uai.empty()) return import_uai(uai, log_domain);
  if (input.empty()) throw InputError("an MRF file or --uai is required");
  if (log_domain) throw InputError("--log-domain applies to --uai input only");
  return load_mrf(input);
}

int run_diffusion_cmd(const Common& c, const PairwiseModel& model) {
  if (c.exact) throw InputError("--exact is not supported for diffusion");
  const std::size_t L = model.num_labels();
  DiffusionOptions opt;
  opt.eps = c.eps;
  opt.max_sweeps = c.max_sweeps;
  if (c.order == "shuffle") opt.order = shuffled_order(model.arcs().size() * L, c.seed);

  auto trace_file = open_trace(c.trace);
  std::optional<TraceWriter> trace;
  if (trace_file) trace.emplace(*trace_file);
  if (trace) {
    opt.observer = [&](const DiffusionEvent& e) {
      const Arc& arc = model.arcs()[e.triplet.arc];
      const std::string coord =
          std::to_string(arc.node) + "-" + std::to_string(arc.neighbor) + "-" + std::to_string(e.triplet.label);
      trace->write({e.sweep, e.update, "diffusion", coord, to_decimal_string(e.step), to_decimal_string(e.eta),
                    to_decimal_string(bound_u2(reparameterize(model, e.delta))), "", ""});
    };
  }

  const auto report = run_diffusion(model, MessageVector::zeros(model), opt);
  const PairwiseModel rep = reparameterize(model, report.delta);
  std::cout << "verdict: " << to_string(report.verdict) << '\n'
            << "sweeps: " << report.sweeps << '\n'
            << "updates: " << report.updates << '\n'
            << "eta: " << to_decimal_string(report.eta) << '\n'
            << "U2: " << to_decimal_string(report.u2) << '\n'
            << "U1: " << to_decimal_string(bound_u1(rep)) << '\n'
            << "residual: " << to_decimal_string(report.residual) << '\n';
  if (c.check_oracle) {
    const auto before = brute_force_map(model);
    const auto after = brute_force_map(rep);
    std::cout << "oracle: F = " << to_decimal_string(before.value)
              << ", F(reparameterized) = " << to_decimal_string(after.value) << '\n';
    const double tol = 1e-9 * (1.0 + std::abs(before.value));
    if (std::abs(before.value - after.value) > tol || before.value > report.u2 * static_cast<double>(model.num_nodes() + model.num_edges()) + tol) {
      std::cout << "oracle: mismatch\n";
      return kInputError;
    }
  }
  return exit_for(report.verdict);
}

int run_mma_cmd(const Common& c, const PairwiseModel& model, const std::string& decomp_kind, const std::string& dump) {
  if (c.exact) throw InputError("--exact is not supported for mma");
  if (c.order != "cyclic") throw InputError("mma supports --order cyclic only");
  if (decomp_kind != "rows-cols") throw InputError("unknown decomposition " + decomp_kind);
  const auto [R, C] = infer_grid_shape(model);
  const DecomposedModel decomp = build_rows_cols_decomposition(model, R, C);

  MmaOptions opt;
  opt.eps = c.eps;
  opt.max_sweeps = c.max_sweeps;
  auto trace_file = open_trace(c.trace);
  std::optional<TraceWriter> trace;
  if (trace_file) trace.emplace(*trace_file);
  if (trace) {
    opt.observer = [&](const MmaEvent& e) {
      const auto& mem = decomp.members(e.feature);
      const std::string coord = std::to_string(e.feature) + "/(" + std::to_string(mem[e.edge].sub) + "," +
                                std::to_string(mem[e.edge + 1].sub) + ")";
      trace->write({e.sweep, e.update, "mma", coord, to_decimal_string(e.step), to_decimal_string(e.eta),
                    to_decimal_string(decomposition_bounds(e.state.chains).max_value), "", ""});
    };
  }
  const auto report = run_mma(decomp, opt);
  std::cout << "grid: " << R << "x" << C << ", subproblems: " << decomp.subproblems().size() << '\n'
            << "verdict: " << to_string(report.verdict) << '\n'
            << "sweeps: " << report.sweeps << '\n'
            << "updates: " << report.updates << '\n'
            << "eta: " << to_decimal_string(report.eta) << '\n'
            << "max_s F: " << to_decimal_string(report.bounds.max_value) << '\n'
            << "sum_s F: " << to_decimal_string(report.bounds.sum_value) << '\n'
            << "residual: " << to_decimal_string(report.residual) << '\n';
  if (!dump.empty()) write_file(dump, dump_decomposition(decomp, report.state));
  if (c.check_oracle) {
    const auto map = brute_force_map(model);
    std::cout << "oracle: F = " << to_decimal_string(map.value) << '\n';
    if (map.value > report.bounds.sum_value + 1e-9 * (1.0 + std::abs(map.value))) {
      std::cout << "oracle: bound violated\n";
      return kInputError;
    }
  }
  return exit_for(report.verdict);
}

int run_demo_cycle() {
  const CycleInstance& inst = cycle_instance();
  const CycleVerification v = verify_cycle_instance();
  std::cout << "extreme points and supporting halfspaces:\n";
  for (std::size_t k = 0; k < 12; ++k) {
    std::cout << "  p" << k << " = (" << to_decimal_string(inst.points[k][0]) << ", "
              << to_decimal_string(inst.points[k][1]) << ", " << to_decimal_string(inst.points[k][2]) << ")  tight for  "
              << to_decimal_string(inst.normals[k][0]) << " x1 + " << to_decimal_string(inst.normals[k][1]) << " x2 + "
              << to_decimal_string(inst.normals[k][2]) << " x3 <= " << to_decimal_string(inst.bounds[k]) << '\n';
  }
  std::cout << "midpoint trajectory from (0, 0, 0), cyclic order x1, x2, x3:\n";
  for (std::size_t u = 1; u < v.trajectory.iterates.size(); ++u) {
    std::cout << "  update " << u << " (x" << (u - 1) % 3 + 1 << "): " << join(v.trajectory.iterates[u]) << '\n';
  }
  std::cout << "all points satisfy all halfspaces: " << (v.points_feasible ? "yes" : "no") << '\n'
            << "each halfspace tight at exactly its point: " << (v.tight_exactly_once ? "yes" : "no") << '\n'
            << "trajectory matches: " << (v.trajectory_matches ? "yes" : "no") << '\n'
            << "period: " << (v.trajectory.period ? std::to_string(*v.trajectory.period) : std::string("none")) << '\n';
  for (const auto& f : v.failures) std::cout << "FAIL: " << f << '\n';
  std::cout << (v.ok() ? "verified\n" : "verification failed\n");
  return v.ok() ? kOk : kInputError;
}

std::vector<int> parse_coeffs(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError("bad coefficient '" + item + "' in --coeffs");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coordinate descent for pointwise maxima of affine functions and MAP message passing"};
  app.require_subcommand(1);

  Common solve_c, mid_c, diff_c, mma_c;
  auto* solve_cmd = app.add_subcommand("solve", "minimize max_i (a_i . x + b_i) from a JSON instance");
  solve_cmd->add_option("instance", solve_c.input, "max-affine JSON file")->required();
  add_common(solve_cmd, solve_c);

  auto* mid_cmd = app.add_subcommand("midpoint", "coordinate descent with the mid-point rule");
  mid_cmd->add_option("instance", mid_c.input, "max-affine JSON file")->required();
  add_common(mid_cmd, mid_c);

  std::string diff_uai, mma_uai, decomp_kind = "rows-cols", dump;
  bool diff_log = false, mma_log = false;
  auto* diff_cmd = app.add_subcommand("diffusion", "max-sum diffusion on a pairwise model");
  diff_cmd->add_option("model", diff_c.input, "MRF text file");
  diff_cmd->add_option("--uai", diff_uai, "read a UAI MARKOV file instead");
  diff_cmd->add_flag("--log-domain", diff_log, "take ln of UAI table entries");
  add_common(diff_cmd, diff_c);

  auto* mma_cmd = app.add_subcommand("mma", "max-marginal averaging over a chain decomposition");
  mma_cmd->add_option("model", mma_c.input, "MRF text file of a grid model");
  mma_cmd->add_option("--uai", mma_uai, "read a UAI MARKOV file instead");
  mma_cmd->add_flag("--log-domain", mma_log, "take ln of UAI table entries");
  mma_cmd->add_option("--decomp", decomp_kind, "decomposition")
      ->check(CLI::IsMember({"rows-cols"}))
      ->capture_default_str();
  mma_cmd->add_option("--dump", dump, "write subproblem weights and messages as JSON");
  add_common(mma_cmd, mma_c);

  auto* demo_cmd = app.add_subcommand("demo", "built-in demonstrations");
  demo_cmd->require_subcommand(1);
  auto* cycle_cmd = demo_cmd->add_subcommand("cycle", "mid-point rule cycling example, verified exactly");

  auto* gen_cmd = app.add_subcommand("gen", "generate instances");
  gen_cmd->require_subcommand(1);
  MaxAffGenParams mp;
  GridGenParams gp;
  std::string coeffs = "-1,1", gen_out;
  std::uint64_t gen_seed = 0;
  auto* gen_maxaff = gen_cmd->add_subcommand("maxaff", "random sign-consistent max-affine instance");
  gen_maxaff->add_option("--rows", mp.rows)->capture_default_str();
  gen_maxaff->add_option("--cols", mp.cols)->capture_default_str();
  gen_maxaff->add_option("--density", mp.density)->capture_default_str();
  gen_maxaff->add_option("--coeffs", coeffs, "comma-separated nonzero integers")->capture_default_str();
  gen_maxaff->add_option("--offset-range", mp.offset_range)->capture_default_str();
  auto* gen_grid = gen_cmd->add_subcommand("grid", "random grid model");
  gen_grid->add_option("--rows", gp.rows)->capture_default_str();
  gen_grid->add_option("--cols", gp.cols)->capture_default_str();
  gen_grid->add_option("--labels", gp.labels)->capture_default_str();
  gen_grid->add_option("--low", gp.low)->capture_default_str();
  gen_grid->add_option("--high", gp.high)->capture_default_str();
  for (auto* g : {gen_maxaff, gen_grid}) {
    g->add_option("--seed", gen_seed)->capture_default_str();
    g->add_option("-o,--output", gen_out, "output file (default stdout)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*solve_cmd) return solve_c.exact ? run_solve<Rational>(solve_c) : run_solve<double>(solve_c);
    if (*mid_cmd) return mid_c.exact ? run_midpoint_cmd<Rational>(mid_c) : run_midpoint_cmd<double>(mid_c);
    if (*diff_cmd) return run_diffusion_cmd(diff_c, load_model(diff_c.input, diff_uai, diff_log));
    if (*mma_cmd) return run_mma_cmd(mma_c, load_model(mma_c.input, mma_uai, mma_log), decomp_kind, dump);
    if (*cycle_cmd) return run_demo_cycle();
    if (*gen_maxaff || *gen_grid) {
      std::string text;
      if (*gen_maxaff) {
        mp.coeffs = parse_coeffs(coeffs);
        text = write_maxaff(generate_maxaff(mp, gen_seed));
      } else {
        text = write_mrf(generate_grid(gp, gen_seed));
      }
      if (gen_out.empty()) std::cout << text;
      else write_file(gen_out, text);
      return kOk;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::length_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
