#pragma once

// File formats (see docs/formats.md), instance generators and trace CSV.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "convmp/decomposition.hpp"
#include "convmp/maxaff.hpp"
#include "convmp/mrf.hpp"

namespace convmp {

/// Input error carrying a 1-based line and column.
class ParseError : public InputError {
 public:
  ParseError(std::string source, std::size_t line, std::size_t column, const std::string& reason);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

template <class T>
struct MaxAffDocument {
  MaxAffInstance<T> instance;
  std::optional<std::vector<T>> x0;
};

template <class T>
MaxAffDocument<T> parse_maxaff(std::string_view text, const std::string& source = "<input>");
template <class T>
std::string write_maxaff(const MaxAffInstance<T>& inst, const std::optional<std::vector<T>>& x0 = std::nullopt);
template <class T>
MaxAffDocument<T> load_maxaff(const std::string& path) {
  return parse_maxaff<T>(read_file(path), path);
}

PairwiseModel parse_mrf(std::string_view text, const std::string& source = "<input>");
std::string write_mrf(const PairwiseModel& model);
inline PairwiseModel load_mrf(const std::string& path) { return parse_mrf(read_file(path), path); }

/// Pairwise MARKOV networks with equal cardinalities. Table entries are
/// taken as additive weights, or as ln(entry) with log_domain. Factors over
/// the same scope are accumulated.
PairwiseModel parse_uai(std::string_view text, bool log_domain, const std::string& source = "<input>");
inline PairwiseModel import_uai(const std::string& path, bool log_domain) {
  return parse_uai(read_file(path), log_domain, path);
}

/// theta_s split and messages, for inspection.
std::string dump_decomposition(const DecomposedModel& decomp, const MmaState& state);

struct TraceRow {
  std::size_t sweep = 0;
  std::size_t update = 0;
  std::string block;  // maxaff, diffusion, mma, midpoint
  std::string coord;
  std::string delta;
  std::string eta_running;
  std::string objective;
  std::string energy_before;  // empty in float mode
  std::string energy_after;
};

inline constexpr std::string_view kTraceHeader =
    "sweep,update,block,coord,delta,eta_running,objective,energy_before,energy_after";

class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& out);
  void write(const TraceRow& row);
  std::size_t rows_written() const { return rows_; }

 private:
  std::ostream* out_;
  std::size_t rows_ = 0;
};

std::vector<TraceRow> parse_trace(std::string_view text, const std::string& source = "<trace>");

/// Re-applies the delta column of maxaff/midpoint rows to x0.
template <class T>
std::vector<T> replay_trace(const std::vector<TraceRow>& rows, std::vector<T> x0);

struct MaxAffGenParams {
  std::size_t rows = 20;
  std::size_t cols = 5;
  double density = 0.5;
  std::vector<int> coeffs{-1, 1};
  int offset_range = 10;  // b_i uniform in [-offset_range, offset_range]
};

/// Integer instance, pruned so that every column has both signs. Throws
/// InputError when no such instance comes out of 100 draws.
MaxAffInstance<double> generate_maxaff(const MaxAffGenParams& params, std::uint64_t seed);

struct GridGenParams {
  std::size_t rows = 4;
  std::size_t cols = 4;
  std::size_t labels = 3;
  double low = -1.0;
  double high = 1.0;
};

PairwiseModel generate_grid(const GridGenParams& params, std::uint64_t seed);

/// Model with uniform weights on an arbitrary random graph (used by tests).
PairwiseModel generate_random_model(std::size_t nodes, std::size_t labels, double edge_prob, double low, double high,
                                    std::uint64_t seed);

#define CONVMP_IO_EXTERN(T)                                                                                       \
  extern template MaxAffDocument<T> parse_maxaff(std::string_view, const std::string&);                          \
  extern template std::string write_maxaff(const MaxAffInstance<T>&, const std::optional<std::vector<T>>&);      \
  extern template std::vector<T> replay_trace(const std::vector<TraceRow>&, std::vector<T>);

CONVMP_IO_EXTERN(double)
CONVMP_IO_EXTERN(Rational)

}  // namespace convmp
