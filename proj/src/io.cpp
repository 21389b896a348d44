#include "convmp/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace convmp {

using nlohmann::json;

ParseError::ParseError(std::string source, std::size_t line, std::size_t column, const std::string& reason)
    : InputError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + reason),
      line_(line),
      column_(column) {}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << contents;
  if (!out) throw InputError("write failed for " + path);
}

namespace {

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < offset && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// JSON values lose their source position once parsed, so semantic errors are
// located by rescanning the text: at the offending row, or at the key.
struct JsonLocator {
  std::string_view text;
  std::string source;

  std::size_t key_offset(std::string_view key) const {
    const std::size_t at = text.find("\"" + std::string(key) + "\"");
    return at == std::string_view::npos ? 0 : at;
  }

  // Offset of element `index` of the array value of `key`.
  std::size_t element_offset(std::string_view key, std::size_t index) const {
    std::size_t p = key_offset(key);
    p = text.find('[', p);
    if (p == std::string_view::npos) return key_offset(key);
    int depth = 0;
    std::size_t seen = 0;
    bool in_string = false, expect_start = true;
    for (++p; p < text.size(); ++p) {
      const char ch = text[p];
      if (in_string) {
        if (ch == '\\') ++p;
        else if (ch == '"') in_string = false;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(ch))) continue;
      if (depth == 0 && expect_start) {
        if (ch == ']') break;
        if (seen++ == index) return p;
        expect_start = false;
      }
      if (ch == '"') in_string = true;
      else if (ch == '[' || ch == '{') ++depth;
      else if (ch == ']' || ch == '}') {
        if (depth-- == 0) break;
      } else if (ch == ',' && depth == 0) {
        expect_start = true;
      }
    }
    return key_offset(key);
  }

  [[noreturn]] void fail_at(std::size_t offset, const std::string& reason) const {
    const auto [l, c] = line_col(text, offset);
    throw ParseError(source, l, c, reason);
  }
};

template <class T>
T json_scalar(const json& v, const JsonLocator& loc, std::size_t offset, const std::string& where) {
  try {
    if (v.is_number_integer()) return ScalarTraits<T>::parse(std::to_string(v.get<long long>()));
    if (v.is_number_unsigned()) return ScalarTraits<T>::parse(std::to_string(v.get<unsigned long long>()));
    if (v.is_number_float()) return ScalarTraits<T>::from_double(v.get<double>());
    if (v.is_string()) return ScalarTraits<T>::parse(v.get<std::string>());
  } catch (const InputError& e) {
    loc.fail_at(offset, where + ": " + e.what());
  }
  loc.fail_at(offset, where + ": expected a number or decimal string");
}

template <class T>
json json_number(const T& v) {
  if constexpr (ScalarTraits<T>::exact) {
    return ScalarTraits<T>::to_string(v);
  } else {
    if (std::trunc(v) == v && std::abs(v) < 9007199254740992.0) return static_cast<long long>(v);
    return v;
  }
}

}  // namespace

template <class T>
MaxAffDocument<T> parse_maxaff(std::string_view text, const std::string& source) {
  const JsonLocator loc{text, source};
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [l, c] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string what = e.what();
    throw ParseError(source, l, c, what.substr(what.find(':') + 2));
  }
  if (!doc.is_object()) loc.fail_at(0, "top level must be an object");
  if (!doc.contains("n") || !doc["n"].is_number_unsigned())
    loc.fail_at(loc.key_offset("n"), "missing non-negative integer \"n\"");
  if (!doc.contains("rows") || !doc["rows"].is_array()) loc.fail_at(loc.key_offset("rows"), "missing array \"rows\"");
  for (const auto& [key, _] : doc.items()) {
    if (key != "m" && key != "n" && key != "rows" && key != "x0")
      loc.fail_at(loc.key_offset(key), "unknown key \"" + key + "\"");
  }
  const std::size_t n = doc["n"].get<std::size_t>();
  if (doc.contains("m") && (!doc["m"].is_number_unsigned() || doc["m"].get<std::size_t>() != doc["rows"].size()))
    loc.fail_at(loc.key_offset("m"), "\"m\" must equal the number of rows");
  std::vector<AffineRow<T>> rows;
  for (std::size_t i = 0; i < doc["rows"].size(); ++i) {
    const json& r = doc["rows"][i];
    const std::string where = "rows[" + std::to_string(i) + "]";
    const std::size_t at = loc.element_offset("rows", i);
    if (!r.is_object() || !r.contains("b") || !r.contains("terms") || !r["terms"].is_array())
      loc.fail_at(at, where + ": expected {\"b\": ..., \"terms\": [[j, a], ...]}");
    for (const auto& [key, _] : r.items()) {
      if (key != "b" && key != "terms") loc.fail_at(at, where + ": unknown key \"" + key + "\"");
    }
    AffineRow<T> row{json_scalar<T>(r["b"], loc, at, where + ".b"), {}};
    std::set<std::size_t> cols;
    for (const auto& t : r["terms"]) {
      if (!t.is_array() || t.size() != 2 || !t[0].is_number_unsigned())
        loc.fail_at(at, where + ": each term must be [j, a]");
      const std::size_t col = t[0].get<std::size_t>();
      if (col >= n) loc.fail_at(at, where + ": column " + std::to_string(col) + " out of range");
      if (!cols.insert(col).second) loc.fail_at(at, where + ": duplicate entry for column " + std::to_string(col));
      T coef = json_scalar<T>(t[1], loc, at, where + ".terms");
      if (coef == 0) loc.fail_at(at, where + ": zero coefficient for column " + std::to_string(col));
      if (!ScalarTraits<T>::finite(coef)) loc.fail_at(at, where + ": coefficient is not finite");
      row.terms.push_back({col, coef});
    }
    rows.push_back(std::move(row));
  }
  MaxAffDocument<T> out;
  try {
    out.instance = MaxAffInstance<T>(n, std::move(rows));
  } catch (const std::exception& e) {
    loc.fail_at(0, e.what());
  }
  if (doc.contains("x0")) {
    const json& x = doc["x0"];
    if (!x.is_array() || x.size() != n) loc.fail_at(loc.key_offset("x0"), "x0 must be an array of length n");
    std::vector<T> x0;
    for (std::size_t k = 0; k < x.size(); ++k)
      x0.push_back(json_scalar<T>(x[k], loc, loc.element_offset("x0", k), "x0[" + std::to_string(k) + "]"));
    out.x0 = std::move(x0);
  }
  return out;
}

template <class T>
std::string write_maxaff(const MaxAffInstance<T>& inst, const std::optional<std::vector<T>>& x0) {
  // One row per line keeps files diffable.
  std::ostringstream out;
  out << "{\n  \"m\": " << inst.num_rows() << ",\n  \"n\": " << inst.num_cols() << ",\n  \"rows\": [";
  for (std::size_t i = 0; i < inst.num_rows(); ++i) {
    const auto& r = inst.row(i);
    json terms = json::array();
    for (const auto& t : r.terms) terms.push_back({t.col, json_number(t.coef)});
    out << (i ? ",\n" : "\n") << "    {\"b\": " << json_number(r.offset).dump() << ", \"terms\": " << terms.dump() << "}";
  }
  out << "\n  ]";
  if (x0) {
    json x = json::array();
    for (const auto& v : *x0) x.push_back(json_number(v));
    out << ",\n  \"x0\": " << x.dump();
  }
  out << "\n}\n";
  return out.str();
}

namespace {

struct Token {
  std::string_view text;
  std::size_t line;
  std::size_t column;
};

class Tokenizer {
 public:
  Tokenizer(std::string_view text, std::string source, char comment)
      : text_(text), source_(std::move(source)), comment_(comment) {}

  std::optional<Token> next() {
    skip();
    if (pos_ >= text_.size()) return std::nullopt;
    const std::size_t start = pos_;
    const Token t{{}, line_, col_};
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != comment_) {
      ++pos_;
      ++col_;
    }
    return Token{text_.substr(start, pos_ - start), t.line, t.column};
  }

  Token expect(const std::string& what) {
    auto t = next();
    if (!t) fail_at_end("unexpected end of file, expected " + what);
    return *t;
  }

  /// True when the rest of the current line holds no token.
  bool at_line_end() {
    while (pos_ < text_.size() && text_[pos_] != '\n' && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
      ++col_;
    }
    return pos_ >= text_.size() || text_[pos_] == '\n' || text_[pos_] == comment_;
  }

  [[noreturn]] void fail(const Token& t, const std::string& reason) const {
    throw ParseError(source_, t.line, t.column, reason);
  }
  [[noreturn]] void fail_at_end(const std::string& reason) const { throw ParseError(source_, line_, col_, reason); }

  std::size_t to_index(const Token& t, const std::string& what) const {
    std::size_t v = 0;
    const auto* end = t.text.data() + t.text.size();
    const auto [p, ec] = std::from_chars(t.text.data(), end, v);
    if (ec != std::errc() || p != end) fail(t, "expected non-negative integer " + what + ", got '" + std::string(t.text) + "'");
    return v;
  }

  double to_double(const Token& t, const std::string& what) const {
    try {
      const double v = parse_double(t.text);
      if (!std::isfinite(v)) fail(t, what + " is not finite");
      return v;
    } catch (const ParseError&) {
      throw;
    } catch (const InputError&) {
      fail(t, "expected a number for " + what + ", got '" + std::string(t.text) + "'");
    }
  }

 private:
  void skip() {
    while (pos_ < text_.size()) {
      const char ch = text_[pos_];
      if (ch == comment_ && comment_ != '\0') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (ch == '\n') {
        ++pos_;
        ++line_;
        col_ = 1;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
        ++col_;
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::string source_;
  char comment_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

}  // namespace

PairwiseModel parse_mrf(std::string_view text, const std::string& source) {
  Tokenizer tok(text, source, '#');
  const Token head = tok.expect("'MRF'");
  if (head.text != "MRF") tok.fail(head, "expected header 'MRF <nodes> <labels>'");
  const std::size_t V = tok.to_index(tok.expect("node count"), "node count");
  const Token lt = tok.expect("label count");
  const std::size_t L = tok.to_index(lt, "label count");
  if (L == 0) tok.fail(lt, "label count must be positive");
  PairwiseModel model(V, L);
  std::vector<bool> unary_seen(V, false);
  std::set<std::pair<std::size_t, std::size_t>> edges_seen;

  while (auto t = tok.next()) {
    if (t->text == "UNARY") {
      const Token it = tok.expect("node index");
      const std::size_t i = tok.to_index(it, "node index");
      if (i >= V) tok.fail(it, "node " + std::to_string(i) + " out of range");
      if (unary_seen[i]) tok.fail(it, "duplicate unary entry for node " + std::to_string(i));
      unary_seen[i] = true;
      for (std::size_t x = 0; x < L; ++x) model.unary(i, x) = tok.to_double(tok.expect("unary weight"), "unary weight");
      if (!tok.at_line_end()) tok.fail(*tok.next(), "too many unary weights (expected " + std::to_string(L) + ")");
    } else if (t->text == "EDGE") {
      const Token it = tok.expect("node index");
      const std::size_t i = tok.to_index(it, "node index");
      const Token jt = tok.expect("node index");
      const std::size_t j = tok.to_index(jt, "node index");
      if (i >= V) tok.fail(it, "node " + std::to_string(i) + " out of range");
      if (j >= V) tok.fail(jt, "node " + std::to_string(j) + " out of range");
      if (i == j) tok.fail(jt, "self-loop on node " + std::to_string(i));
      if (!edges_seen.insert({std::min(i, j), std::max(i, j)}).second)
        tok.fail(it, "duplicate edge " + std::to_string(i) + "-" + std::to_string(j));
      std::vector<double> w(L * L);
      for (auto& v : w) v = tok.to_double(tok.expect("pairwise weight"), "pairwise weight");
      if (!tok.at_line_end())
        tok.fail(*tok.next(), "too many pairwise weights (expected " + std::to_string(L * L) + ")");
      model.add_edge(i, j, std::move(w));
    } else {
      tok.fail(*t, "unknown record '" + std::string(t->text) + "'");
    }
  }
  for (std::size_t i = 0; i < V; ++i) {
    if (!unary_seen[i]) tok.fail_at_end("missing UNARY line for node " + std::to_string(i));
  }
  model.finalize();
  return model;
}

std::string write_mrf(const PairwiseModel& model) {
  const std::size_t L = model.num_labels();
  std::ostringstream out;
  out << "MRF " << model.num_nodes() << ' ' << L << '\n';
  for (std::size_t i = 0; i < model.num_nodes(); ++i) {
    out << "UNARY " << i;
    for (std::size_t x = 0; x < L; ++x) out << ' ' << to_decimal_string(model.unary(i, x));
    out << '\n';
  }
  for (std::size_t e = 0; e < model.num_edges(); ++e) {
    out << "EDGE " << model.edges()[e].u << ' ' << model.edges()[e].v;
    for (std::size_t x = 0; x < L; ++x)
      for (std::size_t y = 0; y < L; ++y) out << ' ' << to_decimal_string(model.pairwise(e, x, y));
    out << '\n';
  }
  return out.str();
}

PairwiseModel parse_uai(std::string_view text, bool log_domain, const std::string& source) {
  Tokenizer tok(text, source, '\0');
  const Token kind = tok.expect("network type");
  if (kind.text != "MARKOV") tok.fail(kind, "only MARKOV networks are supported, got '" + std::string(kind.text) + "'");
  const Token nt = tok.expect("variable count");
  const std::size_t V = tok.to_index(nt, "variable count");
  std::size_t L = 0;
  for (std::size_t v = 0; v < V; ++v) {
    const Token ct = tok.expect("cardinality");
    const std::size_t card = tok.to_index(ct, "cardinality");
    if (card == 0) tok.fail(ct, "cardinality must be positive");
    if (v == 0) L = card;
    if (card != L) tok.fail(ct, "all variables must have the same cardinality");
  }
  if (V == 0) tok.fail(nt, "network has no variables");
  const std::size_t F = tok.to_index(tok.expect("factor count"), "factor count");
  std::vector<std::vector<std::size_t>> scopes(F);
  for (auto& scope : scopes) {
    const Token st = tok.expect("scope size");
    const std::size_t k = tok.to_index(st, "scope size");
    if (k == 0 || k > 2) tok.fail(st, "non-pairwise UAI clique of size " + std::to_string(k));
    for (std::size_t a = 0; a < k; ++a) {
      const Token vt = tok.expect("scope variable");
      const std::size_t v = tok.to_index(vt, "scope variable");
      if (v >= V) tok.fail(vt, "variable " + std::to_string(v) + " out of range");
      scope.push_back(v);
    }
    if (k == 2 && scope[0] == scope[1]) tok.fail(st, "pairwise clique repeats variable " + std::to_string(scope[0]));
  }

  PairwiseModel model(V, L);
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> pair_tables;
  for (const auto& scope : scopes) {
    const Token et = tok.expect("table size");
    const std::size_t expected = scope.size() == 1 ? L : L * L;
    if (tok.to_index(et, "table size") != expected)
      tok.fail(et, "table size must be " + std::to_string(expected));
    std::vector<double> w(expected);
    for (auto& v : w) {
      const Token t = tok.expect("table entry");
      const double raw = tok.to_double(t, "table entry");
      v = log_domain ? std::log(raw) : raw;
      if (!std::isfinite(v)) tok.fail(t, "entry gives a non-finite weight");
    }
    if (scope.size() == 1) {
      for (std::size_t x = 0; x < L; ++x) model.unary(scope[0], x) += w[x];
    } else {
      // Last scope variable varies fastest: w[x * L + y] with x the first.
      std::size_t a = scope[0], b = scope[1];
      if (a > b) {
        std::vector<double> t(L * L);
        for (std::size_t x = 0; x < L; ++x)
          for (std::size_t y = 0; y < L; ++y) t[y * L + x] = w[x * L + y];
        w = std::move(t);
        std::swap(a, b);
      }
      auto [it, fresh] = pair_tables.try_emplace({a, b}, L * L, 0.0);
      for (std::size_t k = 0; k < L * L; ++k) it->second[k] += w[k];
    }
  }
  if (auto extra = tok.next()) tok.fail(*extra, "trailing data after the last table");
  for (auto& [key, w] : pair_tables) model.add_edge(key.first, key.second, std::move(w));
  model.finalize();
  return model;
}

std::string dump_decomposition(const DecomposedModel& decomp, const MmaState& state) {
  json out;
  out["num_labels"] = decomp.base().num_labels();
  json subs = json::array();
  for (const auto& c : state.chains) {
    subs.push_back({{"nodes", c.nodes}, {"edges", c.edges}, {"unary", c.unary}, {"pairwise", c.pairwise}});
  }
  out["subproblems"] = subs;
  json msgs = json::array();
  for (std::size_t f = 0; f < decomp.features().size(); ++f) {
    const auto& mem = decomp.members(f);
    for (std::size_t k = 0; k + 1 < mem.size(); ++k) {
      msgs.push_back({{"feature", f},
                      {"s", mem[k].sub},
                      {"t", mem[k + 1].sub},
                      {"delta", state.delta[decomp.message_begin(f) + k]}});
    }
  }
  out["messages"] = msgs;
  return out.dump(2) + "\n";
}

TraceWriter::TraceWriter(std::ostream& out) : out_(&out) { *out_ << kTraceHeader << '\n'; }

void TraceWriter::write(const TraceRow& r) {
  *out_ << r.sweep << ',' << r.update << ',' << r.block << ',' << r.coord << ',' << r.delta << ',' << r.eta_running
        << ',' << r.objective << ',' << r.energy_before << ',' << r.energy_after << '\n';
  ++rows_;
}

std::vector<TraceRow> parse_trace(std::string_view text, const std::string& source) {
  std::vector<TraceRow> rows;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line_no == 1) {
      if (line != kTraceHeader) throw ParseError(source, 1, 1, "unexpected trace header");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t p = 0;
    while (true) {
      const std::size_t q = line.find(',', p);
      cells.emplace_back(line.substr(p, q == std::string_view::npos ? std::string_view::npos : q - p));
      if (q == std::string_view::npos) break;
      p = q + 1;
    }
    if (cells.size() != 9) throw ParseError(source, line_no, 1, "expected 9 cells, got " + std::to_string(cells.size()));
    TraceRow r;
    try {
      r.sweep = std::stoull(cells[0]);
      r.update = std::stoull(cells[1]);
    } catch (const std::exception&) {
      throw ParseError(source, line_no, 1, "sweep and update must be integers");
    }
    r.block = cells[2];
    r.coord = cells[3];
    r.delta = cells[4];
    r.eta_running = cells[5];
    r.objective = cells[6];
    r.energy_before = cells[7];
    r.energy_after = cells[8];
    rows.push_back(std::move(r));
  }
  return rows;
}

template <class T>
std::vector<T> replay_trace(const std::vector<TraceRow>& rows, std::vector<T> x) {
  for (const auto& r : rows) {
    if (r.block != "maxaff" && r.block != "midpoint") throw InputError("only maxaff and midpoint traces replay");
    const std::size_t j = std::stoull(r.coord);
    if (j >= x.size()) throw InputError("trace coordinate out of range");
    x[j] += ScalarTraits<T>::parse(r.delta);
  }
  return x;
}

MaxAffInstance<double> generate_maxaff(const MaxAffGenParams& p, std::uint64_t seed) {
  if (p.rows == 0 || p.cols == 0) throw InputError("infeasible parameters: rows and cols must be positive");
  if (!(p.density > 0.0 && p.density <= 1.0)) throw InputError("infeasible parameters: density must be in (0, 1]");
  if (p.coeffs.empty() || std::find(p.coeffs.begin(), p.coeffs.end(), 0) != p.coeffs.end())
    throw InputError("infeasible parameters: coefficient set must be non-empty and exclude 0");
  const bool pos = std::any_of(p.coeffs.begin(), p.coeffs.end(), [](int c) { return c > 0; });
  const bool neg = std::any_of(p.coeffs.begin(), p.coeffs.end(), [](int c) { return c < 0; });
  if (!pos || !neg || p.rows < 2) throw InputError("infeasible parameters: sign-consistent columns are impossible");
  if (p.offset_range < 0) throw InputError("infeasible parameters: offset range must be non-negative");

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep(p.density);
  std::uniform_int_distribution<std::size_t> pick(0, p.coeffs.size() - 1);
  std::uniform_int_distribution<int> offset(-p.offset_range, p.offset_range);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<AffineRow<double>> rows(p.rows);
    std::vector<std::vector<int>> a(p.rows, std::vector<int>(p.cols, 0));
    for (auto& r : a)
      for (auto& v : r)
        if (keep(rng)) v = p.coeffs[pick(rng)];
    // Plant a missing sign in a zero cell of the column when there is one.
    for (std::size_t j = 0; j < p.cols; ++j) {
      for (const int sign : {1, -1}) {
        bool present = false;
        std::vector<std::size_t> free_rows;
        for (std::size_t i = 0; i < p.rows; ++i) {
          present = present || a[i][j] * sign > 0;
          if (a[i][j] == 0) free_rows.push_back(i);
        }
        if (present || free_rows.empty()) continue;
        std::vector<int> same_sign;
        for (const int c : p.coeffs)
          if (c * sign > 0) same_sign.push_back(c);
        const std::size_t i = free_rows[std::uniform_int_distribution<std::size_t>(0, free_rows.size() - 1)(rng)];
        a[i][j] = same_sign[std::uniform_int_distribution<std::size_t>(0, same_sign.size() - 1)(rng)];
      }
    }
    for (std::size_t i = 0; i < p.rows; ++i) {
      rows[i].offset = offset(rng);
      for (std::size_t j = 0; j < p.cols; ++j)
        if (a[i][j] != 0) rows[i].terms.push_back({j, static_cast<double>(a[i][j])});
    }
    const MaxAffInstance<double> inst(p.cols, std::move(rows));
    auto pruned = prune(inst);
    if (pruned.verdict == PruneVerdict::Ok) return std::move(pruned.instance);
  }
  throw InputError("infeasible parameters: no sign-consistent instance after 100 draws");
}

PairwiseModel generate_grid(const GridGenParams& p, std::uint64_t seed) {
  if (p.rows == 0 || p.cols == 0 || p.labels == 0) throw InputError("infeasible parameters: grid dimensions must be positive");
  if (!(p.low <= p.high) || !std::isfinite(p.low) || !std::isfinite(p.high))
    throw InputError("infeasible parameters: weight range must satisfy low <= high");
  PairwiseModel model = make_grid(p.rows, p.cols, p.labels);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> w(p.low, p.high);
  for (auto& v : model.unary_weights()) v = w(rng);
  for (auto& v : model.pairwise_weights()) v = w(rng);
  return model;
}

PairwiseModel generate_random_model(std::size_t nodes, std::size_t labels, double edge_prob, double low, double high,
                                    std::uint64_t seed) {
  if (nodes == 0 || labels == 0) throw InputError("infeasible parameters: model must have nodes and labels");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> w(low, high);
  std::bernoulli_distribution edge(edge_prob);
  PairwiseModel model(nodes, labels);
  for (auto& v : model.unary_weights()) v = w(rng);
  for (std::size_t i = 0; i < nodes; ++i) {
    for (std::size_t j = i + 1; j < nodes; ++j) {
      if (!edge(rng)) continue;
      std::vector<double> t(labels * labels);
      for (auto& v : t) v = w(rng);
      model.add_edge(i, j, std::move(t));
    }
  }
  model.finalize();
  return model;
}

#define CONVMP_IO_INSTANTIATE(T)                                                                           \
  template MaxAffDocument<T> parse_maxaff(std::string_view, const std::string&);                          \
  template std::string write_maxaff(const MaxAffInstance<T>&, const std::optional<std::vector<T>>&);      \
  template std::vector<T> replay_trace(const std::vector<TraceRow>&, std::vector<T>);

CONVMP_IO_INSTANTIATE(double)
CONVMP_IO_INSTANTIATE(Rational)

}  // namespace convmp
