#include "binmargin/margins.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <sstream>

#include "binmargin/errors.hpp"

namespace binmargin {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage:
      return "usage";
    case ErrorKind::kInfeasible:
      return "infeasible";
    case ErrorKind::kNotConverged:
      return "not_converged";
    case ErrorKind::kStateSpace:
      return "state_space";
    case ErrorKind::kAssertionFailed:
      return "assertion_failed";
  }
  return "unknown";
}

void BlockParams::validate() const {
  if (n < 1) throw InvalidArgument("block params: n must be >= 1");
  if (!(delta >= 0.0 && delta <= 1.0)) throw InvalidArgument("block params: delta must lie in [0, 1]");
  if (!(b > 0.0) || !std::isfinite(b)) throw InvalidArgument("block params: b must be > 0");
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("block params: c must be > 0");
}

std::int64_t margin_floor(double x) { return static_cast<std::int64_t>(std::floor(x + 8.0 * DBL_EPSILON * std::max(1.0, std::fabs(x)))); }

std::int64_t BlockParams::heavy_count() const { return margin_floor(std::pow(static_cast<double>(n), delta)); }
std::int64_t BlockParams::heavy_margin() const { return margin_floor(b * c * static_cast<double>(n)); }
std::int64_t BlockParams::light_margin() const { return margin_floor(c * static_cast<double>(n)); }

MarginPair::MarginPair(std::vector<std::int64_t> rows, std::vector<std::int64_t> cols)
    : rows_(std::move(rows)), cols_(std::move(cols)) {
  const auto m = static_cast<std::int64_t>(rows_.size());
  const auto n = static_cast<std::int64_t>(cols_.size());
  std::int64_t row_total = 0;
  for (auto v : rows_) {
    if (v < 0 || v > n) {
      std::ostringstream os;
      os << "row margin " << v << " outside [0, " << n << "]";
      throw InvalidArgument(os.str());
    }
    row_total += v;
  }
  std::int64_t col_total = 0;
  for (auto v : cols_) {
    if (v < 0 || v > m) {
      std::ostringstream os;
      os << "column margin " << v << " outside [0, " << m << "]";
      throw InvalidArgument(os.str());
    }
    col_total += v;
  }
  if (row_total != col_total) {
    std::ostringstream os;
    os << "margin totals differ: rows " << row_total << ", columns " << col_total;
    throw InvalidArgument(os.str());
  }
  total_ = row_total;
}

MarginPair build_block_margins(const BlockParams& p) {
  p.validate();
  if (p.c * static_cast<double>(p.n) < 1.0) throw InvalidArgument("block margins degenerate: C*n < 1");
  const std::int64_t k = p.heavy_count();
  const std::int64_t heavy = p.heavy_margin();
  const std::int64_t light = p.light_margin();
  const std::int64_t len = k + p.n;
  if (heavy > len || light > len) {
    std::ostringstream os;
    os << "block margin exceeds vector length " << len << " (heavy " << heavy << ", light " << light << ")";
    throw InvalidArgument(os.str());
  }
  std::vector<std::int64_t> v(static_cast<std::size_t>(len), light);
  std::fill_n(v.begin(), k, heavy);
  return MarginPair(v, v);
}

bool check_feasible(const std::vector<std::int64_t>& rows, const std::vector<std::int64_t>& cols) {
  const auto m = static_cast<std::int64_t>(rows.size());
  const auto n = static_cast<std::int64_t>(cols.size());
  if (std::any_of(rows.begin(), rows.end(), [n](auto v) { return v < 0 || v > n; })) return false;
  if (std::any_of(cols.begin(), cols.end(), [m](auto v) { return v < 0 || v > m; })) return false;
  if (std::accumulate(rows.begin(), rows.end(), std::int64_t{0}) !=
      std::accumulate(cols.begin(), cols.end(), std::int64_t{0}))
    return false;

  std::vector<std::int64_t> sorted(rows);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  // Conjugate of the column margins: conj[k] = #{j : c_j > k}.
  std::vector<std::int64_t> conj(static_cast<std::size_t>(m), 0);
  for (auto cj : cols)
    for (std::int64_t k = 0; k < cj; ++k) ++conj[static_cast<std::size_t>(k)];
  std::int64_t lhs = 0;
  std::int64_t rhs = 0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    lhs += sorted[k];
    rhs += conj[k];
    if (lhs > rhs) return false;
  }
  return true;
}

bool check_feasible(const MarginPair& mp) { return check_feasible(mp.rows(), mp.cols()); }

const char* to_string(Regime r) {
  switch (r) {
    case Regime::kBottomRight:
      return "BOTTOM_RIGHT";
    case Regime::kTopLeft:
      return "TOP_LEFT";
    case Regime::kSide:
      return "SIDE";
  }
  return "?";
}

bool RegimeSet::contains(Regime r) const {
  switch (r) {
    case Regime::kBottomRight:
      return bottom_right;
    case Regime::kTopLeft:
      return top_left;
    case Regime::kSide:
      return side;
  }
  return false;
}

std::vector<Regime> RegimeSet::members() const {
  std::vector<Regime> out;
  for (auto r : {Regime::kBottomRight, Regime::kTopLeft, Regime::kSide})
    if (contains(r)) out.push_back(r);
  return out;
}

std::string RegimeSet::describe() const {
  std::string s = "{";
  bool first = true;
  for (auto r : members()) {
    if (!first) s += ", ";
    s += to_string(r);
    first = false;
  }
  return s + "}";
}

double top_left_b_bound(double c) { return 1.0 / (std::sqrt(c / 3.0 - c * c / 3.0) + c); }

RegimeSet classify_regime(const BlockParams& p) {
  p.validate();
  const double d = p.delta;
  const double b = p.b;
  const double c = p.c;
  RegimeSet out;
  out.global_bound = d < 1.0 ? (c <= 1.0 && b <= 1.0 / c) : (c <= 2.0 && b <= 2.0 / c);
  if (!out.global_bound) return out;

  out.bottom_right = d >= 0.0 && d < 1.0 && c > 0.0 && c < 1.0 && b > 0.0 && b <= 1.0 / c;
  const bool tl_bc = c > 0.0 && c < 0.75 && b < top_left_b_bound(c);
  out.top_left = d > 0.5 && d < 1.0 && tl_bc;
  out.side = d > 0.0 && d < 1.0 && tl_bc;
  return out;
}

}  // namespace binmargin
