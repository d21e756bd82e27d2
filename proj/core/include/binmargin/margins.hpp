#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace binmargin {

/// Parameters (n, delta, B, C) of the block-margin family: floor(n^delta)
/// heavy lines with margin floor(B*C*n) followed by n light lines with margin
/// floor(C*n), identical for rows and columns.
struct BlockParams {
  std::int64_t n = 1;
  double delta = 0.0;
  double b = 1.0;
  double c = 0.5;

  /// Throws InvalidArgument unless n >= 1, 0 <= delta <= 1, b > 0, c > 0.
  void validate() const;

  /// floor(n^delta), the number of heavy lines.
  std::int64_t heavy_count() const;
  std::int64_t heavy_margin() const;
  std::int64_t light_margin() const;
  std::int64_t dimension() const { return heavy_count() + n; }

  friend bool operator==(const BlockParams&, const BlockParams&) = default;
};

/// Row and column margins of an m x n_cols binary table.
class MarginPair {
 public:
  MarginPair() = default;

  /// Validates sum(r) == sum(c), nonnegativity and the binary caps
  /// r_i <= n_cols, c_j <= m. Throws InvalidArgument otherwise.
  MarginPair(std::vector<std::int64_t> rows, std::vector<std::int64_t> cols);

  const std::vector<std::int64_t>& rows() const { return rows_; }
  const std::vector<std::int64_t>& cols() const { return cols_; }
  std::size_t row_count() const { return rows_.size(); }
  std::size_t col_count() const { return cols_.size(); }
  std::int64_t total() const { return total_; }

  MarginPair transposed() const { return MarginPair(cols_, rows_); }

  friend bool operator==(const MarginPair&, const MarginPair&) = default;

 private:
  std::vector<std::int64_t> rows_;
  std::vector<std::int64_t> cols_;
  std::int64_t total_ = 0;
};

/// floor(x) that snaps values within a few ulps below an integer up to it, so
/// products such as 0.6 * 10 land on the intended integer.
std::int64_t margin_floor(double x);

MarginPair build_block_margins(const BlockParams& p);

/// Gale-Ryser: true iff some binary table has margins mp.
bool check_feasible(const MarginPair& mp);

/// Same test on raw vectors; false (not an error) when sums or caps fail.
bool check_feasible(const std::vector<std::int64_t>& rows, const std::vector<std::int64_t>& cols);

enum class Regime { kBottomRight, kTopLeft, kSide };

const char* to_string(Regime r);

struct RegimeSet {
  bool bottom_right = false;
  bool top_left = false;
  bool side = false;
  /// The as-n-grows nonemptiness bound: C <= 1, B <= 1/C for delta < 1, and
  /// C <= 2, B <= 2/C for delta = 1.
  bool global_bound = false;

  bool empty() const { return !bottom_right && !top_left && !side; }
  bool contains(Regime r) const;
  std::vector<Regime> members() const;
  std::string describe() const;
};

/// Upper bound on B shared by the top-left and side regimes:
/// 1 / (sqrt(C/3 - C^2/3) + C).
double top_left_b_bound(double c);

RegimeSet classify_regime(const BlockParams& p);

}  // namespace binmargin
