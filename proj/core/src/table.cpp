#include "binmargin/table.hpp"

#include <algorithm>
#include <numeric>

#include "binmargin/errors.hpp"

namespace binmargin {

std::vector<std::int64_t> row_sums(const Grid<std::uint8_t>& g) {
  std::vector<std::int64_t> out(g.rows(), 0);
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (auto v : g.row(i)) out[i] += v;
  return out;
}

std::vector<std::int64_t> col_sums(const Grid<std::uint8_t>& g) {
  std::vector<std::int64_t> out(g.cols(), 0);
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) out[j] += g(i, j);
  return out;
}

BinaryTable::BinaryTable(MarginPair margins, Grid<std::uint8_t> entries)
    : margins_(std::move(margins)), entries_(std::move(entries)) {
  if (entries_.rows() != margins_.row_count() || entries_.cols() != margins_.col_count())
    throw InvalidArgument("table shape does not match margins");
  if (std::any_of(entries_.data().begin(), entries_.data().end(), [](auto v) { return v > 1; }))
    throw InvalidArgument("table entries must be 0 or 1");
  if (!is_valid()) throw InvalidArgument("table does not realize its margins");
}

BinaryTable BinaryTable::from_rows(const std::vector<std::vector<int>>& rows) {
  const std::size_t m = rows.size();
  const std::size_t n = m == 0 ? 0 : rows.front().size();
  Grid<std::uint8_t> g(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    if (rows[i].size() != n) throw InvalidArgument("ragged table rows");
    for (std::size_t j = 0; j < n; ++j) {
      if (rows[i][j] != 0 && rows[i][j] != 1) throw InvalidArgument("table entries must be 0 or 1");
      g(i, j) = static_cast<std::uint8_t>(rows[i][j]);
    }
  }
  MarginPair mp(row_sums(g), col_sums(g));
  return BinaryTable(std::move(mp), std::move(g));
}

bool BinaryTable::is_valid() const {
  return row_sums(entries_) == margins_.rows() && col_sums(entries_) == margins_.cols();
}

bool BinaryTable::flip_checkerboard(std::size_t i, std::size_t i2, std::size_t j, std::size_t j2) {
  auto& g = entries_;
  const std::uint8_t a = g(i, j);
  const std::uint8_t b = g(i, j2);
  const std::uint8_t c = g(i2, j);
  const std::uint8_t d = g(i2, j2);
  if (a == d && b == c && a != b) {
    g(i, j) = b;
    g(i, j2) = a;
    g(i2, j) = a;
    g(i2, j2) = b;
    return true;
  }
  return false;
}

std::string BinaryTable::key() const {
  std::string s;
  s.reserve(entries_.data().size());
  for (auto v : entries_.data()) s.push_back(static_cast<char>('0' + v));
  return s;
}

BinaryTable greedy_table(const MarginPair& mp) {
  if (!check_feasible(mp)) throw Infeasible("margins admit no binary table");
  const std::size_t m = mp.row_count();
  const std::size_t n = mp.col_count();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return mp.rows()[a] > mp.rows()[b]; });

  std::vector<std::int64_t> residual = mp.cols();
  std::vector<std::size_t> cols(n);
  Grid<std::uint8_t> g(m, n);
  for (auto i : order) {
    std::iota(cols.begin(), cols.end(), 0);
    std::stable_sort(cols.begin(), cols.end(), [&](auto a, auto b) { return residual[a] > residual[b]; });
    for (std::int64_t t = 0; t < mp.rows()[i]; ++t) {
      const auto j = cols[static_cast<std::size_t>(t)];
      if (residual[j] <= 0) throw Infeasible("greedy construction ran out of column capacity");
      --residual[j];
      g(i, j) = 1;
    }
  }
  return BinaryTable(mp, std::move(g));
}

}  // namespace binmargin
