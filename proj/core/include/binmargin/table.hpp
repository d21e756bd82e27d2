#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "binmargin/margins.hpp"

namespace binmargin {

struct Cell {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Dense row-major matrix.
template <class T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, T fill = T{}) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RealMatrix = Grid<double>;

/// A 0/1 table together with the margins it claims to realize.
class BinaryTable {
 public:
  BinaryTable() = default;

  /// Takes entries as given; throws InvalidArgument if they are not 0/1 or
  /// do not realize `margins`.
  BinaryTable(MarginPair margins, Grid<std::uint8_t> entries);

  /// Builds a table whose claimed margins are read off the entries.
  static BinaryTable from_rows(const std::vector<std::vector<int>>& rows);

  std::size_t rows() const { return entries_.rows(); }
  std::size_t cols() const { return entries_.cols(); }
  std::uint8_t operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
  const Grid<std::uint8_t>& entries() const { return entries_; }
  const MarginPair& margins() const { return margins_; }

  /// Row and column sums of the entries match the claimed margins.
  bool is_valid() const;

  /// Applies a 2x2 checkerboard flip on rows (i, i2) and columns (j, j2) if
  /// the minor is [[1,0],[0,1]] or [[0,1],[1,0]]. Returns whether it flipped.
  bool flip_checkerboard(std::size_t i, std::size_t i2, std::size_t j, std::size_t j2);

  /// Row-major bit string, e.g. "1001" for [[1,0],[0,1]].
  std::string key() const;

  friend bool operator==(const BinaryTable& a, const BinaryTable& b) { return a.entries_ == b.entries_; }

 private:
  MarginPair margins_;
  Grid<std::uint8_t> entries_;
};

std::vector<std::int64_t> row_sums(const Grid<std::uint8_t>& g);
std::vector<std::int64_t> col_sums(const Grid<std::uint8_t>& g);

/// Ryser's greedy construction: rows in decreasing margin order each take the
/// columns with largest residual capacity (lowest index on ties). Throws
/// Infeasible when the margins admit no table.
BinaryTable greedy_table(const MarginPair& mp);

}  // namespace binmargin
