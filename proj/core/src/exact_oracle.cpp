#include "binmargin/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "binmargin/errors.hpp"

namespace binmargin {

namespace {

std::string encode(const CompletionCounter::Hist& hist) {
  return {reinterpret_cast<const char*>(hist.data()), hist.size() * sizeof(std::int32_t)};
}

std::int64_t max_or_zero(const std::vector<std::int64_t>& v) {
  return v.empty() ? 0 : *std::max_element(v.begin(), v.end());
}

// Columns sorted by decreasing sum (stable); the counter processes them in
// this order.
std::vector<std::size_t> column_order(const std::vector<std::int64_t>& cols) {
  std::vector<std::size_t> order(cols.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return cols[a] > cols[b]; });
  return order;
}

std::vector<std::int64_t> permuted(const std::vector<std::int64_t>& v, const std::vector<std::size_t>& order) {
  std::vector<std::int64_t> out;
  out.reserve(order.size());
  for (auto idx : order) out.push_back(v[idx]);
  return out;
}

BigInt random_below(const BigInt& bound, Rng& rng) {
  const unsigned bits = boost::multiprecision::msb(bound) + 1;
  const unsigned words = (bits + 63) / 64;
  for (;;) {
    BigInt x = 0;
    for (unsigned w = 0; w < words; ++w) {
      x <<= 64;
      x |= BigInt(rng.next());
    }
    x >>= (words * 64 - bits);
    if (x < bound) return x;
  }
}

}  // namespace

double log_big(const BigInt& x) {
  if (x <= 0) return -std::numeric_limits<double>::infinity();
  const unsigned bits = boost::multiprecision::msb(x) + 1;
  if (bits <= 1000) return std::log(x.convert_to<double>());
  const unsigned shift = bits - 64;
  const BigInt top = x >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

CompletionCounter::CompletionCounter(std::vector<std::int64_t> column_sums, std::size_t rows,
                                     std::int64_t max_residual, OracleLimits limits)
    : column_sums_(std::move(column_sums)),
      rows_(rows),
      max_residual_(std::max<std::int64_t>(max_residual, 0)),
      limits_(limits),
      memo_(column_sums_.size() + 1) {
  suffix_.assign(column_sums_.size() + 1, 0);
  for (std::size_t t = column_sums_.size(); t-- > 0;) suffix_[t] = suffix_[t + 1] + column_sums_[t];
  binom_.resize(rows_ + 1);
  for (std::size_t n = 0; n <= rows_; ++n) {
    binom_[n].resize(n + 1);
    binom_[n][0] = binom_[n][n] = 1;
    for (std::size_t k = 1; k < n; ++k) binom_[n][k] = binom_[n - 1][k - 1] + binom_[n - 1][k];
  }
}

CompletionCounter::Hist CompletionCounter::histogram(const std::vector<std::int64_t>& residuals) const {
  Hist h(static_cast<std::size_t>(max_residual_) + 1, 0);
  for (auto v : residuals) {
    if (v < 0 || v > max_residual_) throw InvalidArgument("residual outside counter range");
    ++h[static_cast<std::size_t>(v)];
  }
  return h;
}

BigInt CompletionCounter::completions(std::size_t t, const Hist& hist) {
  const std::size_t ncols = column_sums_.size();
  std::int64_t top = 0;
  std::int64_t mass = 0;
  for (std::size_t v = 1; v < hist.size(); ++v)
    if (hist[v] > 0) {
      top = static_cast<std::int64_t>(v);
      mass += static_cast<std::int64_t>(v) * hist[v];
    }
  if (t == ncols) return mass == 0 ? BigInt(1) : BigInt(0);
  if (mass != suffix_[t] || top > static_cast<std::int64_t>(ncols - t)) return BigInt(0);

  auto& layer = memo_[t];
  const std::string key = encode(hist);
  if (auto it = layer.find(key); it != layer.end()) return it->second;

  BigInt total = 0;
  for_each_split(hist, column_sums_[t], [&](const Hist&, const Hist& next, const BigInt& weight) {
    BigInt sub = completions(t + 1, next);
    if (sub != 0) total += weight * sub;
  });
  if (++states_ > limits_.max_states) {
    std::ostringstream os;
    os << "exact oracle: state space exceeded " << limits_.max_states << " states";
    throw StateSpaceExceeded(os.str(), states_);
  }
  layer.emplace(key, total);
  return total;
}

CountTable count_tables(const MarginPair& mp, const OracleLimits& limits) {
  CountTable out;
  if (!check_feasible(mp)) {
    out.count = 0;
    out.log_count = -std::numeric_limits<double>::infinity();
    return out;
  }
  const auto order = column_order(mp.cols());
  CompletionCounter counter(permuted(mp.cols(), order), mp.row_count(), max_or_zero(mp.rows()), limits);
  out.count = counter.completions(0, counter.histogram(mp.rows()));
  out.log_count = log_big(out.count);
  return out;
}

BigInt count_with_cell(const MarginPair& mp, Cell cell, const OracleLimits& limits) {
  const auto& r = mp.rows();
  const auto& c = mp.cols();
  if (cell.row >= r.size() || cell.col >= c.size()) throw InvalidArgument("cell outside the table");
  if (r[cell.row] == 0 || c[cell.col] == 0 || !check_feasible(mp)) return 0;

  std::vector<std::int64_t> rest_cols;
  for (std::size_t j = 0; j < c.size(); ++j)
    if (j != cell.col) rest_cols.push_back(c[j]);
  const auto order = column_order(rest_cols);
  CompletionCounter counter(permuted(rest_cols, order), r.size(), max_or_zero(r), limits);

  std::vector<std::int64_t> others;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (i != cell.row) others.push_back(r[i]);
  const auto hist = counter.histogram(others);
  const auto forced_residual = static_cast<std::size_t>(r[cell.row] - 1);

  BigInt total = 0;
  counter.for_each_split(hist, c[cell.col] - 1, [&](const auto&, const auto& next, const BigInt& weight) {
    auto with_row = next;
    ++with_row[forced_residual];
    BigInt sub = counter.completions(0, with_row);
    if (sub != 0) total += weight * sub;
  });
  return total;
}

std::vector<BinaryTable> enumerate_tables(const MarginPair& mp, std::size_t cap, const OracleLimits& limits) {
  const CountTable ct = count_tables(mp, limits);
  if (ct.count > cap) {
    std::ostringstream os;
    os << "enumerate_tables: " << ct.count << " tables exceed cap " << cap;
    throw CapExceeded(os.str());
  }
  std::vector<BinaryTable> out;
  if (ct.count == 0) return out;
  out.reserve(ct.count.convert_to<std::size_t>());

  const std::size_t m = mp.row_count();
  const std::size_t n = mp.col_count();
  Grid<std::uint8_t> g(m, n, 0);
  std::vector<std::int64_t> col_left = mp.cols();

  auto remainder_feasible = [&](std::size_t next_row) {
    std::vector<std::int64_t> rows(mp.rows().begin() + static_cast<std::ptrdiff_t>(next_row), mp.rows().end());
    return check_feasible(rows, col_left);
  };

  // Fills row i from column j with `need` ones still to place.
  auto rec = [&](auto&& self, std::size_t i, std::size_t j, std::int64_t need) -> void {
    if (i == m) {
      out.emplace_back(mp, g);
      return;
    }
    if (j == n) {
      if (need == 0 && remainder_feasible(i + 1))
        self(self, i + 1, 0, i + 1 < m ? mp.rows()[i + 1] : 0);
      return;
    }
    if (need > static_cast<std::int64_t>(n - j)) return;
    if (need > 0 && col_left[j] > 0) {
      g(i, j) = 1;
      --col_left[j];
      self(self, i, j + 1, need - 1);
      ++col_left[j];
      g(i, j) = 0;
    }
    self(self, i, j + 1, need);
  };
  if (m == 0) {
    out.emplace_back(mp, g);
  } else {
    rec(rec, 0, 0, mp.rows()[0]);
  }
  return out;
}

ExactSampler::ExactSampler(const MarginPair& mp, const OracleLimits& limits)
    : mp_(mp),
      order_(column_order(mp.cols())),
      counter_(permuted(mp.cols(), order_), mp.row_count(), max_or_zero(mp.rows()), limits) {
  if (!check_feasible(mp_)) throw Infeasible("exact sampler: margins admit no binary table");
  count_ = counter_.completions(0, counter_.histogram(mp_.rows()));
}

BinaryTable ExactSampler::draw(Rng& rng) {
  const std::size_t m = mp_.row_count();
  Grid<std::uint8_t> g(m, mp_.col_count(), 0);
  std::vector<std::int64_t> residual = mp_.rows();
  std::vector<std::size_t> members;
  for (std::size_t t = 0; t < order_.size(); ++t) {
    const auto hist = counter_.histogram(residual);
    const BigInt total = counter_.completions(t, hist);
    BigInt target = random_below(total, rng);
    CompletionCounter::Hist chosen;
    bool found = false;
    counter_.for_each_split(hist, counter_.column_sum(t), [&](const auto& takes, const auto& next, const BigInt& w) {
      if (found) return;
      const BigInt mass = w * counter_.completions(t + 1, next);
      if (target < mass) {
        chosen = takes;
        found = true;
      } else {
        target -= mass;
      }
    });
    if (!found) throw AssertionFailed("exact sampler: split weights do not sum to the completion count");

    const std::size_t col = order_[t];
    for (std::size_t v = 1; v < chosen.size(); ++v) {
      if (chosen[v] == 0) continue;
      members.clear();
      for (std::size_t i = 0; i < m; ++i)
        if (residual[i] == static_cast<std::int64_t>(v)) members.push_back(i);
      // Partial Fisher-Yates: the first chosen[v] slots become a uniform subset.
      for (std::size_t s = 0; s < static_cast<std::size_t>(chosen[v]); ++s) {
        const auto pick = s + static_cast<std::size_t>(rng.below(members.size() - s));
        std::swap(members[s], members[pick]);
        g(members[s], col) = 1;
      }
      for (std::size_t s = 0; s < static_cast<std::size_t>(chosen[v]); ++s) --residual[members[s]];
    }
  }
  return BinaryTable(mp_, std::move(g));
}

std::vector<BinaryTable> exact_sample(const MarginPair& mp, std::uint64_t seed, std::size_t k,
                                      const OracleLimits& limits) {
  ExactSampler sampler(mp, limits);
  Rng rng(seed);
  std::vector<BinaryTable> out;
  out.reserve(k);
  for (std::size_t s = 0; s < k; ++s) out.push_back(sampler.draw(rng));
  return out;
}

Rational exact_marginal_ratio(const MarginPair& mp, Cell cell, const OracleLimits& limits) {
  const CountTable total = count_tables(mp, limits);
  if (total.count == 0) throw Infeasible("exact_marginal: margins admit no binary table");
  return Rational(count_with_cell(mp, cell, limits), total.count);
}

double exact_marginal(const MarginPair& mp, Cell cell, const OracleLimits& limits) {
  return to_double(exact_marginal_ratio(mp, cell, limits));
}

std::vector<double> JointLaw::probabilities() const {
  std::vector<double> p;
  p.reserve(pattern_counts.size());
  for (const auto& c : pattern_counts) p.push_back(to_double(Rational(c, total)));
  return p;
}

Rational JointLaw::marginal(std::size_t b) const {
  BigInt ones = 0;
  for (std::size_t p = 0; p < pattern_counts.size(); ++p)
    if ((p >> b) & 1U) ones += pattern_counts[p];
  return Rational(ones, total);
}

JointLaw exact_joint_law(const MarginPair& mp, const std::vector<Cell>& cells, const OracleLimits& limits) {
  if (cells.empty() || cells.size() > 20) throw InvalidArgument("exact_joint_law: need 1..20 cells");
  const auto& r = mp.rows();
  const auto& c = mp.cols();
  std::vector<std::size_t> touched;
  for (const auto& cell : cells) {
    if (cell.row >= r.size() || cell.col >= c.size()) throw InvalidArgument("exact_joint_law: cell outside the table");
    touched.push_back(cell.row);
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

  if (!check_feasible(mp)) throw Infeasible("exact_joint_law: margins admit no binary table");

  // Remaining rows become the processed "columns" of a transposed counter whose
  // residual histogram is over the original columns.
  std::vector<std::int64_t> rest_rows;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (!std::binary_search(touched.begin(), touched.end(), i)) rest_rows.push_back(r[i]);
  const auto order = column_order(rest_rows);
  CompletionCounter counter(permuted(rest_rows, order), c.size(), max_or_zero(c), limits);

  JointLaw law;
  law.cells = cells;
  law.pattern_counts.assign(std::size_t{1} << cells.size(), 0);
  law.total = 0;

  const std::size_t n = c.size();
  Grid<std::uint8_t> assigned(touched.size(), n, 0);
  std::vector<std::int64_t> col_left = c;
  std::size_t visited = 0;

  auto finish = [&]() {
    if (++visited > limits.max_states) throw StateSpaceExceeded("exact_joint_law: too many row assignments", visited);
    BigInt ways = counter.completions(0, counter.histogram(col_left));
    if (ways == 0) return;
    std::size_t pattern = 0;
    for (std::size_t b = 0; b < cells.size(); ++b) {
      const auto slot = static_cast<std::size_t>(
          std::lower_bound(touched.begin(), touched.end(), cells[b].row) - touched.begin());
      if (assigned(slot, cells[b].col)) pattern |= std::size_t{1} << b;
    }
    law.pattern_counts[pattern] += ways;
    law.total += ways;
  };

  auto rec = [&](auto&& self, std::size_t slot, std::size_t j, std::int64_t need) -> void {
    if (slot == touched.size()) {
      finish();
      return;
    }
    if (j == n) {
      if (need != 0) return;
      const std::size_t next = slot + 1;
      self(self, next, 0, next < touched.size() ? r[touched[next]] : 0);
      return;
    }
    if (need > static_cast<std::int64_t>(n - j)) return;
    if (need > 0 && col_left[j] > 0) {
      assigned(slot, j) = 1;
      --col_left[j];
      self(self, slot, j + 1, need - 1);
      ++col_left[j];
      assigned(slot, j) = 0;
    }
    self(self, slot, j + 1, need);
  };
  rec(rec, 0, 0, r[touched[0]]);
  return law;
}

double log_density(const BinaryTable& table, const TypicalTable& t) {
  double s = 0.0;
  for (std::size_t i = 0; i < table.rows(); ++i)
    for (std::size_t j = 0; j < table.cols(); ++j) {
      const double z = t.z(i, j);
      s += table(i, j) ? std::log(z) : std::log1p(-z);
    }
  return s;
}

UniformityReport verify_barvinok_uniformity(const MarginPair& mp, const TypicalTable& t, std::size_t cap,
                                            double tol) {
  if (t.rows() != mp.row_count() || t.cols() != mp.col_count())
    throw InvalidArgument("verify_barvinok_uniformity: typical table shape does not match margins");
  const auto tables = enumerate_tables(mp, cap);
  UniformityReport report;
  report.count = tables.size();
  report.entropy = t.entropy;
  for (const auto& d : tables) {
    const double ld = log_density(d, t);
    const double dev = std::isfinite(ld) ? std::fabs(ld + t.entropy) : std::numeric_limits<double>::infinity();
    report.max_deviation = std::max(report.max_deviation, dev);
    if (!(dev <= tol)) {
      std::ostringstream os;
      os << "log-density " << ld << " of table " << d.key() << " differs from -g(Z) = " << -t.entropy << " by "
         << dev;
      throw AssertionFailed(os.str());
    }
    report.acceptance += std::exp(ld);
  }
  report.log_acceptance = log_big(report.count) - t.entropy;
  if (report.log_acceptance > 1e-9) {
    std::ostringstream os;
    os << "count * e^{-g(Z)} = " << std::exp(report.log_acceptance) << " exceeds 1";
    throw AssertionFailed(os.str());
  }
  return report;
}

}  // namespace binmargin
