#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "binmargin/entropy.hpp"
#include "binmargin/margins.hpp"
#include "binmargin/rng.hpp"
#include "binmargin/table.hpp"

namespace binmargin {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// ln(x) for x > 0, -inf for x == 0.
double log_big(const BigInt& x);
double to_double(const Rational& q);

struct OracleLimits {
  /// Memoized DP states (or enumerated row assignments) before giving up.
  std::size_t max_states = 1'000'000;
};

struct CountTable {
  BigInt count;
  double log_count = 0.0;
};

/// Counts completions of a table column by column. The state before column t
/// is the histogram of residual row sums: hist[v] = number of rows that still
/// need v ones. Rows with equal residuals are interchangeable, so a column
/// step only decides how many rows of each residual class receive a one.
class CompletionCounter {
 public:
  using Hist = std::vector<std::int32_t>;

  /// `column_sums` in processing order; `rows` is the number of rows and
  /// `max_residual` bounds every row residual.
  CompletionCounter(std::vector<std::int64_t> column_sums, std::size_t rows, std::int64_t max_residual,
                    OracleLimits limits = {});

  /// Ways to fill columns t.. given residual histogram `hist`.
  BigInt completions(std::size_t t, const Hist& hist);

  std::size_t column_count() const { return column_sums_.size(); }
  std::int64_t column_sum(std::size_t t) const { return column_sums_[t]; }
  std::size_t states() const { return states_; }
  Hist histogram(const std::vector<std::int64_t>& residuals) const;
  const BigInt& binomial(std::size_t n, std::size_t k) const { return binom_[n][k]; }

  /// Calls f(takes, next_hist, weight) for every way to place `ones` ones in
  /// a column: takes[v] rows of residual v receive a one, weight is the
  /// number of row subsets realizing that split.
  template <class F>
  void for_each_split(const Hist& hist, std::int64_t ones, F&& f) const;

 private:
  std::vector<std::int64_t> column_sums_;
  std::vector<std::int64_t> suffix_;
  std::size_t rows_;
  std::int64_t max_residual_;
  OracleLimits limits_;
  std::vector<std::vector<BigInt>> binom_;
  std::vector<std::unordered_map<std::string, BigInt>> memo_;
  std::size_t states_ = 0;
};

/// Exact cardinality of M(r, c). Throws StateSpaceExceeded past the limits.
CountTable count_tables(const MarginPair& mp, const OracleLimits& limits = {});

/// Number of tables with cell (i, j) equal to 1, counted by decrementing r_i
/// and c_j and processing column j first with row i forced.
BigInt count_with_cell(const MarginPair& mp, Cell cell, const OracleLimits& limits = {});

/// All tables, lexicographically decreasing in row-major bits (ones first).
/// Throws CapExceeded when the count exceeds `cap`.
std::vector<BinaryTable> enumerate_tables(const MarginPair& mp, std::size_t cap, const OracleLimits& limits = {});

/// Exactly uniform sampler over M(r, c).
class ExactSampler {
 public:
  explicit ExactSampler(const MarginPair& mp, const OracleLimits& limits = {});
  const BigInt& count() const { return count_; }
  BinaryTable draw(Rng& rng);

 private:
  MarginPair mp_;
  std::vector<std::size_t> order_;
  CompletionCounter counter_;
  BigInt count_;
};

/// k i.i.d. uniform tables drawn with Rng(seed).
std::vector<BinaryTable> exact_sample(const MarginPair& mp, std::uint64_t seed, std::size_t k,
                                      const OracleLimits& limits = {});

/// P(X_ij = 1) under the uniform law, as an exact ratio. Throws Infeasible
/// when there is no table.
Rational exact_marginal_ratio(const MarginPair& mp, Cell cell, const OracleLimits& limits = {});
double exact_marginal(const MarginPair& mp, Cell cell, const OracleLimits& limits = {});

/// Exact joint law of a few cells: pattern_counts[p] counts tables whose
/// cells[b] equals bit b of p.
struct JointLaw {
  std::vector<Cell> cells;
  std::vector<BigInt> pattern_counts;
  BigInt total;

  std::vector<double> probabilities() const;
  /// P(cell b = 1).
  Rational marginal(std::size_t b) const;
};

/// Enumerates the assignments of the rows touched by `cells` and counts the
/// remaining rows with one shared counter (in transposed orientation).
JointLaw exact_joint_law(const MarginPair& mp, const std::vector<Cell>& cells, const OracleLimits& limits = {});

/// ln P(Y = D) for Y with independent Ber(z_ij) entries.
double log_density(const BinaryTable& table, const TypicalTable& t);

struct UniformityReport {
  BigInt count;
  double entropy = 0.0;
  double max_deviation = 0.0;
  /// ln(count) - g(Z); at most 0 by the upper bound.
  double log_acceptance = 0.0;
  /// Sum over D in M(r,c) of P(Y = D) = P(Y in M(r,c)).
  double acceptance = 0.0;
};

/// Checks that every table D has ln P(Y = D) = -g(Z) within `tol` and that
/// count * e^{-g(Z)} <= 1. Throws AssertionFailed naming the offending table.
UniformityReport verify_barvinok_uniformity(const MarginPair& mp, const TypicalTable& t, std::size_t cap = 200000,
                                            double tol = 1e-8);

// ---------------------------------------------------------------------------

template <class F>
void CompletionCounter::for_each_split(const Hist& hist, std::int64_t ones, F&& f) const {
  const auto top = static_cast<std::int64_t>(hist.size()) - 1;
  // available[v] = rows with residual in [1, v].
  std::vector<std::int64_t> available(hist.size(), 0);
  for (std::int64_t v = 1; v <= top; ++v) available[v] = available[v - 1] + hist[v];
  if (ones > available[top < 0 ? 0 : top]) return;

  Hist takes(hist.size(), 0);
  Hist next(hist.size(), 0);
  BigInt weight;
  auto rec = [&](auto&& self, std::int64_t v, std::int64_t remaining) -> void {
    if (v == 0) {
      if (remaining != 0) return;
      for (std::int64_t u = 0; u <= top; ++u) next[u] = hist[u] - takes[u] + (u + 1 <= top ? takes[u + 1] : 0);
      weight = 1;
      for (std::int64_t u = 1; u <= top; ++u)
        if (takes[u] > 0) weight *= binom_[hist[u]][takes[u]];
      f(static_cast<const Hist&>(takes), static_cast<const Hist&>(next), static_cast<const BigInt&>(weight));
      return;
    }
    const std::int64_t lo = std::max<std::int64_t>(0, remaining - available[v - 1]);
    const std::int64_t hi = std::min<std::int64_t>(hist[v], remaining);
    for (std::int64_t k = hi; k >= lo; --k) {
      takes[v] = static_cast<std::int32_t>(k);
      self(self, v - 1, remaining - k);
    }
    takes[v] = 0;
  };
  if (top >= 1)
    rec(rec, top, ones);
  else if (ones == 0)
    f(static_cast<const Hist&>(takes), hist, BigInt(1));
}

}  // namespace binmargin
