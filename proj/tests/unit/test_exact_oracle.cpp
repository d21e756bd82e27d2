#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "binmargin/analysis.hpp"
#include "binmargin/errors.hpp"
#include "binmargin/exact_oracle.hpp"
#include "oracles.hpp"

namespace bm = binmargin;
namespace bt = binmargin::testing;

using V = std::vector<std::int64_t>;

namespace {

bm::MarginPair mp_of(V r, V c) { return bm::MarginPair(std::move(r), std::move(c)); }

std::map<std::string, std::uint64_t> tally(const std::vector<bm::BinaryTable>& ts) {
  std::map<std::string, std::uint64_t> out;
  for (const auto& t : ts) ++out[t.key()];
  return out;
}

}  // namespace

TEST(CountTables, Examples) {
  EXPECT_EQ(bm::count_tables(mp_of({1, 1}, {1, 1})).count, 2);
  EXPECT_EQ(bm::count_tables(mp_of({2, 1, 1}, {2, 1, 1})).count, 5);
  EXPECT_EQ(bm::count_tables(mp_of({2, 2}, {2, 2})).count, 1);
  EXPECT_EQ(bt::brute_force_count({2, 1, 1}, {2, 1, 1}), 5u);
}

TEST(CountTables, InfeasibleIsZero) {
  const auto ct = bm::count_tables(mp_of({2, 0}, {2, 0}));
  EXPECT_EQ(ct.count, 0);
  EXPECT_TRUE(std::isinf(ct.log_count) && ct.log_count < 0);
}

TEST(CountTables, AgreesWithBruteForce) {
  bm::Rng rng(1);
  for (int t = 0; t < 400; ++t) {
    auto [r, c] = bt::random_raw_margins(rng, 4, 4);
    std::int64_t sr = 0, sc = 0;
    for (auto x : r) sr += x;
    for (auto x : c) sc += x;
    bool capped = true;
    for (auto x : r) capped = capped && x <= static_cast<std::int64_t>(c.size());
    for (auto x : c) capped = capped && x <= static_cast<std::int64_t>(r.size());
    if (sr != sc || !capped) continue;
    const auto mp = mp_of(r, c);
    const auto ct = bm::count_tables(mp);
    ASSERT_EQ(ct.count, bt::brute_force_count(r, c));
    ASSERT_EQ(ct.count > 0, bm::check_feasible(mp));
  }
  for (const auto& mp : bt::margin_corpus(2, 12, 5, 4, 4)) {
    if (mp.row_count() * mp.col_count() > 20) continue;
    ASSERT_EQ(bm::count_tables(mp).count, bt::brute_force_count(mp.rows(), mp.cols()));
  }
}

TEST(CountTables, FeasibilityAgreementUpToFive) {
  bm::Rng rng(12);
  for (int t = 0; t < 1500; ++t) {
    auto [r, c] = bt::random_raw_margins(rng, 5, 5);
    std::int64_t sr = 0, sc = 0;
    for (auto x : r) sr += x;
    for (auto x : c) sc += x;
    if (sr != sc) continue;
    bool capped = true;
    for (auto x : r) capped = capped && x <= static_cast<std::int64_t>(c.size());
    for (auto x : c) capped = capped && x <= static_cast<std::int64_t>(r.size());
    if (!capped) {
      ASSERT_FALSE(bm::check_feasible(r, c));
      continue;
    }
    const auto mp = mp_of(r, c);
    ASSERT_EQ(bm::count_tables(mp).count > 0, bm::check_feasible(mp));
  }
}

TEST(CountTables, LogCountAccurate) {
  for (const auto& mp : bt::margin_corpus(3, 50, 8, 6)) {
    const auto ct = bm::count_tables(mp);
    ASSERT_GT(ct.count, 0);
    ASSERT_NEAR(ct.log_count, std::log(ct.count.convert_to<double>()), 1e-12 * std::max(1.0, ct.log_count));
  }
}

TEST(CountTables, PermutationAndTranspositionInvariant) {
  bm::Rng rng(4);
  for (const auto& mp : bt::margin_corpus(5, 100, 8, 6)) {
    V r = mp.rows();
    V c = mp.cols();
    const auto base = bm::count_tables(mp).count;
    for (std::size_t i = r.size(); i > 1; --i) std::swap(r[i - 1], r[rng.below(i)]);
    for (std::size_t j = c.size(); j > 1; --j) std::swap(c[j - 1], c[rng.below(j)]);
    ASSERT_EQ(bm::count_tables(mp_of(r, c)).count, base);
    ASSERT_EQ(bm::count_tables(mp.transposed()).count, base);
  }
}

TEST(CountTables, LargeBlockMargins) {
  // 110 x 110 block margins are far beyond enumeration but cheap for the DP.
  const auto ct = bm::count_tables(bm::build_block_margins({16, 0.5, 1.2, 0.5}));
  EXPECT_GT(ct.count, 0);
  EXPECT_GT(ct.log_count, 100.0);
}

TEST(CountTables, StateSpaceExceeded) {
  bm::OracleLimits tiny;
  tiny.max_states = 3;
  try {
    bm::count_tables(bm::build_block_margins({8, 0.5, 1.2, 0.5}), tiny);
    FAIL() << "expected StateSpaceExceeded";
  } catch (const bm::StateSpaceExceeded& e) {
    EXPECT_GT(e.states(), 3u);
    EXPECT_EQ(e.kind(), bm::ErrorKind::kStateSpace);
  }
}

TEST(EnumerateTables, Examples) {
  const auto two = bm::enumerate_tables(mp_of({1, 1}, {1, 1}), 100);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].key(), "1001");
  EXPECT_EQ(two[1].key(), "0110");

  const auto five = bm::enumerate_tables(mp_of({2, 1, 1}, {2, 1, 1}), 100);
  ASSERT_EQ(five.size(), 5u);
  EXPECT_EQ(tally(five).size(), 5u);

  EXPECT_TRUE(bm::enumerate_tables(mp_of({2, 0}, {2, 0}), 100).empty());
  EXPECT_THROW(bm::enumerate_tables(mp_of({2, 1, 1}, {2, 1, 1}), 4), bm::CapExceeded);
}

TEST(EnumerateTables, MatchesBruteForceSetAndOrder) {
  for (const auto& mp : bt::margin_corpus(6, 150, 4, 4)) {
    const auto tables = bm::enumerate_tables(mp, 100000);
    auto brute = bt::brute_force_tables(mp.rows(), mp.cols());
    std::sort(brute.begin(), brute.end(), std::greater<>());
    ASSERT_EQ(tables.size(), brute.size());
    for (std::size_t i = 0; i < tables.size(); ++i) {
      ASSERT_TRUE(tables[i].is_valid());
      ASSERT_EQ(tables[i].key(), brute[i]);
    }
    ASSERT_EQ(bm::count_tables(mp).count, tables.size());
  }
}

TEST(EnumerateTables, CountAgreementOnLargerCorpus) {
  for (const auto& mp : bt::margin_corpus(7, 80, 7, 4)) {
    const auto count = bm::count_tables(mp).count;
    if (count > 20000) continue;
    ASSERT_EQ(bm::enumerate_tables(mp, 20000).size(), count);
  }
}

TEST(ExactSample, TwoByTwoFrequencies) {
  const auto samples = bm::exact_sample(mp_of({1, 1}, {1, 1}), 42, 10000);
  const auto counts = tally(samples);
  ASSERT_EQ(counts.size(), 2u);
  for (const auto& [key, c] : counts) EXPECT_NEAR(static_cast<double>(c) / 1e4, 0.5, 0.02) << key;
}

TEST(ExactSample, ThreeByThreeChiSquare) {
  const auto mp = mp_of({2, 1, 1}, {2, 1, 1});
  const auto samples = bm::exact_sample(mp, 7, 100000);
  const auto counts = tally(samples);
  ASSERT_EQ(counts.size(), 5u);
  std::vector<std::uint64_t> obs;
  for (const auto& [key, c] : counts) {
    obs.push_back(c);
    EXPECT_NEAR(static_cast<double>(c) / 1e5, 0.2, 0.005) << key;
  }
  EXPECT_GT(bm::chi_square_test(obs, std::vector<double>(5, 0.2)).p_value, 1e-3);
  for (const auto& t : samples) ASSERT_TRUE(t.is_valid());
}

TEST(ExactSample, UniformOnCorpus) {
  std::uint64_t seed = 100;
  int tested = 0;
  for (const auto& mp : bt::margin_corpus(8, 60, 5, 4, 2)) {
    const auto count = bm::count_tables(mp).count;
    if (count < 2 || count > 60) continue;
    const auto n = count.convert_to<std::size_t>();
    const auto samples = bm::exact_sample(mp, ++seed, 200 * n);
    const auto counts = tally(samples);
    ASSERT_LE(counts.size(), n);
    std::vector<std::uint64_t> obs;
    for (const auto& [key, c] : counts) obs.push_back(c);
    obs.resize(n, 0);
    ASSERT_GT(bm::chi_square_test(obs, std::vector<double>(n, 1.0 / static_cast<double>(n))).p_value, 1e-4);
    ++tested;
  }
  EXPECT_GT(tested, 10);
}

TEST(ExactSample, Deterministic) {
  const auto mp = mp_of({2, 2, 1, 1}, {2, 1, 2, 1});
  const auto a = bm::exact_sample(mp, 9, 500);
  const auto b = bm::exact_sample(mp, 9, 500);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a[i], b[i]);
  const auto c = bm::exact_sample(mp, 10, 500);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs = differs || !(a[i] == c[i]);
  EXPECT_TRUE(differs);
}

TEST(ExactSample, InfeasibleThrows) {
  EXPECT_THROW(bm::exact_sample(mp_of({2, 0}, {2, 0}), 1, 1), bm::Infeasible);
}

TEST(ExactMarginal, Examples) {
  EXPECT_EQ(bm::exact_marginal_ratio(mp_of({1, 1}, {1, 1}), {0, 0}), bm::Rational(1, 2));
  EXPECT_EQ(bm::exact_marginal_ratio(mp_of({2, 1, 1}, {2, 1, 1}), {0, 0}), bm::Rational(4, 5));
  EXPECT_DOUBLE_EQ(bm::exact_marginal(mp_of({2, 1, 1}, {2, 1, 1}), {0, 0}), 0.8);
  EXPECT_EQ(bm::exact_marginal_ratio(mp_of({3, 1, 1}, {3, 1, 1}), {0, 2}), bm::Rational(1));
  EXPECT_THROW(bm::exact_marginal(mp_of({2, 0}, {2, 0}), {0, 0}), bm::Infeasible);
}

TEST(ExactMarginal, MatchesBruteForceFrequencies) {
  for (const auto& mp : bt::margin_corpus(9, 80, 4, 4)) {
    const auto tables = bt::brute_force_tables(mp.rows(), mp.cols());
    const std::size_t n = mp.col_count();
    for (std::size_t i = 0; i < mp.row_count(); ++i)
      for (std::size_t j = 0; j < n; ++j) {
        std::int64_t ones = 0;
        for (const auto& key : tables) ones += key[i * n + j] == '1';
        ASSERT_EQ(bm::exact_marginal_ratio(mp, {i, j}), bm::Rational(ones, static_cast<std::int64_t>(tables.size())));
        ASSERT_EQ(bm::count_with_cell(mp, {i, j}), ones);
      }
  }
}

TEST(ExactMarginal, RowSumsExact) {
  for (const auto& mp : bt::margin_corpus(10, 60, 8, 6)) {
    for (std::size_t i = 0; i < mp.row_count(); ++i) {
      bm::Rational s = 0;
      for (std::size_t j = 0; j < mp.col_count(); ++j) s += bm::exact_marginal_ratio(mp, {i, j});
      ASSERT_EQ(s, bm::Rational(mp.rows()[i]));
    }
  }
}

TEST(ExactJointLaw, MatchesBruteForce) {
  bm::Rng rng(11);
  for (const auto& mp : bt::margin_corpus(12, 80, 4, 4, 2)) {
    const auto tables = bt::brute_force_tables(mp.rows(), mp.cols());
    const std::size_t n = mp.col_count();
    const std::size_t k = 1 + rng.below(3);
    std::vector<bm::Cell> cells;
    std::set<bm::Cell> used;
    while (cells.size() < k) {
      bm::Cell c{rng.below(mp.row_count()), rng.below(n)};
      if (used.insert(c).second) cells.push_back(c);
      if (used.size() == mp.row_count() * n) break;
    }
    const auto law = bm::exact_joint_law(mp, cells);
    ASSERT_EQ(law.total, tables.size());
    std::vector<std::uint64_t> want(std::size_t{1} << cells.size(), 0);
    for (const auto& key : tables) {
      std::size_t pat = 0;
      for (std::size_t b = 0; b < cells.size(); ++b)
        if (key[cells[b].row * n + cells[b].col] == '1') pat |= std::size_t{1} << b;
      ++want[pat];
    }
    for (std::size_t p = 0; p < want.size(); ++p) ASSERT_EQ(law.pattern_counts[p], want[p]);
    const auto probs = law.probabilities();
    double s = 0;
    for (double x : probs) s += x;
    ASSERT_NEAR(s, 1.0, 1e-12);
    for (std::size_t b = 0; b < cells.size(); ++b) ASSERT_EQ(law.marginal(b), bm::exact_marginal_ratio(mp, cells[b]));
  }
}

TEST(BarvinokUniformity, Examples) {
  const auto mp2 = mp_of({1, 1}, {1, 1});
  const auto r2 = bm::verify_barvinok_uniformity(mp2, bm::solve_typical(mp2));
  EXPECT_EQ(r2.count, 2);
  EXPECT_LT(r2.max_deviation, 1e-12);
  EXPECT_NEAR(r2.acceptance, 2.0 / 16.0, 1e-12);

  const auto mp3 = mp_of({2, 1, 1}, {2, 1, 1});
  const auto r3 = bm::verify_barvinok_uniformity(mp3, bm::solve_typical(mp3));
  EXPECT_EQ(r3.count, 5);
  EXPECT_LT(r3.max_deviation, 1e-8);
  EXPECT_LE(5.0 * std::exp(-r3.entropy), 1.0);
}

TEST(BarvinokUniformity, PerturbedControlFails) {
  const auto mp = mp_of({2, 1, 1}, {2, 1, 1});
  auto t = bm::solve_typical(mp);
  t.z(0, 0) += 0.01;
  EXPECT_THROW(bm::verify_barvinok_uniformity(mp, t), bm::AssertionFailed);
}

TEST(BarvinokUniformity, CorpusUpToFive) {
  int passed = 0;
  for (const auto& mp : bt::margin_corpus(13, 120, 5, 5)) {
    const auto t = bm::solve_typical(mp);
    const auto rep = bm::verify_barvinok_uniformity(mp, t);
    ASSERT_LT(rep.max_deviation, 1e-8);
    ASSERT_LE(rep.log_acceptance, 1e-9);
    ASSERT_LE(rep.acceptance, 1.0 + 1e-9);
    ++passed;
  }
  EXPECT_GE(passed, 100);
}

TEST(BarvinokUpperBound, LogCountAtMostEntropy) {
  for (const auto& mp : bt::margin_corpus(14, 200, 8, 6)) {
    const auto t = bm::solve_typical(mp);
    const auto ct = bm::count_tables(mp);
    ASSERT_LE(ct.log_count, bm::barvinok_upper_bound(t) + 1e-9);
  }
}

TEST(CompletionCounter, SplitsEnumerateAllSubsets) {
  bm::CompletionCounter counter({2}, 4, 3);
  const bm::CompletionCounter::Hist hist{0, 2, 1, 1};
  bm::BigInt total = 0;
  counter.for_each_split(hist, 2, [&](const auto& takes, const auto& next, const bm::BigInt& w) {
    std::int32_t placed = 0;
    for (auto x : takes) placed += x;
    EXPECT_EQ(placed, 2);
    std::int32_t rows = 0;
    for (auto x : next) rows += x;
    EXPECT_EQ(rows, 4);
    total += w;
  });
  EXPECT_EQ(total, 6);  // C(4, 2) rows with positive residual
}
