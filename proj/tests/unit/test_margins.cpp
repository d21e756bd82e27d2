#include <gtest/gtest.h>

#include <cmath>

#include "binmargin/errors.hpp"
#include "binmargin/margins.hpp"
#include "oracles.hpp"

namespace bm = binmargin;
namespace bt = binmargin::testing;

using V = std::vector<std::int64_t>;

TEST(BlockParams, Validation) {
  EXPECT_THROW((bm::BlockParams{0, 0.5, 1.0, 0.5}.validate()), bm::InvalidArgument);
  EXPECT_THROW((bm::BlockParams{4, -0.1, 1.0, 0.5}.validate()), bm::InvalidArgument);
  EXPECT_THROW((bm::BlockParams{4, 1.1, 1.0, 0.5}.validate()), bm::InvalidArgument);
  EXPECT_THROW((bm::BlockParams{4, 0.5, 0.0, 0.5}.validate()), bm::InvalidArgument);
  EXPECT_THROW((bm::BlockParams{4, 0.5, 1.0, 0.0}.validate()), bm::InvalidArgument);
  EXPECT_NO_THROW((bm::BlockParams{4, 0.5, 1.0, 0.5}.validate()));
}

TEST(BlockMargins, EqualBlocksWhenBIsOne) {
  const auto mp = bm::build_block_margins({4, 0.5, 1.0, 0.5});
  EXPECT_EQ(mp.rows(), V(6, 2));
  EXPECT_EQ(mp.cols(), V(6, 2));
}

TEST(BlockMargins, SingleHeavyLine) {
  // floor(4^0) = 1 heavy entry of floor(1.5 * 0.5 * 4) = 3, then 4 entries of 2.
  const auto mp = bm::build_block_margins({4, 0.0, 1.5, 0.5});
  EXPECT_EQ(mp.rows(), (V{3, 2, 2, 2, 2}));
  EXPECT_EQ(mp.cols(), mp.rows());
}

TEST(BlockMargins, BinaryCapBoundary) {
  const auto mp = bm::build_block_margins({2, 1.0, 2.0, 1.0});
  EXPECT_EQ(mp.rows(), (V{4, 4, 2, 2}));
  EXPECT_THROW(bm::build_block_margins({2, 1.0, 2.5, 1.0}), bm::InvalidArgument);
}

TEST(BlockMargins, RejectsDegenerateLightMargin) {
  EXPECT_THROW(bm::build_block_margins({1, 0.5, 1.0, 0.5}), bm::InvalidArgument);
}

TEST(BlockMargins, FloorSnapsNearIntegers) {
  EXPECT_EQ(bm::margin_floor(2.9999999999999996), 3);
  EXPECT_EQ(bm::margin_floor(2.5), 2);
  EXPECT_EQ(bm::margin_floor(3.0), 3);
  EXPECT_EQ(bm::margin_floor(0.6 * 10.0), 6);
  EXPECT_EQ(bm::BlockParams({24, 0.5, 1.2, 0.5}).heavy_margin(), 14);
  EXPECT_EQ(bm::BlockParams({24, 0.5, 1.2, 0.5}).heavy_count(), 4);
  EXPECT_EQ(bm::BlockParams({36, 0.5, 1.2, 0.5}).heavy_count(), 6);
  EXPECT_EQ(bm::BlockParams({54, 0.5, 1.2, 0.5}).heavy_count(), 7);
  EXPECT_EQ(bm::BlockParams({10000, 0.5, 1.2, 0.5}).heavy_count(), 100);
  EXPECT_EQ(bm::BlockParams({10000, 0.5, 1.2, 0.5}).heavy_margin(), 6000);
}

TEST(BlockMargins, ValidAcrossRegimeParameters) {
  bm::Rng rng(2024);
  for (int t = 0; t < 500; ++t) {
    bm::BlockParams p;
    p.n = 2 + static_cast<std::int64_t>(rng.below(60));
    p.delta = rng.uniform() * 0.99;
    p.c = 0.05 + 0.9 * rng.uniform();
    p.b = 0.1 + (1.0 / p.c - 0.1) * rng.uniform();
    if (bm::margin_floor(p.c * static_cast<double>(p.n)) < 1) continue;
    ASSERT_TRUE(bm::classify_regime(p).global_bound);
    const auto mp = bm::build_block_margins(p);
    ASSERT_EQ(mp.row_count(), static_cast<std::size_t>(p.dimension()));
    ASSERT_EQ(mp.rows(), mp.cols());
    for (auto x : mp.rows()) ASSERT_LE(x, static_cast<std::int64_t>(mp.col_count()));
  }
}

TEST(MarginPair, Invariants) {
  EXPECT_THROW(bm::MarginPair(V{1, 1}, V{1}), bm::InvalidArgument);
  EXPECT_THROW(bm::MarginPair(V{-1, 2}, V{1}), bm::InvalidArgument);
  EXPECT_THROW(bm::MarginPair(V{2, 2}, V{3, 1}), bm::InvalidArgument);
  const bm::MarginPair mp(V{2, 0}, V{1, 1});
  EXPECT_EQ(mp.total(), 2);
  EXPECT_EQ(mp.transposed().rows(), (V{1, 1}));
}

TEST(Feasibility, Examples) {
  EXPECT_TRUE(bm::check_feasible(bm::MarginPair(V{1, 1}, V{1, 1})));
  EXPECT_TRUE(bm::check_feasible(bm::MarginPair(V{2, 2}, V{2, 2})));
  EXPECT_TRUE(bm::check_feasible(bm::MarginPair(V{2, 0}, V{1, 1})));
  EXPECT_FALSE(bm::check_feasible(V{2, 2}, V{3, 1}));
  EXPECT_FALSE(bm::check_feasible(V{2, 0}, V{2, 0}));
  EXPECT_FALSE(bm::check_feasible(V{1}, V{1, 1}));
}

TEST(Feasibility, AgreesWithExhaustiveEnumeration) {
  bm::Rng rng(77);
  int feasible = 0;
  for (int t = 0; t < 600; ++t) {
    auto [r, c] = bt::random_raw_margins(rng, 4, 4);
    const bool brute = bt::brute_force_count(r, c) > 0;
    ASSERT_EQ(bm::check_feasible(r, c), brute) << "case " << t;
    feasible += brute;
  }
  EXPECT_GT(feasible, 10);
}

TEST(Feasibility, AgreesOnReadOffMargins) {
  for (const auto& mp : bt::margin_corpus(5, 200, 4, 4)) {
    ASSERT_TRUE(bm::check_feasible(mp));
    ASSERT_GT(bt::brute_force_count(mp.rows(), mp.cols()), 0u);
  }
}

TEST(Regime, Examples) {
  EXPECT_NEAR(bm::top_left_b_bound(0.5), 1.0 / (std::sqrt(0.5 / 3 - 0.25 / 3) + 0.5), 1e-15);
  EXPECT_NEAR(bm::top_left_b_bound(0.5), 1.268, 1e-3);

  const auto all = bm::classify_regime({24, 0.6, 1.2, 0.5});
  EXPECT_TRUE(all.bottom_right && all.top_left && all.side);

  const auto two = bm::classify_regime({24, 0.3, 1.2, 0.5});
  EXPECT_TRUE(two.bottom_right && two.side);
  EXPECT_FALSE(two.top_left);

  const auto none = bm::classify_regime({24, 0.5, 3.0, 0.5});
  EXPECT_TRUE(none.empty());
  EXPECT_FALSE(none.global_bound);
  EXPECT_EQ(none.describe(), "{}");
}

TEST(Regime, DeltaOneUsesWiderBound) {
  const auto r = bm::classify_regime({4, 1.0, 1.5, 1.2});
  EXPECT_TRUE(r.global_bound);
  EXPECT_TRUE(r.empty());
  EXPECT_FALSE(bm::classify_regime({4, 0.9, 1.5, 1.2}).global_bound);
}

TEST(Regime, MonotoneInB) {
  bm::Rng rng(99);
  for (int t = 0; t < 2000; ++t) {
    bm::BlockParams p{10, rng.uniform(), 0.05 + 3.0 * rng.uniform(), 0.05 + 1.2 * rng.uniform()};
    const auto hi = bm::classify_regime(p);
    bm::BlockParams q = p;
    q.b = p.b * rng.uniform();
    if (q.b <= 0.0) continue;
    const auto lo = bm::classify_regime(q);
    if (hi.bottom_right) ASSERT_TRUE(lo.bottom_right);
    if (hi.top_left) ASSERT_TRUE(lo.top_left);
    if (hi.side) ASSERT_TRUE(lo.side);
  }
}

TEST(Regime, PureFunctionOfDeltaBC) {
  for (std::int64_t n : {2, 7, 100}) {
    const auto a = bm::classify_regime({n, 0.6, 1.2, 0.5});
    EXPECT_EQ(a.describe(), bm::classify_regime({1, 0.6, 1.2, 0.5}).describe());
  }
}
