#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "binmargin/entropy.hpp"
#include "binmargin/exact_oracle.hpp"
#include "binmargin/margins.hpp"
#include "binmargin/table.hpp"

namespace binmargin {

// Block layout of the block family: with k0 = floor(n^delta) heavy lines,
// top-left is [0, k0)^2, bottom-right is [k0, k0 + n)^2 and the side blocks
// are the two off-diagonal rectangles.
enum class Block { kTopLeft, kSide, kBottomRight };

const char* to_string(Block b);
Block parse_block(const std::string& s);

/// Block containing the cell. Both off-diagonal rectangles map to kSide.
Block block_of(Cell cell, std::int64_t heavy_count);

/// Quadrant index 0..3 (TL, TR, BL, BR); distinguishes the two side blocks.
int quadrant_of(Cell cell, std::int64_t heavy_count);

/// Representative cell: (0,0), (0,k0) and (k0,k0).
Cell representative_cell(Block b, std::int64_t heavy_count);

double block_target(const LimitLaw& law, Block b);

/// d_TV between Ber(ones/total) and Ber(lambda) in the L1 convention:
/// 2 |ones/total - lambda|.
double tv_distance_bernoulli(std::uint64_t ones, std::uint64_t total, double lambda);

/// L1 distance sum_k |p_k - q_k| between two laws on the same support.
double tv_distance(std::span<const double> p, std::span<const double> q);

/// Joint law of k independent Ber(mean) bits, indexed by bit pattern.
std::vector<double> product_bernoulli_law(const std::vector<double>& means);

struct ChiSquare {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

/// Goodness of fit of observed counts against expected probabilities.
ChiSquare chi_square_test(std::span<const std::uint64_t> observed, std::span<const double> expected_prob);

/// Two-sample homogeneity test on a contingency of category counts.
ChiSquare chi_square_two_sample(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

enum class SamplerKind { kExact, kMcmc, kRejection };

const char* to_string(SamplerKind s);
SamplerKind parse_sampler(const std::string& s);

struct SamplerOptions {
  SamplerKind kind = SamplerKind::kMcmc;
  std::optional<std::int64_t> burn_in;
  std::optional<std::int64_t> thin;
  std::uint64_t max_tries = 100'000'000;
  OracleLimits limits;
};

/// Streams k tables from the chosen sampler to fn(index, table). Throws
/// NotConverged when the rejection sampler runs out of tries.
void for_each_table(const MarginPair& mp, const SamplerOptions& opts, std::size_t k, std::uint64_t seed,
                    const std::function<void(std::size_t, const BinaryTable&)>& fn);

/// k tables from the chosen sampler; reproducible from seed.
std::vector<BinaryTable> draw_tables(const MarginPair& mp, const SamplerOptions& opts, std::size_t k,
                                     std::uint64_t seed);

struct CellCount {
  std::uint64_t ones = 0;
  std::uint64_t total = 0;
  double mean() const { return total ? static_cast<double>(ones) / static_cast<double>(total) : 0.0; }
};

/// Sample statistics for tracked cells, cell tuples and one truncated row.
class EmpiricalLaw {
 public:
  void track_cell(Cell c);
  void track_joint(const std::vector<Cell>& cells);
  /// Sum of row `row` over columns [col_begin, col_end) is recorded per sample.
  void track_row_segment(std::size_t row, std::size_t col_begin, std::size_t col_end);

  void add(const BinaryTable& t);
  void merge(const EmpiricalLaw& other);

  std::uint64_t samples() const { return samples_; }
  CellCount cell(Cell c) const;
  /// Pattern counts (2^k entries) for a tracked tuple.
  const std::vector<std::uint64_t>& joint(const std::vector<Cell>& cells) const;
  const std::vector<std::int64_t>& row_sums() const { return row_sums_; }

 private:
  std::uint64_t samples_ = 0;
  std::map<Cell, CellCount> cells_;
  std::map<std::vector<Cell>, std::vector<std::uint64_t>> joints_;
  std::optional<std::size_t> seg_row_;
  std::size_t seg_begin_ = 0;
  std::size_t seg_end_ = 0;
  std::vector<std::int64_t> row_sums_;
};

struct BlockReport {
  Block block = Block::kTopLeft;
  Cell cell;
  std::uint64_t ones = 0;
  std::uint64_t total = 0;
  double empirical = 0.0;
  double target = 0.0;
  double tv = 0.0;
  double stderr_ = 0.0;
  /// Mean over every cell of the block and every sample.
  double pooled = 0.0;
  double pooled_tv = 0.0;
  /// Finite-n P(cell = 1) when the exact oracle is within reach.
  std::optional<double> exact;
};

struct MarginalReport {
  BlockParams params;
  SamplerKind sampler = SamplerKind::kMcmc;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<BlockReport> blocks;

  const BlockReport& block(Block b) const;
};

/// Tables up to this many rows get exact finite-n targets in reports.
inline constexpr std::size_t kExactRowCap = 12;

MarginalReport marginal_experiment(const BlockParams& p, const SamplerOptions& sampler, std::size_t k,
                                   std::uint64_t seed, bool with_exact = true);

/// One marginal experiment per n (other parameters from `base`); point i is
/// seeded with derive_seed(seed, i).
std::vector<MarginalReport> marginal_sweep(const BlockParams& base, const std::vector<std::int64_t>& ns,
                                           const SamplerOptions& sampler, std::size_t k, std::uint64_t seed,
                                           std::size_t threads = 1, bool with_exact = true);

/// Theorem window for the number of jointly observed cells, constant 1:
/// BR n^{1-delta}, TL n^{2 delta - 1} / ln n, SIDE n^delta / ln n.
double joint_window(const BlockParams& p, Block b);

inline constexpr std::size_t kMaxJointCells = 6;

/// k consecutive cells of one row: TL (0, 0..k-1), SIDE (0, k0..k0+k-1),
/// BR (k0, k0..k0+k-1). Throws WindowViolated outside the window.
std::vector<Cell> joint_cells(const BlockParams& p, Block b, std::size_t k_cells);

struct JointReport {
  BlockParams params;
  Block block = Block::kBottomRight;
  std::vector<Cell> cells;
  std::size_t k = 0;
  std::vector<std::uint64_t> pattern_counts;
  std::vector<double> empirical;
  double target_mean = 0.0;
  std::vector<double> target_law;
  /// L1 distance of the empirical pattern law to V_k(target_mean).
  double tv = 0.0;
  /// L1 distance to the product of the empirical cell marginals.
  double tv_product_empirical = 0.0;
  double window = 0.0;
};

JointReport joint_block_experiment(const BlockParams& p, Block b, std::size_t k_cells, std::size_t k_samples,
                                   std::uint64_t seed, const SamplerOptions& sampler = {});

struct ExactJointReport {
  BlockParams params;
  Block block = Block::kBottomRight;
  std::vector<Cell> cells;
  std::vector<double> law;
  std::vector<double> marginals;
  std::vector<double> product_law;
  /// L1 distance of the exact joint law to the product of its marginals.
  double tv_product = 0.0;
};

ExactJointReport exact_joint_block(const BlockParams& p, Block b, std::size_t k_cells,
                                   const OracleLimits& limits = {});

struct MomentReport {
  BlockParams params;
  Block block = Block::kBottomRight;
  std::vector<Cell> cells;
  std::vector<int> powers;
  std::size_t k = 0;
  /// Sample mean of prod X^alpha.
  double empirical = 0.0;
  /// Sample mean of prod X; identical to `empirical` for 0/1 tables.
  double first_moment = 0.0;
  double target = 0.0;
  double gap = 0.0;
  std::optional<double> exact;
};

/// Mixed moments E[prod X_{i_k j_k}^{alpha_k}] over cells of one block.
/// Entries are 0/1, so every power collapses to the first moment.
MomentReport moment_experiment(const BlockParams& p, const std::vector<Cell>& cells, const std::vector<int>& powers,
                               std::size_t k, std::uint64_t seed, const SamplerOptions& sampler = {},
                               bool with_exact = true);

enum class LlnRow { kSide, kBottomRight };
const char* to_string(LlnRow w);
LlnRow parse_lln_row(const std::string& s);

struct LlnPoint {
  std::int64_t n = 0;
  std::int64_t heavy_count = 0;
  std::size_t k = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double target = 0.0;
  double gap = 0.0;
  std::optional<double> exact_mean;
};

struct LlnReport {
  BlockParams params;
  LlnRow which = LlnRow::kSide;
  std::vector<LlnPoint> points;
  bool std_decreasing = false;
  bool gap_decreasing = false;
};

/// Truncated row sums over the light columns: S^S uses row 0 (heavy),
/// S^BR uses row n (light). Throws HypothesisViolated outside the theorem
/// hypotheses for the chosen row.
LlnReport lln_experiment(const BlockParams& base, LlnRow which, const std::vector<std::int64_t>& ns,
                         const SamplerOptions& sampler, std::size_t k, std::uint64_t seed, std::size_t threads = 1,
                         bool with_exact = true);

struct RatePoint {
  std::int64_t n = 0;
  double gap = 0.0;
  std::size_t k = 0;
};

struct BlockFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double theoretical = 0.0;
  /// Some zero gap was replaced by the resolution floor 1/(2k).
  bool floored = false;
};

struct RateFit {
  std::map<std::string, BlockFit> fits;
  /// Smallest r^2 over the fitted blocks.
  double r_squared = 0.0;

  std::map<std::string, double> exponents() const;
};

/// Dominant exponent max(delta - 1, -eta) with eta = 1/2 (BR),
/// delta - 1/2 (TL), delta / 2 (SIDE).
double theoretical_exponent(Block b, double delta);

/// Least-squares slope of ln(gap) on ln(n). Needs >= 4 points.
BlockFit fit_power_law(const std::vector<RatePoint>& points, double theoretical = 0.0);

/// Per-block fit of |pooled mean - limit| over a sweep.
RateFit rate_fit(const std::vector<MarginalReport>& sweep);

}  // namespace binmargin
