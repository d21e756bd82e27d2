#include "binmargin/analysis.hpp"

#include <algorithm>
#include <array>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numeric>

#include "binmargin/errors.hpp"
#include "binmargin/mcmc.hpp"
#include "binmargin/parallel.hpp"
#include "binmargin/rng.hpp"

namespace binmargin {

const char* to_string(Block b) {
  switch (b) {
    case Block::kTopLeft:
      return "TL";
    case Block::kSide:
      return "SIDE";
    case Block::kBottomRight:
      return "BR";
  }
  return "?";
}

Block parse_block(const std::string& s) {
  std::string u = s;
  std::transform(u.begin(), u.end(), u.begin(), [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  if (u == "TL" || u == "TOP_LEFT") return Block::kTopLeft;
  if (u == "SIDE") return Block::kSide;
  if (u == "BR" || u == "BOTTOM_RIGHT") return Block::kBottomRight;
  throw InvalidArgument("unknown block '" + s + "' (expected TL, SIDE or BR)");
}

int quadrant_of(Cell cell, std::int64_t heavy_count) {
  const auto k0 = static_cast<std::size_t>(heavy_count);
  return (cell.row >= k0 ? 2 : 0) + (cell.col >= k0 ? 1 : 0);
}

Block block_of(Cell cell, std::int64_t heavy_count) {
  switch (quadrant_of(cell, heavy_count)) {
    case 0:
      return Block::kTopLeft;
    case 3:
      return Block::kBottomRight;
    default:
      return Block::kSide;
  }
}

Cell representative_cell(Block b, std::int64_t heavy_count) {
  const auto k0 = static_cast<std::size_t>(heavy_count);
  switch (b) {
    case Block::kTopLeft:
      return {0, 0};
    case Block::kSide:
      return {0, k0};
    case Block::kBottomRight:
      return {k0, k0};
  }
  return {};
}

double block_target(const LimitLaw& law, Block b) {
  switch (b) {
    case Block::kTopLeft:
      return law.mean_tl;
    case Block::kSide:
      return law.mean_side;
    case Block::kBottomRight:
      return law.mean_br;
  }
  return 0.0;
}

double tv_distance_bernoulli(std::uint64_t ones, std::uint64_t total, double lambda) {
  if (total == 0) throw InvalidArgument("tv_distance_bernoulli: total must be positive");
  if (ones > total) throw InvalidArgument("tv_distance_bernoulli: ones exceeds total");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("tv_distance_bernoulli: lambda must lie in [0, 1]");
  return 2.0 * std::abs(static_cast<double>(ones) / static_cast<double>(total) - lambda);
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw InvalidArgument("tv_distance: supports differ in size");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return s;
}

std::vector<double> product_bernoulli_law(const std::vector<double>& means) {
  const std::size_t k = means.size();
  std::vector<double> law(std::size_t{1} << k, 1.0);
  for (std::size_t pat = 0; pat < law.size(); ++pat)
    for (std::size_t b = 0; b < k; ++b) law[pat] *= (pat >> b & 1U) ? means[b] : 1.0 - means[b];
  return law;
}

ChiSquare chi_square_test(std::span<const std::uint64_t> observed, std::span<const double> expected_prob) {
  if (observed.size() != expected_prob.size()) throw InvalidArgument("chi_square_test: size mismatch");
  const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
  if (total <= 0.0) throw InvalidArgument("chi_square_test: no observations");
  ChiSquare out;
  std::size_t categories = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = expected_prob[i] * total;
    if (e <= 0.0) {
      if (observed[i] > 0) {
        out.statistic = std::numeric_limits<double>::infinity();
        out.p_value = 0.0;
        return out;
      }
      continue;
    }
    const double d = static_cast<double>(observed[i]) - e;
    out.statistic += d * d / e;
    ++categories;
  }
  if (categories < 2) return out;
  out.dof = categories - 1;
  boost::math::chi_squared dist(static_cast<double>(out.dof));
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

ChiSquare chi_square_two_sample(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  if (a.size() != b.size()) throw InvalidArgument("chi_square_two_sample: size mismatch");
  const double na = static_cast<double>(std::accumulate(a.begin(), a.end(), std::uint64_t{0}));
  const double nb = static_cast<double>(std::accumulate(b.begin(), b.end(), std::uint64_t{0}));
  if (na <= 0.0 || nb <= 0.0) throw InvalidArgument("chi_square_two_sample: empty sample");
  ChiSquare out;
  std::size_t categories = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double col = static_cast<double>(a[i] + b[i]);
    if (col == 0.0) continue;
    const double ea = col * na / (na + nb);
    const double eb = col * nb / (na + nb);
    out.statistic += (static_cast<double>(a[i]) - ea) * (static_cast<double>(a[i]) - ea) / ea;
    out.statistic += (static_cast<double>(b[i]) - eb) * (static_cast<double>(b[i]) - eb) / eb;
    ++categories;
  }
  if (categories < 2) return out;
  out.dof = categories - 1;
  boost::math::chi_squared dist(static_cast<double>(out.dof));
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

const char* to_string(SamplerKind s) {
  switch (s) {
    case SamplerKind::kExact:
      return "exact";
    case SamplerKind::kMcmc:
      return "mcmc";
    case SamplerKind::kRejection:
      return "rejection";
  }
  return "?";
}

SamplerKind parse_sampler(const std::string& s) {
  if (s == "exact") return SamplerKind::kExact;
  if (s == "mcmc") return SamplerKind::kMcmc;
  if (s == "rejection") return SamplerKind::kRejection;
  throw InvalidArgument("unknown sampler '" + s + "' (expected exact, mcmc or rejection)");
}

void for_each_table(const MarginPair& mp, const SamplerOptions& opts, std::size_t k, std::uint64_t seed,
                    const std::function<void(std::size_t, const BinaryTable&)>& fn) {
  switch (opts.kind) {
    case SamplerKind::kExact: {
      ExactSampler sampler(mp, opts.limits);
      Rng rng(seed);
      for (std::size_t s = 0; s < k; ++s) fn(s, sampler.draw(rng));
      return;
    }
    case SamplerKind::kMcmc: {
      ChainConfig cfg = default_chain_config(mp, seed);
      if (opts.burn_in) cfg.burn_in = *opts.burn_in;
      if (opts.thin) cfg.thin = *opts.thin;
      stream_chain(mp, cfg, k, Rng(cfg.seed), fn);
      return;
    }
    case SamplerKind::kRejection: {
      if (!check_feasible(mp)) throw Infeasible("rejection sampler: margins admit no table");
      const TypicalTable z = solve_typical(mp);
      Rng rng(seed);
      for (std::size_t s = 0; s < k; ++s) {
        RejectionDraw d = bernoulli_rejection_sample(z, mp, rng, opts.max_tries);
        if (d.exhausted())
          throw NotConverged("rejection sampler: no acceptance within max_tries", 0.0,
                             static_cast<std::int64_t>(d.tries));
        fn(s, *d.table);
      }
      return;
    }
  }
}

std::vector<BinaryTable> draw_tables(const MarginPair& mp, const SamplerOptions& opts, std::size_t k,
                                     std::uint64_t seed) {
  std::vector<BinaryTable> out;
  out.reserve(k);
  for_each_table(mp, opts, k, seed, [&](std::size_t, const BinaryTable& t) { out.push_back(t); });
  return out;
}

void EmpiricalLaw::track_cell(Cell c) { cells_.try_emplace(c); }

void EmpiricalLaw::track_joint(const std::vector<Cell>& cells) {
  if (cells.empty() || cells.size() > 20) throw InvalidArgument("EmpiricalLaw: joint tuple needs 1..20 cells");
  joints_.try_emplace(cells, std::vector<std::uint64_t>(std::size_t{1} << cells.size(), 0));
}

void EmpiricalLaw::track_row_segment(std::size_t row, std::size_t col_begin, std::size_t col_end) {
  if (col_end < col_begin) throw InvalidArgument("EmpiricalLaw: empty row segment");
  seg_row_ = row;
  seg_begin_ = col_begin;
  seg_end_ = col_end;
}

void EmpiricalLaw::add(const BinaryTable& t) {
  ++samples_;
  for (auto& [c, count] : cells_) {
    count.ones += t(c.row, c.col);
    ++count.total;
  }
  for (auto& [cells, counts] : joints_) {
    std::size_t pat = 0;
    for (std::size_t b = 0; b < cells.size(); ++b)
      if (t(cells[b].row, cells[b].col)) pat |= std::size_t{1} << b;
    ++counts[pat];
  }
  if (seg_row_) {
    std::int64_t s = 0;
    for (std::size_t j = seg_begin_; j < seg_end_; ++j) s += t(*seg_row_, j);
    row_sums_.push_back(s);
  }
}

void EmpiricalLaw::merge(const EmpiricalLaw& other) {
  samples_ += other.samples_;
  for (const auto& [c, count] : other.cells_) {
    auto& mine = cells_[c];
    mine.ones += count.ones;
    mine.total += count.total;
  }
  for (const auto& [cells, counts] : other.joints_) {
    auto [it, inserted] = joints_.try_emplace(cells, counts);
    if (!inserted)
      for (std::size_t p = 0; p < counts.size(); ++p) it->second[p] += counts[p];
  }
  row_sums_.insert(row_sums_.end(), other.row_sums_.begin(), other.row_sums_.end());
}

CellCount EmpiricalLaw::cell(Cell c) const {
  auto it = cells_.find(c);
  if (it == cells_.end()) throw InvalidArgument("EmpiricalLaw: cell not tracked");
  return it->second;
}

const std::vector<std::uint64_t>& EmpiricalLaw::joint(const std::vector<Cell>& cells) const {
  auto it = joints_.find(cells);
  if (it == joints_.end()) throw InvalidArgument("EmpiricalLaw: cell tuple not tracked");
  return it->second;
}

const BlockReport& MarginalReport::block(Block b) const {
  for (const auto& r : blocks)
    if (r.block == b) return r;
  throw InvalidArgument(std::string("marginal report has no block ") + to_string(b));
}

namespace {

constexpr std::array<Block, 3> kBlocks = {Block::kTopLeft, Block::kSide, Block::kBottomRight};

void require_regime(const BlockParams& p) {
  if (classify_regime(p).empty())
    throw HypothesisViolated("parameters (n=" + std::to_string(p.n) + ", delta=" + std::to_string(p.delta) +
                             ", B=" + std::to_string(p.b) + ", C=" + std::to_string(p.c) +
                             ") classify into no regime");
}

bool within_exact_reach(const BlockParams& p) { return static_cast<std::size_t>(p.dimension()) <= kExactRowCap; }

std::optional<double> try_exact(const std::function<double()>& f) {
  try {
    return f();
  } catch (const StateSpaceExceeded&) {
    return std::nullopt;
  }
}

double mean(const std::vector<double>& xs) {
  return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mu = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

bool strictly_decreasing(const std::vector<double>& xs) {
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] < xs[i - 1])) return false;
  return true;
}

}  // namespace

MarginalReport marginal_experiment(const BlockParams& p, const SamplerOptions& sampler, std::size_t k,
                                   std::uint64_t seed, bool with_exact) {
  p.validate();
  require_regime(p);
  if (k == 0) throw InvalidArgument("marginal_experiment: k must be >= 1");
  const MarginPair mp = build_block_margins(p);
  const LimitLaw law = limit_law(p);
  const std::int64_t k0 = p.heavy_count();
  const std::size_t dim = static_cast<std::size_t>(p.dimension());

  EmpiricalLaw emp;
  for (Block b : kBlocks) emp.track_cell(representative_cell(b, k0));
  std::array<std::uint64_t, 3> pooled_ones{};
  for_each_table(mp, sampler, k, seed, [&](std::size_t, const BinaryTable& t) {
    emp.add(t);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        if (t(i, j)) ++pooled_ones[static_cast<std::size_t>(block_of({i, j}, k0))];
  });

  const auto heavy = static_cast<std::uint64_t>(k0);
  const auto light = static_cast<std::uint64_t>(p.n);
  const std::array<std::uint64_t, 3> block_cells = {heavy * heavy, 2 * heavy * light, light * light};

  MarginalReport out;
  out.params = p;
  out.sampler = sampler.kind;
  out.k = k;
  out.seed = seed;
  for (Block b : kBlocks) {
    BlockReport r;
    r.block = b;
    r.cell = representative_cell(b, k0);
    const CellCount cc = emp.cell(r.cell);
    r.ones = cc.ones;
    r.total = cc.total;
    r.empirical = cc.mean();
    r.target = block_target(law, b);
    r.tv = tv_distance_bernoulli(r.ones, r.total, r.target);
    r.stderr_ = std::sqrt(r.empirical * (1.0 - r.empirical) / static_cast<double>(k));
    const auto idx = static_cast<std::size_t>(b);
    const std::uint64_t pooled_total = block_cells[idx] * k;
    r.pooled = static_cast<double>(pooled_ones[idx]) / static_cast<double>(pooled_total);
    r.pooled_tv = tv_distance_bernoulli(pooled_ones[idx], pooled_total, r.target);
    if (with_exact && within_exact_reach(p))
      r.exact = try_exact([&] { return exact_marginal(mp, r.cell, sampler.limits); });
    out.blocks.push_back(r);
  }
  return out;
}

std::vector<MarginalReport> marginal_sweep(const BlockParams& base, const std::vector<std::int64_t>& ns,
                                           const SamplerOptions& sampler, std::size_t k, std::uint64_t seed,
                                           std::size_t threads, bool with_exact) {
  std::vector<MarginalReport> out(ns.size());
  parallel_for(ns.size(), threads, [&](std::size_t i) {
    BlockParams p = base;
    p.n = ns[i];
    out[i] = marginal_experiment(p, sampler, k, derive_seed(seed, i), with_exact);
  });
  return out;
}

double joint_window(const BlockParams& p, Block b) {
  p.validate();
  const double n = static_cast<double>(p.n);
  const double ln_n = std::log(n);
  switch (b) {
    case Block::kBottomRight:
      return std::pow(n, 1.0 - p.delta);
    case Block::kTopLeft:
      return ln_n > 0.0 ? std::pow(n, 2.0 * p.delta - 1.0) / ln_n : 0.0;
    case Block::kSide:
      return ln_n > 0.0 ? std::pow(n, p.delta) / ln_n : 0.0;
  }
  return 0.0;
}

std::vector<Cell> joint_cells(const BlockParams& p, Block b, std::size_t k_cells) {
  if (k_cells == 0) throw InvalidArgument("joint experiment: k_cells must be >= 1");
  if (k_cells > kMaxJointCells)
    throw WindowViolated("joint experiment: k_cells = " + std::to_string(k_cells) + " exceeds the cap of " +
                         std::to_string(kMaxJointCells));
  const double window = joint_window(p, b);
  if (static_cast<double>(k_cells) > window)
    throw WindowViolated("joint experiment: k_cells = " + std::to_string(k_cells) + " exceeds the " +
                         to_string(b) + " window " + std::to_string(window) + " at n = " + std::to_string(p.n));
  const auto k0 = static_cast<std::size_t>(p.heavy_count());
  const std::size_t width = b == Block::kTopLeft ? k0 : static_cast<std::size_t>(p.n);
  if (k_cells > width) throw WindowViolated("joint experiment: block is narrower than k_cells");
  const Cell start = representative_cell(b, p.heavy_count());
  std::vector<Cell> cells;
  for (std::size_t t = 0; t < k_cells; ++t) cells.push_back({start.row, start.col + t});
  return cells;
}

JointReport joint_block_experiment(const BlockParams& p, Block b, std::size_t k_cells, std::size_t k_samples,
                                   std::uint64_t seed, const SamplerOptions& sampler) {
  p.validate();
  if (k_samples == 0) throw InvalidArgument("joint experiment: k_samples must be >= 1");
  JointReport out;
  out.params = p;
  out.block = b;
  out.cells = joint_cells(p, b, k_cells);
  out.k = k_samples;
  out.window = joint_window(p, b);
  out.target_mean = block_target(limit_law(p), b);

  const MarginPair mp = build_block_margins(p);
  EmpiricalLaw emp;
  emp.track_joint(out.cells);
  for (const Cell& c : out.cells) emp.track_cell(c);
  for_each_table(mp, sampler, k_samples, seed, [&](std::size_t, const BinaryTable& t) { emp.add(t); });

  out.pattern_counts = emp.joint(out.cells);
  out.empirical.resize(out.pattern_counts.size());
  for (std::size_t i = 0; i < out.empirical.size(); ++i)
    out.empirical[i] = static_cast<double>(out.pattern_counts[i]) / static_cast<double>(k_samples);
  out.target_law = product_bernoulli_law(std::vector<double>(k_cells, out.target_mean));
  out.tv = tv_distance(out.empirical, out.target_law);
  std::vector<double> marg;
  for (const Cell& c : out.cells) marg.push_back(emp.cell(c).mean());
  out.tv_product_empirical = tv_distance(out.empirical, product_bernoulli_law(marg));
  return out;
}

ExactJointReport exact_joint_block(const BlockParams& p, Block b, std::size_t k_cells, const OracleLimits& limits) {
  p.validate();
  ExactJointReport out;
  out.params = p;
  out.block = b;
  out.cells = joint_cells(p, b, k_cells);
  const JointLaw law = exact_joint_law(build_block_margins(p), out.cells, limits);
  if (law.total == 0) throw Infeasible("exact joint law: margins admit no table");
  out.law = law.probabilities();
  for (std::size_t t = 0; t < k_cells; ++t) out.marginals.push_back(to_double(law.marginal(t)));
  out.product_law = product_bernoulli_law(out.marginals);
  out.tv_product = tv_distance(out.law, out.product_law);
  return out;
}

MomentReport moment_experiment(const BlockParams& p, const std::vector<Cell>& cells, const std::vector<int>& powers,
                               std::size_t k, std::uint64_t seed, const SamplerOptions& sampler, bool with_exact) {
  p.validate();
  if (cells.empty()) throw InvalidArgument("moment experiment: no cells");
  if (cells.size() != powers.size()) throw InvalidArgument("moment experiment: cells and powers differ in length");
  if (cells.size() > 20) throw InvalidArgument("moment experiment: at most 20 cells");
  for (int a : powers)
    if (a < 1) throw InvalidArgument("moment experiment: powers must be >= 1");
  if (k == 0) throw InvalidArgument("moment experiment: k must be >= 1");
  const std::int64_t k0 = p.heavy_count();
  const auto dim = static_cast<std::size_t>(p.dimension());
  for (const Cell& c : cells) {
    if (c.row >= dim || c.col >= dim) throw InvalidArgument("moment experiment: cell outside the table");
    if (quadrant_of(c, k0) != quadrant_of(cells.front(), k0))
      throw MixedBlocks("moment experiment: cells lie in different blocks");
  }

  MomentReport out;
  out.params = p;
  out.block = block_of(cells.front(), k0);
  out.cells = cells;
  out.powers = powers;
  out.k = k;
  const MarginPair mp = build_block_margins(p);
  double sum_power = 0.0;
  double sum_first = 0.0;
  for_each_table(mp, sampler, k, seed, [&](std::size_t, const BinaryTable& t) {
    double prod = 1.0;
    double first = 1.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const double x = t(cells[i].row, cells[i].col);
      prod *= std::pow(x, powers[i]);
      first *= x;
    }
    sum_power += prod;
    sum_first += first;
  });
  out.empirical = sum_power / static_cast<double>(k);
  out.first_moment = sum_first / static_cast<double>(k);
  out.target = std::pow(block_target(limit_law(p), out.block), static_cast<double>(cells.size()));
  out.gap = std::abs(out.empirical - out.target);
  if (with_exact && within_exact_reach(p)) {
    out.exact = try_exact([&] {
      const JointLaw law = exact_joint_law(mp, cells, sampler.limits);
      return law.probabilities().back();
    });
  }
  return out;
}

const char* to_string(LlnRow w) { return w == LlnRow::kSide ? "SIDE" : "BR"; }

LlnRow parse_lln_row(const std::string& s) {
  const Block b = parse_block(s);
  if (b == Block::kSide) return LlnRow::kSide;
  if (b == Block::kBottomRight) return LlnRow::kBottomRight;
  throw InvalidArgument("lln experiment: row must be SIDE or BR");
}

LlnReport lln_experiment(const BlockParams& base, LlnRow which, const std::vector<std::int64_t>& ns,
                         const SamplerOptions& sampler, std::size_t k, std::uint64_t seed, std::size_t threads,
                         bool with_exact) {
  base.validate();
  if (k == 0) throw InvalidArgument("lln experiment: k must be >= 1");
  const double d = base.delta;
  const double b = base.b;
  const double c = base.c;
  if (which == LlnRow::kSide) {
    if (!(d > 0.0 && d <= 0.5 && c > 0.0 && c < 0.75 && b < top_left_b_bound(c)))
      throw HypothesisViolated("lln experiment (SIDE): needs 0 < delta <= 1/2, 0 < C < 3/4, B < " +
                               std::to_string(top_left_b_bound(c)));
  } else if (!(d >= 0.0 && d < 1.0 && c > 0.0 && c < 1.0 && b > 0.0 && b <= 1.0 / c)) {
    throw HypothesisViolated("lln experiment (BR): needs 0 <= delta < 1, 0 < C < 1, 0 < B <= 1/C");
  }
  const double target = which == LlnRow::kSide ? b * c : c;

  LlnReport out;
  out.params = base;
  out.which = which;
  out.points.resize(ns.size());
  parallel_for(ns.size(), threads, [&](std::size_t idx) {
    BlockParams p = base;
    p.n = ns[idx];
    p.validate();
    const MarginPair mp = build_block_margins(p);
    const auto k0 = static_cast<std::size_t>(p.heavy_count());
    const auto n = static_cast<std::size_t>(p.n);
    const std::size_t row = which == LlnRow::kSide ? 0 : n;
    EmpiricalLaw emp;
    emp.track_row_segment(row, k0, k0 + n);
    for_each_table(mp, sampler, k, derive_seed(seed, idx), [&](std::size_t, const BinaryTable& t) { emp.add(t); });

    std::vector<double> scaled;
    scaled.reserve(k);
    for (std::int64_t s : emp.row_sums()) scaled.push_back(static_cast<double>(s) / static_cast<double>(n));
    LlnPoint& pt = out.points[idx];
    pt.n = p.n;
    pt.heavy_count = p.heavy_count();
    pt.k = k;
    pt.mean = mean(scaled);
    pt.stddev = sample_std(scaled);
    pt.target = target;
    pt.gap = std::abs(pt.mean - target);
    if (with_exact && within_exact_reach(p)) {
      pt.exact_mean = try_exact([&] {
        Rational sum = 0;
        for (std::size_t j = k0; j < k0 + n; ++j) sum += exact_marginal_ratio(mp, {row, j}, sampler.limits);
        return to_double(sum / static_cast<std::int64_t>(n));
      });
    }
  });
  std::vector<double> stds;
  std::vector<double> gaps;
  for (const auto& pt : out.points) {
    stds.push_back(pt.stddev);
    gaps.push_back(pt.gap);
  }
  out.std_decreasing = strictly_decreasing(stds);
  out.gap_decreasing = strictly_decreasing(gaps);
  return out;
}

double theoretical_exponent(Block b, double delta) {
  double eta = 0.5;
  if (b == Block::kTopLeft) eta = delta - 0.5;
  if (b == Block::kSide) eta = delta / 2.0;
  return std::max(delta - 1.0, -eta);
}

BlockFit fit_power_law(const std::vector<RatePoint>& points, double theoretical) {
  if (points.size() < 4)
    throw DegenerateFit("rate fit: need at least 4 sweep points, got " + std::to_string(points.size()));
  BlockFit fit;
  fit.theoretical = theoretical;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& pt : points) {
    if (pt.n < 1) throw DegenerateFit("rate fit: n must be positive");
    double g = pt.gap;
    if (!(g > 0.0)) {
      if (pt.k == 0) throw DegenerateFit("rate fit: zero gap without a sample size to floor it");
      g = 1.0 / (2.0 * static_cast<double>(pt.k));
      fit.floored = true;
    }
    xs.push_back(std::log(static_cast<double>(pt.n)));
    ys.push_back(std::log(g));
  }
  const double mx = mean(xs);
  const double my = mean(ys);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 0.0) throw DegenerateFit("rate fit: all sweep points share one n");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  return fit;
}

RateFit rate_fit(const std::vector<MarginalReport>& sweep) {
  if (sweep.size() < 4) throw DegenerateFit("rate fit: need at least 4 sweep points, got " + std::to_string(sweep.size()));
  RateFit out;
  out.r_squared = 1.0;
  for (Block b : kBlocks) {
    std::vector<RatePoint> pts;
    for (const auto& rep : sweep) {
      const BlockReport& r = rep.block(b);
      pts.push_back({rep.params.n, std::abs(r.pooled - r.target), rep.k});
    }
    BlockFit fit = fit_power_law(pts, theoretical_exponent(b, sweep.front().params.delta));
    out.r_squared = std::min(out.r_squared, fit.r_squared);
    out.fits.emplace(to_string(b), fit);
  }
  return out;
}

std::map<std::string, double> RateFit::exponents() const {
  std::map<std::string, double> out;
  for (const auto& [label, fit] : fits) out[label] = fit.slope;
  return out;
}

}  // namespace binmargin
