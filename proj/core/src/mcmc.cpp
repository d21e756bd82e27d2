#include "binmargin/mcmc.hpp"

#include <cmath>
#include <numeric>

#include "binmargin/errors.hpp"
#include "binmargin/parallel.hpp"

namespace binmargin {

void ChainConfig::validate() const {
  if (burn_in < 0) throw InvalidArgument("chain config: burn_in must be >= 0");
  if (thin < 1) throw InvalidArgument("chain config: thin must be >= 1");
}

ChainConfig default_chain_config(const MarginPair& mp, std::uint64_t seed) {
  const double cells = static_cast<double>(mp.row_count() * mp.col_count());
  ChainConfig cfg;
  cfg.burn_in = cells > 1.0 ? static_cast<std::int64_t>(std::ceil(50.0 * cells * std::log(cells))) : 0;
  cfg.thin = std::max<std::int64_t>(1, static_cast<std::int64_t>(cells));
  cfg.seed = seed;
  return cfg;
}

BinaryTable initial_table(const MarginPair& mp) { return greedy_table(mp); }

bool swap_chain_step(BinaryTable& table, Rng& rng) {
  const std::size_t m = table.rows();
  const std::size_t n = table.cols();
  if (m < 2 || n < 2) return false;
  const std::size_t i = rng.below(m);
  std::size_t i2 = rng.below(m - 1);
  if (i2 >= i) ++i2;
  const std::size_t j = rng.below(n);
  std::size_t j2 = rng.below(n - 1);
  if (j2 >= j) ++j2;
  return table.flip_checkerboard(i, i2, j, j2);
}

namespace {

std::vector<BinaryTable> run_chain_with(const MarginPair& mp, const ChainConfig& cfg, std::size_t k, Rng rng) {
  std::vector<BinaryTable> out;
  out.reserve(k);
  stream_chain(mp, cfg, k, rng, [&](std::size_t, const BinaryTable& t) { out.push_back(t); });
  return out;
}

}  // namespace

std::vector<BinaryTable> run_chain(const MarginPair& mp, const ChainConfig& cfg, std::size_t k) {
  return run_chain_with(mp, cfg, k, Rng(cfg.seed));
}

std::vector<std::vector<BinaryTable>> run_chains(const MarginPair& mp, const ChainConfig& cfg, std::size_t k,
                                                 std::size_t chains, std::size_t threads) {
  std::vector<std::vector<BinaryTable>> out(chains);
  parallel_for(chains, threads, [&](std::size_t c) { out[c] = run_chain_with(mp, cfg, k, Rng(cfg.seed, c)); });
  return out;
}

double gelman_rubin(const std::vector<std::vector<double>>& chains) {
  const std::size_t m = chains.size();
  if (m < 2) throw InvalidArgument("gelman_rubin: need at least two chains");
  const std::size_t n = chains.front().size();
  if (n < 2) throw InvalidArgument("gelman_rubin: chains need at least two draws");
  for (const auto& c : chains)
    if (c.size() != n) throw InvalidArgument("gelman_rubin: chains differ in length");

  std::vector<double> means(m);
  double within = 0.0;
  for (std::size_t c = 0; c < m; ++c) {
    means[c] = std::accumulate(chains[c].begin(), chains[c].end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double x : chains[c]) ss += (x - means[c]) * (x - means[c]);
    within += ss / static_cast<double>(n - 1);
  }
  within /= static_cast<double>(m);
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(m);
  double between = 0.0;
  for (double mu : means) between += (mu - grand) * (mu - grand);
  between *= static_cast<double>(n) / static_cast<double>(m - 1);

  if (within <= 0.0) return 1.0;
  const double dn = static_cast<double>(n);
  const double pooled = (dn - 1.0) / dn * within + between / dn;
  return std::sqrt(pooled / within);
}

ChainDiagnostics corner_cell_diagnostics(const MarginPair& mp, const ChainConfig& cfg, std::size_t k,
                                         std::size_t chains, std::size_t threads) {
  const auto runs = run_chains(mp, cfg, k, chains, threads);
  std::vector<std::vector<double>> series(chains);
  ChainDiagnostics d;
  for (std::size_t c = 0; c < chains; ++c) {
    series[c].reserve(k);
    for (const auto& t : runs[c]) series[c].push_back(t(0, 0));
    d.chain_means.push_back(std::accumulate(series[c].begin(), series[c].end(), 0.0) / static_cast<double>(k));
  }
  d.r_hat = gelman_rubin(series);
  return d;
}

RejectionDraw bernoulli_rejection_sample(const TypicalTable& t, const MarginPair& mp, Rng& rng,
                                         std::uint64_t max_tries) {
  const std::size_t m = mp.row_count();
  const std::size_t n = mp.col_count();
  if (t.rows() != m || t.cols() != n) throw InvalidArgument("rejection sampler: typical table shape mismatch");
  RejectionDraw out;
  Grid<std::uint8_t> g(m, n, 0);
  std::vector<std::int64_t> cols(n);
  while (out.tries < max_tries) {
    ++out.tries;
    bool ok = true;
    std::fill(cols.begin(), cols.end(), 0);
    for (std::size_t i = 0; i < m && ok; ++i) {
      std::int64_t row = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const std::uint8_t bit = rng.uniform() < t.z(i, j) ? 1 : 0;
        g(i, j) = bit;
        row += bit;
        cols[j] += bit;
      }
      ok = row == mp.rows()[i];
    }
    if (ok && cols == mp.cols()) {
      out.table.emplace(mp, g);
      return out;
    }
  }
  return out;
}

}  // namespace binmargin
