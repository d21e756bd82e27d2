#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "binmargin/entropy.hpp"
#include "binmargin/margins.hpp"
#include "binmargin/rng.hpp"
#include "binmargin/table.hpp"

namespace binmargin {

struct ChainConfig {
  std::int64_t burn_in = 0;
  std::int64_t thin = 1;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument unless burn_in >= 0 and thin >= 1.
  void validate() const;
};

/// burn_in = ceil(50 mn ln(mn)), thin = mn for an m x n table.
ChainConfig default_chain_config(const MarginPair& mp, std::uint64_t seed);

/// Deterministic starting table (greedy construction). Throws Infeasible.
BinaryTable initial_table(const MarginPair& mp);

/// One step of the checkerboard swap chain, in place: picks rows i != i2 and
/// columns j != j2 uniformly and flips the minor if it is a checkerboard.
/// Returns whether the table changed.
bool swap_chain_step(BinaryTable& table, Rng& rng);

/// Streams k retained tables to fn(index, table) after `burn_in` steps,
/// `thin` steps apart, using the generator passed in.
template <class F>
void stream_chain(const MarginPair& mp, const ChainConfig& cfg, std::size_t k, Rng rng, F&& fn) {
  cfg.validate();
  BinaryTable table = initial_table(mp);
  for (std::int64_t s = 0; s < cfg.burn_in; ++s) swap_chain_step(table, rng);
  for (std::size_t s = 0; s < k; ++s) {
    for (std::int64_t t = 0; t < cfg.thin; ++t) swap_chain_step(table, rng);
    fn(s, static_cast<const BinaryTable&>(table));
  }
}

/// k retained tables after `burn_in` steps, `thin` steps apart.
std::vector<BinaryTable> run_chain(const MarginPair& mp, const ChainConfig& cfg, std::size_t k);

/// Runs `chains` independent chains; chain c uses stream c of cfg.seed.
std::vector<std::vector<BinaryTable>> run_chains(const MarginPair& mp, const ChainConfig& cfg, std::size_t k,
                                                 std::size_t chains, std::size_t threads = 1);

/// Potential scale reduction factor over equal-length chains of a scalar.
double gelman_rubin(const std::vector<std::vector<double>>& chains);

struct ChainDiagnostics {
  double r_hat = 1.0;
  std::vector<double> chain_means;
};

/// Gelman-Rubin on the (0, 0) indicator across independently seeded chains.
ChainDiagnostics corner_cell_diagnostics(const MarginPair& mp, const ChainConfig& cfg, std::size_t k,
                                         std::size_t chains = 4, std::size_t threads = 1);

struct RejectionDraw {
  std::optional<BinaryTable> table;
  std::uint64_t tries = 0;

  bool exhausted() const { return !table.has_value(); }
};

/// Draws Y_ij ~ Ber(z_ij) until the margins match mp exactly, up to
/// max_tries attempts. Conditioned on acceptance the result is uniform on
/// M(r, c). A draw is abandoned at the first row whose sum misses.
RejectionDraw bernoulli_rejection_sample(const TypicalTable& t, const MarginPair& mp, Rng& rng,
                                         std::uint64_t max_tries);

}  // namespace binmargin
