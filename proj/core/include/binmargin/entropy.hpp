#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "binmargin/margins.hpp"
#include "binmargin/table.hpp"

namespace binmargin {

/// Bernoulli entropy h(x) = x ln(1/x) + (1-x) ln(1/(1-x)) in nats; h(0) = h(1) = 0.
double bernoulli_entropy(double x);

/// Sum of per-entry Bernoulli entropies. Entries must lie strictly inside
/// (0, 1); InvalidArgument otherwise.
double entropy_g(const RealMatrix& x);

/// Partial derivative of g at x: ln((1 - x) / x).
inline double entropy_gradient(double x) { return std::log((1.0 - x) / x); }

/// The maximum-entropy point of the binary transportation polytope.
///
/// Free cells carry z = 1 / (1 + exp(row_duals[i] + col_duals[j])). Cells that
/// take the same value in every table with these margins are fixed at that
/// value (0 or 1) and contribute nothing to the entropy.
struct TypicalTable {
  RealMatrix z;
  std::vector<double> row_duals;
  std::vector<double> col_duals;
  double entropy = 0.0;
  double residual = 0.0;
  /// 1 where the cell is forced to 0 or 1 by the margins.
  Grid<std::uint8_t> fixed;
  std::int64_t sweeps = 0;
  std::int64_t newton_steps = 0;

  std::size_t rows() const { return z.rows(); }
  std::size_t cols() const { return z.cols(); }
  bool is_fixed(std::size_t i, std::size_t j) const { return fixed(i, j) != 0; }
};

struct SolverOptions {
  double tol = 1e-10;
  std::int64_t max_iter = 100000;
  /// Residual below which the coordinate sweeps hand over to Newton.
  double newton_switch = 1e-3;
  /// When false, margins that force cells raise NoInterior instead of being
  /// reduced away.
  bool reduce_forced = true;
};

/// Cells that take the same value in every table realizing the margins of
/// `table`. A cell is free iff its row and column lie in one strongly
/// connected component of the exchange graph (row -> col on ones,
/// col -> row on zeros).
Grid<std::uint8_t> forced_cells(const BinaryTable& table);

/// Solves for the typical table by dual coordinate ascent followed by damped
/// Newton on the full dual. Throws Infeasible, NoInterior or NotConverged.
TypicalTable solve_typical(const MarginPair& mp, const SolverOptions& opts = {});

/// Largest absolute row/column margin violation of z.
double margin_residual(const RealMatrix& z, const MarginPair& mp);

/// Block-constant typical table of the block family: top-left 1/(P^2+1),
/// side 1/(PQ+1), bottom-right 1/(Q^2+1).
struct BlockSolution {
  double p_var = 0.0;
  double q_var = 0.0;
  double z_tl = 0.0;
  double z_side = 0.0;
  double z_br = 0.0;
  double residual = 0.0;
  std::int64_t iterations = 0;
};

/// Solves the two block margin equations
///   k z_tl + n z_side = floor(BCn),  k z_side + n z_br = floor(Cn)
/// with k = floor(n^delta), by damped Newton over (ln P, ln Q).
BlockSolution solve_block(const BlockParams& p, double tol = 1e-12, std::int64_t max_iter = 500);

/// n -> infinity limits of the block means.
struct LimitLaw {
  double p_star = 0.0;
  double q_star = 0.0;
  double mean_tl = 0.0;
  double mean_side = 0.0;
  double mean_br = 0.0;
};

/// Throws InvalidArgument when C >= 1 or BC >= 1.
LimitLaw limit_law(const BlockParams& p);

/// ln of the upper bound |M(r,c)| <= e^{g(Z)}, i.e. g(Z) itself.
inline double barvinok_upper_bound(const TypicalTable& t) { return t.entropy; }

}  // namespace binmargin
