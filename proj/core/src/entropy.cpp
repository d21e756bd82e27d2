#include "binmargin/entropy.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "binmargin/errors.hpp"

namespace binmargin {

namespace {

// z for dual sum s.
double logistic(double s) { return 1.0 / (1.0 + std::exp(s)); }

// ln(1 + e^u) without overflow.
double softplus(double u) { return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u)); }

// Solves sum_k logistic(x + offsets[k]) = target for x. The left side is
// strictly decreasing in x, so a bracket plus safeguarded Newton converges.
double solve_scalar(const std::vector<double>& offsets, double target, double x0) {
  auto eval = [&](double x, double& slope) {
    double sum = 0.0;
    slope = 0.0;
    for (double a : offsets) {
      const double z = logistic(x + a);
      sum += z;
      slope -= z * (1.0 - z);
    }
    return sum - target;
  };

  double slope = 0.0;
  const double f0 = eval(x0, slope);
  double lo = x0;
  double hi = x0;
  double step = 1.0;
  if (f0 > 0.0) {
    hi = x0 + step;
    while (eval(hi, slope) > 0.0) {
      lo = hi;
      step *= 2.0;
      hi += step;
    }
  } else {
    lo = x0 - step;
    while (eval(lo, slope) < 0.0) {
      hi = lo;
      step *= 2.0;
      lo -= step;
    }
  }

  double x = std::clamp(x0, lo, hi);
  const double ftol = 1e-15 * std::max(1.0, target);
  for (int it = 0; it < 200; ++it) {
    const double fx = eval(x, slope);
    if (std::fabs(fx) <= ftol) break;
    if (fx > 0.0)
      lo = x;
    else
      hi = x;
    double next = slope != 0.0 ? x - fx / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 1e-15 * (1.0 + std::fabs(x))) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

// Dual problem restricted to free cells.
struct DualProblem {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<std::vector<std::size_t>> row_free;
  std::vector<std::vector<std::size_t>> col_free;
  std::vector<double> row_target;
  std::vector<double> col_target;
  std::vector<double> lambda;
  std::vector<double> mu;

  double row_sum(std::size_t i) const {
    double s = 0.0;
    for (auto j : row_free[i]) s += logistic(lambda[i] + mu[j]);
    return s;
  }
  double col_sum(std::size_t j) const {
    double s = 0.0;
    for (auto i : col_free[j]) s += logistic(lambda[i] + mu[j]);
    return s;
  }

  double residual() const {
    double r = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      if (!row_free[i].empty()) r = std::max(r, std::fabs(row_sum(i) - row_target[i]));
    for (std::size_t j = 0; j < n; ++j)
      if (!col_free[j].empty()) r = std::max(r, std::fabs(col_sum(j) - col_target[j]));
    return r;
  }

  void sweep() {
    std::vector<double> offsets;
    for (std::size_t i = 0; i < m; ++i) {
      if (row_free[i].empty()) continue;
      offsets.clear();
      for (auto j : row_free[i]) offsets.push_back(mu[j]);
      lambda[i] = solve_scalar(offsets, row_target[i], lambda[i]);
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (col_free[j].empty()) continue;
      offsets.clear();
      for (auto i : col_free[j]) offsets.push_back(lambda[i]);
      mu[j] = solve_scalar(offsets, col_target[j], mu[j]);
    }
  }

  // Damped Newton on the gradient system. Returns true once residual < tol.
  bool newton(double tol, std::int64_t& steps) {
    std::vector<long> row_index(m, -1);
    std::vector<long> col_index(n, -1);
    long dim = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (!row_free[i].empty()) row_index[i] = dim++;
    for (std::size_t j = 0; j < n; ++j)
      if (!col_free[j].empty()) col_index[j] = dim++;

    auto gradient = [&](Eigen::VectorXd& g) {
      g.setZero(dim);
      for (std::size_t i = 0; i < m; ++i) {
        if (row_index[i] < 0) continue;
        for (auto j : row_free[i]) {
          const double z = logistic(lambda[i] + mu[j]);
          g[row_index[i]] -= z;
          g[col_index[j]] -= z;
        }
        g[row_index[i]] += row_target[i];
      }
      for (std::size_t j = 0; j < n; ++j)
        if (col_index[j] >= 0) g[col_index[j]] += col_target[j];
    };

    Eigen::VectorXd g;
    gradient(g);
    double norm = g.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < 100; ++it) {
      if (norm < tol) return true;
      Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
      for (std::size_t i = 0; i < m; ++i) {
        if (row_index[i] < 0) continue;
        for (auto j : row_free[i]) {
          const double z = logistic(lambda[i] + mu[j]);
          const double w = z * (1.0 - z);
          const long a = row_index[i];
          const long b = col_index[j];
          h(a, a) += w;
          h(b, b) += w;
          h(a, b) += w;
          h(b, a) += w;
        }
      }
      // The dual is invariant under lambda += t, mu -= t on each connected
      // component; the ridge pins that direction.
      const double ridge = 1e-12 * std::max(1.0, h.diagonal().maxCoeff());
      h.diagonal().array() += ridge;
      const Eigen::VectorXd step = h.ldlt().solve(-g);
      if (!step.allFinite()) return false;

      const std::vector<double> lambda0 = lambda;
      const std::vector<double> mu0 = mu;
      bool accepted = false;
      double t = 1.0;
      Eigen::VectorXd g_new;
      for (int ls = 0; ls < 40; ++ls) {
        for (std::size_t i = 0; i < m; ++i)
          if (row_index[i] >= 0) lambda[i] = lambda0[i] + t * step[row_index[i]];
        for (std::size_t j = 0; j < n; ++j)
          if (col_index[j] >= 0) mu[j] = mu0[j] + t * step[col_index[j]];
        gradient(g_new);
        const double new_norm = g_new.lpNorm<Eigen::Infinity>();
        if (new_norm < (1.0 - 1e-4 * t) * norm) {
          accepted = true;
          g = g_new;
          norm = new_norm;
          break;
        }
        t *= 0.5;
      }
      ++steps;
      if (!accepted) {
        lambda = lambda0;
        mu = mu0;
        return norm < tol;
      }
    }
    return norm < tol;
  }
};

// Iterative Tarjan over the exchange graph of `table`.
std::vector<int> exchange_components(const BinaryTable& table) {
  const std::size_t m = table.rows();
  const std::size_t n = table.cols();
  const std::size_t v = m + n;
  std::vector<std::vector<std::size_t>> adj(v);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (table(i, j))
        adj[i].push_back(m + j);
      else
        adj[m + j].push_back(i);
    }

  std::vector<int> index(v, -1);
  std::vector<int> low(v, 0);
  std::vector<int> comp(v, -1);
  std::vector<char> on_stack(v, 0);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> call;
  int counter = 0;
  int ncomp = 0;
  for (std::size_t root = 0; root < v; ++root) {
    if (index[root] >= 0) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [node, next] = call.back();
      if (next < adj[node].size()) {
        const std::size_t w = adj[node][next++];
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[node] = std::min(low[node], index[w]);
        }
        continue;
      }
      const std::size_t done = node;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] == index[done]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = ncomp;
        } while (w != done);
        ++ncomp;
      }
    }
  }
  return comp;
}

}  // namespace

double bernoulli_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log(x) - (1.0 - x) * std::log1p(-x);
}

double entropy_g(const RealMatrix& x) {
  double g = 0.0;
  for (double v : x.data()) {
    if (!(v > 0.0 && v < 1.0)) {
      std::ostringstream os;
      os << "entropy_g: entry " << v << " outside the open interval (0, 1)";
      throw InvalidArgument(os.str());
    }
    g += bernoulli_entropy(v);
  }
  return g;
}

Grid<std::uint8_t> forced_cells(const BinaryTable& table) {
  const auto comp = exchange_components(table);
  const std::size_t m = table.rows();
  Grid<std::uint8_t> fixed(m, table.cols(), 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < table.cols(); ++j) fixed(i, j) = comp[i] != comp[m + j] ? 1 : 0;
  return fixed;
}

double margin_residual(const RealMatrix& z, const MarginPair& mp) {
  double r = 0.0;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    double s = 0.0;
    for (double v : z.row(i)) s += v;
    r = std::max(r, std::fabs(s - static_cast<double>(mp.rows()[i])));
  }
  for (std::size_t j = 0; j < z.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < z.rows(); ++i) s += z(i, j);
    r = std::max(r, std::fabs(s - static_cast<double>(mp.cols()[j])));
  }
  return r;
}

TypicalTable solve_typical(const MarginPair& mp, const SolverOptions& opts) {
  if (!check_feasible(mp)) throw Infeasible("solve_typical: margins admit no binary table");
  const BinaryTable base = greedy_table(mp);
  Grid<std::uint8_t> fixed = forced_cells(base);
  const std::size_t m = mp.row_count();
  const std::size_t n = mp.col_count();
  if (!opts.reduce_forced &&
      std::any_of(fixed.data().begin(), fixed.data().end(), [](auto v) { return v != 0; }))
    throw NoInterior("solve_typical: margins force some cells to 0 or 1");

  DualProblem dual;
  dual.m = m;
  dual.n = n;
  dual.row_free.resize(m);
  dual.col_free.resize(n);
  dual.row_target.assign(m, 0.0);
  dual.col_target.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) dual.row_target[i] = static_cast<double>(mp.rows()[i]);
  for (std::size_t j = 0; j < n; ++j) dual.col_target[j] = static_cast<double>(mp.cols()[j]);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (fixed(i, j)) {
        dual.row_target[i] -= base(i, j);
        dual.col_target[j] -= base(i, j);
      } else {
        dual.row_free[i].push_back(j);
        dual.col_free[j].push_back(i);
      }
    }
  dual.lambda.assign(m, 0.0);
  dual.mu.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const auto width = static_cast<double>(dual.row_free[i].size());
    if (width > 0.0) dual.lambda[i] = std::log(width / dual.row_target[i] - 1.0);
  }

  TypicalTable out;
  double residual = dual.residual();
  double newton_switch = opts.newton_switch;
  while (residual >= opts.tol) {
    if (residual < newton_switch) {
      if (dual.newton(opts.tol, out.newton_steps)) {
        residual = dual.residual();
        if (residual < opts.tol) break;
      }
      newton_switch *= 0.1;
    }
    if (out.sweeps >= opts.max_iter) {
      std::ostringstream os;
      os << "solve_typical: no convergence after " << out.sweeps << " sweeps (residual " << residual << ")";
      throw NotConverged(os.str(), residual, out.sweeps);
    }
    dual.sweep();
    ++out.sweeps;
    residual = dual.residual();
  }

  out.z = RealMatrix(m, n, 0.0);
  out.entropy = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (fixed(i, j)) {
        out.z(i, j) = base(i, j);
      } else {
        const double z = logistic(dual.lambda[i] + dual.mu[j]);
        out.z(i, j) = z;
        out.entropy += bernoulli_entropy(z);
      }
    }
  out.row_duals = dual.lambda;
  out.col_duals = dual.mu;
  out.fixed = std::move(fixed);
  out.residual = margin_residual(out.z, mp);
  return out;
}

BlockSolution solve_block(const BlockParams& p, double tol, std::int64_t max_iter) {
  p.validate();
  const auto kk = p.heavy_count();
  const auto len = kk + p.n;
  const auto heavy = p.heavy_margin();
  const auto light = p.light_margin();
  if (heavy > len || light > len) throw Infeasible("solve_block: block margin exceeds the table width");
  if (heavy <= 0 || light <= 0 || heavy >= len || light >= len)
    throw NoInterior("solve_block: a block margin is 0 or saturated");

  const double k = static_cast<double>(kk);
  const double n = static_cast<double>(p.n);
  const double h = static_cast<double>(heavy);
  const double l = static_cast<double>(light);
  const double w = static_cast<double>(len);

  struct Point {
    double a;
    double b;
  };
  auto residuals = [&](Point x, double& f1, double& f2) {
    f1 = k * logistic(2 * x.a) + n * logistic(x.a + x.b) - h;
    f2 = k * logistic(x.a + x.b) + n * logistic(2 * x.b) - l;
    return std::max(std::fabs(f1), std::fabs(f2));
  };
  // Convex dual objective in (a, b) = (ln P, ln Q).
  auto objective = [&](Point x) {
    return 2 * k * h * x.a + 2 * n * l * x.b + k * k * softplus(-2 * x.a) + 2 * k * n * softplus(-(x.a + x.b)) +
           n * n * softplus(-2 * x.b);
  };

  Point x{0.5 * std::log(w / h - 1.0), 0.5 * std::log(w / l - 1.0)};
  double f1 = 0.0;
  double f2 = 0.0;
  double res = residuals(x, f1, f2);
  std::int64_t it = 0;
  for (; it < max_iter && res >= tol; ++it) {
    const double ztl = logistic(2 * x.a);
    const double zs = logistic(x.a + x.b);
    const double zbr = logistic(2 * x.b);
    const double wtl = ztl * (1 - ztl);
    const double ws = zs * (1 - zs);
    const double wbr = zbr * (1 - zbr);
    const double ga = -2 * k * f1;
    const double gb = -2 * n * f2;
    const double haa = 2 * k * (2 * k * wtl + n * ws);
    const double hab = 2 * k * n * ws;
    const double hbb = 2 * n * (k * ws + 2 * n * wbr);
    const double det = haa * hbb - hab * hab;
    if (!(det > 0.0)) break;
    const double da = -(hbb * ga - hab * gb) / det;
    const double db = -(haa * gb - hab * ga) / det;

    const double f0 = objective(x);
    const double slope = ga * da + gb * db;
    double t = 1.0;
    Point next = x;
    double next_res = res;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      next = {x.a + t * da, x.b + t * db};
      double n1 = 0.0;
      double n2 = 0.0;
      next_res = residuals(next, n1, n2);
      if (next_res < res || objective(next) <= f0 + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    x = next;
    res = residuals(x, f1, f2);
  }
  if (res >= tol) {
    std::ostringstream os;
    os << "solve_block: no convergence (residual " << res << ")";
    throw NotConverged(os.str(), res, it);
  }

  BlockSolution s;
  s.p_var = std::exp(x.a);
  s.q_var = std::exp(x.b);
  s.z_tl = logistic(2 * x.a);
  s.z_side = logistic(x.a + x.b);
  s.z_br = logistic(2 * x.b);
  s.residual = res;
  s.iterations = it;
  return s;
}

LimitLaw limit_law(const BlockParams& p) {
  p.validate();
  if (p.c >= 1.0) throw InvalidArgument("limit_law: requires C < 1");
  if (p.b * p.c >= 1.0) throw InvalidArgument("limit_law: requires BC < 1");
  LimitLaw out;
  out.q_star = std::sqrt(1.0 / p.c - 1.0);
  out.p_star = (1.0 / (p.b * p.c) - 1.0) / out.q_star;
  out.mean_br = p.c;
  out.mean_side = p.b * p.c;
  out.mean_tl = p.b * p.b * (1.0 - p.c) / (p.b * p.b - 2.0 * p.b + 1.0 / p.c);
  return out;
}

}  // namespace binmargin
