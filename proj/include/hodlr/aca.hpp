#ifndef HODLR_ACA_HPP
#define HODLR_ACA_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hodlr/kernel.hpp"
#include "hodlr/types.hpp"

namespace hodlr {

/// A kernel sub-matrix K(I, J) addressed by contiguous views into target and
/// source point sets. Rows and columns are evaluated on the fly; the full
/// block is never materialized by the routines below.
struct BlockSpec {
  const KernelSpec* kernel = nullptr;
  const PointSet* targets = nullptr;
  const PointSet* sources = nullptr;
  Index row_begin = 0, rows = 0;
  Index col_begin = 0, cols = 0;

  BlockSpec() = default;
  BlockSpec(const KernelSpec& k, const PointSet& t, const PointSet& s)
      : kernel(&k), targets(&t), sources(&s), rows(t.rows()), cols(s.rows()) {}
  BlockSpec(const KernelSpec& k, const PointSet& t, Index rb, Index r, const PointSet& s,
            Index cb, Index c)
      : kernel(&k), targets(&t), sources(&s), row_begin(rb), rows(r), col_begin(cb), cols(c) {}

  double entry(Index i, Index j) const {
    return eval_radial(*kernel,
                       (targets->row(row_begin + i) - sources->row(col_begin + j)).norm());
  }
  Vector row(Index i) const {
    Vector r(cols);
    for (Index j = 0; j < cols; ++j) r(j) = entry(i, j);
    return r;
  }
  Vector col(Index j) const {
    Vector c(rows);
    for (Index i = 0; i < rows; ++i) c(i) = entry(i, j);
    return c;
  }
};

/// Memory-efficient low-rank factor: K(I,J) ~= K(I,tau) U^-1 L^-1 K(sigma,J)
/// where L*U = K(sigma,tau). Only the pivot index sets and the r x r LU
/// factors are stored; the panels K(I,tau), K(sigma,J) are re-evaluated from
/// the kernel on demand. rank 0 encodes the zero block.
struct ACAFactor {
  std::vector<Index> sigma; // row pivots, global target ids
  std::vector<Index> tau;   // column pivots, global source ids
  Matrix L;                 // r x r unit lower triangular
  Matrix U;                 // r x r upper triangular, pivots on the diagonal
  int rank = 0;
  bool tolerance_met = true;

  Index memory_bytes() const {
    return 2 * static_cast<Index>(rank) * rank * static_cast<Index>(sizeof(double)) +
           2 * static_cast<Index>(rank) * static_cast<Index>(sizeof(Index));
  }
};

namespace detail {

// One partially pivoted ACA sweep. Transient u/v vectors live only inside
// this call; the returned factor keeps the pivot cross and its LU factors,
// assembled as a by-product of the sweep:
//   K(sigma,tau)(a,b) = sum_k u_k(sigma_a) v_k(tau_b), u_k(sigma_a) = 0 for
//   a < k and v_k(tau_b) = delta for b <= k, so with D = diag(pivots),
//   L = [u_k(sigma_a)] D^-1 is unit lower and U = D [v_k(tau_b)] is upper.
inline ACAFactor aca_sweep(const BlockSpec& block, double epsilon, Index max_rank) {
  const Index m = block.rows, n = block.cols;
  ACAFactor f;
  std::vector<Vector> us, vs;
  std::vector<double> pivots;
  std::vector<char> used_row(m, 0), used_col(n, 0);
  double fro2 = 0.0; // accumulated ||approximant||_F^2
  Index next_row = 0;
  Index rows_left = m;
  bool met = false;

  while (static_cast<Index>(us.size()) < std::min({m, n, max_rank})) {
    // residual row at next_row
    Vector row = block.row(next_row);
    for (std::size_t k = 0; k < us.size(); ++k) row -= us[k](next_row) * vs[k];
    Index piv_col = -1;
    double piv_abs = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (used_col[j]) continue;
      const double a = std::abs(row(j));
      if (a > piv_abs) {
        piv_abs = a;
        piv_col = j;
      }
    }
    if (piv_col < 0 || piv_abs == 0.0) {
      // zero residual row: skip it and move to the next unused row
      used_row[next_row] = 1;
      if (--rows_left == 0) {
        met = true;
        break;
      }
      for (Index i = 0; i < m; ++i)
        if (!used_row[i]) { next_row = i; break; }
      continue;
    }
    const double pivot = row(piv_col);
    Vector v = row / pivot;
    Vector u = block.col(piv_col);
    for (std::size_t k = 0; k < us.size(); ++k) u -= vs[k](piv_col) * us[k];

    f.sigma.push_back(block.row_begin + next_row);
    f.tau.push_back(block.col_begin + piv_col);
    pivots.push_back(pivot);
    used_row[next_row] = 1;
    used_col[piv_col] = 1;
    --rows_left;

    const double nu = u.norm(), nv = v.norm();
    double cross = 0.0;
    for (std::size_t k = 0; k < us.size(); ++k) cross += us[k].dot(u) * vs[k].dot(v);
    fro2 += 2.0 * cross + nu * nu * nv * nv;
    us.push_back(std::move(u));
    vs.push_back(std::move(v));

    if (nu * nv <= epsilon * std::sqrt(std::max(fro2, 0.0))) {
      met = true;
      break;
    }
    if (rows_left == 0) {
      met = true; // every row pivoted or zero: cross reproduces the block
      break;
    }

    // next row pivot: largest residual-column entry among unused rows
    next_row = -1;
    double best = -1.0;
    const Vector& uu = us.back();
    for (Index i = 0; i < m; ++i) {
      if (used_row[i]) continue;
      const double a = std::abs(uu(i));
      if (a > best) {
        best = a;
        next_row = i;
      }
    }
  }

  const int r = static_cast<int>(us.size());
  f.rank = r;
  f.tolerance_met = met || r == std::min(m, n);
  f.L.resize(r, r);
  f.U.resize(r, r);
  f.L.setZero();
  f.U.setZero();
  for (int k = 0; k < r; ++k) {
    for (int a = 0; a < r; ++a) f.L(a, k) = us[k](f.sigma[a] - block.row_begin) / pivots[k];
    for (int b = 0; b < r; ++b) f.U(k, b) = pivots[k] * vs[k](f.tau[b] - block.col_begin);
  }
  return f;
}

} // namespace detail

/// Partially pivoted ACA with the stopping rule ||u_r|| ||v_r|| <=
/// epsilon * ||A_r||_F. Deterministic: the sweep starts at the first row of
/// I and pivot choices are argmax scans. If a pivot of the assembled LU is
/// smaller than 1e-14 times the largest, the block is recompressed at
/// epsilon/10 and, failing that, truncated before the degenerate pivot.
inline ACAFactor compress(const BlockSpec& block, double epsilon, Index max_rank) {
  if (!(epsilon > 0)) throw std::invalid_argument("aca::compress: epsilon must be positive");
  if (max_rank < 1) throw std::invalid_argument("aca::compress: max_rank must be >= 1");
  if (block.rows == 0 || block.cols == 0)
    throw std::invalid_argument("aca::compress: empty block");

  auto degenerate = [](const ACAFactor& g) {
    if (g.rank == 0) return false;
    const Vector d = g.U.diagonal().cwiseAbs();
    return d.minCoeff() < 1e-14 * d.maxCoeff();
  };

  ACAFactor f = detail::aca_sweep(block, epsilon, max_rank);
  if (degenerate(f)) f = detail::aca_sweep(block, epsilon / 10.0, max_rank);
  if (degenerate(f)) {
    // drop trailing pivots below the conditioning cut
    const Vector d = f.U.diagonal().cwiseAbs();
    const double cut = 1e-14 * d.maxCoeff();
    int r = 0;
    while (r < f.rank && d(r) >= cut) ++r;
    f.sigma.resize(r);
    f.tau.resize(r);
    f.L = Matrix(f.L.topLeftCorner(r, r));
    f.U = Matrix(f.U.topLeftCorner(r, r));
    f.rank = r;
  }
  return f;
}

/// b = K(I,tau) (U^-1 (L^-1 (K(sigma,J) q))), evaluating the r pivot rows and
/// columns on the fly.
inline Vector apply(const ACAFactor& f, const BlockSpec& block, const Vector& q) {
  if (q.size() != block.cols) throw std::invalid_argument("aca::apply: vector length mismatch");
  if (f.rank == 0) return Vector::Zero(block.rows);
  const int r = f.rank;
  Vector t(r);
  for (int k = 0; k < r; ++k) t(k) = block.row(f.sigma[k] - block.row_begin).dot(q);
  f.L.triangularView<Eigen::UnitLower>().solveInPlace(t);
  f.U.triangularView<Eigen::Upper>().solveInPlace(t);
  Vector b = Vector::Zero(block.rows);
  for (int k = 0; k < r; ++k) b += t(k) * block.col(f.tau[k] - block.col_begin);
  return b;
}

} // namespace hodlr

#endif
