#ifndef HODLR_CHEBYSHEV_HPP
#define HODLR_CHEBYSHEV_HPP

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hodlr/geometry.hpp"
#include "hodlr/kernel.hpp"
#include "hodlr/types.hpp"

namespace hodlr {

/// Chebyshev nodes cos(pi k / p), k = 0..p, in that (descending) order.
/// p = 0 degenerates to the single node 0.
inline Vector chebyshev_nodes(int p) {
  if (p < 0) throw std::invalid_argument("chebyshev_nodes: p must be >= 0");
  if (p == 0) return Vector::Zero(1);
  Vector y(p + 1);
  for (int k = 0; k <= p; ++k) y(k) = std::cos(M_PI * k / p);
  return y;
}

/// Lagrange cardinal values L_j(y) = prod_{k != j} (y - y_k) / (y_j - y_k).
inline Vector lagrange_weights(const Vector& nodes, double y) {
  const Index m = nodes.size();
  Vector w(m);
  for (Index j = 0; j < m; ++j) {
    if (y == nodes(j)) { // exact node: cardinal basis
      w.setZero();
      w(j) = 1.0;
      return w;
    }
  }
  for (Index j = 0; j < m; ++j) {
    double prod = 1.0;
    for (Index k = 0; k < m; ++k) {
      if (k == j) continue;
      const double denom = nodes(j) - nodes(k);
      if (denom == 0.0) throw std::logic_error("lagrange_weights: duplicate nodes");
      prod *= (y - nodes(k)) / denom;
    }
    w(j) = prod;
  }
  return w;
}

/// Tensor-product Chebyshev grid mapped into a hyper-cube. Multi-indices
/// (j_1, ..., j_d) are flattened lexicographically with axis 1 slowest.
/// Per-axis degrees may differ (degree 0 puts the single node at the cube
/// center along that axis).
struct ChebyshevGrid {
  int p = 0;
  int d = 0;
  HyperCube cube;
  std::vector<int> degrees;        // per-axis degree
  std::vector<Vector> axis_ref;    // per-axis reference nodes in [-1, 1]
  PointSet nodes;                  // prod (degrees[a]+1) rows, d columns

  ChebyshevGrid() = default;
  ChebyshevGrid(int degree, const HyperCube& box)
      : ChebyshevGrid(std::vector<int>(box.dim(), degree), box) {}

  ChebyshevGrid(std::vector<int> per_axis_degrees, const HyperCube& box)
      : p(0), d(box.dim()), cube(box), degrees(std::move(per_axis_degrees)) {
    if (static_cast<int>(degrees.size()) != d)
      throw std::invalid_argument("ChebyshevGrid: degree count does not match dimension");
    Index count = 1;
    for (int a = 0; a < d; ++a) {
      if (degrees[a] < 0) throw std::invalid_argument("ChebyshevGrid: negative degree");
      p = std::max(p, degrees[a]);
      axis_ref.push_back(chebyshev_nodes(degrees[a]));
      count *= degrees[a] + 1;
    }
    nodes.resize(count, d);
    const Point c = cube.center();
    const double h = 0.5 * cube.side;
    std::vector<int> idx(d, 0);
    for (Index flat = 0; flat < count; ++flat) {
      for (int a = 0; a < d; ++a) nodes(flat, a) = c(a) + h * axis_ref[a](idx[a]);
      for (int a = d - 1; a >= 0; --a) { // axis 1 slowest
        if (++idx[a] <= degrees[a]) break;
        idx[a] = 0;
      }
    }
  }

  Index size() const { return nodes.rows(); }

  /// Product of per-axis Lagrange weights at a point of the cube.
  Vector tensor_weights(const Point& y) const {
    Vector w = Vector::Ones(1);
    for (int a = 0; a < d; ++a) {
      const double ref = (y(a) - cube.lower(a)) / (0.5 * cube.side) - 1.0;
      const Vector wa = lagrange_weights(axis_ref[a], ref);
      Vector next(w.size() * wa.size());
      for (Index i = 0; i < w.size(); ++i)
        next.segment(i * wa.size(), wa.size()) = w(i) * wa;
      w.swap(next);
    }
    return w;
  }
};

/// Rank-m factorization K ~= U * V(sources) from interpolating the kernel on
/// a Chebyshev grid along the source cube: U(i, k) = F(x_i, y_k) at the grid
/// nodes, V(k, j) = per-axis Lagrange weight products at y_j. Interpolating
/// along a subset of axes drops the remaining axes to degree 0, so m =
/// (p+1)^|axes| always.
struct KernelInterpolant {
  KernelSpec kernel;
  ChebyshevGrid grid;
  Matrix U; // T x m

  Matrix source_weights(const PointSet& sources) const {
    Matrix v(grid.size(), sources.rows());
    for (Index j = 0; j < sources.rows(); ++j) v.col(j) = grid.tensor_weights(sources.row(j));
    return v;
  }

  Matrix approx_matrix(const PointSet& sources) const { return U * source_weights(sources); }
};

inline KernelInterpolant interpolant_factors(const KernelSpec& spec, const PointSet& targets,
                                             const HyperCube& cube, int p,
                                             std::vector<int> axes = {}) {
  if (targets.rows() == 0) throw std::invalid_argument("interpolant_factors: no targets");
  if (targets.cols() != cube.dim())
    throw std::invalid_argument("interpolant_factors: dimension mismatch");
  const int d = cube.dim();
  std::vector<int> degrees(d, 0);
  if (axes.empty()) {
    degrees.assign(d, p);
  } else {
    for (int a : axes) {
      if (a < 0 || a >= d) throw std::invalid_argument("interpolant_factors: axis out of range");
      degrees[a] = p;
    }
  }
  KernelInterpolant ip{spec, ChebyshevGrid(degrees, cube), Matrix()};
  ip.U.resize(targets.rows(), ip.grid.size());
  for (Index i = 0; i < targets.rows(); ++i)
    for (Index k = 0; k < ip.grid.size(); ++k)
      ip.U(i, k) = eval(spec, targets.row(i), ip.grid.nodes.row(k));
  return ip;
}

/// V_d constant of the tensor-product interpolation error bound:
/// V_d = d + sum_{l=2}^{d} 2^{l-1} ((l-1) + 2^{l-1} - 1) / (1 - 1/rho)^{l-1}.
inline double v_d_constant(int d, double rho) {
  if (d < 1) throw std::invalid_argument("v_d_constant: d must be >= 1");
  if (!(rho > 1.0)) throw std::domain_error("v_d_constant: rho must be > 1");
  double sum = static_cast<double>(d);
  const double q = 1.0 - 1.0 / rho;
  for (int l = 2; l <= d; ++l)
    sum += std::pow(2.0, l - 1) * ((l - 1) + std::pow(2.0, l - 1) - 1.0) / std::pow(q, l - 1);
  return sum;
}

/// Max interpolation error over a dense sample of sources in the cube, for
/// each degree in p_list. The cube must be separated from the targets.
inline std::vector<std::pair<int, double>> interpolation_decay(const KernelSpec& spec,
                                                               const PointSet& targets,
                                                               const HyperCube& cube,
                                                               const std::vector<int>& p_list) {
  for (Index i = 0; i < targets.rows(); ++i)
    if (!(cube.dist(Point(targets.row(i))) > 0.0))
      throw std::invalid_argument("interpolation_decay: targets touch the cube");
  const int d = cube.dim();
  int m = 20; // sample sources per axis, capped at 50^4 total
  while (std::pow(double(m), d) > 6.25e6 && m > 2) --m;
  Index count = 1;
  for (int a = 0; a < d; ++a) count *= m;
  PointSet samples(count, d);
  std::vector<int> idx(d, 0);
  for (Index flat = 0; flat < count; ++flat) {
    for (int a = 0; a < d; ++a)
      samples(flat, a) = cube.lower(a) + cube.side * (idx[a] + 1.0) / (m + 1.0);
    for (int a = d - 1; a >= 0; --a) {
      if (++idx[a] < m) break;
      idx[a] = 0;
    }
  }
  const Matrix exact = assemble_dense(spec, targets, samples);
  std::vector<std::pair<int, double>> out;
  for (int p : p_list) {
    const KernelInterpolant ip = interpolant_factors(spec, targets, cube, p);
    const double err = (exact - ip.approx_matrix(samples)).cwiseAbs().maxCoeff();
    out.emplace_back(p, err);
  }
  return out;
}

/// Fitted per-degree decay ratio rho from log err ~= log C - p log rho.
inline double fit_decay_rate(const std::vector<std::pair<int, double>>& decay) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  Index n = 0;
  for (const auto& [p, err] : decay) {
    if (!(err > 0)) continue;
    const double x = p, y = std::log(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("fit_decay_rate: need at least two positive errors");
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return std::exp(-slope);
}

} // namespace hodlr

#endif
