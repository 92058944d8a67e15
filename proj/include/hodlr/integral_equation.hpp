#ifndef HODLR_INTEGRAL_EQUATION_HPP
#define HODLR_INTEGRAL_EQUATION_HPP

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

#include "hodlr/gmres.hpp"
#include "hodlr/hmatrix.hpp"
#include "hodlr/kernel.hpp"

namespace hodlr {

/// Second-kind Fredholm collocation problem on a uniform grid in [-1,1]^d:
/// discrete operator A = I + h^d * F with the singular self-cell replaced by
/// a zero diagonal. The d = 4 default kernel is the 4D Laplace Green's
/// function -1/(4 pi^2 r^2).
struct IeProblem {
  int dim = 4;
  int n_per_dim = 0;
  PointSet points; // n^d cell centers
  double weight = 0.0;
  KernelSpec kernel;

  static IeProblem make(int d, int n, KernelSpec kernel) {
    if (d < 1 || n < 1) throw std::invalid_argument("IeProblem: d and n must be >= 1");
    IeProblem p;
    p.dim = d;
    p.n_per_dim = n;
    p.kernel = std::move(kernel);
    p.weight = std::pow(2.0 / n, d);
    Index count = 1;
    for (int a = 0; a < d; ++a) count *= n;
    p.points.resize(count, d);
    std::vector<int> idx(d, 0);
    for (Index flat = 0; flat < count; ++flat) {
      for (int a = 0; a < d; ++a) p.points(flat, a) = -1.0 + (idx[a] + 0.5) * (2.0 / n);
      for (int a = d - 1; a >= 0; --a) {
        if (++idx[a] < n) break;
        idx[a] = 0;
      }
    }
    return p;
  }

  static IeProblem laplace4d(int n) {
    return make(4, n,
                KernelSpec::custom([](double r) { return -1.0 / (4.0 * M_PI * M_PI * r * r); },
                                   0.0));
  }

  Index size() const { return points.rows(); }
};

enum class IeAccel { Dense, HODLRdD, Strong, WeakAll };

inline const char* accel_name(IeAccel a) {
  switch (a) {
    case IeAccel::Dense: return "dense";
    case IeAccel::HODLRdD: return "hodlrdd";
    case IeAccel::Strong: return "strong";
    case IeAccel::WeakAll: return "weakall";
  }
  return "?";
}

struct IeOperatorOptions {
  Index n_max = 1000;
  double aca_epsilon = 1e-6;
  int threads = 1;
};

/// x -> x + weight * (F x); the kernel product runs dense or through a
/// hierarchical representation. The returned operator owns its storage.
inline LinearOperator assemble_ie_operator(const IeProblem& problem, IeAccel accel,
                                           const IeOperatorOptions& opts = {}) {
  const Index n = problem.size();
  const double w = problem.weight;
  if (accel == IeAccel::Dense) {
    auto k = std::make_shared<Matrix>(assemble_dense(problem.kernel, problem.points,
                                                     problem.points));
    return {n, [k, w](const Vector& x) { return x + w * (*k * x); }};
  }
  const AdmissibilityPolicy policy = accel == IeAccel::Strong    ? AdmissibilityPolicy::Strong
                                     : accel == IeAccel::WeakAll ? AdmissibilityPolicy::WeakAll
                                                                 : AdmissibilityPolicy::WeakDD;
  HyperCube domain(Point::Constant(problem.dim, -1.0), 2.0);
  HMatrixOptions hopts;
  hopts.threads = opts.threads;
  auto built = std::make_shared<std::pair<HMatrix, BuildReport>>(HMatrix::initialize(
      problem.points, domain, problem.kernel, policy, opts.n_max, opts.aca_epsilon, hopts));
  return {n, [built, w](const Vector& x) { return x + w * built->first.matvec(x); }};
}

/// Manufactured-solution check: draw a random sigma, form f = A sigma with
/// the same operator, solve, and return ||sigma_c - sigma|| / ||sigma||.
/// Throws on GMRES failure (max iterations without reaching tol).
inline double manufactured_check(const IeProblem& problem, IeAccel accel,
                                 const GmresConfig& cfg, std::uint64_t seed = 0,
                                 const IeOperatorOptions& opts = {}) {
  const LinearOperator a = assemble_ie_operator(problem, accel, opts);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Vector sigma(a.n);
  for (Index i = 0; i < a.n; ++i) sigma(i) = uni(rng);
  const Vector f = a.apply(sigma);
  const GmresResult res = gmres(a, f, cfg);
  if (res.status == GmresStatus::MaxIterations)
    throw std::runtime_error("manufactured_check: GMRES did not converge");
  return (res.x - sigma).norm() / sigma.norm();
}

} // namespace hodlr

#endif
