#ifndef HODLR_GMRES_HPP
#define HODLR_GMRES_HPP

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hodlr/types.hpp"

namespace hodlr {

/// Square linear operator given by its action on a vector.
struct LinearOperator {
  Index n = 0;
  std::function<Vector(const Vector&)> apply;
};

struct GmresConfig {
  double tol = 1e-6; // relative residual ||f - A x|| / ||f||
  int max_iter = 500;
  std::optional<int> restart; // no restart when absent
};

enum class GmresStatus { Converged, MaxIterations, Breakdown };

struct GmresResult {
  Vector x;
  int iterations = 0;
  double relative_residual = 0.0;
  GmresStatus status = GmresStatus::Converged;
  std::vector<double> residual_history; // one entry per iteration
};

/// Restarted GMRES with modified Gram-Schmidt Arnoldi and Givens rotations.
/// A zero Arnoldi norm (happy breakdown) returns the current iterate as
/// converged-by-breakdown.
inline GmresResult gmres(const LinearOperator& a, const Vector& f, const GmresConfig& cfg) {
  if (!(cfg.tol > 0)) throw std::invalid_argument("gmres: tol must be positive");
  if (cfg.max_iter < 1) throw std::invalid_argument("gmres: max_iter must be >= 1");
  if (f.size() != a.n) throw std::invalid_argument("gmres: rhs length mismatch");

  const Index n = a.n;
  const double fnorm = f.norm();
  GmresResult res;
  res.x = Vector::Zero(n);
  if (fnorm == 0.0) return res;

  const int restart = cfg.restart.value_or(cfg.max_iter);
  int total_iters = 0;
  double rel = 1.0;

  while (total_iters < cfg.max_iter) {
    const Vector r0 = f - a.apply(res.x);
    double beta = r0.norm();
    if (beta / fnorm <= cfg.tol) {
      res.status = GmresStatus::Converged;
      res.relative_residual = beta / fnorm;
      return res;
    }
    const int m = std::min(restart, cfg.max_iter - total_iters);
    Matrix v(n, m + 1);
    Matrix h = Matrix::Zero(m + 1, m);
    Vector cs = Vector::Zero(m), sn = Vector::Zero(m);
    Vector g = Vector::Zero(m + 1);
    v.col(0) = r0 / beta;
    g(0) = beta;

    int k = 0;
    bool breakdown = false;
    for (; k < m; ++k) {
      Vector w = a.apply(v.col(k));
      for (int i = 0; i <= k; ++i) { // modified Gram-Schmidt
        h(i, k) = w.dot(v.col(i));
        w -= h(i, k) * v.col(i);
      }
      h(k + 1, k) = w.norm();
      ++total_iters;
      if (h(k + 1, k) > 0.0) v.col(k + 1) = w / h(k + 1, k);

      for (int i = 0; i < k; ++i) { // apply accumulated rotations
        const double t = cs(i) * h(i, k) + sn(i) * h(i + 1, k);
        h(i + 1, k) = -sn(i) * h(i, k) + cs(i) * h(i + 1, k);
        h(i, k) = t;
      }
      const double denom = std::hypot(h(k, k), h(k + 1, k));
      if (denom == 0.0) { // dead column: leave it out of the update
        breakdown = true;
        break;
      }
      cs(k) = h(k, k) / denom;
      sn(k) = h(k + 1, k) / denom;
      h(k, k) = denom;
      const double gk = g(k);
      g(k) = cs(k) * gk;
      g(k + 1) = -sn(k) * gk;

      rel = std::abs(g(k + 1)) / fnorm;
      res.residual_history.push_back(rel);
      const bool happy = h(k + 1, k) == 0.0;
      if (happy) breakdown = true;
      if (rel <= cfg.tol || happy || total_iters >= cfg.max_iter) {
        ++k;
        break;
      }
    }

    // back-substitute y from the k x k triangular system and update x
    Vector y(k);
    for (int i = k - 1; i >= 0; --i) {
      double s = g(i);
      for (int j = i + 1; j < k; ++j) s -= h(i, j) * y(j);
      y(i) = s / h(i, i);
    }
    res.x += v.leftCols(k) * y;
    res.iterations = total_iters;
    res.relative_residual = rel;

    if (breakdown) {
      res.status = rel <= cfg.tol ? GmresStatus::Converged : GmresStatus::Breakdown;
      return res;
    }
    if (rel <= cfg.tol) {
      res.status = GmresStatus::Converged;
      return res;
    }
  }
  res.status = GmresStatus::MaxIterations;
  return res;
}

} // namespace hodlr

#endif
