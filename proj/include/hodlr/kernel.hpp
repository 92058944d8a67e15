#ifndef HODLR_KERNEL_HPP
#define HODLR_KERNEL_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "hodlr/bessel.hpp"
#include "hodlr/types.hpp"

namespace hodlr {

/// Radial kernel catalog. The two complex-valued kernels (3D Helmholtz
/// Green's function and the Hankel function H2^(1)) are exposed as separate
/// real and imaginary real-valued kernels.
enum class KernelId {
  InverseR,        // 1/r
  LogR,            // log r
  Helmholtz3DReal, // cos(r)/r
  Helmholtz3DImag, // sin(r)/r
  HankelH12Real,   // J2(r)
  HankelH12Imag,   // Y2(r)
  R,               // r
  SinR,            // sin r
  InvSqrt1PlusR,   // 1/sqrt(1+r)
  ExpNegR,         // exp(-r), Matern nu=1/2
  ExpNegR2,        // exp(-r^2), Gaussian
  Custom,
};

/// A kernel function F(x, y) = F(||x - y||_2) plus the value used on the
/// diagonal x == y. Catalog defaults: 0 for the kernels that blow up at
/// r = 0, the natural limit F(0) otherwise; both overridable per run.
struct KernelSpec {
  KernelId id = KernelId::Custom;
  std::optional<double> diagonal_value;
  std::function<double(double)> radial; // used when id == Custom

  static KernelSpec catalog(KernelId id) {
    KernelSpec spec;
    spec.id = id;
    switch (id) {
      case KernelId::InverseR:
      case KernelId::LogR:
      case KernelId::Helmholtz3DReal:
      case KernelId::HankelH12Imag:
        spec.diagonal_value = 0.0; // singular at r = 0
        break;
      case KernelId::Helmholtz3DImag:
      case KernelId::InvSqrt1PlusR:
      case KernelId::ExpNegR:
      case KernelId::ExpNegR2:
        spec.diagonal_value = 1.0;
        break;
      case KernelId::HankelH12Real:
      case KernelId::R:
      case KernelId::SinR:
        spec.diagonal_value = 0.0;
        break;
      case KernelId::Custom:
        throw std::invalid_argument("KernelSpec::catalog: Custom has no catalog entry");
    }
    return spec;
  }

  static KernelSpec custom(std::function<double(double)> f,
                           std::optional<double> diagonal = std::nullopt) {
    KernelSpec spec;
    spec.id = KernelId::Custom;
    spec.radial = std::move(f);
    spec.diagonal_value = diagonal;
    return spec;
  }

  bool singular_at_origin() const {
    switch (id) {
      case KernelId::InverseR:
      case KernelId::LogR:
      case KernelId::Helmholtz3DReal:
      case KernelId::HankelH12Imag:
        return true;
      case KernelId::Custom:
        return !diagonal_value.has_value();
      default:
        return false;
    }
  }

  /// F(r) for r > 0.
  double operator()(double r) const {
    switch (id) {
      case KernelId::InverseR: return 1.0 / r;
      case KernelId::LogR: return std::log(r);
      case KernelId::Helmholtz3DReal: return std::cos(r) / r;
      case KernelId::Helmholtz3DImag: return std::sin(r) / r;
      case KernelId::HankelH12Real: return bessel::j2(r);
      case KernelId::HankelH12Imag: return bessel::y2(r);
      case KernelId::R: return r;
      case KernelId::SinR: return std::sin(r);
      case KernelId::InvSqrt1PlusR: return 1.0 / std::sqrt(1.0 + r);
      case KernelId::ExpNegR: return std::exp(-r);
      case KernelId::ExpNegR2: return std::exp(-r * r);
      case KernelId::Custom: return radial(r);
    }
    throw std::logic_error("KernelSpec: unknown id");
  }
};

inline KernelSpec kernel_from_string(const std::string& name) {
  static const std::pair<const char*, KernelId> table[] = {
      {"one_over_r", KernelId::InverseR},
      {"log_r", KernelId::LogR},
      {"helmholtz3d_re", KernelId::Helmholtz3DReal},
      {"helmholtz3d_im", KernelId::Helmholtz3DImag},
      {"hankel_h12_re", KernelId::HankelH12Real},
      {"hankel_h12_im", KernelId::HankelH12Imag},
      {"r", KernelId::R},
      {"sin_r", KernelId::SinR},
      {"inv_sqrt_1_plus_r", KernelId::InvSqrt1PlusR},
      {"exp_neg_r", KernelId::ExpNegR},
      {"exp_neg_r2", KernelId::ExpNegR2},
  };
  for (const auto& [key, id] : table)
    if (name == key) return KernelSpec::catalog(id);
  throw std::invalid_argument("unknown kernel id: " + name);
}

inline std::string kernel_name(const KernelSpec& spec) {
  switch (spec.id) {
    case KernelId::InverseR: return "one_over_r";
    case KernelId::LogR: return "log_r";
    case KernelId::Helmholtz3DReal: return "helmholtz3d_re";
    case KernelId::Helmholtz3DImag: return "helmholtz3d_im";
    case KernelId::HankelH12Real: return "hankel_h12_re";
    case KernelId::HankelH12Imag: return "hankel_h12_im";
    case KernelId::R: return "r";
    case KernelId::SinR: return "sin_r";
    case KernelId::InvSqrt1PlusR: return "inv_sqrt_1_plus_r";
    case KernelId::ExpNegR: return "exp_neg_r";
    case KernelId::ExpNegR2: return "exp_neg_r2";
    case KernelId::Custom: return "custom";
  }
  return "?";
}

inline double eval_radial(const KernelSpec& spec, double r) {
  if (r == 0.0) {
    if (spec.diagonal_value) return *spec.diagonal_value;
    if (spec.singular_at_origin())
      throw std::runtime_error("kernel eval: r == 0 on a singular kernel with no diagonal value");
    return spec(0.0);
  }
  return spec(r);
}

inline double eval(const KernelSpec& spec, const Point& x, const Point& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("kernel eval: point dimensions differ");
  return eval_radial(spec, (x - y).norm());
}

/// Dense kernel matrix, entry (i, j) = F(targets[i], sources[j]).
/// Entries are evaluated row by row; CSV dumps in that order are bit-exact
/// reproducible.
inline Matrix assemble_dense(const KernelSpec& spec, const PointSet& targets,
                             const PointSet& sources, Index entry_cap = 400'000'000) {
  const Index t = targets.rows(), n = sources.rows();
  if (t == 0 || n == 0) throw std::invalid_argument("assemble_dense: empty point set");
  if (targets.cols() != sources.cols())
    throw std::invalid_argument("assemble_dense: point dimensions differ");
  if (t > entry_cap / n)
    throw std::length_error("assemble_dense: T*N exceeds the entry cap");
  Matrix k(t, n);
  for (Index i = 0; i < t; ++i)
    for (Index j = 0; j < n; ++j)
      k(i, j) = eval_radial(spec, (targets.row(i) - sources.row(j)).norm());
  return k;
}

} // namespace hodlr

#endif
