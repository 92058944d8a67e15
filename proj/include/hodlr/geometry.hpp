#ifndef HODLR_GEOMETRY_HPP
#define HODLR_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "hodlr/types.hpp"

namespace hodlr {

/// Axis-aligned hyper-cube with uniform side length.
struct HyperCube {
  Point lower; // lower corner, d coordinates
  double side = 1.0;

  HyperCube() = default;
  HyperCube(Point lower_corner, double side_length)
      : lower(std::move(lower_corner)), side(side_length) {
    if (!(side > 0.0)) throw std::invalid_argument("HyperCube: side must be positive");
  }

  int dim() const { return static_cast<int>(lower.size()); }
  Point center() const { return lower.array() + 0.5 * side; }
  Point upper() const { return lower.array() + side; }

  /// Child cube c of the uniform 2^d subdivision; bit k of c selects the
  /// upper half along axis k. Child side is exactly half the parent's.
  HyperCube child(std::uint64_t c) const {
    Point lo = lower;
    const double h = 0.5 * side;
    for (int k = 0; k < dim(); ++k)
      if ((c >> k) & 1u) lo(k) += h;
    return HyperCube(lo, h);
  }

  bool contains(const Point& p) const {
    if (p.size() != lower.size()) return false;
    for (int k = 0; k < dim(); ++k)
      if (p(k) < lower(k) || p(k) > lower(k) + side) return false;
    return true;
  }

  double dist(const Point& p) const {
    double s = 0.0;
    for (int k = 0; k < dim(); ++k) {
      const double gap = std::max({0.0, lower(k) - p(k), p(k) - (lower(k) + side)});
      s += gap * gap;
    }
    return std::sqrt(s);
  }

  double dist(const HyperCube& other) const {
    double s = 0.0;
    for (int k = 0; k < dim(); ++k) {
      const double gap = std::max({0.0, lower(k) - (other.lower(k) + other.side),
                                   other.lower(k) - (lower(k) + side)});
      s += gap * gap;
    }
    return std::sqrt(s);
  }
};

/// Integer address of a box in the uniform 2^d subdivision at a given level.
struct BoxIndex {
  int level = 0;
  Eigen::ArrayXi grid; // per-axis coordinate, each in [0, 2^level)

  int dim() const { return static_cast<int>(grid.size()); }
};

/// Classification of a same-level box pair: identical, sharing a
/// d'-dimensional hyper-surface (d'=0 means a single vertex), or at least
/// one box width apart along some axis.
struct InteractionClass {
  enum class Kind { SelfBlock, SharedSurface, FarField };
  Kind kind = Kind::SelfBlock;
  int surface_dim = -1; // d', valid only for SharedSurface

  static InteractionClass self_block() { return {Kind::SelfBlock, -1}; }
  static InteractionClass shared_surface(int d_prime) { return {Kind::SharedSurface, d_prime}; }
  static InteractionClass far_field() { return {Kind::FarField, -1}; }

  bool is_self() const { return kind == Kind::SelfBlock; }
  bool is_far() const { return kind == Kind::FarField; }
  bool is_vertex() const { return kind == Kind::SharedSurface && surface_dim == 0; }
  bool shares_surface(int d_prime) const {
    return kind == Kind::SharedSurface && surface_dim == d_prime;
  }

  friend bool operator==(const InteractionClass& a, const InteractionClass& b) {
    return a.kind == b.kind && (a.kind != Kind::SharedSurface || a.surface_dim == b.surface_dim);
  }

  std::string name() const {
    switch (kind) {
      case Kind::SelfBlock: return "self";
      case Kind::FarField: return "far";
      default: return "surface:" + std::to_string(surface_dim);
    }
  }
};

/// Classify two boxes of the same uniform subdivision by their grid offsets:
/// all offsets zero -> self; any offset >= 2 -> far field; otherwise the pair
/// shares a hyper-surface whose dimension is the number of zero offsets.
inline InteractionClass classify_pair(const BoxIndex& a, const BoxIndex& b) {
  if (a.level != b.level)
    throw std::invalid_argument("classify_pair: boxes are at different levels");
  if (a.grid.size() != b.grid.size())
    throw std::invalid_argument("classify_pair: boxes have different dimensions");
  const Eigen::ArrayXi off = (a.grid - b.grid).abs();
  if ((off == 0).all()) return InteractionClass::self_block();
  if (off.maxCoeff() >= 2) return InteractionClass::far_field();
  return InteractionClass::shared_surface(static_cast<int>((off == 0).count()));
}

// Box ids within a level follow the z-order curve: the children of box i are
// i*2^d + c with bit k of c selecting the upper half along axis k.
inline Eigen::ArrayXi box_grid(int dim, int level, Index id) {
  Eigen::ArrayXi g = Eigen::ArrayXi::Zero(dim);
  for (int lev = level - 1; lev >= 0; --lev) {
    const std::uint64_t c = (static_cast<std::uint64_t>(id) >> (dim * lev)) & ((1u << dim) - 1u);
    for (int k = 0; k < dim; ++k) g(k) = (g(k) << 1) | static_cast<int>((c >> k) & 1u);
  }
  return g;
}

inline Index box_id(int dim, int level, const Eigen::ArrayXi& grid) {
  Index id = 0;
  for (int lev = level - 1; lev >= 0; --lev) {
    std::uint64_t c = 0;
    for (int k = 0; k < dim; ++k) c |= static_cast<std::uint64_t>((grid(k) >> lev) & 1) << k;
    id = (id << dim) | static_cast<Index>(c);
  }
  return id;
}

inline BoxIndex make_box_index(int dim, int level, Index id) {
  return BoxIndex{level, box_grid(dim, level, id)};
}

/// Cube of a box within a subdivided domain.
inline HyperCube box_cube(const HyperCube& domain, const BoxIndex& box) {
  const double h = domain.side / static_cast<double>(Index(1) << box.level);
  Point lo = domain.lower;
  for (int k = 0; k < box.dim(); ++k) lo(k) += h * box.grid(k);
  return HyperCube(lo, h);
}

} // namespace hodlr

#endif
