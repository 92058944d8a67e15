#ifndef HODLR_TYPES_HPP
#define HODLR_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>

namespace hodlr {

using Index = std::int64_t;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One point = one row of d coordinates.
using Point = Eigen::RowVectorXd;

/// N points in R^d stored as an N x d matrix, one point per row.
using PointSet = Eigen::MatrixXd;

inline double distance(const Point& x, const Point& y) { return (x - y).norm(); }

} // namespace hodlr

#endif
