#pragma once

#include <Eigen/Dense>

#include <vector>

namespace tubempc::geometry {

/// Facet description and extreme points of a point cloud in dimension <= 3.
/// Lower-dimensional clouds get their affine hull encoded as pairs of
/// opposite inequalities.
struct HullResult {
  Eigen::MatrixXd normals;   // unit rows
  Eigen::VectorXd offsets;
  std::vector<Eigen::VectorXd> vertices;
  int affine_dim = 0;
};

HullResult convex_hull(const std::vector<Eigen::VectorXd>& points);

/// All points of {x : N x <= o} that are intersections of dim rows (dim <= 3).
std::vector<Eigen::VectorXd> enumerate_vertices(const Eigen::MatrixXd& normals, const Eigen::VectorXd& offsets,
                                                double tol);

/// Sorts lexicographically and drops points closer than tol (infinity norm).
std::vector<Eigen::VectorXd> dedupe_points(std::vector<Eigen::VectorXd> points, double tol);

}  // namespace tubempc::geometry
