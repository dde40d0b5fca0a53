#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace tubempc::geometry {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Absolute tolerance shared by every geometric predicate.
inline constexpr double kTol = 1e-9;
/// Vertex enumeration caps.
inline constexpr int kMaxGeneralDim = 3;
inline constexpr int kMaxBoxDim = 8;

/**
 * Bounded, nonempty convex polytope {x : normals * x <= offsets}.
 *
 * Rows are stored with unit-norm normals, so offsets and margins are
 * Euclidean distances. Boxes are flagged and use closed-form fast paths.
 * In dimension <= 3 (boxes: <= 8) the vertex set is enumerated at
 * construction; full-dimensional polytopes are reduced to their facets so
 * that every row is tight at a facet's worth of vertices.
 *
 * Instances are immutable once constructed and safe to share across threads.
 */
class Polytope {
 public:
  /// H-representation. Throws EmptySetError if the set is empty or unbounded.
  static Polytope from_halfspaces(const Matrix& normals, const Vector& offsets);
  /// Axis-aligned box [lo, hi]; lo == hi along an axis is allowed.
  static Polytope box(const Vector& lo, const Vector& hi);
  /// Convex hull of a point cloud (dimension <= 3).
  static Polytope from_points(const std::vector<Vector>& points);
  /// The singleton {0}.
  static Polytope origin(int dim);

  int dim() const { return dim_; }
  bool is_box() const { return is_box_; }
  const Matrix& normals() const { return normals_; }
  const Vector& offsets() const { return offsets_; }
  Eigen::Index num_rows() const { return offsets_.size(); }
  /// Bounds of a box polytope; throws for non-boxes.
  const Vector& lo() const;
  const Vector& hi() const;

  bool has_vertices() const { return vertices_.has_value(); }
  /// Exact vertex set, deduplicated at kTol and sorted lexicographically.
  /// Throws CapacityError above the dimension caps.
  const std::vector<Vector>& vertices() const;

  /// max over the set of d'x.
  double support(const Vector& d) const;
  /// True iff every inequality holds within tol.
  bool contains(const Vector& x, double tol = kTol) const;
  /// min_i offsets_i - normals_i x (negative outside).
  double margin(const Vector& x) const;
  /// True when the set contains a ball of radius > tol.
  bool has_interior(double tol = kTol) const;
  /// A point in the relative interior (vertex centroid or Chebyshev centre).
  Vector interior_point() const;
  /// Radius of the largest Euclidean ball inside the set.
  double chebyshev_radius() const;

  /// Image under the linear map x -> M x.
  Polytope linear_map(const Matrix& M) const;
  Polytope scaled(double factor) const;
  Polytope translated(const Vector& shift) const;

  /// Smallest enclosing box.
  Vector bounding_lo() const;
  Vector bounding_hi() const;

 private:
  Polytope() = default;
  void finalize_general(bool prune);
  void set_box(const Vector& lo, const Vector& hi);

  int dim_ = 0;
  bool is_box_ = false;
  Matrix normals_;
  Vector offsets_;
  Vector lo_, hi_;
  std::optional<std::vector<Vector>> vertices_;
};

/// Exact Minkowski sum. Boxes in any dimension, general polytopes up to dim 3.
Polytope minkowski_sum(const Polytope& p, const Polytope& q);

/// Pontryagin difference {x : x + Q subset of P}; may be lower-dimensional.
/// Throws EmptySetError when the erosion is empty.
Polytope pontryagin_diff(const Polytope& p, const Polytope& q);

/// Cartesian product P x Q.
Polytope cartesian_product(const Polytope& p, const Polytope& q);

/// Zeroth, first and second moments of the uniform measure on a polytope:
/// volume, integral of x, integral of x x'.
struct Moments {
  double volume = 0.0;
  Vector first;
  Matrix second;
};

/// Exact moments; boxes in any dimension, general polytopes up to dim 3.
Moments moments(const Polytope& p);

/// Hausdorff distance between two polytopes that both have vertices.
double hausdorff_distance(const Polytope& p, const Polytope& q);

}  // namespace tubempc::geometry
