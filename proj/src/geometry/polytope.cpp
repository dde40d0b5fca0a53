#include "tubempc/geometry/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tubempc/convex/solver.hpp"
#include "tubempc/error.hpp"
#include "tubempc/geometry/hull.hpp"

namespace tubempc::geometry {

namespace {

using Eigen::Index;

int affine_rank(const std::vector<Vector>& pts) {
  if (pts.size() <= 1) return 0;
  const Index d = pts.front().size();
  Matrix X(d, static_cast<Index>(pts.size()) - 1);
  for (std::size_t i = 1; i < pts.size(); ++i) X.col(static_cast<Index>(i) - 1) = pts[i] - pts[0];
  Eigen::JacobiSVD<Matrix> svd(X);
  int r = 0;
  for (Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > kTol) ++r;
  return r;
}

bool has_recession_direction(const Matrix& N) {
  const Index d = N.cols();
  const Index m = N.rows();
  if (m == 0) return true;
  std::vector<Vector> candidates;
  for (Index i = 0; i < d; ++i) candidates.push_back(Vector::Unit(d, i));
  if (d == 2) {
    // Bounded iff consecutive normal angles never leave a gap of pi or more.
    std::vector<double> ang;
    for (Index i = 0; i < m; ++i) ang.push_back(std::atan2(N(i, 1), N(i, 0)));
    std::sort(ang.begin(), ang.end());
    double gap = ang.front() + 2.0 * std::acos(-1.0) - ang.back();
    for (std::size_t i = 1; i < ang.size(); ++i) gap = std::max(gap, ang[i] - ang[i - 1]);
    return gap >= std::acos(-1.0) - 1e-12;
  }
  if (d == 3) {
    for (Index i = 0; i < m; ++i) {
      const Eigen::Vector3d a = N.row(i).transpose();
      for (Index k = 0; k < 3; ++k) candidates.emplace_back(a.cross(Eigen::Vector3d::Unit(k)));
      for (Index j = i + 1; j < m; ++j) candidates.emplace_back(a.cross(Eigen::Vector3d(N.row(j).transpose())));
    }
  }
  for (const auto& c : candidates) {
    const double nrm = c.norm();
    if (nrm < 1e-12) continue;
    for (double sign : {1.0, -1.0}) {
      const Vector r = sign * c / nrm;
      if ((N * r).maxCoeff() <= 1e-12) return true;
    }
  }
  return false;
}

/// LP max d'x over {N x <= o}, via the interior point solver.
double lp_support(const Matrix& N, const Vector& o, const Vector& d) {
  const Index n = N.cols();
  convex::ConvexProgram prog(n);
  prog.q = -d;
  prog.G = N.sparseView();
  prog.h = o;
  const auto sol = convex::solve_convex(prog);
  if (sol.status == convex::SolveStatus::infeasible) throw EmptySetError("polytope is empty");
  if (sol.status != convex::SolveStatus::optimal) throw EmptySetError("support LP did not converge (unbounded set?)");
  return d.dot(sol.x);
}

Vector simplex_mean(const std::vector<Vector>& v) {
  Vector s = Vector::Zero(v.front().size());
  for (const auto& p : v) s += p;
  return s / static_cast<double>(v.size());
}

void accumulate_simplex(const std::vector<Vector>& v, Moments& m) {
  const Index d = v.front().size();
  Matrix E(d, d);
  for (Index i = 0; i < d; ++i) E.col(i) = v[static_cast<std::size_t>(i) + 1] - v[0];
  double fact = 1.0;
  for (Index i = 2; i <= d; ++i) fact *= static_cast<double>(i);
  const double vol = std::abs(E.determinant()) / fact;
  if (vol == 0.0) return;
  Vector sum = Vector::Zero(d);
  Matrix outer = Matrix::Zero(d, d);
  for (const auto& p : v) {
    sum += p;
    outer += p * p.transpose();
  }
  m.volume += vol;
  m.first += vol * sum / static_cast<double>(d + 1);
  m.second += vol / static_cast<double>((d + 1) * (d + 2)) * (outer + sum * sum.transpose());
}

/// Orders coplanar points counter-clockwise around their centroid in the
/// plane with unit normal n.
std::vector<Vector> order_in_plane(std::vector<Vector> pts, const Vector& n) {
  const Vector c = simplex_mean(pts);
  Eigen::Vector3d nn = n.head<3>();
  Eigen::Vector3d u = nn.unitOrthogonal();
  Eigen::Vector3d w = nn.cross(u);
  std::sort(pts.begin(), pts.end(), [&](const Vector& a, const Vector& b) {
    const Eigen::Vector3d da = (a - c).head<3>(), db = (b - c).head<3>();
    return std::atan2(da.dot(w), da.dot(u)) < std::atan2(db.dot(w), db.dot(u));
  });
  return pts;
}

}  // namespace

Polytope Polytope::from_halfspaces(const Matrix& normals, const Vector& offsets) {
  if (normals.rows() != offsets.size()) throw DimensionError("normals and offsets differ in length");
  if (normals.cols() < 1) throw DimensionError("polytope dimension must be positive");
  Polytope p;
  p.dim_ = static_cast<int>(normals.cols());
  p.normals_ = normals;
  p.offsets_ = offsets;
  p.finalize_general(true);
  return p;
}

Polytope Polytope::box(const Vector& lo, const Vector& hi) {
  if (lo.size() != hi.size()) throw DimensionError("box bounds differ in dimension");
  if (lo.size() < 1) throw DimensionError("polytope dimension must be positive");
  if (!lo.allFinite() || !hi.allFinite()) throw EmptySetError("box bounds must be finite");
  for (Index i = 0; i < lo.size(); ++i)
    if (lo(i) > hi(i)) throw EmptySetError("box with lo > hi is empty");
  Polytope p;
  p.dim_ = static_cast<int>(lo.size());
  p.set_box(lo, hi);
  return p;
}

Polytope Polytope::origin(int dim) { return box(Vector::Zero(dim), Vector::Zero(dim)); }

Polytope Polytope::from_points(const std::vector<Vector>& points) {
  HullResult h = convex_hull(points);
  Polytope p;
  p.dim_ = static_cast<int>(points.front().size());
  p.normals_ = std::move(h.normals);
  p.offsets_ = std::move(h.offsets);
  // Keep only points that are genuine vertices of the facet description.
  std::vector<Vector> verts;
  for (auto& v : h.vertices) {
    std::vector<Index> tight;
    for (Index i = 0; i < p.normals_.rows(); ++i)
      if (std::abs(p.normals_.row(i).dot(v) - p.offsets_(i)) <= 1e-8) tight.push_back(i);
    Matrix T(static_cast<Index>(tight.size()), p.dim_);
    for (std::size_t k = 0; k < tight.size(); ++k) T.row(static_cast<Index>(k)) = p.normals_.row(tight[k]);
    if (tight.size() >= static_cast<std::size_t>(p.dim_) && Eigen::FullPivLU<Matrix>(T).rank() == p.dim_)
      verts.push_back(std::move(v));
  }
  p.vertices_ = dedupe_points(std::move(verts), kTol);
  p.finalize_general(false);
  return p;
}

void Polytope::set_box(const Vector& lo, const Vector& hi) {
  is_box_ = true;
  lo_ = lo;
  hi_ = hi;
  const Index d = lo.size();
  normals_ = Matrix::Zero(2 * d, d);
  offsets_.resize(2 * d);
  for (Index i = 0; i < d; ++i) {
    normals_(2 * i, i) = 1.0;
    offsets_(2 * i) = hi(i);
    normals_(2 * i + 1, i) = -1.0;
    offsets_(2 * i + 1) = -lo(i);
  }
  if (d <= kMaxBoxDim) {
    std::vector<Vector> verts;
    const Index count = Index{1} << d;
    for (Index mask = 0; mask < count; ++mask) {
      Vector v(d);
      for (Index i = 0; i < d; ++i) v(i) = ((mask >> i) & 1) ? hi(i) : lo(i);
      verts.push_back(std::move(v));
    }
    vertices_ = dedupe_points(std::move(verts), kTol);
  } else {
    vertices_.reset();
  }
}

void Polytope::finalize_general(bool prune) {
  const Index d = dim_;
  // Normalise rows, drop zero rows, merge parallel duplicates.
  std::vector<Vector> rows;
  std::vector<double> offs;
  for (Index i = 0; i < normals_.rows(); ++i) {
    const Vector a = normals_.row(i).transpose();
    const double nrm = a.norm();
    if (!std::isfinite(nrm) || !std::isfinite(offsets_(i))) throw EmptySetError("non-finite halfspace data");
    if (nrm < 1e-14) {
      if (offsets_(i) < -kTol) throw EmptySetError("polytope is empty (0 <= negative offset)");
      continue;
    }
    const Vector u = a / nrm;
    const double o = offsets_(i) / nrm;
    bool merged = false;
    for (std::size_t k = 0; k < rows.size(); ++k)
      if ((rows[k] - u).cwiseAbs().maxCoeff() < 1e-12) {
        offs[k] = std::min(offs[k], o);
        merged = true;
        break;
      }
    if (!merged) {
      rows.push_back(u);
      offs.push_back(o);
    }
  }
  normals_.resize(static_cast<Index>(rows.size()), d);
  offsets_.resize(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    normals_.row(static_cast<Index>(k)) = rows[k].transpose();
    offsets_(static_cast<Index>(k)) = offs[k];
  }

  if (d <= kMaxGeneralDim) {
    if (has_recession_direction(normals_)) throw EmptySetError("polytope is unbounded");
    if (!vertices_) vertices_ = enumerate_vertices(normals_, offsets_, kTol);
    if (vertices_->empty()) throw EmptySetError("polytope is empty");
    const auto& verts = *vertices_;
    if (prune && affine_rank(verts) == d) {
      std::vector<Index> keep;
      for (Index i = 0; i < normals_.rows(); ++i) {
        std::vector<Vector> tight;
        for (const auto& v : verts)
          if (std::abs(normals_.row(i).dot(v) - offsets_(i)) <= kTol) tight.push_back(v);
        if (static_cast<Index>(tight.size()) >= d && affine_rank(tight) == d - 1) keep.push_back(i);
      }
      Matrix n2(static_cast<Index>(keep.size()), d);
      Vector o2(static_cast<Index>(keep.size()));
      for (std::size_t k = 0; k < keep.size(); ++k) {
        n2.row(static_cast<Index>(k)) = normals_.row(keep[k]);
        o2(static_cast<Index>(k)) = offsets_(keep[k]);
      }
      normals_ = std::move(n2);
      offsets_ = std::move(o2);
    }
  } else {
    if (has_recession_direction(normals_)) throw EmptySetError("polytope is unbounded");
    // Nonempty and bounded by LP with a large safeguard box.
    Matrix N(normals_.rows() + 2 * d, d);
    Vector o(normals_.rows() + 2 * d);
    N.topRows(normals_.rows()) = normals_;
    o.head(normals_.rows()) = offsets_;
    for (Index i = 0; i < d; ++i) {
      N.row(normals_.rows() + 2 * i) = Vector::Unit(d, i).transpose();
      N.row(normals_.rows() + 2 * i + 1) = -Vector::Unit(d, i).transpose();
      o(normals_.rows() + 2 * i) = 1e9;
      o(normals_.rows() + 2 * i + 1) = 1e9;
    }
    for (Index i = 0; i < d; ++i)
      for (double sign : {1.0, -1.0})
        if (lp_support(N, o, sign * Vector::Unit(d, i)) > 1e8) throw EmptySetError("polytope is unbounded");
  }

  // Axis-aligned pairs only: switch to the box representation.
  if (normals_.rows() == 2 * d) {
    Vector lo = Vector::Constant(d, std::numeric_limits<double>::quiet_NaN());
    Vector hi = lo;
    bool axis = true;
    for (Index i = 0; i < normals_.rows() && axis; ++i) {
      Index k;
      const double mx = normals_.row(i).cwiseAbs().maxCoeff(&k);
      if (std::abs(mx - 1.0) > 1e-15 || normals_.row(i).cwiseAbs().sum() > 1.0 + 1e-15) {
        axis = false;
        break;
      }
      if (normals_(i, k) > 0) {
        if (!std::isnan(hi(k))) axis = false;
        hi(k) = offsets_(i);
      } else {
        if (!std::isnan(lo(k))) axis = false;
        lo(k) = -offsets_(i);
      }
    }
    if (axis && lo.allFinite() && hi.allFinite()) {
      for (Index i = 0; i < d; ++i) hi(i) = std::max(hi(i), lo(i));
      set_box(lo, hi);
    }
  }
}

const Vector& Polytope::lo() const {
  if (!is_box_) throw Error("lo() requested on a non-box polytope");
  return lo_;
}

const Vector& Polytope::hi() const {
  if (!is_box_) throw Error("hi() requested on a non-box polytope");
  return hi_;
}

const std::vector<Vector>& Polytope::vertices() const {
  if (!vertices_) throw CapacityError("vertex enumeration is capped at dimension 3 (boxes: 8)");
  return *vertices_;
}

double Polytope::support(const Vector& d) const {
  if (d.size() != dim_) throw DimensionError("support: direction dimension mismatch");
  if (is_box_) {
    double s = 0.0;
    for (Index i = 0; i < d.size(); ++i) s += std::max(d(i) * lo_(i), d(i) * hi_(i));
    return s;
  }
  if (vertices_) {
    double s = -std::numeric_limits<double>::infinity();
    for (const auto& v : *vertices_) s = std::max(s, d.dot(v));
    return s;
  }
  return lp_support(normals_, offsets_, d);
}

bool Polytope::contains(const Vector& x, double tol) const {
  if (x.size() != dim_) throw DimensionError("contains: point dimension mismatch");
  return margin(x) >= -tol;
}

double Polytope::margin(const Vector& x) const {
  if (x.size() != dim_) throw DimensionError("margin: point dimension mismatch");
  if (offsets_.size() == 0) return std::numeric_limits<double>::infinity();
  return (offsets_ - normals_ * x).minCoeff();
}

bool Polytope::has_interior(double tol) const {
  if (is_box_) return ((hi_ - lo_).array() > tol).all();
  if (vertices_ && affine_rank(*vertices_) < dim_) return false;
  return chebyshev_radius() > tol;
}

double Polytope::chebyshev_radius() const {
  if (is_box_) return 0.5 * (hi_ - lo_).minCoeff();
  const Index d = dim_;
  const Index m = normals_.rows();
  convex::ConvexProgram prog(d + 1);
  prog.q(d) = -1.0;
  Matrix G = Matrix::Zero(m + 1, d + 1);
  G.topLeftCorner(m, d) = normals_;
  G.topRightCorner(m, 1).setOnes();
  G(m, d) = -1.0;
  prog.G = G.sparseView();
  prog.h = Vector::Zero(m + 1);
  prog.h.head(m) = offsets_;
  const auto sol = convex::solve_convex(prog);
  if (sol.status != convex::SolveStatus::optimal) return 0.0;
  return std::max(0.0, sol.x(d));
}

Vector Polytope::interior_point() const {
  if (is_box_) return 0.5 * (lo_ + hi_);
  if (vertices_) return simplex_mean(*vertices_);
  const Index d = dim_;
  const Index m = normals_.rows();
  convex::ConvexProgram prog(d + 1);
  prog.q(d) = -1.0;
  Matrix G = Matrix::Zero(m + 1, d + 1);
  G.topLeftCorner(m, d) = normals_;
  G.topRightCorner(m, 1).setOnes();
  G(m, d) = -1.0;
  prog.G = G.sparseView();
  prog.h = Vector::Zero(m + 1);
  prog.h.head(m) = offsets_;
  const auto sol = convex::solve_convex(prog);
  return sol.x.head(d);
}

Polytope Polytope::linear_map(const Matrix& M) const {
  if (M.cols() != dim_) throw DimensionError("linear_map: matrix columns must equal polytope dimension");
  const bool diagonal = M.rows() == M.cols() && (M - Matrix(M.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
  if (is_box_ && diagonal) {
    Vector a = M.diagonal().cwiseProduct(lo_);
    Vector b = M.diagonal().cwiseProduct(hi_);
    return box(a.cwiseMin(b), a.cwiseMax(b));
  }
  if (vertices_ && M.rows() <= kMaxGeneralDim) {
    std::vector<Vector> img;
    img.reserve(vertices_->size());
    for (const auto& v : *vertices_) img.push_back(M * v);
    return from_points(img);
  }
  if (M.rows() == M.cols()) {
    Eigen::FullPivLU<Matrix> lu(M);
    if (lu.isInvertible()) return from_halfspaces(normals_ * lu.inverse(), offsets_);
  }
  throw CapacityError("linear_map: singular map above the vertex-enumeration cap");
}

Polytope Polytope::scaled(double factor) const {
  if (factor < 0.0) return linear_map(factor * Matrix::Identity(dim_, dim_));
  if (factor == 0.0) return origin(dim_);
  if (is_box_) return box(factor * lo_, factor * hi_);
  Polytope p = *this;
  p.offsets_ *= factor;
  if (p.vertices_)
    for (auto& v : *p.vertices_) v *= factor;
  return p;
}

Polytope Polytope::translated(const Vector& shift) const {
  if (shift.size() != dim_) throw DimensionError("translated: dimension mismatch");
  if (is_box_) return box(lo_ + shift, hi_ + shift);
  Polytope p = *this;
  p.offsets_ += normals_ * shift;
  if (p.vertices_)
    for (auto& v : *p.vertices_) v += shift;
  return p;
}

Vector Polytope::bounding_lo() const {
  if (is_box_) return lo_;
  Vector lo(dim_);
  for (Index i = 0; i < dim_; ++i) lo(i) = -support(-Vector::Unit(dim_, i));
  return lo;
}

Vector Polytope::bounding_hi() const {
  if (is_box_) return hi_;
  Vector hi(dim_);
  for (Index i = 0; i < dim_; ++i) hi(i) = support(Vector::Unit(dim_, i));
  return hi;
}

Polytope minkowski_sum(const Polytope& p, const Polytope& q) {
  if (p.dim() != q.dim()) throw DimensionError("minkowski_sum: dimension mismatch");
  if (p.is_box() && q.is_box()) return Polytope::box(p.lo() + q.lo(), p.hi() + q.hi());
  if (p.dim() > kMaxGeneralDim) throw CapacityError("minkowski_sum: general polytopes are capped at dimension 3");
  std::vector<Vector> sums;
  sums.reserve(p.vertices().size() * q.vertices().size());
  for (const auto& a : p.vertices())
    for (const auto& b : q.vertices()) sums.push_back(a + b);
  return Polytope::from_points(sums);
}

Polytope pontryagin_diff(const Polytope& p, const Polytope& q) {
  if (p.dim() != q.dim()) throw DimensionError("pontryagin_diff: dimension mismatch");
  if (p.is_box() && q.is_box()) {
    Vector lo = p.lo() - q.lo();
    Vector hi = p.hi() - q.hi();
    for (Index i = 0; i < lo.size(); ++i) {
      if (lo(i) > hi(i) + kTol) throw EmptySetError("pontryagin_diff: erosion is empty");
      if (lo(i) > hi(i)) lo(i) = hi(i) = 0.5 * (lo(i) + hi(i));
    }
    return Polytope::box(lo, hi);
  }
  Vector off = p.offsets();
  for (Index i = 0; i < off.size(); ++i) off(i) -= q.support(p.normals().row(i).transpose());
  return Polytope::from_halfspaces(p.normals(), off);
}

Polytope cartesian_product(const Polytope& p, const Polytope& q) {
  const int d = p.dim() + q.dim();
  if (p.is_box() && q.is_box()) {
    Vector lo(d), hi(d);
    lo << p.lo(), q.lo();
    hi << p.hi(), q.hi();
    return Polytope::box(lo, hi);
  }
  Matrix N = Matrix::Zero(p.num_rows() + q.num_rows(), d);
  Vector o(p.num_rows() + q.num_rows());
  N.topLeftCorner(p.num_rows(), p.dim()) = p.normals();
  N.bottomRightCorner(q.num_rows(), q.dim()) = q.normals();
  o << p.offsets(), q.offsets();
  return Polytope::from_halfspaces(N, o);
}

Moments moments(const Polytope& p) {
  const Index d = p.dim();
  Moments m;
  m.first = Vector::Zero(d);
  m.second = Matrix::Zero(d, d);
  if (p.is_box()) {
    const Vector w = p.hi() - p.lo();
    m.volume = w.prod();
    if (m.volume == 0.0) return m;
    const Vector c = 0.5 * (p.lo() + p.hi());
    m.first = m.volume * c;
    m.second = m.volume * c * c.transpose();
    for (Index i = 0; i < d; ++i) {
      const double lo = p.lo()(i), hi = p.hi()(i);
      m.second(i, i) = m.volume * (hi * hi + hi * lo + lo * lo) / 3.0;
    }
    return m;
  }
  if (d > kMaxGeneralDim) throw CapacityError("moments: general polytopes are capped at dimension 3");
  const auto& verts = p.vertices();
  if (affine_rank(verts) < d) return m;
  const Vector c = simplex_mean(verts);
  if (d == 1) {
    accumulate_simplex({p.bounding_lo(), p.bounding_hi()}, m);
  } else if (d == 2) {
    std::vector<Vector> ring = verts;
    std::sort(ring.begin(), ring.end(), [&](const Vector& a, const Vector& b) {
      return std::atan2(a(1) - c(1), a(0) - c(0)) < std::atan2(b(1) - c(1), b(0) - c(0));
    });
    for (std::size_t i = 0; i < ring.size(); ++i) accumulate_simplex({c, ring[i], ring[(i + 1) % ring.size()]}, m);
  } else {
    for (Index f = 0; f < p.num_rows(); ++f) {
      std::vector<Vector> face;
      for (const auto& v : verts)
        if (std::abs(p.normals().row(f).dot(v) - p.offsets()(f)) <= kTol) face.push_back(v);
      if (face.size() < 3) continue;
      face = order_in_plane(std::move(face), p.normals().row(f).transpose());
      for (std::size_t i = 1; i + 1 < face.size(); ++i) accumulate_simplex({c, face[0], face[i], face[i + 1]}, m);
    }
  }
  return m;
}

double hausdorff_distance(const Polytope& p, const Polytope& q) {
  if (p.dim() != q.dim()) throw DimensionError("hausdorff_distance: dimension mismatch");
  auto dist_to = [](const Vector& v, const Polytope& set) {
    // Degenerate projections onto a face are inaccurate in the interior point
    // method; rows are unit so the violation is the distance up to kTol.
    const double mg = set.margin(v);
    if (mg >= -kTol) return std::max(0.0, -mg);
    const Index d = set.dim();
    convex::ConvexProgram prog(d);
    prog.P = Matrix(Matrix::Identity(d, d)).sparseView();
    prog.q = -v;
    prog.r = 0.5 * v.squaredNorm();
    prog.G = set.normals().sparseView();
    prog.h = set.offsets();
    const auto sol = convex::solve_convex(prog);
    return (sol.x - v).norm();
  };
  double h = 0.0;
  for (const auto& v : p.vertices()) h = std::max(h, dist_to(v, q));
  for (const auto& v : q.vertices()) h = std::max(h, dist_to(v, p));
  return h;
}

}  // namespace tubempc::geometry
