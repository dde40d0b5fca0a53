#include "tubempc/geometry/hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <utility>

#include "tubempc/error.hpp"

namespace tubempc::geometry {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::Vector3d;
using Eigen::VectorXd;

bool lex_less(const VectorXd& a, const VectorXd& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

struct Facets {
  std::vector<VectorXd> normals;
  std::vector<double> offsets;
  std::vector<std::size_t> vertex_ids;  // indices into the input cloud
};

/// Andrew's monotone chain; returns counter-clockwise hull indices.
Facets hull_2d(const std::vector<Vector2d>& pts) {
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pts[a].x() != pts[b].x()) return pts[a].x() < pts[b].x();
    return pts[a].y() < pts[b].y();
  });
  double scale = 1.0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double eps = 1e-13 * scale * scale;
  auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
    return (pts[a] - pts[o]).x() * (pts[b] - pts[o]).y() - (pts[a] - pts[o]).y() * (pts[b] - pts[o]).x();
  };
  std::vector<std::size_t> hull(2 * order.size());
  std::size_t k = 0;
  for (std::size_t idx : order) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], idx) <= eps) --k;
    hull[k++] = idx;
  }
  for (std::size_t i = order.size() - 1, t = k + 1; i-- > 0;) {
    const std::size_t idx = order[i];
    while (k >= t && cross(hull[k - 2], hull[k - 1], idx) <= eps) --k;
    hull[k++] = idx;
  }
  hull.resize(k - 1);

  Facets out;
  out.vertex_ids = hull;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vector2d& a = pts[hull[i]];
    const Vector2d& b = pts[hull[(i + 1) % hull.size()]];
    const Vector2d d = b - a;
    Vector2d n(d.y(), -d.x());
    n.normalize();
    out.normals.emplace_back(VectorXd(n));
    out.offsets.push_back(n.dot(a));
  }
  return out;
}

/// Incremental 3-D hull; coplanar triangles are merged into facets.
Facets hull_3d(const std::vector<Vector3d>& pts) {
  const std::size_t n = pts.size();
  double scale = 1.0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double eps = 1e-11 * scale;

  // Initial tetrahedron from extreme points.
  std::size_t i0 = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (pts[i].x() < pts[i0].x()) i0 = i;
  std::size_t i1 = i0;
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (pts[i] - pts[i0]).norm();
    if (d > best) best = d, i1 = i;
  }
  std::size_t i2 = i0;
  best = -1.0;
  const Vector3d e01 = (pts[i1] - pts[i0]).normalized();
  for (std::size_t i = 0; i < n; ++i) {
    const Vector3d r = pts[i] - pts[i0];
    const double d = (r - e01 * e01.dot(r)).norm();
    if (d > best) best = d, i2 = i;
  }
  std::size_t i3 = i0;
  best = -1.0;
  const Vector3d nrm = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::abs(nrm.dot(pts[i] - pts[i0]));
    if (d > best) best = d, i3 = i;
  }

  struct Face {
    std::size_t v[3];
    Vector3d normal;
    double offset;
    bool alive;
  };
  std::vector<Face> faces;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_face;
  const Vector3d inside = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;

  auto add_face = [&](std::size_t a, std::size_t b, std::size_t c) {
    Vector3d nn = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
    if (nn.dot(pts[a] - inside) < 0.0) {
      std::swap(b, c);
      nn = -nn;
    }
    nn.normalize();
    faces.push_back(Face{{a, b, c}, nn, nn.dot(pts[a]), true});
    const std::size_t id = faces.size() - 1;
    edge_face[{a, b}] = id;
    edge_face[{b, c}] = id;
    edge_face[{c, a}] = id;
  };
  add_face(i0, i1, i2);
  add_face(i0, i1, i3);
  add_face(i0, i2, i3);
  add_face(i1, i2, i3);

  // Farthest points first keeps coplanar extreme points from being skipped.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return (pts[a] - inside).squaredNorm() > (pts[b] - inside).squaredNorm();
  });

  for (std::size_t idx : order) {
    if (idx == i0 || idx == i1 || idx == i2 || idx == i3) continue;
    const Vector3d& p = pts[idx];
    std::vector<std::size_t> visible;
    for (std::size_t f = 0; f < faces.size(); ++f)
      if (faces[f].alive && faces[f].normal.dot(p) - faces[f].offset > eps) visible.push_back(f);
    if (visible.empty()) continue;
    std::vector<char> is_visible(faces.size(), 0);
    for (std::size_t f : visible) is_visible[f] = 1;
    std::vector<std::pair<std::size_t, std::size_t>> horizon;
    for (std::size_t f : visible) {
      for (int e = 0; e < 3; ++e) {
        const std::size_t a = faces[f].v[e];
        const std::size_t b = faces[f].v[(e + 1) % 3];
        auto twin = edge_face.find({b, a});
        if (twin == edge_face.end() || !is_visible[twin->second]) horizon.emplace_back(a, b);
      }
    }
    for (std::size_t f : visible) {
      faces[f].alive = false;
      for (int e = 0; e < 3; ++e) {
        auto it = edge_face.find({faces[f].v[e], faces[f].v[(e + 1) % 3]});
        if (it != edge_face.end() && it->second == f) edge_face.erase(it);
      }
    }
    for (const auto& [a, b] : horizon) {
      Vector3d nn = (pts[b] - pts[a]).cross(p - pts[a]);
      nn.normalize();
      faces.push_back(Face{{a, b, idx}, nn, nn.dot(pts[a]), true});
      const std::size_t id = faces.size() - 1;
      edge_face[{a, b}] = id;
      edge_face[{b, idx}] = id;
      edge_face[{idx, a}] = id;
    }
  }

  Facets out;
  std::vector<char> used(n, 0);
  for (const auto& f : faces) {
    if (!f.alive) continue;
    for (std::size_t v : f.v) used[v] = 1;
    bool merged = false;
    for (std::size_t k = 0; k < out.normals.size(); ++k) {
      if ((out.normals[k] - VectorXd(f.normal)).cwiseAbs().maxCoeff() < 1e-9 &&
          std::abs(out.offsets[k] - f.offset) < 1e-9 * scale) {
        merged = true;
        break;
      }
    }
    if (!merged) {
      out.normals.emplace_back(VectorXd(f.normal));
      out.offsets.push_back(f.offset);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (used[i]) out.vertex_ids.push_back(i);
  return out;
}

}  // namespace

std::vector<VectorXd> dedupe_points(std::vector<VectorXd> points, double tol) {
  std::sort(points.begin(), points.end(), lex_less);
  std::vector<VectorXd> kept;
  for (auto& p : points) {
    bool dup = false;
    for (const auto& k : kept)
      if ((k - p).cwiseAbs().maxCoeff() <= tol) {
        dup = true;
        break;
      }
    if (!dup) kept.push_back(std::move(p));
  }
  return kept;
}

std::vector<VectorXd> enumerate_vertices(const MatrixXd& normals, const VectorXd& offsets, double tol) {
  const Index d = normals.cols();
  const Index m = normals.rows();
  if (d < 1 || d > 3) throw CapacityError("vertex enumeration supports dimensions 1..3");
  std::vector<VectorXd> found;
  std::vector<Index> idx(static_cast<std::size_t>(d));
  auto try_combo = [&]() {
    MatrixXd M(d, d);
    VectorXd rhs(d);
    for (Index k = 0; k < d; ++k) {
      M.row(k) = normals.row(idx[static_cast<std::size_t>(k)]);
      rhs(k) = offsets(idx[static_cast<std::size_t>(k)]);
    }
    Eigen::FullPivLU<MatrixXd> lu(M);
    lu.setThreshold(1e-11);
    if (lu.rank() < d) return;
    VectorXd x = lu.solve(rhs);
    if (!x.allFinite()) return;
    if (((normals * x - offsets).array() <= tol).all()) found.push_back(std::move(x));
  };
  // Lexicographic enumeration of d-subsets.
  for (Index a = 0; a < m; ++a) {
    idx[0] = a;
    if (d == 1) {
      try_combo();
      continue;
    }
    for (Index b = a + 1; b < m; ++b) {
      idx[1] = b;
      if (d == 2) {
        try_combo();
        continue;
      }
      for (Index c = b + 1; c < m; ++c) {
        idx[2] = c;
        try_combo();
      }
    }
  }
  return dedupe_points(std::move(found), tol);
}

HullResult convex_hull(const std::vector<VectorXd>& input) {
  if (input.empty()) throw EmptySetError("convex hull of an empty point set");
  const Index d = input.front().size();
  if (d < 1 || d > 3) throw CapacityError("convex hull supports dimensions 1..3");
  for (const auto& p : input)
    if (p.size() != d) throw DimensionError("convex hull: mixed point dimensions");

  // The tolerances below are absolute; rescale clouds far from unit size.
  {
    VectorXd lo = input.front(), hi = input.front();
    for (const auto& p : input) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const double scale = (hi - lo).maxCoeff();
    if (scale > 0.0 && (scale < 0.1 || scale > 10.0)) {
      const VectorXd mid = 0.5 * (lo + hi);
      std::vector<VectorXd> unit;
      unit.reserve(input.size());
      for (const auto& p : input) unit.push_back((p - mid) / scale);
      HullResult r = convex_hull(unit);
      r.offsets = r.offsets * scale + r.normals * mid;
      for (auto& v : r.vertices) v = v * scale + mid;
      return r;
    }
  }

  const std::vector<VectorXd> pts = dedupe_points(input, 1e-12);
  const Index k = static_cast<Index>(pts.size());
  VectorXd center = VectorXd::Zero(d);
  for (const auto& p : pts) center += p;
  center /= static_cast<double>(k);
  MatrixXd X(d, k);
  for (Index i = 0; i < k; ++i) X.col(i) = pts[static_cast<std::size_t>(i)] - center;

  Eigen::JacobiSVD<MatrixXd> svd(X, Eigen::ComputeFullU);
  const VectorXd sv = svd.singularValues();
  const double thresh = 1e-9 * std::sqrt(static_cast<double>(k));
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++rank;
  const MatrixXd U = svd.matrixU();

  HullResult res;
  res.affine_dim = static_cast<int>(rank);
  std::vector<VectorXd> normals;
  std::vector<double> offsets;
  std::vector<std::size_t> ids;

  if (rank == d) {
    if (d == 1) {
      std::size_t lo = 0, hi = 0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i](0) < pts[lo](0)) lo = i;
        if (pts[i](0) > pts[hi](0)) hi = i;
      }
      normals = {VectorXd::Constant(1, 1.0), VectorXd::Constant(1, -1.0)};
      offsets = {pts[hi](0), -pts[lo](0)};
      ids = {lo, hi};
    } else if (d == 2) {
      std::vector<Vector2d> p2;
      for (const auto& p : pts) p2.emplace_back(p(0), p(1));
      Facets f = hull_2d(p2);
      normals = std::move(f.normals);
      offsets = std::move(f.offsets);
      ids = std::move(f.vertex_ids);
    } else {
      std::vector<Vector3d> p3;
      for (const auto& p : pts) p3.emplace_back(p(0), p(1), p(2));
      Facets f = hull_3d(p3);
      normals = std::move(f.normals);
      offsets = std::move(f.offsets);
      ids = std::move(f.vertex_ids);
    }
  } else {
    const MatrixXd Ur = U.leftCols(rank);
    std::vector<VectorXd> local;
    for (const auto& p : pts) local.emplace_back(Ur.transpose() * (p - center));
    if (rank == 0) {
      ids = {0};
    } else if (rank == 1) {
      std::size_t lo = 0, hi = 0;
      for (std::size_t i = 0; i < local.size(); ++i) {
        if (local[i](0) < local[lo](0)) lo = i;
        if (local[i](0) > local[hi](0)) hi = i;
      }
      const VectorXd u = Ur.col(0);
      normals = {u, -u};
      offsets = {u.dot(pts[hi]), -u.dot(pts[lo])};
      ids = {lo, hi};
    } else {
      std::vector<Vector2d> p2;
      for (const auto& y : local) p2.emplace_back(y(0), y(1));
      Facets f = hull_2d(p2);
      for (std::size_t j = 0; j < f.normals.size(); ++j) {
        VectorXd ng = Ur * f.normals[j];
        ng.normalize();
        double off = -std::numeric_limits<double>::infinity();
        for (std::size_t i : f.vertex_ids) off = std::max(off, ng.dot(pts[i]));
        normals.push_back(ng);
        offsets.push_back(off);
      }
      ids = std::move(f.vertex_ids);
    }
    // Affine hull as opposite inequality pairs.
    for (Index c = rank; c < d; ++c) {
      const VectorXd u = U.col(c);
      double hi = -std::numeric_limits<double>::infinity(), lo = std::numeric_limits<double>::infinity();
      for (const auto& p : pts) {
        hi = std::max(hi, u.dot(p));
        lo = std::min(lo, u.dot(p));
      }
      normals.push_back(u);
      offsets.push_back(hi);
      normals.push_back(-u);
      offsets.push_back(-lo);
    }
  }

  res.normals.resize(static_cast<Index>(normals.size()), d);
  res.offsets.resize(static_cast<Index>(offsets.size()));
  for (std::size_t i = 0; i < normals.size(); ++i) {
    res.normals.row(static_cast<Index>(i)) = normals[i].transpose();
    res.offsets(static_cast<Index>(i)) = offsets[i];
  }
  for (std::size_t i : ids) res.vertices.push_back(pts[i]);
  res.vertices = dedupe_points(std::move(res.vertices), 1e-9);
  return res;
}

}  // namespace tubempc::geometry
