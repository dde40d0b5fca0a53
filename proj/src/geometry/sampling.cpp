#include "tubempc/geometry/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tubempc::geometry {

namespace {

constexpr int kBurnIn = 64;
constexpr int kThin = 8;

void hit_and_run_step(const Polytope& p, Vector& x, Rng& rng) {
  std::normal_distribution<double> gauss;
  Vector u(p.dim());
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = gauss(rng);
  u.normalize();
  double tmin = -std::numeric_limits<double>::infinity();
  double tmax = std::numeric_limits<double>::infinity();
  const Vector slack = p.offsets() - p.normals() * x;
  const Vector rate = p.normals() * u;
  for (Eigen::Index i = 0; i < rate.size(); ++i) {
    const double s = std::max(slack(i), 0.0);
    if (rate(i) > 1e-15) tmax = std::min(tmax, s / rate(i));
    else if (rate(i) < -1e-15) tmin = std::max(tmin, s / rate(i));
  }
  if (!(tmin <= tmax) || !std::isfinite(tmin) || !std::isfinite(tmax)) return;
  x += std::uniform_real_distribution<double>(tmin, tmax)(rng) * u;
}

}  // namespace

std::vector<Vector> sample_uniform(const Polytope& p, std::size_t count, Rng& rng) {
  std::vector<Vector> out;
  out.reserve(count);
  if (p.is_box()) {
    for (std::size_t k = 0; k < count; ++k) {
      Vector x(p.dim());
      for (int i = 0; i < p.dim(); ++i) {
        const double lo = p.lo()(i), hi = p.hi()(i);
        x(i) = lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
      }
      out.push_back(std::move(x));
    }
    return out;
  }
  if (!p.has_interior()) {
    const auto& verts = p.vertices();
    std::exponential_distribution<double> expo;
    for (std::size_t k = 0; k < count; ++k) {
      Vector x = Vector::Zero(p.dim());
      double total = 0.0;
      for (const auto& v : verts) {
        const double wgt = expo(rng);
        x += wgt * v;
        total += wgt;
      }
      out.push_back(x / total);
    }
    return out;
  }
  Vector x = p.interior_point();
  for (int i = 0; i < kBurnIn; ++i) hit_and_run_step(p, x, rng);
  for (std::size_t k = 0; k < count; ++k) {
    for (int i = 0; i < kThin; ++i) hit_and_run_step(p, x, rng);
    out.push_back(x);
  }
  return out;
}

std::vector<Vector> grid_points(const Polytope& p, int per_dim) {
  const Vector lo = p.bounding_lo(), hi = p.bounding_hi();
  const int d = p.dim();
  std::vector<Vector> out;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  while (true) {
    Vector x(d);
    for (int i = 0; i < d; ++i) {
      const double t = per_dim > 1 ? static_cast<double>(idx[static_cast<std::size_t>(i)]) / (per_dim - 1) : 0.5;
      x(i) = lo(i) + t * (hi(i) - lo(i));
    }
    if (p.contains(x)) out.push_back(std::move(x));
    int k = 0;
    while (k < d && ++idx[static_cast<std::size_t>(k)] == per_dim) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == d) break;
  }
  return out;
}

std::vector<Vector> vertices_and_samples(const Polytope& p, std::size_t count, Rng& rng) {
  std::vector<Vector> out;
  if (p.has_vertices()) out = p.vertices();
  auto s = sample_uniform(p, count, rng);
  out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  return out;
}

}  // namespace tubempc::geometry
