#include <doctest.h>

#include <cmath>
#include <random>

#include "tubempc/error.hpp"
#include "tubempc/geometry/hull.hpp"
#include "tubempc/geometry/polytope.hpp"
#include "tubempc/geometry/sampling.hpp"

using namespace tubempc;
using namespace tubempc::geometry;

namespace {

Vector v1(double a) { return Vector::Constant(1, a); }
Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

Polytope interval(double lo, double hi) { return Polytope::box(v1(lo), v1(hi)); }

Polytope diamond() {
  Matrix N(4, 2);
  N << 1, 1, 1, -1, -1, 1, -1, -1;
  return Polytope::from_halfspaces(N, Vector::Ones(4));
}

Polytope unit_square() { return Polytope::box(v2(-1, -1), v2(1, 1)); }

bool same_point_set(std::vector<Vector> a, std::vector<Vector> b, double tol) {
  if (a.size() != b.size()) return false;
  for (const auto& p : a) {
    bool found = false;
    for (const auto& q : b) found = found || (p - q).cwiseAbs().maxCoeff() <= tol;
    if (!found) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("interval sums and erosions") {
  const auto s = minkowski_sum(interval(-0.1, 0.1), interval(-0.1, 0.1));
  CHECK(s.lo()(0) == doctest::Approx(-0.2));
  CHECK(s.hi()(0) == doctest::Approx(0.2));
  const auto d = pontryagin_diff(interval(-2, 2), interval(-0.2, 0.2));
  CHECK(d.lo()(0) == doctest::Approx(-1.8));
  CHECK(d.hi()(0) == doctest::Approx(1.8));
  CHECK_THROWS_AS(pontryagin_diff(interval(-0.1, 0.1), interval(-0.2, 0.2)), EmptySetError);
}

TEST_CASE("sum and erosion with the origin are identities") {
  const auto p = diamond();
  const auto o = Polytope::origin(2);
  CHECK(hausdorff_distance(minkowski_sum(p, o), p) <= 1e-9);
  CHECK(hausdorff_distance(pontryagin_diff(p, o), p) <= 1e-9);
}

TEST_CASE("square plus diamond is an octagon") {
  const auto sum = minkowski_sum(unit_square(), diamond());
  // Brute-force oracle: hull of all pairwise vertex sums.
  const auto sq = unit_square();
  const auto di = diamond();
  std::vector<Vector> pts;
  for (const auto& a : sq.vertices())
    for (const auto& b : di.vertices()) pts.push_back(a + b);
  const auto hull = convex_hull(pts);
  CHECK(sum.vertices().size() == 8);
  CHECK(same_point_set(sum.vertices(), hull.vertices, 1e-9));
  CHECK(sum.support(v2(1, 0)) == doctest::Approx(2.0));
  CHECK(sum.support(v2(1, 1) / std::sqrt(2.0)) == doctest::Approx(1.5 * std::sqrt(2.0)));
  for (const auto& v : sum.vertices()) {
    int tight = 0;
    for (Eigen::Index i = 0; i < sum.num_rows(); ++i)
      if (std::abs(sum.normals().row(i).dot(v) - sum.offsets()(i)) <= 1e-9) ++tight;
    CHECK(tight >= 2);
  }
}

TEST_CASE("support function values") {
  CHECK(interval(-1, 2).support(v1(1)) == doctest::Approx(2.0));
  const auto w = interval(-0.1, 0.1);
  CHECK(w.support(v1(1)) == doctest::Approx(-w.support(v1(-1)) * -1.0));
  CHECK(diamond().support(v2(1, 1)) == doctest::Approx(1.0));
}

TEST_CASE("membership") {
  const auto p = interval(-0.2, 0.2);
  CHECK(p.contains(v1(0.0), 1e-9));
  CHECK(p.contains(v1(0.2000000001), 1e-9));
  CHECK_FALSE(p.contains(v1(0.2001), 1e-9));
  CHECK_FALSE(diamond().contains(v2(0.6, 0.6), 1e-9));
  CHECK(diamond().contains(v2(0.5, 0.5), 1e-9));
}

TEST_CASE("vertex enumeration") {
  const auto v = interval(-0.2, 0.2).vertices();
  REQUIRE(v.size() == 2);
  CHECK(v[0](0) == doctest::Approx(-0.2));
  CHECK(v[1](0) == doctest::Approx(0.2));
  CHECK(unit_square().vertices().size() == 4);
  // a redundant row is pruned and the box shape recognised
  Matrix N(5, 2);
  N << 1, 0, -1, 0, 0, 1, 0, -1, 1, 1;
  const auto p = Polytope::from_halfspaces(N, Vector::Constant(5, 1.0).cwiseProduct((Vector(5) << 1, 1, 1, 1, 5).finished()));
  CHECK(p.is_box());
  CHECK(p.num_rows() == 4);
}

TEST_CASE("empty and unbounded sets are rejected") {
  Matrix N(2, 1);
  N << 1, -1;
  CHECK_THROWS_AS(Polytope::from_halfspaces(N, v2(0.0, -1.0)), EmptySetError);
  Matrix H(1, 2);
  H << 1, 0;
  CHECK_THROWS_AS(Polytope::from_halfspaces(H, v1(1.0)), EmptySetError);
  CHECK_THROWS_AS(Polytope::box(v1(1.0), v1(0.0)), EmptySetError);
}

TEST_CASE("erosion and sum adjunction on random boxes") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int k = 0; k < 50; ++k) {
    const Vector c = v2(u(rng) - 1.0, u(rng) - 1.0);
    const auto P = Polytope::box(c - v2(u(rng), u(rng)), c + v2(u(rng), u(rng)));
    const auto Q = Polytope::box(-0.3 * v2(u(rng), u(rng)), 0.3 * v2(u(rng), u(rng)));
    Polytope E = P;
    try {
      E = pontryagin_diff(P, Q);
    } catch (const EmptySetError&) {
      continue;
    }
    const auto S = minkowski_sum(E, Q);
    for (const auto& x : sample_uniform(S, 1000, rng)) CHECK(P.contains(x, 1e-9));
  }
}

TEST_CASE("erosion is the largest set whose sum fits") {
  // general (non-box) erosion against a diamond; any box R with R + Q in P
  // must lie inside P - Q.
  const auto P = minkowski_sum(unit_square(), diamond());
  const auto Q = diamond().scaled(0.5);
  const auto E = pontryagin_diff(P, Q);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5), r(0.0, 0.5);
  int tested = 0;
  for (int k = 0; k < 400; ++k) {
    const Vector c = v2(u(rng), u(rng));
    const Vector half = v2(r(rng), r(rng));
    const auto R = Polytope::box(c - half, c + half);
    bool fits = true;
    const auto RQ = minkowski_sum(R, Q);
    for (const auto& v : RQ.vertices()) fits = fits && P.contains(v, 1e-9);
    if (!fits) continue;
    ++tested;
    for (const auto& v : R.vertices()) CHECK(E.contains(v, 1e-9));
  }
  CHECK(tested > 10);
}

TEST_CASE("support of a sum is the sum of supports") {
  const auto a = diamond();
  const auto b = Polytope::from_points({v2(0, 0), v2(1, 0.2), v2(0.3, 1)});
  const auto s = minkowski_sum(a, b);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int k = 0; k < 100; ++k) {
    const Vector d = v2(g(rng), g(rng));
    CHECK(s.support(d) == doctest::Approx(a.support(d) + b.support(d)).epsilon(1e-10));
  }
}

TEST_CASE("membership agrees with the vertex hull") {
  const auto p = Polytope::from_points({v2(0, 0), v2(2, 0.5), v2(1.5, 2), v2(-0.5, 1.2)});
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 2.5);
  for (int k = 0; k < 2000; ++k) {
    const Vector x = v2(u(rng), u(rng));
    // oracle: x is in the hull iff it lies left of every counter-clockwise edge
    const std::vector<Vector> ring = {v2(0, 0), v2(2, 0.5), v2(1.5, 2), v2(-0.5, 1.2)};
    double worst = 1e300;
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const Vector e = ring[(i + 1) % ring.size()] - ring[i];
      const Vector r = x - ring[i];
      worst = std::min(worst, (e(0) * r(1) - e(1) * r(0)) / e.norm());
    }
    if (std::abs(worst) < 1e-7) continue;
    CHECK(p.contains(x, 1e-9) == (worst > 0));
  }
}

TEST_CASE("three dimensional hull and moments") {
  std::vector<Vector> cube;
  for (int m = 0; m < 8; ++m) cube.push_back((Vector(3) << (m & 1), (m >> 1) & 1, (m >> 2) & 1).finished());
  cube.push_back((Vector(3) << 0.5, 0.5, 0.5).finished());
  const auto p = Polytope::from_points(cube);
  CHECK(p.vertices().size() == 8);
  CHECK(p.is_box());
  Matrix rot = Eigen::AngleAxisd(0.3, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
  const auto r = p.linear_map(rot);
  CHECK_FALSE(r.is_box());
  CHECK(r.vertices().size() == 8);
  const auto m = moments(r);
  CHECK(m.volume == doctest::Approx(1.0).epsilon(1e-10));
  const Vector centre = rot * Vector::Constant(3, 0.5);
  CHECK((m.first - centre).norm() <= 1e-10);
  // second moment of a unit cube about its centre is I/12
  const Matrix expected = rot * (Matrix::Identity(3, 3) / 12.0) * rot.transpose() + centre * centre.transpose();
  CHECK((m.second - expected).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("box moments in closed form") {
  const auto m = moments(interval(-0.2, 0.2));
  CHECK(m.volume == doctest::Approx(0.4));
  CHECK(m.first(0) == doctest::Approx(0.0));
  CHECK(m.second(0, 0) == doctest::Approx(0.016 / 3.0));
  const auto d = moments(diamond());
  CHECK(d.volume == doctest::Approx(2.0));
  CHECK(d.second(0, 0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("hit-and-run stays inside and spreads out") {
  const auto p = diamond();
  std::mt19937_64 rng(1);
  const auto pts = sample_uniform(p, 4000, rng);
  Vector mean = Vector::Zero(2);
  for (const auto& x : pts) {
    CHECK(p.contains(x, 1e-9));
    mean += x;
  }
  mean /= static_cast<double>(pts.size());
  CHECK(mean.norm() < 0.05);
}

TEST_CASE("capacity limits are enforced") {
  const Vector lo = Vector::Constant(9, -1.0);
  const auto big = Polytope::box(lo, -lo);
  CHECK_FALSE(big.has_vertices());
  CHECK_THROWS_AS(big.vertices(), CapacityError);
  CHECK(big.support(Vector::Ones(9)) == doctest::Approx(9.0));
  CHECK_THROWS_AS(minkowski_sum(interval(0, 1), unit_square()), DimensionError);
}

TEST_CASE("hulls do not depend on the scale of the cloud") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vector> pts;
    for (int i = 0; i < 30; ++i) pts.push_back(v2(nd(rng), nd(rng)));
    const auto ref = Polytope::from_points(pts);
    for (double s : {1e-7, 1e6}) {
      std::vector<Vector> scaled;
      for (const auto& p : pts) scaled.push_back(s * p + v2(3.0, -1.0));
      const auto q = Polytope::from_points(scaled);
      std::vector<Vector> expect;
      for (const auto& v : ref.vertices()) expect.push_back(s * v + v2(3.0, -1.0));
      CHECK(same_point_set(q.vertices(), expect, 1e-9 * std::max(1.0, s)));
    }
  }
}
