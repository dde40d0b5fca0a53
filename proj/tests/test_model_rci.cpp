#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "tubempc/error.hpp"

using namespace tubempc;
using namespace fixtures;

TEST_CASE("closed-loop matrix and error dynamics") {
  const auto m = e1_model();
  CHECK(m.AK()(0, 0) == doctest::Approx(0.5));
  CHECK(m.error_next(scalar(0.0), scalar(0.0))(0) == 0.0);
  CHECK(m.error_next(scalar(0.2), scalar(0.1))(0) == doctest::Approx(0.2));
  CHECK(m.error_next(scalar(-0.2), scalar(-0.1))(0) == doctest::Approx(-0.2));
  CHECK(model::spectral_radius(m.AK()) == doctest::Approx(0.5));
}

TEST_CASE("non-contractive feedback is rejected") {
  CHECK_THROWS_AS(model::LinearTubeModel(Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Constant(1, 1, 0.1)),
                  AssumptionError);
  CHECK_THROWS_AS(model::LinearTubeModel(Matrix::Ones(2, 2), Matrix::Ones(1, 1), Matrix::Zero(1, 2)), DimensionError);
}

TEST_CASE("real state minus nominal state follows the error dynamics") {
  // A 2-state example with spectral radius 0.65 under K.
  Matrix A(2, 2), B(2, 1), K(1, 2);
  A << 1.0, 0.5, 0.0, 1.0;
  B << 0.125, 0.5;
  K << -0.6514, -1.3142;
  const model::LinearTubeModel m(A, B, K);
  CHECK(model::spectral_radius(m.AK()) == doctest::Approx(0.6514).epsilon(1e-3));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector x = vec({u(rng), u(rng)}), z = vec({u(rng), u(rng)});
  for (int t = 0; t < 30; ++t) {
    const Vector v = vec({u(rng)}), w = vec({0.05 * u(rng), 0.05 * u(rng)});
    const Vector e = x - z;
    x = m.step_real(x, v, w);
    z = m.step_nominal(z, v);
    CHECK((x - z - m.error_next(e, w)).norm() < 1e-12);
  }
}

TEST_CASE("state-input constraints are pulled back through the feedback") {
  const auto m = e1_model();
  const Polytope Z = Polytope::box(vec({-2, -1}), vec({2, 1}));
  const Polytope Zpi = model::build_z_pi(Z, m);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 2000; ++i) {
    const Vector y = vec({u(rng), u(rng)});
    const Vector xu = vec({y(0), m.input(y.head(1), y.tail(1))(0)});
    CHECK(Zpi.contains(y) == Z.contains(xu));
  }
}

TEST_CASE("minimal RPI set of the scalar example") {
  const auto r = rci::min_rpi(Matrix::Constant(1, 1, 0.5), interval(-0.1, 0.1), 1e-6);
  CHECK(r.omega.bounding_lo()(0) == doctest::Approx(-0.2).epsilon(1e-9));
  CHECK(r.omega.bounding_hi()(0) == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(r.hausdorff_bound <= 1e-6);
  const auto nil = rci::min_rpi(Matrix::Zero(1, 1), interval(-0.1, 0.1), 1e-6);
  CHECK(geometry::hausdorff_distance(nil.omega, interval(-0.1, 0.1)) < 1e-12);
}

TEST_CASE("RPI set of a contracted rotation matches a truncated sum") {
  const double c = 0.5 * std::cos(0.7), s = 0.5 * std::sin(0.7);
  Matrix AK(2, 2);
  AK << c, -s, s, c;
  const Polytope W = Polytope::box(vec({-0.1, -0.05}), vec({0.1, 0.05}));
  const auto r = rci::min_rpi(AK, W, 1e-6);
  // Oracle: support of the 40-term sum is the sum of supports of A^k W.
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int i = 0; i < 200; ++i) {
    const Vector d = vec({nd(rng), nd(rng)}).normalized();
    double h = 0.0;
    Matrix P = Matrix::Identity(2, 2);
    for (int k = 0; k < 40; ++k, P = AK * P) h += W.support(P.transpose() * d);
    CHECK(r.omega.support(d) >= h - 1e-9);
    CHECK(r.omega.support(d) <= h + 1e-6);
  }
  CHECK(rci::rpi_certificate(AK, r.omega, W) <= 1e-9);
}

TEST_CASE("invariance verification") {
  const auto m = e1_model();
  const auto good = rci::verify_rci(m, interval(-0.2, 0.2), interval(-0.1, 0.1), 1000, 5);
  CHECK(good.holds());
  CHECK(good.worst_margin >= -1e-12);
  const auto bad = rci::verify_rci(m, interval(-0.15, 0.15), interval(-0.1, 0.1), 1000, 5);
  CHECK_FALSE(bad.holds());
  CHECK(bad.worst_margin == doctest::Approx(-0.025));
  const auto zero = rci::verify_rci(m, Polytope::origin(1), Polytope::origin(1), 10, 5);
  CHECK(zero.holds());
}

TEST_CASE("larger disturbances never shrink the RPI set") {
  const double c = 0.6 * std::cos(1.1), s = 0.6 * std::sin(1.1);
  Matrix AK(2, 2);
  AK << c, -s, s, c;
  const Polytope W = Polytope::box(vec({-0.1, -0.2}), vec({0.1, 0.2}));
  const auto small = rci::min_rpi(AK, W, 1e-7);
  const auto big = rci::min_rpi(AK, W.scaled(1.1), 1e-7);
  for (Eigen::Index i = 0; i < small.omega.num_rows(); ++i) {
    const Vector a = small.omega.normals().row(i).transpose();
    CHECK(big.omega.support(a) >= small.omega.support(a) - 1e-9);
  }
}

TEST_CASE("constraint tightening") {
  const auto m = e1_model();
  const auto cd = model::make_constraints(Polytope::box(vec({-2, -1}), vec({2, 1})), interval(-0.1, 0.1), m);
  const Polytope Zbar = rci::tighten(cd.Z_pi, interval(-0.2, 0.2));
  CHECK(Zbar.support(vec({1, 0})) == doctest::Approx(1.8));
  CHECK(Zbar.support(vec({-1, 0})) == doctest::Approx(1.8));
  // input row -0.5 z + v in [-0.9, 0.9]
  const Vector a = vec({-0.5, 1.0});
  CHECK(Zbar.support(a) == doctest::Approx(0.9));
  CHECK(Zbar.support(-a) == doctest::Approx(0.9));
  CHECK(geometry::hausdorff_distance(rci::tighten(cd.Z_pi, Polytope::origin(1)), cd.Z_pi) < 1e-9);
  // Zbar + (Omega x {0}) stays in Z_pi
  geometry::Rng g(9);
  for (const auto& y : geometry::sample_uniform(Zbar, 500, g)) {
    for (double e : {-0.2, 0.2}) CHECK(cd.Z_pi.contains(y + vec({e, 0.0})));
  }
  CHECK_THROWS_AS(rci::tighten(cd.Z_pi, interval(-2.5, 2.5)), AssumptionError);
}

TEST_CASE("degenerate disturbance sets are rejected") {
  CHECK_THROWS_AS(rci::min_rpi(Matrix::Constant(1, 1, 0.5), interval(0.0, 0.1), 1e-6), AssumptionError);
}
