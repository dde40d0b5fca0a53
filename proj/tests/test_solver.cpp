#include <doctest.h>

#include <random>

#include "tubempc/convex/solver.hpp"

using namespace tubempc::convex;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

ConvexProgram qp(const MatrixXd& P, const VectorXd& q, const MatrixXd& G, const VectorXd& h) {
  ConvexProgram prog(q.size());
  prog.P = P.sparseView();
  prog.q = q;
  prog.G = G.sparseView();
  prog.h = h;
  return prog;
}

// Exhaustive active-set oracle: solve the KKT system of every subset of rows
// and keep the best primal-dual feasible candidate.
double active_set_oracle(const MatrixXd& P, const VectorXd& q, const MatrixXd& G, const VectorXd& h, VectorXd& best) {
  const int m = static_cast<int>(G.rows());
  const int n = static_cast<int>(q.size());
  double best_val = std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < (1 << m); ++mask) {
    std::vector<int> act;
    for (int i = 0; i < m; ++i)
      if (mask & (1 << i)) act.push_back(i);
    const int k = static_cast<int>(act.size());
    if (k > n) continue;
    MatrixXd K = MatrixXd::Zero(n + k, n + k);
    VectorXd rhs(n + k);
    K.topLeftCorner(n, n) = P;
    rhs.head(n) = -q;
    for (int j = 0; j < k; ++j) {
      K.block(0, n + j, n, 1) = G.row(act[j]).transpose();
      K.block(n + j, 0, 1, n) = G.row(act[j]);
      rhs(n + j) = h(act[j]);
    }
    Eigen::FullPivLU<MatrixXd> lu(K);
    if (lu.rank() < n + k) continue;
    const VectorXd sol = lu.solve(rhs);
    const VectorXd x = sol.head(n);
    if (k > 0 && sol.tail(k).minCoeff() < -1e-10) continue;
    if ((G * x - h).maxCoeff() > 1e-10) continue;
    const double val = 0.5 * x.dot(P * x) + q.dot(x);
    if (val < best_val) {
      best_val = val;
      best = x;
    }
  }
  return best_val;
}

}  // namespace

TEST_CASE("active lower bound") {
  MatrixXd P(1, 1);
  P << 2.0;
  MatrixXd G(1, 1);
  G << -1.0;
  const auto sol = solve_convex(qp(P, VectorXd::Zero(1), G, VectorXd::Constant(1, -1.0)));
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.x(0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(sol.value == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("clipping onto an interval") {
  // (x - 3)^2 = x^2 - 6x + 9
  ConvexProgram prog(1);
  MatrixXd P(1, 1);
  P << 2.0;
  prog.P = P.sparseView();
  prog.q = VectorXd::Constant(1, -6.0);
  prog.r = 9.0;
  MatrixXd G(2, 1);
  G << 1.0, -1.0;
  prog.G = G.sparseView();
  prog.h = VectorXd::Ones(2);
  const auto sol = solve_convex(prog);
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.x(0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(sol.value == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("random QPs agree with active-set enumeration") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 6, m = 9;
    MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = g(rng);
    const MatrixXd P = M * M.transpose() + 0.1 * MatrixXd::Identity(n, n);
    VectorXd q(n), h(m);
    MatrixXd G(m, n);
    for (int i = 0; i < n; ++i) q(i) = 3.0 * g(rng);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) G(i, j) = g(rng);
      h(i) = std::abs(g(rng)) + 0.1;
    }
    VectorXd xo;
    const double vo = active_set_oracle(P, q, G, h, xo);
    const auto sol = solve_convex(qp(P, q, G, h));
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(std::abs(sol.value - vo) <= 1e-6);
    CHECK((sol.x - xo).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("equality constraints and multipliers") {
  // min x^2 + y^2 s.t. x + y = 2 -> (1,1), multiplier -2 with grad f + A' nu = 0
  ConvexProgram prog(2);
  prog.P = MatrixXd(2.0 * MatrixXd::Identity(2, 2)).sparseView();
  MatrixXd A(1, 2);
  A << 1.0, 1.0;
  prog.A = A.sparseView();
  prog.b = VectorXd::Constant(1, 2.0);
  const auto sol = solve_convex(prog);
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.x(0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(sol.x(1) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(sol.eq_dual(0) == doctest::Approx(-2.0).epsilon(1e-7));
}

TEST_CASE("infeasible box is detected") {
  ConvexProgram prog(1);
  MatrixXd G(2, 1);
  G << 1.0, -1.0;
  prog.G = G.sparseView();
  prog.h = (VectorXd(2) << 0.0, -1.0).finished();  // x <= 0 and x >= 1
  CHECK(solve_convex(prog).status == SolveStatus::infeasible);
}

TEST_CASE("quadratic constraint rows") {
  // min -x - y s.t. x^2 + y^2 <= 2 -> (1, 1), value -2
  ConvexProgram prog(2);
  prog.q = -VectorXd::Ones(2);
  QuadraticRow row;
  row.index = {0, 1};
  row.Q = 2.0 * MatrixXd::Identity(2, 2);
  row.a = VectorXd::Zero(2);
  row.b = 2.0;
  prog.quadratic.push_back(row);
  const auto sol = solve_convex(prog);
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.value == doctest::Approx(-2.0).epsilon(1e-7));
}

TEST_CASE("deterministic and hint independent") {
  MatrixXd P = MatrixXd::Identity(3, 3);
  VectorXd q = (VectorXd(3) << 1.0, -2.0, 0.5).finished();
  MatrixXd G = MatrixXd::Identity(3, 3);
  VectorXd h = VectorXd::Constant(3, 0.3);
  const auto a = solve_convex(qp(P, q, G, h));
  const auto b = solve_convex(qp(P, q, G, h));
  const auto c = solve_convex(qp(P, q, G, h), VectorXd::Constant(3, 5.0));
  CHECK(a.x == b.x);
  CHECK((a.x - c.x).cwiseAbs().maxCoeff() <= 1e-6);
}
