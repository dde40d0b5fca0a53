#include "tubempc/ocp/terminal.hpp"

#include <cmath>
#include <random>

#include "tubempc/error.hpp"

namespace tubempc::ocp {

QuadraticTerminal riccati_terminal(const TubeSetup& setup, double level) {
  const int n = setup.n(), m = setup.m();
  // stage 0.5 dy' H dy = dz'Q dz + 2 dz'S dv + dv'R dv
  const Matrix Q = 0.5 * setup.ell.H.topLeftCorner(n, n);
  const Matrix S = 0.5 * setup.ell.H.topRightCorner(n, m);
  const Matrix R = 0.5 * setup.ell.H.bottomRightCorner(m, m);
  if (Eigen::SelfAdjointEigenSolver<Matrix>(R).eigenvalues().minCoeff() <= 0.0)
    throw AssumptionError("riccati_terminal: input weight must be positive definite");
  const Matrix& A = setup.model.AK();
  const Matrix& B = setup.model.B();
  Matrix P = Q;
  for (int it = 0; it < 100000; ++it) {
    const Matrix BtPA = B.transpose() * P * A + S.transpose();
    const Matrix next = Q + A.transpose() * P * A - BtPA.transpose() * (R + B.transpose() * P * B).ldlt().solve(BtPA);
    const double change = (next - P).cwiseAbs().maxCoeff();
    P = 0.5 * (next + next.transpose());
    if (change <= 1e-13 * (1.0 + P.cwiseAbs().maxCoeff())) {
      const Matrix Kf = -(R + B.transpose() * P * B).ldlt().solve(B.transpose() * P * A + S.transpose());
      return QuadraticTerminal{P, level, Kf};
    }
  }
  throw AssumptionError("riccati_terminal: Riccati iteration did not converge");
}

TerminalReport terminal_decrease_check(const TubeSetup& setup, const TerminalSpec& spec, std::size_t samples,
                                       std::uint64_t seed) {
  const int n = setup.n(), m = setup.m();
  const auto& zs = setup.ross.zs;
  const auto& vs = setup.ross.vs;
  TerminalReport rep;
  if (spec.kind == TerminalSpec::Kind::equality_at_ross) {
    // X_f = {zs}, V_f = 0, kappa_f = vs: f(zs, vs) = zs and ell(zs, vs) = 0.
    Vector y(n + m);
    y << zs, vs;
    rep.admissible = setup.Z_bar.margin(y);
    rep.invariance = -(setup.model.step_nominal(zs, vs) - zs).cwiseAbs().maxCoeff();
    rep.decrease = -std::abs(setup.ell(zs, vs));
    rep.samples = 1;
    return rep;
  }
  const auto& q = spec.quad;
  Eigen::LLT<Matrix> llt(q.P);
  if (llt.info() != Eigen::Success) throw AssumptionError("terminal P must be positive definite");
  // z = zs + sqrt(level) L^{-T} u with u in the unit ball maps onto X_f
  const Matrix Linv_t = llt.matrixL().transpose().solve(Matrix::Identity(n, n));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif;
  auto vf = [&](const Vector& z) { return (z - zs).dot(q.P * (z - zs)); };
  rep.admissible = rep.invariance = rep.decrease = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples; ++k) {
    Vector u(n);
    for (int i = 0; i < n; ++i) u(i) = gauss(rng);
    u.normalize();
    // every fourth sample sits on the boundary of X_f
    const double radius = (k % 4 == 0) ? 1.0 : std::pow(unif(rng), 1.0 / n);
    const Vector z = zs + std::sqrt(q.level) * radius * Linv_t * u;
    const Vector v = vs + q.Kf * (z - zs);
    Vector y(n + m);
    y << z, v;
    const Vector zn = setup.model.step_nominal(z, v);
    rep.admissible = std::min(rep.admissible, setup.Z_bar.margin(y));
    rep.invariance = std::min(rep.invariance, q.level - vf(zn));
    rep.decrease = std::min(rep.decrease, vf(z) - vf(zn) - setup.ell(z, v));
    ++rep.samples;
  }
  return rep;
}

}  // namespace tubempc::ocp
