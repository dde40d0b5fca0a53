#include "tubempc/cost/ross.hpp"

#include "tubempc/convex/solver.hpp"
#include "tubempc/error.hpp"

namespace tubempc::cost {

Vector Ross::y() const {
  Vector out(zs.size() + vs.size());
  out << zs, vs;
  return out;
}

Ross compute_ross(EconomicCost& cost, const model::LinearTubeModel& model, const Polytope& Z_bar) {
  const int n = model.n(), m = model.m(), d = n + m;
  if (Z_bar.dim() != d) throw DimensionError("compute_ross: Z_bar must live in (z, v)");
  const int pieces = static_cast<int>(cost.g.size());
  const bool epi = cost.piecewise();
  const int nv = d + (epi ? 1 : 0);

  convex::ConvexProgram prog(nv);
  Matrix P = Matrix::Zero(nv, nv);
  P.topLeftCorner(d, d) = cost.H;
  prog.P = P.sparseView();
  if (epi) {
    prog.q(d) = 1.0;
  } else {
    prog.q.head(d) = cost.g[0];
    prog.r = cost.c[0];
  }
  Matrix A = Matrix::Zero(n, nv);
  A.leftCols(n) = Matrix::Identity(n, n) - model.AK();
  A.middleCols(n, m) = -model.B();
  prog.A = A.sparseView();
  prog.b = Vector::Zero(n);

  const int rows = static_cast<int>(Z_bar.num_rows()) + (epi ? pieces : 0);
  Matrix G = Matrix::Zero(rows, nv);
  Vector h(rows);
  G.topLeftCorner(Z_bar.num_rows(), d) = Z_bar.normals();
  h.head(Z_bar.num_rows()) = Z_bar.offsets();
  if (epi) {
    for (int j = 0; j < pieces; ++j) {
      const auto r = Z_bar.num_rows() + j;
      G.block(r, 0, 1, d) = cost.g[static_cast<std::size_t>(j)].transpose();
      G(r, d) = -1.0;
      h(r) = -cost.c[static_cast<std::size_t>(j)];
    }
  }
  prog.G = G.sparseView();
  prog.h = h;

  const auto sol = convex::solve_convex(prog);
  if (sol.status == convex::SolveStatus::infeasible) throw InfeasibleError("no admissible steady state in Z_bar");
  if (sol.status != convex::SolveStatus::optimal) throw Error("steady-state optimisation did not converge");

  Ross out;
  out.zs = sol.x.head(n);
  out.vs = sol.x.segment(n, m);
  out.nu = sol.eq_dual;
  out.value = cost.raw(out.zs, out.vs);
  out.margin = Z_bar.margin(out.y());
  if (out.margin < 1e-7) throw AssumptionError("optimal steady state lies on the boundary of Z_bar");
  cost.offset = out.value;
  return out;
}

double storage(const Ross& ross, const Vector& z) { return ross.nu.dot(z); }

double rotated_cost(const EconomicCost& cost, const model::LinearTubeModel& model, const Ross& ross, const Vector& z,
                    const Vector& v) {
  return cost(z, v) + storage(ross, z) - storage(ross, model.step_nominal(z, v));
}

ReachabilityCertificate check_reachability(const model::LinearTubeModel& model, const Ross& ross) {
  ReachabilityCertificate c;
  c.spectral_radius = model::spectral_radius(model.AK());
  c.ross_margin = ross.margin;
  c.holds = c.spectral_radius < 1.0 && c.ross_margin > 0.0;
  return c;
}

}  // namespace tubempc::cost
