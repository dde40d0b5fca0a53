#include "tubempc/cost/dissipativity.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <sstream>

#include "tubempc/error.hpp"
#include "tubempc/geometry/sampling.hpp"
#include "tubempc/ocp/ocp.hpp"

namespace tubempc::cost {

DissipationReport check_dissipativity(const EconomicCost& cost, const model::LinearTubeModel& model, const Ross& ross,
                                      const Polytope& Z_bar, int grid_density) {
  const int n = model.n();
  const Vector ys = ross.y();
  DissipationReport rep;
  rep.a_hessian = 0.5 * Eigen::SelfAdjointEigenSolver<Matrix>(cost.H).eigenvalues().minCoeff();
  rep.a_grid = std::numeric_limits<double>::infinity();
  rep.min_margin = std::numeric_limits<double>::infinity();
  auto pts = geometry::grid_points(Z_bar, grid_density);
  if (Z_bar.has_vertices()) pts.insert(pts.end(), Z_bar.vertices().begin(), Z_bar.vertices().end());
  for (const auto& y : pts) {
    const double r = rotated_cost(cost, model, ross, y.head(n), y.tail(model.m()));
    ++rep.points;
    if (r < rep.min_margin) {
      rep.min_margin = r;
      rep.worst_point = y;
    }
    const double d2 = (y - ys).squaredNorm();
    if (d2 > 1e-12) rep.a_grid = std::min(rep.a_grid, r / d2);
  }
  rep.a = std::min(rep.a_grid, rep.a_hessian);
  return rep;
}

DissipationReport check_strong_dissipativity(const ocp::OcpProblem& problem, double a, int grid_density,
                                             std::size_t samples, std::uint64_t seed) {
  const auto& s = *problem.setup;
  const int n = s.n();
  const Vector lo = s.Z_bar.bounding_lo().head(n), hi = s.Z_bar.bounding_hi().head(n);
  const Polytope states = Polytope::box(lo, hi);
  geometry::Rng rng(seed);
  DissipationReport rep;
  rep.a = a;
  rep.min_margin = std::numeric_limits<double>::infinity();
  const Vector ys = s.ross.y();
  for (const auto& z : geometry::grid_points(states, grid_density)) {
    const auto sol = ocp::solve_ocp(problem, z);
    if (!sol.optimal()) continue;
    const Vector& v = sol.v.front();
    Vector y(n + s.m());
    y << z, v;
    const double supply = s.ell(z, v);
    const Vector zn = s.model.step_nominal(z, v);
    for (const auto& e : geometry::vertices_and_samples(s.omega(), samples, rng)) {
      const Vector xp = zn + e;
      const auto next = ocp::solve_tube_ocp(problem, xp);
      if (!next.optimal()) {
        std::ostringstream msg;
        msg << "strong dissipativity: tube problem infeasible at x+ = " << xp.transpose();
        throw InfeasibleError(msg.str());
      }
      const double margin =
          supply - a * (y - ys).squaredNorm() - (storage(s.ross, next.z.front()) - storage(s.ross, z));
      ++rep.points;
      if (margin < rep.min_margin) {
        rep.min_margin = margin;
        rep.worst_point = xp;
      }
    }
  }
  return rep;
}

}  // namespace tubempc::cost
