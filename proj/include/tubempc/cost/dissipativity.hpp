#pragma once

#include <cstdint>

#include "tubempc/cost/ross.hpp"

namespace tubempc::ocp {
struct OcpProblem;
}

namespace tubempc::cost {

struct DissipationReport {
  double a = 0.0;              // r(y) >= a |y - ys|^2 on the tested set
  double a_grid = 0.0;         // min of r(y) / |y - ys|^2 over the grid
  double a_hessian = 0.0;      // half the smallest eigenvalue of the Hessian of ell
  double min_margin = 0.0;     // min of the tested inequality (r, or the strong form)
  Vector worst_point;
  std::size_t points = 0;
  bool holds() const { return a > 0.0 && min_margin >= -1e-9; }
};

/**
 * Strict dissipativity with the linear storage nu'z: evaluates the rotated
 * cost on a grid (grid_density points per axis) over Z_bar plus its
 * vertices. With an interior ROSS the rotated cost is bounded below by
 * 0.5 dy'H dy, so a = min(a_grid, a_hessian).
 */
DissipationReport check_dissipativity(const EconomicCost& cost, const model::LinearTubeModel& model, const Ross& ross,
                                      const Polytope& Z_bar, int grid_density = 21);

/**
 * Dissipation along closed-loop transitions: for grid states z with a
 * feasible finite-horizon problem, samples x+ in f(z, v*) + Omega, re-solves
 * the tube problem for z_cl = z0*(x+) and reports the worst
 * s(z, v*) - a |(z, v*) - ys|^2 - (lambda(z_cl) - lambda(z)).
 * Inner infeasibility throws InfeasibleError naming the point.
 */
DissipationReport check_strong_dissipativity(const ocp::OcpProblem& problem, double a, int grid_density,
                                             std::size_t samples, std::uint64_t seed);

}  // namespace tubempc::cost
