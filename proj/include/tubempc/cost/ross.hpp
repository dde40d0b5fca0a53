#pragma once

#include "tubempc/cost/stage_cost.hpp"

namespace tubempc::cost {

/// Robust optimal steady state of the nominal system.
struct Ross {
  Vector zs, vs;
  Vector nu;            // steady-state multiplier; storage lambda(z) = nu'z
  double value = 0.0;   // ell(zs, vs) before the offset
  double margin = 0.0;  // distance of (zs, vs) to the boundary of Z_bar

  Vector y() const;
};

/// min ell(z, v) s.t. z = (A+BK) z + B v, (z, v) in Z_bar. Sets cost.offset so
/// that ell(zs, vs) = 0 afterwards. Throws InfeasibleError when there is no
/// admissible steady state and AssumptionError when the minimiser sits on
/// the boundary of Z_bar (margin below 1e-7).
Ross compute_ross(EconomicCost& cost, const model::LinearTubeModel& model, const Polytope& Z_bar);

double storage(const Ross& ross, const Vector& z);

/// r(z,v) = ell(z,v) - ell(zs,vs) + lambda(z) - lambda(f(z,v)), using the
/// offset-normalised ell.
double rotated_cost(const EconomicCost& cost, const model::LinearTubeModel& model, const Ross& ross, const Vector& z,
                    const Vector& v);

/// Exponential reachability of the ROSS is certified for linear dynamics by a
/// Schur A+BK together with an interior ROSS.
struct ReachabilityCertificate {
  double spectral_radius = 0.0;
  double ross_margin = 0.0;
  bool holds = false;
};
ReachabilityCertificate check_reachability(const model::LinearTubeModel& model, const Ross& ross);

}  // namespace tubempc::cost
