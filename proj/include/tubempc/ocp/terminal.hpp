#pragma once

#include <cstdint>

#include "tubempc/ocp/ocp.hpp"

namespace tubempc::ocp {

/// Local LQ terminal ingredients around the ROSS: P from the discrete
/// Riccati equation of (A+BK, B) with the Hessian of ell as weights,
/// Kf the matching gain. Throws AssumptionError if the input weight is not
/// positive definite or the iteration does not converge.
QuadraticTerminal riccati_terminal(const TubeSetup& setup, double level);

/// Worst margins of the terminal conditions over samples of X_f:
/// admissible  min margin of (z, kappa_f(z)) in Z_bar,
/// invariance  min of level - V_f(f(z, kappa_f(z))),
/// decrease    min of V_f(z) - V_f(f(z, kappa_f(z))) - ell(z, kappa_f(z)).
/// For the equality terminal X_f = {zs} and all margins follow from the ROSS.
struct TerminalReport {
  double admissible = 0.0;
  double invariance = 0.0;
  double decrease = 0.0;
  std::size_t samples = 0;
  bool holds(double tol = 1e-9) const { return admissible >= -tol && invariance >= -tol && decrease >= -tol; }
};
TerminalReport terminal_decrease_check(const TubeSetup& setup, const TerminalSpec& spec, std::size_t samples,
                                       std::uint64_t seed);

}  // namespace tubempc::ocp
