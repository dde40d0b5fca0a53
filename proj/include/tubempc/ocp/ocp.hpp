#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "tubempc/convex/solver.hpp"
#include "tubempc/cost/ross.hpp"
#include "tubempc/rci/rci.hpp"

namespace tubempc::ocp {

using geometry::Matrix;
using geometry::Polytope;
using geometry::Vector;

/// Everything derived once from (A, B, K, Z, W, L): Omega, Z_bar, ell, ROSS.
struct TubeSetup {
  model::LinearTubeModel model;
  model::ConstraintData constraints;
  rci::RpiResult rpi;
  Polytope Z_bar;
  cost::StageCost stage;
  cost::EconomicCost ell;
  cost::Ross ross;

  const Polytope& omega() const { return rpi.omega; }
  int n() const { return model.n(); }
  int m() const { return model.m(); }
};

/// Computes Omega (or validates a supplied one with the RPI certificate),
/// tightens, builds ell for stage.variant and solves for the ROSS.
std::shared_ptr<const TubeSetup> build_setup(const model::LinearTubeModel& model, const Polytope& Z,
                                             const Polytope& W, const cost::StageCost& stage, double rpi_tol = 1e-6,
                                             const std::optional<Polytope>& omega = std::nullopt);

/// Same model, sets and ROSS machinery with a different cost variant.
std::shared_ptr<const TubeSetup> with_variant(const TubeSetup& setup, cost::CostVariant variant);

enum class Mode { tc, uc };
std::string_view to_string(Mode m);
Mode parse_mode(std::string_view name);

/// V_f(z) = (z - zs)'P(z - zs) on X_f = {V_f <= level} with local law
/// kappa_f(z) = vs + Kf (z - zs).
struct QuadraticTerminal {
  Matrix P;
  double level = 0.0;
  Matrix Kf;
};

struct TerminalSpec {
  enum class Kind { equality_at_ross, quadratic };
  Kind kind = Kind::equality_at_ross;
  QuadraticTerminal quad;
};

struct OcpProblem {
  std::shared_ptr<const TubeSetup> setup;
  int N = 10;
  Mode mode = Mode::tc;
  TerminalSpec terminal;  // ignored in uc mode
  convex::SolverOptions solver;
};

struct OcpSolution {
  std::vector<Vector> z;  // 0..N
  std::vector<Vector> v;  // 0..N-1
  double value = 0.0;
  convex::SolveStatus status = convex::SolveStatus::max_iter;
  double kkt_residual = 0.0;
  int iterations = 0;

  bool optimal() const { return status == convex::SolveStatus::optimal; }
  int horizon() const { return static_cast<int>(v.size()); }
};

/// Finite-horizon problem from a fixed initial nominal state.
OcpSolution solve_ocp(const OcpProblem& problem, const Vector& z0);

/// Tube problem: z(0) is a decision variable constrained by x - z(0) in Omega.
/// The optimal z0*(x) is solution.z[0]. A previous solution is shifted by
/// one step and offered to the solver as a starting point.
OcpSolution solve_tube_ocp(const OcpProblem& problem, const Vector& x, const OcpSolution* previous = nullptr);

/// Long-horizon surrogate of the infinite-horizon value: terminal equality at
/// the ROSS with horizon N_inf.
double value_inf_proxy(const OcpProblem& problem, const Vector& z0, int N_inf);

struct ProxyDiagnostic {
  double value = 0.0;
  double value_doubled = 0.0;
  double difference = 0.0;  // |value(2 N_inf) - value(N_inf)|
};
ProxyDiagnostic value_inf_proxy_checked(const OcpProblem& problem, const Vector& z0, int N_inf);

/// min J_T over Z_bar-admissible inputs with |z(T) - zs|_inf <= kappa and no
/// terminal cost. kappa <= 1e-9 is imposed as an equality.
OcpSolution solve_reach_ball(const OcpProblem& problem, const Vector& z0, int T, double kappa);

/// Feasibility of solve_ocp at each grid point.
std::vector<bool> check_feasible_region(const OcpProblem& problem, const std::vector<Vector>& grid);

/// Max dynamics residual, max Z_bar violation and terminal violation of a solution.
struct SolutionCheck {
  double dynamics = 0.0;
  double path = 0.0;
  double terminal = 0.0;
  double value_error = 0.0;  // |value - recomputed cost|
};
SolutionCheck check_solution(const OcpProblem& problem, const OcpSolution& sol);

}  // namespace tubempc::ocp
