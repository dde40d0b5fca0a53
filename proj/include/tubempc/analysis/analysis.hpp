#pragma once

#include <string>
#include <vector>

#include "tubempc/closedloop/closedloop.hpp"

namespace tubempc::analysis {

using geometry::Vector;

/// lhs against rhs_core with gap = lhs - rhs_core.
struct PerformanceReport {
  double lhs = 0.0;
  double rhs_core = 0.0;
  double gap = 0.0;
  int N = 0;
  int T = 0;
  std::string tag;
  bool pass = false;
};

/// Sum over t < T of ell(z0*(t), v*(0|t)) (offset-normalised).
double jcl_nominal(const closedloop::ClosedLoopLog& log, const ocp::TubeSetup& setup, int T);
/// Sum over t < T of L_pi(x(t), v*(0|t)) minus the same offset.
double jcl_real(const closedloop::ClosedLoopLog& log, const ocp::TubeSetup& setup, int T);

/// Indices k < N with |(z*(k), v*(k)) - (zs, vs)|_inf >= eps.
struct TurnpikeProfile {
  std::vector<int> indices;
  int cardinality = 0;
};
TurnpikeProfile turnpike_profile(const ocp::OcpSolution& sol, const cost::Ross& ross, double eps);

/// [V_N(y) - V_N(z)] - [V_inf(y) - V_inf(z)] at N = problem.N.
PerformanceReport verify_lemma_gap(const ocp::OcpProblem& problem, const Vector& y, const Vector& z, int N_inf);

/// delta_1(N) = max over ordered pairs of distinct states of the Lemma gap.
struct GapCurve {
  std::vector<int> N;
  std::vector<double> delta;
  std::vector<std::pair<Vector, Vector>> witness;
  bool nonincreasing = false;
  bool pass = false;  // nonincreasing and final value <= final_tol
};
GapCurve lemma_gap_curve(const ocp::OcpProblem& problem, const std::vector<Vector>& states,
                         const std::vector<int>& N_list, int N_inf, double slack = 1e-8, double final_tol = 1e-4);

/// Non-averaged bound: lhs = J^cl_T, rhs_core = V_inf(z0*(0)) - V_inf(z0*(T)).
PerformanceReport verify_nap(const closedloop::ClosedLoopLog& log, const ocp::OcpProblem& problem, int N_inf);

/// Worst per-step residual ell(z, v*) - [V_N(z) - V_N(z_cl)] along a log.
struct StepResidual {
  double worst = 0.0;
  int step = -1;
};
StepResidual lemma3_residual(const closedloop::ClosedLoopLog& log, const ocp::TubeSetup& setup, int T);

/// Transient bound: kappa = |z0*(T) - zs|_inf, baseline = min J_T over inputs
/// reaching the kappa-ball from z0*(0). gap = J^cl_T - baseline; the single
/// run passes when gap >= -tol.
PerformanceReport verify_transient(const closedloop::ClosedLoopLog& log, const ocp::OcpProblem& problem, int T,
                                   double tol = 1e-6);
double transient_baseline(const ocp::OcpProblem& problem, const Vector& z0, int T, double kappa);

/// Real-state bounds. worst_case: L_pi(x, v) <= ell(z, v) at every step;
/// nominal: J_real - J_nominal <= T kappa_ell max_Omega |e|. Not defined for
/// the integral variant (applicable = false).
struct CorollaryReport {
  double jcl_nominal = 0.0;
  double jcl_real = 0.0;
  double excess = 0.0;
  double bound = 0.0;
  double worst_step_margin = 0.0;  // worst_case: min over t of ell - (L_pi - offset)
  bool applicable = true;
  bool pass = false;
};
CorollaryReport verify_corollaries(const closedloop::ClosedLoopLog& log, const ocp::TubeSetup& setup, int T,
                                   double kappa_ell, double tol = 1e-9);

/// Telescoping identity and per-step decrease ell <= V(t) - V(t+1) + tol_dec.
struct TelescopeReport {
  double telescoped = 0.0;
  double direct = 0.0;
  double error = 0.0;
  double worst_decrease = 0.0;  // min over t of V(t) - V(t+1) - ell(t)
  bool pass = false;
};
TelescopeReport check_telescoping(const closedloop::ClosedLoopLog& log, const ocp::TubeSetup& setup, int T,
                                  bool check_decrease, double tol_identity = 1e-9, double tol_decrease = 1e-6);

/// max |e| over Omega (Euclidean).
double max_error_norm(const geometry::Polytope& omega);

bool nonincreasing(const std::vector<double>& values, double slack);

}  // namespace tubempc::analysis
