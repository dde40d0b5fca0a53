#include "tubempc/analysis/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tubempc/error.hpp"

namespace tubempc::analysis {

namespace {

void require_length(const closedloop::ClosedLoopLog& log, int T, bool need_end) {
  if (T < 0) throw ConfigError("T must be nonnegative");
  const std::size_t need = static_cast<std::size_t>(T) + (need_end ? 1 : 0);
  if (log.steps.size() < need) throw ConfigError("log is shorter than the requested horizon");
  for (std::size_t t = 0; t < need; ++t)
    if (log.steps[t].z0.size() == 0) throw ConfigError("log contains an infeasible step inside the window");
}

}  // namespace

double jcl_nominal(const closedloop::ClosedLoopLog& log, const ocp::TubeSetup& setup, int T) {
  require_length(log, T, false);
  double sum = 0.0;
  for (int t = 0; t < T; ++t) {
    const auto& r = log.steps[static_cast<std::size_t>(t)];
    sum += setup.ell(r.z0, r.v0);
  }
  return sum;
}

double jcl_real(const closedloop::ClosedLoopLog& log, const ocp::TubeSetup& setup, int T) {
  require_length(log, T, false);
  double sum = 0.0;
  for (int t = 0; t < T; ++t) {
    const auto& r = log.steps[static_cast<std::size_t>(t)];
    sum += setup.stage.L_pi(setup.model, r.x, r.v0) - setup.ell.offset;
  }
  return sum;
}

TurnpikeProfile turnpike_profile(const ocp::OcpSolution& sol, const cost::Ross& ross, double eps) {
  TurnpikeProfile p;
  for (int k = 0; k < sol.horizon(); ++k) {
    const double dz = (sol.z[static_cast<std::size_t>(k)] - ross.zs).cwiseAbs().maxCoeff();
    const double dv = (sol.v[static_cast<std::size_t>(k)] - ross.vs).cwiseAbs().maxCoeff();
    if (std::max(dz, dv) >= eps) p.indices.push_back(k);
  }
  p.cardinality = static_cast<int>(p.indices.size());
  return p;
}

PerformanceReport verify_lemma_gap(const ocp::OcpProblem& problem, const Vector& y, const Vector& z, int N_inf) {
  PerformanceReport r;
  r.N = problem.N;
  r.tag = "lemma_gap";
  if (y == z) {
    r.pass = true;
    return r;
  }
  const auto sy = ocp::solve_ocp(problem, y);
  const auto sz = ocp::solve_ocp(problem, z);
  if (!sy.optimal() || !sz.optimal()) throw InfeasibleError("lemma gap: state not in the feasible set");
  r.lhs = sy.value - sz.value;
  r.rhs_core = ocp::value_inf_proxy(problem, y, N_inf) - ocp::value_inf_proxy(problem, z, N_inf);
  r.gap = r.lhs - r.rhs_core;
  r.pass = std::isfinite(r.gap);
  return r;
}

GapCurve lemma_gap_curve(const ocp::OcpProblem& problem, const std::vector<Vector>& states,
                         const std::vector<int>& N_list, int N_inf, double slack, double final_tol) {
  GapCurve c;
  std::vector<double> vinf;
  for (const auto& s : states) vinf.push_back(ocp::value_inf_proxy(problem, s, N_inf));
  for (int N : N_list) {
    ocp::OcpProblem p = problem;
    p.N = N;
    std::vector<double> vn;
    for (const auto& s : states) {
      const auto sol = ocp::solve_ocp(p, s);
      if (!sol.optimal()) throw InfeasibleError("lemma gap: state not in X_N");
      vn.push_back(sol.value);
    }
    double best = -std::numeric_limits<double>::infinity();
    std::pair<Vector, Vector> arg;
    for (std::size_t i = 0; i < states.size(); ++i)
      for (std::size_t j = 0; j < states.size(); ++j) {
        if (i == j) continue;
        const double gap = (vn[i] - vn[j]) - (vinf[i] - vinf[j]);
        if (gap > best) {
          best = gap;
          arg = {states[i], states[j]};
        }
      }
    c.N.push_back(N);
    c.delta.push_back(best);
    c.witness.push_back(arg);
  }
  c.nonincreasing = nonincreasing(c.delta, slack);
  c.pass = c.nonincreasing && !c.delta.empty() && c.delta.back() <= final_tol;
  return c;
}

PerformanceReport verify_nap(const closedloop::ClosedLoopLog& log, const ocp::OcpProblem& problem, int N_inf) {
  const auto& s = *problem.setup;
  require_length(log, log.T, true);
  PerformanceReport r;
  r.N = log.N;
  r.T = log.T;
  r.tag = problem.mode == ocp::Mode::tc ? "nap_tc" : "nap_uc";
  r.lhs = jcl_nominal(log, s, log.T);
  const Vector& z_first = log.steps.front().z0;
  const Vector& z_last = log.steps[static_cast<std::size_t>(log.T)].z0;
  r.rhs_core = ocp::value_inf_proxy(problem, z_first, N_inf) - ocp::value_inf_proxy(problem, z_last, N_inf);
  r.gap = r.lhs - r.rhs_core;
  r.pass = std::isfinite(r.gap);
  return r;
}

StepResidual lemma3_residual(const closedloop::ClosedLoopLog& log, const ocp::TubeSetup& setup, int T) {
  require_length(log, T, true);
  StepResidual out;
  out.worst = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < T; ++t) {
    const auto& a = log.steps[static_cast<std::size_t>(t)];
    const auto& b = log.steps[static_cast<std::size_t>(t) + 1];
    const double res = setup.ell(a.z0, a.v0) - (a.value - b.value);
    if (res > out.worst) {
      out.worst = res;
      out.step = t;
    }
  }
  return out;
}

double transient_baseline(const ocp::OcpProblem& problem, const Vector& z0, int T, double kappa) {
  const auto sol = ocp::solve_reach_ball(problem, z0, T, kappa);
  return sol.optimal() ? sol.value : std::numeric_limits<double>::infinity();
}

PerformanceReport verify_transient(const closedloop::ClosedLoopLog& log, const ocp::OcpProblem& problem, int T,
                                   double tol) {
  const auto& s = *problem.setup;
  require_length(log, T, true);
  PerformanceReport r;
  r.N = log.N;
  r.T = T;
  r.tag = problem.mode == ocp::Mode::tc ? "transient_tc" : "transient_uc";
  r.lhs = jcl_nominal(log, s, T);
  if (T == 0) {
    r.pass = true;
    return r;
  }
  const double kappa = (log.steps[static_cast<std::size_t>(T)].z0 - s.ross.zs).cwiseAbs().maxCoeff();
  r.rhs_core = transient_baseline(problem, log.steps.front().z0, T, kappa);
  r.gap = r.lhs - r.rhs_core;
  r.pass = std::isfinite(r.gap) && r.gap >= -tol;
  return r;
}

double max_error_norm(const geometry::Polytope& omega) {
  double r = 0.0;
  if (omega.has_vertices()) {
    for (const auto& v : omega.vertices()) r = std::max(r, v.norm());
    return r;
  }
  return omega.bounding_lo().cwiseAbs().cwiseMax(omega.bounding_hi().cwiseAbs()).norm();
}

CorollaryReport verify_corollaries(const closedloop::ClosedLoopLog& log, const ocp::TubeSetup& setup, int T,
                                   double kappa_ell, double tol) {
  CorollaryReport c;
  c.jcl_nominal = jcl_nominal(log, setup, T);
  c.jcl_real = jcl_real(log, setup, T);
  c.excess = c.jcl_real - c.jcl_nominal;
  switch (setup.stage.variant) {
    case cost::CostVariant::worst_case: {
      c.worst_step_margin = std::numeric_limits<double>::infinity();
      for (int t = 0; t < T; ++t) {
        const auto& r = log.steps[static_cast<std::size_t>(t)];
        const double real = setup.stage.L_pi(setup.model, r.x, r.v0) - setup.ell.offset;
        c.worst_step_margin = std::min(c.worst_step_margin, setup.ell(r.z0, r.v0) - real);
      }
      if (T == 0) c.worst_step_margin = 0.0;
      c.bound = 0.0;
      c.pass = c.worst_step_margin >= -tol && c.excess <= tol;
      break;
    }
    case cost::CostVariant::nominal:
      c.bound = T * kappa_ell * max_error_norm(setup.omega());
      c.pass = c.excess <= c.bound + tol;
      break;
    case cost::CostVariant::integral:
      c.applicable = false;
      c.pass = true;
      break;
  }
  return c;
}

TelescopeReport check_telescoping(const closedloop::ClosedLoopLog& log, const ocp::TubeSetup& setup, int T,
                                  bool check_decrease, double tol_identity, double tol_decrease) {
  require_length(log, T, true);
  TelescopeReport r;
  r.worst_decrease = std::numeric_limits<double>::infinity();
  for (int t = 0; t < T; ++t) {
    const auto& a = log.steps[static_cast<std::size_t>(t)];
    const auto& b = log.steps[static_cast<std::size_t>(t) + 1];
    r.telescoped += a.value - b.value;
    r.worst_decrease = std::min(r.worst_decrease, a.value - b.value - setup.ell(a.z0, a.v0));
  }
  if (T == 0) r.worst_decrease = 0.0;
  r.direct = log.steps.front().value - log.steps[static_cast<std::size_t>(T)].value;
  r.error = std::abs(r.telescoped - r.direct);
  r.pass = r.error <= tol_identity && (!check_decrease || r.worst_decrease >= -tol_decrease);
  return r;
}

bool nonincreasing(const std::vector<double>& values, double slack) {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[i - 1] + slack) return false;
  return true;
}

}  // namespace tubempc::analysis
