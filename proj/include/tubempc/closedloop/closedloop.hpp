#pragma once

#include <vector>

#include "tubempc/closedloop/disturbance.hpp"
#include "tubempc/ocp/ocp.hpp"

namespace tubempc::closedloop {

struct StepRecord {
  int t = 0;
  Vector x, z0, v0, u, w;  // z0 = z*(0|t), v0 = v*(0|t)
  double value = 0.0;      // V_N(z0)
  convex::SolveStatus status = convex::SolveStatus::max_iter;
  int iterations = 0;
  double solve_seconds = 0.0;  // excluded from data files
};

enum class RunStatus { complete, initial_infeasible, midrun_infeasible };
std::string_view to_string(RunStatus s);

/**
 * Receding-horizon log. A complete run of T steps holds T + 1 records: the
 * last one solves the tube problem at x(T) without applying an input (w is
 * zero there), so V_N and z0* are available at both ends of [0, T].
 */
struct ClosedLoopLog {
  std::vector<StepRecord> steps;
  int N = 0;
  int T = 0;
  ocp::Mode mode = ocp::Mode::tc;
  cost::CostVariant variant = cost::CostVariant::nominal;
  DisturbanceKind disturbance = DisturbanceKind::zero;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::complete;
  int failed_step = -1;

  bool complete() const { return status == RunStatus::complete; }
};

struct RunOptions {
  bool warm_start = true;
  std::uint64_t run_index = 0;  // stream selector for split_seed
  model::PlantMap plant;        // replaces the linear plant when set
};

/// Algorithm: solve the tube problem at x(t), apply u = K x + v*(0|t), draw
/// w(t), advance. Infeasibility stops the run and is reported in the log.
ClosedLoopLog run(const ocp::OcpProblem& problem, const Vector& x0, int T, const DisturbanceSource& dist,
                  const RunOptions& options = {});

/// max over records of -margin(Omega, x - z0) (<= 0 when the tube holds).
double tube_violation(const ClosedLoopLog& log, const Polytope& omega);

}  // namespace tubempc::closedloop
