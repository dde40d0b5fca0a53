#include "tubempc/closedloop/closedloop.hpp"

#include <chrono>
#include <limits>

#include "tubempc/error.hpp"

namespace tubempc::closedloop {

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::complete: return "complete";
    case RunStatus::initial_infeasible: return "initial_infeasible";
    case RunStatus::midrun_infeasible: return "midrun_infeasible";
  }
  return "unknown";
}

ClosedLoopLog run(const ocp::OcpProblem& problem, const Vector& x0, int T, const DisturbanceSource& dist,
                  const RunOptions& options) {
  if (T < 0) throw ConfigError("number of steps must be nonnegative");
  const auto& s = *problem.setup;
  ClosedLoopLog log;
  log.N = problem.N;
  log.T = T;
  log.mode = problem.mode;
  log.variant = s.stage.variant;
  log.disturbance = dist.kind;
  log.seed = dist.seed;

  Vector x = x0;
  const ocp::OcpSolution* prev = nullptr;
  ocp::OcpSolution sol;
  for (int t = 0; t <= T; ++t) {
    const auto start = std::chrono::steady_clock::now();
    sol = ocp::solve_tube_ocp(problem, x, options.warm_start ? prev : nullptr);
    const auto stop = std::chrono::steady_clock::now();

    StepRecord rec;
    rec.t = t;
    rec.x = x;
    rec.status = sol.status;
    rec.iterations = sol.iterations;
    rec.solve_seconds = std::chrono::duration<double>(stop - start).count();
    if (!sol.optimal()) {
      log.status = t == 0 ? RunStatus::initial_infeasible : RunStatus::midrun_infeasible;
      log.failed_step = t;
      rec.value = std::numeric_limits<double>::infinity();
      log.steps.push_back(std::move(rec));
      return log;
    }
    rec.z0 = sol.z.front();
    rec.v0 = sol.v.front();
    rec.value = sol.value;
    rec.u = s.model.input(x, rec.v0);
    rec.w = t < T ? draw(dist, s.constraints.W, options.run_index, t) : Vector::Zero(s.n());
    const Vector w = rec.w;
    const Vector v0 = rec.v0;
    log.steps.push_back(std::move(rec));
    if (t == T) break;
    x = options.plant ? options.plant(x, s.model.input(x, v0), w) : s.model.step_real(x, v0, w);
    prev = &sol;
  }
  return log;
}

double tube_violation(const ClosedLoopLog& log, const Polytope& omega) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& r : log.steps)
    if (r.z0.size() > 0) worst = std::max(worst, -omega.margin(r.x - r.z0));
  return worst;
}

}  // namespace tubempc::closedloop
