#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tubempc/analysis/analysis.hpp"

namespace tubempc::analysis {

struct SweepConfig {
  std::vector<int> N_list;
  std::vector<int> T_list;
  int seeds = 1;
  std::uint64_t base_seed = 0;
  Vector x0;
  closedloop::DisturbanceKind disturbance = closedloop::DisturbanceKind::zero;
  std::vector<Vector> sequence;  // explicit disturbances
  int N_inf = 600;
  int jobs = 1;
};

/// One CSV row: (N, T, seed, lhs, rhs_core, gap) plus a status string that is
/// "ok", "fail" or an error message.
struct SweepRow {
  int N = 0;
  int T = 0;
  std::uint64_t seed = 0;
  double lhs = 0.0;
  double rhs_core = 0.0;
  double gap = 0.0;
  std::string status = "ok";
};

/// Tables keyed by inequality: nap, transient, corollary, telescoping, lemma3.
/// Each table has |N_list| * |T_list| * seeds rows in (N, T, seed) order.
struct SweepBundle {
  std::map<std::string, std::vector<SweepRow>> tables;
};

/// Cartesian execution of closed-loop runs and every per-run check. Rows are
/// computed concurrently on cfg.jobs threads and stored in a fixed order;
/// failures are recorded per row and never abort the sweep.
SweepBundle sweep(const ocp::OcpProblem& problem, const SweepConfig& cfg);

/// Pass/fail per inequality over a bundle:
///  nap          tc: gap(N) nonincreasing (slack) per (T, seed), gap at the
///               largest N <= final_tol; uc: gap(N)/T nonincreasing
///  transient    every gap >= -tol and gap(N) nonincreasing per (T, seed)
///  corollary, telescoping   every row ok
///  lemma3       max residual over rows nonincreasing in N (uc)
struct Judgement {
  bool pass = false;
  std::string detail;
};
std::map<std::string, Judgement> judge(const SweepBundle& bundle, ocp::Mode mode, double slack = 1e-8,
                                       double final_tol = 1e-4, double transient_tol = 1e-6);

}  // namespace tubempc::analysis
