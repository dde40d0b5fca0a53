#include "tubempc/analysis/sweep.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "tubempc/cost/stage_cost.hpp"

namespace tubempc::analysis {

namespace {

const char* const kTables[] = {"nap", "transient", "corollary", "telescoping", "lemma3"};

struct Task {
  int N, T;
  std::uint64_t seed;
};

/// V_inf proxy memoised on the exact bits of the initial state; values do not
/// depend on evaluation order, so sharing across threads stays deterministic.
class ProxyCache {
 public:
  double get(const ocp::OcpProblem& problem, const Vector& z0, int N_inf) {
    std::vector<double> key(z0.data(), z0.data() + z0.size());
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    const double v = ocp::value_inf_proxy(problem, z0, N_inf);
    std::lock_guard<std::mutex> lock(mu_);
    cache_.emplace(std::move(key), v);
    return v;
  }

 private:
  std::mutex mu_;
  std::map<std::vector<double>, double> cache_;
};

SweepRow row_of(const Task& t) { return SweepRow{t.N, t.T, t.seed, 0.0, 0.0, 0.0, "ok"}; }

void fill(SweepRow& row, double lhs, double rhs, bool pass) {
  row.lhs = lhs;
  row.rhs_core = rhs;
  row.gap = lhs - rhs;
  row.status = pass ? "ok" : "fail";
}

std::map<std::string, SweepRow> run_task(const ocp::OcpProblem& tmpl, const SweepConfig& cfg, const Task& task,
                                        double kappa_ell, ProxyCache& cache) {
  std::map<std::string, SweepRow> out;
  for (const char* name : kTables) out[name] = row_of(task);
  try {
    ocp::OcpProblem problem = tmpl;
    problem.N = task.N;
    closedloop::DisturbanceSource dist{cfg.disturbance, task.seed, cfg.sequence};
    const auto log = closedloop::run(problem, cfg.x0, task.T, dist);
    if (!log.complete()) {
      const std::string msg = std::string(closedloop::to_string(log.status)) + " at step " +
                              std::to_string(log.failed_step);
      for (auto& [name, row] : out) row.status = msg;
      return out;
    }
    const auto& s = *problem.setup;
    const double lhs = jcl_nominal(log, s, task.T);

    const double vinf0 = cache.get(problem, log.steps.front().z0, cfg.N_inf);
    const double vinfT = cache.get(problem, log.steps.back().z0, cfg.N_inf);
    fill(out["nap"], lhs, vinf0 - vinfT, true);

    const auto tr = verify_transient(log, problem, task.T);
    fill(out["transient"], tr.lhs, tr.rhs_core, tr.pass);

    const auto co = verify_corollaries(log, s, task.T, kappa_ell);
    if (s.stage.variant == cost::CostVariant::worst_case) fill(out["corollary"], co.jcl_real, co.jcl_nominal, co.pass);
    else fill(out["corollary"], co.excess, co.bound, co.pass);
    if (!co.applicable) out["corollary"].status = "not_applicable";

    const auto te = check_telescoping(log, s, task.T, problem.mode == ocp::Mode::tc);
    fill(out["telescoping"], te.telescoped, te.direct, te.pass);
    out["telescoping"].gap = te.worst_decrease;

    const auto l3 = lemma3_residual(log, s, task.T);
    fill(out["lemma3"], l3.worst, 0.0, true);
  } catch (const std::exception& e) {
    for (auto& [name, row] : out) row.status = std::string("error: ") + e.what();
  }
  return out;
}

}  // namespace

SweepBundle sweep(const ocp::OcpProblem& problem, const SweepConfig& cfg) {
  SweepBundle bundle;
  for (const char* name : kTables) bundle.tables[name];
  std::vector<Task> tasks;
  for (int N : cfg.N_list)
    for (int T : cfg.T_list)
      for (int k = 0; k < cfg.seeds; ++k) tasks.push_back(Task{N, T, cfg.base_seed + static_cast<std::uint64_t>(k)});
  if (tasks.empty()) return bundle;

  const auto& s = *problem.setup;
  const double kappa_ell = cost::lipschitz_const(s.stage, s.model, s.constraints.Z_pi);
  ProxyCache cache;
  std::vector<std::map<std::string, SweepRow>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < tasks.size(); i = next++) results[i] = run_task(problem, cfg, tasks[i], kappa_ell, cache);
  };
  const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (auto& res : results)
    for (auto& [name, row] : res) bundle.tables[name].push_back(std::move(row));
  return bundle;
}

std::map<std::string, Judgement> judge(const SweepBundle& bundle, ocp::Mode mode, double slack, double final_tol,
                                       double transient_tol) {
  std::map<std::string, Judgement> out;
  auto groups = [](const std::vector<SweepRow>& rows) {
    // (T, seed) -> gaps ordered by N as they appear
    std::map<std::pair<int, std::uint64_t>, std::vector<const SweepRow*>> g;
    for (const auto& r : rows) g[{r.T, r.seed}].push_back(&r);
    return g;
  };
  auto all_ok = [](const std::vector<SweepRow>& rows, std::string& detail) {
    for (const auto& r : rows)
      if (r.status != "ok" && r.status != "not_applicable") {
        std::ostringstream os;
        os << "N=" << r.N << " T=" << r.T << " seed=" << r.seed << ": " << r.status;
        detail = os.str();
        return false;
      }
    return true;
  };

  for (const auto& [name, rows] : bundle.tables) {
    Judgement j;
    j.pass = all_ok(rows, j.detail);
    if (name == "nap" && j.pass) {
      for (const auto& [key, list] : groups(rows)) {
        std::vector<double> gaps;
        for (const auto* r : list) gaps.push_back(mode == ocp::Mode::tc ? r->gap : r->gap / std::max(1, r->T));
        if (!nonincreasing(gaps, slack)) {
          j.pass = false;
          j.detail = "gap not nonincreasing in N at T=" + std::to_string(key.first);
        } else if (mode == ocp::Mode::tc && !gaps.empty() && gaps.back() > final_tol) {
          j.pass = false;
          j.detail = "gap at largest N above tolerance at T=" + std::to_string(key.first);
        }
      }
    } else if (name == "transient") {
      j.pass = true;
      for (const auto& r : rows) {
        if (r.status.rfind("error", 0) == 0 || r.status.find("infeasible") != std::string::npos) {
          j.pass = false;
          j.detail = r.status;
        } else if (!(r.gap >= -transient_tol)) {
          j.pass = false;
          std::ostringstream os;
          os << "gap " << r.gap << " below " << -transient_tol << " at N=" << r.N << " T=" << r.T;
          j.detail = os.str();
        }
      }
      for (const auto& [key, list] : groups(rows)) {
        std::vector<double> gaps;
        for (const auto* r : list) gaps.push_back(r->gap);
        if (!nonincreasing(gaps, slack)) {
          j.pass = false;
          if (j.detail.empty()) j.detail = "gap not nonincreasing in N at T=" + std::to_string(key.first);
        }
      }
    } else if (name == "lemma3" && j.pass) {
      std::map<int, double> worst;
      for (const auto& r : rows) worst[r.N] = worst.count(r.N) ? std::max(worst[r.N], r.lhs) : r.lhs;
      std::vector<double> seq;
      for (const auto& [N, w] : worst) seq.push_back(w);
      if (mode == ocp::Mode::uc && !nonincreasing(seq, slack)) {
        j.pass = false;
        j.detail = "per-step residual not nonincreasing in N";
      }
    }
    if (j.pass && j.detail.empty()) j.detail = "ok";
    out[name] = j;
  }
  return out;
}

}  // namespace tubempc::analysis
