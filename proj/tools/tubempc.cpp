// Command-line front end: rci, simulate, verify, sweep.
//
// Exit codes
//   0  success
//   1  a selected verification failed
//   2  configuration or standing-assumption error (includes an infeasible
//      initial state and an empty tightened constraint set)
//   3  infeasibility in the middle of a closed-loop run
//   4  disturbance validation failed
//   5  verification selector refused (unknown name, too few horizons)

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <set>

#include "tubempc/analysis/sweep.hpp"
#include "tubempc/cost/dissipativity.hpp"
#include "tubempc/error.hpp"
#include "tubempc/io/files.hpp"
#include "tubempc/io/scenario.hpp"

using namespace tubempc;
namespace fs = std::filesystem;
using io::json;

namespace {

enum Exit { kOk = 0, kFailed = 1, kConfig = 2, kMidRun = 3, kDisturbance = 4, kSelector = 5 };

struct Common {
  std::string scenario;
  std::string out;
  int jobs = 1;
};

fs::path out_dir(const Common& c, const io::Scenario& sc) {
  if (!c.out.empty()) return c.out;
  return sc.output.is_absolute() ? sc.output : fs::path(sc.source).parent_path() / sc.output;
}

json judgement_json(bool pass, const std::string& detail) { return json{{"pass", pass}, {"detail", detail}}; }

int cmd_rci(const Common& c) {
  const auto sc = io::load_scenario(c.scenario);
  const auto setup = io::build_setup(sc);
  const auto rep = rci::verify_rci(setup->model, setup->omega(), setup->constraints.W, sc.rci_samples, sc.seed);
  const double cert = rci::rpi_certificate(setup->model.AK(), setup->omega(), setup->constraints.W);
  const fs::path dir = out_dir(c, sc);
  io::write_atomic(dir / "omega.json", io::dump(io::to_json(setup->omega())));
  io::write_atomic(dir / "zbar.json", io::dump(io::to_json(setup->Z_bar)));
  json r{{"schema_version", io::kSchemaVersion},
         {"scenario", sc.name},
         {"terms", setup->rpi.terms},
         {"alpha", setup->rpi.alpha},
         {"hausdorff_bound", setup->rpi.hausdorff_bound},
         {"certificate", cert},
         {"verification", {{"worst_margin", rep.worst_margin}, {"pairs", rep.pairs}, {"holds", rep.holds()}}},
         {"ross", {{"zs", io::to_json(setup->ross.zs)}, {"vs", io::to_json(setup->ross.vs)},
                   {"nu", io::to_json(setup->ross.nu)}, {"value", setup->ross.value},
                   {"margin", setup->ross.margin}}}};
  io::write_atomic(dir / "rci_report.json", io::dump(r));
  std::cout << "omega: " << setup->rpi.terms << " terms, alpha " << setup->rpi.alpha << ", worst margin "
            << rep.worst_margin << "\n";
  return rep.holds() && cert <= geometry::kTol ? kOk : kFailed;
}

struct SimulateFlags {
  std::optional<std::uint64_t> seed;
  std::optional<int> horizon, steps;
  std::string mode, variant, dist, dist_file;
};

int cmd_simulate(const Common& c, const SimulateFlags& f) {
  auto sc = io::load_scenario(c.scenario);
  if (f.seed) sc.seed = *f.seed;
  if (f.horizon) sc.N = *f.horizon;
  if (f.steps) sc.T = *f.steps;
  if (!f.mode.empty()) sc.mode = ocp::parse_mode(f.mode);
  if (!f.variant.empty()) sc.cost.variant = cost::parse_variant(f.variant);
  if (!f.dist.empty()) sc.disturbance = closedloop::parse_disturbance_kind(f.dist);
  if (!f.dist_file.empty()) sc.sequence = io::load_sequence(f.dist_file);
  if (sc.disturbance == closedloop::DisturbanceKind::explicit_sequence)
    for (std::size_t t = 0; t < sc.sequence.size(); ++t)
      if (sc.sequence[t].size() != sc.W->dim() || !sc.W->contains(sc.sequence[t], geometry::kTol))
        throw DisturbanceError("disturbance sample " + std::to_string(t) + " lies outside W");

  const auto setup = io::build_setup(sc);
  const auto problem = io::make_problem(sc, setup);
  const closedloop::DisturbanceSource dist{sc.disturbance, sc.seed, sc.sequence};
  const auto log = closedloop::run(problem, sc.x0, sc.T, dist);

  const fs::path dir = out_dir(c, sc);
  io::write_atomic(dir / "log.csv", io::log_csv(log, *setup));
  json summary{{"schema_version", io::kSchemaVersion},
               {"scenario", sc.name},
               {"N", log.N},
               {"T", log.T},
               {"mode", std::string(ocp::to_string(log.mode))},
               {"variant", std::string(cost::to_string(log.variant))},
               {"disturbance", std::string(closedloop::to_string(log.disturbance))},
               {"seed", log.seed},
               {"status", std::string(closedloop::to_string(log.status))},
               {"failed_step", log.failed_step}};
  if (log.complete()) {
    summary["jcl_nominal"] = analysis::jcl_nominal(log, *setup, log.T);
    summary["jcl_real"] = analysis::jcl_real(log, *setup, log.T);
    summary["tube_violation"] = closedloop::tube_violation(log, setup->omega());
    summary["final_distance"] = (log.steps.back().z0 - setup->ross.zs).cwiseAbs().maxCoeff();
  }
  io::write_atomic(dir / "summary.json", io::dump(summary));
  json meta{{"solve_seconds", json::array()}};
  for (const auto& r : log.steps) meta["solve_seconds"].push_back(r.solve_seconds);
  io::write_atomic(dir / "run_meta.json", io::dump(meta));

  switch (log.status) {
    case closedloop::RunStatus::complete:
      std::cout << "J_cl = " << summary["jcl_nominal"].get<double>() << " over " << log.T << " steps\n";
      return kOk;
    case closedloop::RunStatus::initial_infeasible:
      std::cerr << "initial state is not feasible for the tube problem\n";
      return kConfig;
    case closedloop::RunStatus::midrun_infeasible:
      std::cerr << "tube problem infeasible at step " << log.failed_step << "\n";
      return kMidRun;
  }
  return kOk;
}

const std::vector<std::string> kSelectors{"rci",      "dissipativity", "turnpike", "lemma_gap",  "nap_tc",
                                          "nap_uc",   "transient",     "corollaries", "telescoping"};

int cmd_verify(const Common& c, std::vector<std::string> selectors, const std::vector<int>& N_override) {
  auto sc = io::load_scenario(c.scenario);
  if (!N_override.empty()) sc.sweep_N = N_override;
  if (selectors.empty() || std::find(selectors.begin(), selectors.end(), "all") != selectors.end())
    selectors = kSelectors;
  for (const auto& s : selectors)
    if (std::find(kSelectors.begin(), kSelectors.end(), s) == kSelectors.end()) {
      std::cerr << "unknown selector '" << s << "'\n";
      return kSelector;
    }
  std::set<int> distinct(sc.sweep_N.begin(), sc.sweep_N.end());
  for (const auto& s : selectors)
    if ((s == "nap_tc" || s == "nap_uc" || s == "transient" || s == "lemma_gap" || s == "turnpike") &&
        distinct.size() < 2) {
      std::cerr << "selector '" << s << "' needs at least two horizons\n";
      return kSelector;
    }
  std::sort(sc.sweep_N.begin(), sc.sweep_N.end());

  const auto setup = io::build_setup(sc);
  const fs::path dir = out_dir(c, sc);
  json results = json::object();
  bool all_pass = true;
  auto record = [&](const std::string& name, bool pass, const std::string& detail) {
    results[name] = judgement_json(pass, detail);
    all_pass = all_pass && pass;
    std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
  };
  auto sweep_for = [&](ocp::Mode mode, cost::CostVariant variant) {
    auto s = variant == setup->stage.variant ? setup : ocp::with_variant(*setup, variant);
    auto problem = io::make_problem(sc, s);
    problem.mode = mode;
    return analysis::sweep(problem, io::make_sweep_config(sc, c.jobs));
  };

  for (const auto& sel : selectors) {
    if (sel == "rci") {
      const auto rep = rci::verify_rci(setup->model, setup->omega(), setup->constraints.W, sc.rci_samples, sc.seed);
      const double cert = rci::rpi_certificate(setup->model.AK(), setup->omega(), setup->constraints.W);
      record(sel, rep.holds() && cert <= geometry::kTol,
             "worst margin " + io::fmt(rep.worst_margin) + ", certificate " + io::fmt(cert));
    } else if (sel == "dissipativity") {
      const auto rep = cost::check_dissipativity(setup->ell, setup->model, setup->ross, setup->Z_bar);
      record(sel, rep.holds(), "a = " + io::fmt(rep.a) + ", min rotated cost " + io::fmt(rep.min_margin));
    } else if (sel == "turnpike") {
      io::CsvWriter csv({"eps", "N", "cardinality"});
      bool pass = true;
      auto problem = io::make_problem(sc, setup);
      std::vector<ocp::OcpSolution> sols;
      for (int N : sc.sweep_N) {
        problem.N = N;
        sols.push_back(ocp::solve_ocp(problem, sc.x0));
        if (!sols.back().optimal()) throw InfeasibleError("turnpike: x0 is not in X_N for N = " + std::to_string(N));
      }
      // horizons below 10 cannot reach the turnpike yet, so they are reported but not judged
      for (double eps : sc.eps_grid) {
        std::vector<double> card;
        for (std::size_t i = 0; i < sols.size(); ++i) {
          const int c = analysis::turnpike_profile(sols[i], setup->ross, eps).cardinality;
          if (sc.sweep_N[i] >= 10) card.push_back(c);
          csv.row({io::fmt(eps), std::to_string(sc.sweep_N[i]), std::to_string(c)});
        }
        pass = pass && analysis::nonincreasing(card, 0.0);
      }
      io::write_atomic(dir / "turnpike.csv", csv.str());
      record(sel, pass, pass ? "cardinality does not grow with N" : "cardinality grows with N");
    } else if (sel == "lemma_gap") {
      const auto curve = analysis::lemma_gap_curve(io::make_problem(sc, setup), sc.pair_states, sc.sweep_N, sc.N_inf,
                                                   sc.slack, sc.final_tol);
      io::CsvWriter csv({"N", "delta"});
      for (std::size_t i = 0; i < curve.N.size(); ++i) csv.row({std::to_string(curve.N[i]), io::fmt(curve.delta[i])});
      io::write_atomic(dir / "lemma_gap.csv", csv.str());
      record(sel, curve.pass, "delta at largest N " + io::fmt(curve.delta.empty() ? 0.0 : curve.delta.back()));
    } else if (sel == "nap_tc" || sel == "nap_uc" || sel == "transient" || sel == "telescoping" ||
               sel == "corollaries") {
      const ocp::Mode mode = sel == "nap_uc" ? ocp::Mode::uc : sel == "nap_tc" || sel == "telescoping" ? ocp::Mode::tc : sc.mode;
      if (sel == "corollaries") {
        bool pass = true;
        std::string detail = "ok";
        for (auto variant : {cost::CostVariant::worst_case, cost::CostVariant::nominal}) {
          const auto bundle = sweep_for(mode, variant);
          const auto& rows = bundle.tables.at("corollary");
          io::write_atomic(dir / ("corollary_" + std::string(cost::to_string(variant)) + ".csv"), io::sweep_csv(rows));
          const auto j = analysis::judge(bundle, mode, sc.slack, sc.final_tol, sc.transient_tol).at("corollary");
          if (!j.pass) {
            pass = false;
            detail = std::string(cost::to_string(variant)) + ": " + j.detail;
          }
        }
        record(sel, pass, detail);
        continue;
      }
      const auto bundle = sweep_for(mode, setup->stage.variant);
      const std::string table = sel == "transient" ? "transient" : sel == "telescoping" ? "telescoping" : "nap";
      io::write_atomic(dir / (sel + ".csv"), io::sweep_csv(bundle.tables.at(table)));
      auto j = analysis::judge(bundle, mode, sc.slack, sc.final_tol, sc.transient_tol).at(table);
      if (sel == "transient" && !bundle.tables.at("transient").empty()) {
        // inflating kappa can only lower the baseline
        auto problem = io::make_problem(sc, setup);
        const auto& row = bundle.tables.at("transient").front();
        const auto sol = ocp::solve_tube_ocp(problem, sc.x0);
        if (sol.optimal()) {
          const double kappa = 1e-2;
          const double b1 = analysis::transient_baseline(problem, sol.z.front(), row.T, kappa);
          const double b10 = analysis::transient_baseline(problem, sol.z.front(), row.T, 10 * kappa);
          if (b10 > b1 + sc.slack) {
            j.pass = false;
            j.detail = "baseline increased when kappa was inflated";
          }
        }
      }
      record(sel, j.pass, j.detail);
    }
  }
  json report{{"schema_version", io::kSchemaVersion}, {"scenario", sc.name}, {"results", results}};
  io::write_atomic(dir / "verify.json", io::dump(report));
  return all_pass ? kOk : kFailed;
}

int cmd_sweep(const Common& c) {
  const auto sc = io::load_scenario(c.scenario);
  const auto setup = io::build_setup(sc);
  const auto problem = io::make_problem(sc, setup);
  const auto bundle = analysis::sweep(problem, io::make_sweep_config(sc, c.jobs));
  const fs::path dir = out_dir(c, sc);
  for (const auto& [name, rows] : bundle.tables) io::write_atomic(dir / (name + ".csv"), io::sweep_csv(rows));
  json summary{{"schema_version", io::kSchemaVersion},
               {"scenario", sc.name},
               {"mode", std::string(ocp::to_string(sc.mode))},
               {"rows", bundle.tables.empty() ? 0 : bundle.tables.begin()->second.size()}};
  bool all = true;
  for (const auto& [name, j] : analysis::judge(bundle, sc.mode, sc.slack, sc.final_tol, sc.transient_tol)) {
    summary["results"][name] = judgement_json(j.pass, j.detail);
    all = all && j.pass;
    std::cout << (j.pass ? "PASS " : "FAIL ") << name << ": " << j.detail << "\n";
  }
  io::write_atomic(dir / "sweep.json", io::dump(summary));
  return all ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tube-based robust economic MPC"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", common.scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "output directory (default: scenario 'output')");
    sub->add_option("--jobs", common.jobs, "worker threads")->check(CLI::PositiveNumber);
  };

  auto* rci_cmd = app.add_subcommand("rci", "compute Omega and Z_bar, verify invariance");
  add_common(rci_cmd);

  SimulateFlags sim;
  auto* sim_cmd = app.add_subcommand("simulate", "closed-loop run");
  add_common(sim_cmd);
  sim_cmd->add_option("--seed", sim.seed);
  sim_cmd->add_option("--horizon", sim.horizon)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--steps", sim.steps)->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--mode", sim.mode)->check(CLI::IsMember({"tc", "uc"}));
  sim_cmd->add_option("--variant", sim.variant)->check(CLI::IsMember({"nominal", "integral", "worst_case"}));
  sim_cmd->add_option("--dist", sim.dist)->check(CLI::IsMember({"zero", "uniform", "vertex", "file"}));
  sim_cmd->add_option("--dist-file", sim.dist_file)->check(CLI::ExistingFile);

  std::vector<std::string> selectors;
  std::vector<int> n_list;
  auto* ver_cmd = app.add_subcommand("verify", "check the performance inequalities");
  add_common(ver_cmd);
  ver_cmd->add_option("--select", selectors, "all, rci, dissipativity, turnpike, lemma_gap, nap_tc, nap_uc, "
                                             "transient, corollaries, telescoping");
  ver_cmd->add_option("--N-list", n_list, "override the scenario horizon list");

  auto* sweep_cmd = app.add_subcommand("sweep", "run the (N, T, seed) sweep and write one CSV per inequality");
  add_common(sweep_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (rci_cmd->parsed()) return cmd_rci(common);
    if (sim_cmd->parsed()) return cmd_simulate(common, sim);
    if (ver_cmd->parsed()) return cmd_verify(common, selectors, n_list);
    if (sweep_cmd->parsed()) return cmd_sweep(common);
  } catch (const DisturbanceError& e) {
    std::cerr << "disturbance error: " << e.what() << "\n";
    return kDisturbance;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
  return kOk;
}
