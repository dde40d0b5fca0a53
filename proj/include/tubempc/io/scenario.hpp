#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tubempc/analysis/sweep.hpp"
#include "tubempc/io/serialize.hpp"

namespace tubempc::io {

/**
 * Scenario document. model, constraints and cost are either inline objects
 * or paths relative to the scenario file. Omega is "computed" (default) or
 * {"file": path}.
 *
 *   {"schema_version": 1, "name": "e1",
 *    "model": {...} | "model.json",
 *    "constraints": {"Z": poly, "W": poly} | "constraints.json",
 *    "cost": {...} | "cost.json",
 *    "omega": "computed" | {"file": "omega.json"}, "rpi_tol": 1e-6,
 *    "mode": "tc", "variant": "nominal", "N": 10, "T": 60, "N_inf": 600,
 *    "x0": [0.0], "seed": 7,
 *    "disturbance": {"kind": "uniform"} | {"kind": "file", "file": "w.json"},
 *    "sweep": {"N": [...], "T": [...], "seeds": 10},
 *    "verify": {"pair_states": [[..], ..], "eps": [...], "slack": 1e-8,
 *               "final_tol": 1e-4, "transient_tol": 1e-6, "rci_samples": 10000},
 *    "output": "out/e1"}
 */
struct Scenario {
  std::string name;
  std::filesystem::path source;
  std::optional<model::LinearTubeModel> model;
  std::optional<Polytope> Z, W, omega;
  cost::StageCost cost;
  double rpi_tol = 1e-6;
  ocp::Mode mode = ocp::Mode::tc;
  int N = 10;
  int T = 60;
  int N_inf = 600;
  Vector x0;
  std::uint64_t seed = 0;
  closedloop::DisturbanceKind disturbance = closedloop::DisturbanceKind::zero;
  std::vector<Vector> sequence;
  std::vector<int> sweep_N{6, 10, 20, 40, 60};
  std::vector<int> sweep_T{20, 40, 60};
  int sweep_seeds = 10;
  std::vector<Vector> pair_states;
  std::vector<double> eps_grid{0.02, 0.05, 0.1, 0.2};
  double slack = 1e-8;
  double final_tol = 1e-4;
  double transient_tol = 1e-6;
  std::size_t rci_samples = 10000;
  std::filesystem::path output = "out";
};

/// Parses and cross-validates (dimensions, file references, x0, disturbance
/// samples in W). Throws ConfigError, DimensionError or DisturbanceError.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const json& j, const std::filesystem::path& base_dir);

/// Reads a disturbance file: a JSON array of vectors (or numbers).
std::vector<Vector> load_sequence(const std::filesystem::path& path);

/// Runs the RCI and ROSS construction for the scenario.
std::shared_ptr<const ocp::TubeSetup> build_setup(const Scenario& sc);
ocp::OcpProblem make_problem(const Scenario& sc, std::shared_ptr<const ocp::TubeSetup> setup);
analysis::SweepConfig make_sweep_config(const Scenario& sc, int jobs);

}  // namespace tubempc::io
