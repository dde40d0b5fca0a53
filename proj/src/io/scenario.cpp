#include "tubempc/io/scenario.hpp"

#include "tubempc/error.hpp"
#include "tubempc/io/files.hpp"

namespace tubempc::io {

namespace {

json resolve(const json& j, const std::filesystem::path& base, const char* what) {
  if (j.is_string()) {
    const auto path = base / j.get<std::string>();
    if (!std::filesystem::exists(path)) throw ConfigError(std::string(what) + ": file not found: " + path.string());
    try {
      return json::parse(read_file(path));
    } catch (const json::exception& e) {
      throw ConfigError(std::string(what) + ": " + e.what());
    }
  }
  if (!j.is_object()) throw ConfigError(std::string(what) + ": expected an object or a file name");
  return j;
}

std::vector<Vector> sequence_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("disturbance sequence: expected an array");
  std::vector<Vector> out;
  for (const auto& e : j) out.push_back(vector_from_json(e, "disturbance sample"));
  return out;
}

}  // namespace

std::vector<Vector> load_sequence(const std::filesystem::path& path) {
  try {
    return sequence_from_json(json::parse(read_file(path)));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("disturbance file: ") + e.what());
  }
}

Scenario parse_scenario(const json& j, const std::filesystem::path& base) {
  if (!j.is_object()) throw ConfigError("scenario: expected an object");
  Scenario sc;
  try {
    const int version = j.value("schema_version", kSchemaVersion);
    if (version != kSchemaVersion) throw ConfigError("scenario: unsupported schema_version");
    sc.name = j.value("name", std::string("scenario"));
    sc.model = model_from_json(resolve(j.at("model"), base, "model"));
    const json cons = resolve(j.at("constraints"), base, "constraints");
    sc.Z = polytope_from_json(cons.at("Z"));
    sc.W = polytope_from_json(cons.at("W"));
    sc.cost = cost_from_json(resolve(j.at("cost"), base, "cost"));
    if (j.contains("variant")) sc.cost.variant = cost::parse_variant(j.at("variant").get<std::string>());
    if (j.contains("omega")) {
      const auto& o = j.at("omega");
      if (o.is_object()) sc.omega = polytope_from_json(resolve(o.at("file"), base, "omega"));
      else if (!(o.is_string() && o.get<std::string>() == "computed"))
        throw ConfigError("scenario: omega must be \"computed\" or {\"file\": ...}");
    }
    sc.rpi_tol = j.value("rpi_tol", sc.rpi_tol);
    sc.mode = ocp::parse_mode(j.value("mode", std::string("tc")));
    sc.N = j.value("N", sc.N);
    sc.T = j.value("T", sc.T);
    sc.N_inf = j.value("N_inf", 30 * sc.N);
    sc.seed = j.value("seed", std::uint64_t{0});
    sc.x0 = j.contains("x0") ? vector_from_json(j.at("x0"), "x0") : Vector::Zero(sc.model->n());
    if (j.contains("disturbance")) {
      const auto& d = j.at("disturbance");
      sc.disturbance = closedloop::parse_disturbance_kind(d.value("kind", std::string("zero")));
      if (d.contains("sequence")) sc.sequence = sequence_from_json(d.at("sequence"));
      if (d.contains("file")) sc.sequence = load_sequence(base / d.at("file").get<std::string>());
    }
    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      sc.sweep_N = s.value("N", sc.sweep_N);
      sc.sweep_T = s.value("T", sc.sweep_T);
      sc.sweep_seeds = s.value("seeds", sc.sweep_seeds);
    }
    if (j.contains("verify")) {
      const auto& v = j.at("verify");
      if (v.contains("pair_states"))
        for (const auto& p : v.at("pair_states")) sc.pair_states.push_back(vector_from_json(p, "pair_states"));
      sc.eps_grid = v.value("eps", sc.eps_grid);
      sc.slack = v.value("slack", sc.slack);
      sc.final_tol = v.value("final_tol", sc.final_tol);
      sc.transient_tol = v.value("transient_tol", sc.transient_tol);
      sc.rci_samples = v.value("rci_samples", sc.rci_samples);
    }
    sc.output = j.value("output", sc.output.string());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }

  // cross-validation
  const int n = sc.model->n(), m = sc.model->m();
  if (sc.Z->dim() != n + m) throw DimensionError("scenario: Z must have dimension n + m");
  if (sc.W->dim() != n) throw DimensionError("scenario: W must have dimension n");
  sc.cost.validate(n, m);
  if (sc.x0.size() != n) throw DimensionError("scenario: x0 must have dimension n");
  if (sc.omega && sc.omega->dim() != n) throw DimensionError("scenario: omega must have dimension n");
  for (const auto& p : sc.pair_states)
    if (p.size() != n) throw DimensionError("scenario: pair_states must have dimension n");
  if (sc.N < 1 || sc.T < 0 || sc.N_inf < 1) throw ConfigError("scenario: N, N_inf must be positive and T >= 0");
  for (std::size_t t = 0; t < sc.sequence.size(); ++t)
    if (sc.sequence[t].size() != n || !sc.W->contains(sc.sequence[t], geometry::kTol))
      throw DisturbanceError("disturbance sample " + std::to_string(t) + " lies outside W");
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  Scenario sc = parse_scenario(j, path.parent_path());
  sc.source = path;
  return sc;
}

std::shared_ptr<const ocp::TubeSetup> build_setup(const Scenario& sc) {
  return ocp::build_setup(*sc.model, *sc.Z, *sc.W, sc.cost, sc.rpi_tol, sc.omega);
}

ocp::OcpProblem make_problem(const Scenario& sc, std::shared_ptr<const ocp::TubeSetup> setup) {
  ocp::OcpProblem p;
  p.setup = std::move(setup);
  p.N = sc.N;
  p.mode = sc.mode;
  return p;
}

analysis::SweepConfig make_sweep_config(const Scenario& sc, int jobs) {
  analysis::SweepConfig cfg;
  cfg.N_list = sc.sweep_N;
  cfg.T_list = sc.sweep_T;
  cfg.seeds = sc.sweep_seeds;
  cfg.base_seed = sc.seed;
  cfg.x0 = sc.x0;
  cfg.disturbance = sc.disturbance;
  cfg.sequence = sc.sequence;
  cfg.N_inf = sc.N_inf;
  cfg.jobs = jobs;
  return cfg;
}

}  // namespace tubempc::io
