#include "tubempc/ocp/ocp.hpp"

#include <algorithm>
#include <cmath>

#include "tubempc/error.hpp"

namespace tubempc::ocp {

namespace {

using convex::SolveStatus;
using Eigen::Index;
using Triplets = convex::Triplets;

enum class Start { fixed, tube };
enum class End { none, equality, quadratic, ball };

struct Layout {
  int n, m, N;
  bool epi;
  Index z(int k) const { return static_cast<Index>(k) * n; }
  Index v(int k) const { return static_cast<Index>(N + 1) * n + static_cast<Index>(k) * m; }
  Index t(int k) const { return static_cast<Index>(N + 1) * n + static_cast<Index>(N) * m + k; }
  Index size() const { return static_cast<Index>(N + 1) * n + static_cast<Index>(N) * m + (epi ? N : 0); }
};

struct Transcription {
  Layout lay;
  convex::ConvexProgram prog;
};

Transcription transcribe(const TubeSetup& s, int N, Start start, const Vector& init, End end, double kappa,
                         const QuadraticTerminal* quad) {
  const int n = s.n(), m = s.m(), d = n + m;
  const auto& ell = s.ell;
  const Layout lay{n, m, N, ell.piecewise()};
  convex::ConvexProgram prog(lay.size());

  // objective
  Triplets pt;
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const double hij = ell.H(i, j);
        if (hij == 0.0) continue;
        const Index ri = i < n ? lay.z(k) + i : lay.v(k) + (i - n);
        const Index cj = j < n ? lay.z(k) + j : lay.v(k) + (j - n);
        pt.emplace_back(ri, cj, hij);
      }
    if (lay.epi) {
      prog.q(lay.t(k)) = 1.0;
    } else {
      prog.q.segment(lay.z(k), n) += ell.g[0].head(n);
      prog.q.segment(lay.v(k), m) += ell.g[0].tail(m);
      prog.r += ell.c[0];
    }
    prog.r -= ell.offset;
  }
  if (end == End::quadratic) {
    const Matrix P2 = 2.0 * quad->P;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (P2(i, j) != 0.0) pt.emplace_back(lay.z(N) + i, lay.z(N) + j, P2(i, j));
    prog.q.segment(lay.z(N), n) -= P2 * s.ross.zs;
    prog.r += s.ross.zs.dot(quad->P * s.ross.zs);
  }
  prog.P.setFromTriplets(pt.begin(), pt.end());

  // equalities
  Triplets at;
  std::vector<double> b;
  Index row = 0;
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < n; ++i) {
      at.emplace_back(row, lay.z(k + 1) + i, 1.0);
      for (int j = 0; j < n; ++j)
        if (s.model.AK()(i, j) != 0.0) at.emplace_back(row, lay.z(k) + j, -s.model.AK()(i, j));
      for (int j = 0; j < m; ++j)
        if (s.model.B()(i, j) != 0.0) at.emplace_back(row, lay.v(k) + j, -s.model.B()(i, j));
      b.push_back(0.0);
      ++row;
    }
  }
  if (start == Start::fixed) {
    for (int i = 0; i < n; ++i, ++row) {
      at.emplace_back(row, lay.z(0) + i, 1.0);
      b.push_back(init(i));
    }
  }
  if (end == End::equality) {
    for (int i = 0; i < n; ++i, ++row) {
      at.emplace_back(row, lay.z(N) + i, 1.0);
      b.push_back(s.ross.zs(i));
    }
  }
  prog.A.resize(row, lay.size());
  prog.A.setFromTriplets(at.begin(), at.end());
  prog.b = Eigen::Map<const Vector>(b.data(), static_cast<Index>(b.size()));

  // inequalities
  Triplets gt;
  std::vector<double> h;
  row = 0;
  const Matrix& ZN = s.Z_bar.normals();
  const Vector& Zo = s.Z_bar.offsets();
  for (int k = 0; k < N; ++k) {
    for (Index r = 0; r < ZN.rows(); ++r, ++row) {
      for (int j = 0; j < d; ++j) {
        if (ZN(r, j) == 0.0) continue;
        gt.emplace_back(row, j < n ? lay.z(k) + j : lay.v(k) + (j - n), ZN(r, j));
      }
      h.push_back(Zo(r));
    }
    if (lay.epi) {
      for (std::size_t p = 0; p < ell.g.size(); ++p, ++row) {
        for (int j = 0; j < d; ++j) {
          const double gj = ell.g[p](j);
          if (gj != 0.0) gt.emplace_back(row, j < n ? lay.z(k) + j : lay.v(k) + (j - n), gj);
        }
        gt.emplace_back(row, lay.t(k), -1.0);
        h.push_back(-ell.c[p]);
      }
    }
  }
  if (start == Start::tube) {
    // x - z0 in Omega:  -N_omega z0 <= o - N_omega x
    const Matrix& ON = s.omega().normals();
    const Vector rhs = s.omega().offsets() - ON * init;
    for (Index r = 0; r < ON.rows(); ++r, ++row) {
      for (int j = 0; j < n; ++j)
        if (ON(r, j) != 0.0) gt.emplace_back(row, lay.z(0) + j, -ON(r, j));
      h.push_back(rhs(r));
    }
  }
  if (end == End::ball) {
    for (int i = 0; i < n; ++i) {
      gt.emplace_back(row++, lay.z(N) + i, 1.0);
      h.push_back(s.ross.zs(i) + kappa);
      gt.emplace_back(row++, lay.z(N) + i, -1.0);
      h.push_back(-s.ross.zs(i) + kappa);
    }
  }
  prog.G.resize(row, lay.size());
  prog.G.setFromTriplets(gt.begin(), gt.end());
  prog.h = Eigen::Map<const Vector>(h.data(), static_cast<Index>(h.size()));

  if (end == End::quadratic) {
    // (z - zs)'P(z - zs) <= level
    convex::QuadraticRow qr;
    for (int i = 0; i < n; ++i) qr.index.push_back(lay.z(N) + i);
    qr.Q = 2.0 * quad->P;
    qr.a = Vector::Zero(lay.size());
    qr.a.segment(lay.z(N), n) = -2.0 * quad->P * s.ross.zs;
    qr.b = quad->level - s.ross.zs.dot(quad->P * s.ross.zs);
    prog.quadratic.push_back(std::move(qr));
  }
  return Transcription{lay, std::move(prog)};
}

OcpSolution extract(const TubeSetup& s, const Layout& lay, const convex::ConvexSolution& sol) {
  OcpSolution out;
  out.status = sol.status;
  out.iterations = sol.iterations;
  out.kkt_residual = std::max(sol.primal_residual, sol.dual_residual);
  out.value = sol.status == SolveStatus::optimal ? sol.value : std::numeric_limits<double>::infinity();
  for (int k = 0; k <= lay.N; ++k) out.z.push_back(sol.x.segment(lay.z(k), s.n()));
  for (int k = 0; k < lay.N; ++k) out.v.push_back(sol.x.segment(lay.v(k), s.m()));
  return out;
}

std::optional<Vector> shifted_hint(const TubeSetup& s, const Layout& lay, const OcpSolution* prev) {
  if (prev == nullptr || !prev->optimal() || prev->horizon() != lay.N || lay.N < 1) return std::nullopt;
  Vector x(lay.size());
  for (int k = 0; k <= lay.N; ++k) x.segment(lay.z(k), s.n()) = prev->z[static_cast<std::size_t>(std::min(k + 1, lay.N))];
  for (int k = 0; k < lay.N; ++k) {
    const Vector vk = k + 1 < lay.N ? prev->v[static_cast<std::size_t>(k + 1)] : s.ross.vs;
    x.segment(lay.v(k), s.m()) = vk;
    if (lay.epi) x(lay.t(k)) = s.ell.raw(x.segment(lay.z(k), s.n()), vk);
  }
  return x;
}

End end_for(const OcpProblem& p) {
  if (p.mode == Mode::uc) return End::none;
  return p.terminal.kind == TerminalSpec::Kind::equality_at_ross ? End::equality : End::quadratic;
}

void check_problem(const OcpProblem& p, const Vector& x) {
  if (!p.setup) throw ConfigError("OCP without setup");
  if (p.N < 1) throw ConfigError("horizon must be positive");
  if (x.size() != p.setup->n()) throw DimensionError("initial state has the wrong dimension");
  if (!x.allFinite()) throw DimensionError("initial state must be finite");
}

}  // namespace

std::shared_ptr<const TubeSetup> build_setup(const model::LinearTubeModel& model, const Polytope& Z,
                                             const Polytope& W, const cost::StageCost& stage, double rpi_tol,
                                             const std::optional<Polytope>& omega) {
  auto constraints = model::make_constraints(Z, W, model);
  rci::RpiResult rpi = omega ? rci::RpiResult{*omega, 0, std::numeric_limits<double>::quiet_NaN(), 0.0}
                             : rci::min_rpi(model.AK(), W, rpi_tol);
  if (omega) {
    if (omega->dim() != model.n()) throw DimensionError("supplied Omega has the wrong dimension");
    if (rci::rpi_certificate(model.AK(), *omega, W) > geometry::kTol)
      throw AssumptionError("supplied Omega is not robust positively invariant");
  }
  Polytope Z_bar = rci::tighten(constraints.Z_pi, rpi.omega);
  cost::EconomicCost ell = cost::economic_cost(stage, model, rpi.omega);
  cost::Ross ross = cost::compute_ross(ell, model, Z_bar);
  return std::make_shared<const TubeSetup>(TubeSetup{model, std::move(constraints), std::move(rpi), std::move(Z_bar),
                                                     stage, std::move(ell), std::move(ross)});
}

std::shared_ptr<const TubeSetup> with_variant(const TubeSetup& setup, cost::CostVariant variant) {
  cost::StageCost stage = setup.stage;
  stage.variant = variant;
  cost::EconomicCost ell = cost::economic_cost(stage, setup.model, setup.omega());
  cost::Ross ross = cost::compute_ross(ell, setup.model, setup.Z_bar);
  return std::make_shared<const TubeSetup>(
      TubeSetup{setup.model, setup.constraints, setup.rpi, setup.Z_bar, stage, std::move(ell), std::move(ross)});
}

std::string_view to_string(Mode m) { return m == Mode::tc ? "tc" : "uc"; }

Mode parse_mode(std::string_view name) {
  if (name == "tc") return Mode::tc;
  if (name == "uc") return Mode::uc;
  throw ConfigError("unknown mode '" + std::string(name) + "'");
}

OcpSolution solve_ocp(const OcpProblem& problem, const Vector& z0) {
  check_problem(problem, z0);
  const auto& s = *problem.setup;
  const End end = end_for(problem);
  const auto tr = transcribe(s, problem.N, Start::fixed, z0, end, 0.0, &problem.terminal.quad);
  return extract(s, tr.lay, convex::solve_convex(tr.prog, std::nullopt, problem.solver));
}

OcpSolution solve_tube_ocp(const OcpProblem& problem, const Vector& x, const OcpSolution* previous) {
  check_problem(problem, x);
  const auto& s = *problem.setup;
  const auto tr = transcribe(s, problem.N, Start::tube, x, end_for(problem), 0.0, &problem.terminal.quad);
  return extract(s, tr.lay, convex::solve_convex(tr.prog, shifted_hint(s, tr.lay, previous), problem.solver));
}

double value_inf_proxy(const OcpProblem& problem, const Vector& z0, int N_inf) {
  OcpProblem p = problem;
  p.N = N_inf;
  p.mode = Mode::tc;
  p.terminal = TerminalSpec{};
  const auto sol = solve_ocp(p, z0);
  if (!sol.optimal()) throw InfeasibleError("infinite-horizon proxy: initial state is not admissible");
  return sol.value;
}

ProxyDiagnostic value_inf_proxy_checked(const OcpProblem& problem, const Vector& z0, int N_inf) {
  ProxyDiagnostic d;
  d.value = value_inf_proxy(problem, z0, N_inf);
  d.value_doubled = value_inf_proxy(problem, z0, 2 * N_inf);
  d.difference = std::abs(d.value_doubled - d.value);
  return d;
}

OcpSolution solve_reach_ball(const OcpProblem& problem, const Vector& z0, int T, double kappa) {
  check_problem(problem, z0);
  if (T < 1) throw ConfigError("reach-ball horizon must be positive");
  if (!(kappa >= 0.0)) throw ConfigError("kappa must be nonnegative");
  const auto& s = *problem.setup;
  const End end = kappa <= 1e-9 ? End::equality : End::ball;
  const auto tr = transcribe(s, T, Start::fixed, z0, end, kappa, nullptr);
  return extract(s, tr.lay, convex::solve_convex(tr.prog, std::nullopt, problem.solver));
}

std::vector<bool> check_feasible_region(const OcpProblem& problem, const std::vector<Vector>& grid) {
  std::vector<bool> out;
  out.reserve(grid.size());
  for (const auto& z : grid) out.push_back(solve_ocp(problem, z).optimal());
  return out;
}

SolutionCheck check_solution(const OcpProblem& problem, const OcpSolution& sol) {
  const auto& s = *problem.setup;
  SolutionCheck c;
  double total = 0.0;
  for (int k = 0; k < sol.horizon(); ++k) {
    const auto& z = sol.z[static_cast<std::size_t>(k)];
    const auto& v = sol.v[static_cast<std::size_t>(k)];
    c.dynamics = std::max(c.dynamics, (sol.z[static_cast<std::size_t>(k) + 1] - s.model.step_nominal(z, v)).norm());
    Vector y(s.n() + s.m());
    y << z, v;
    c.path = std::max(c.path, -s.Z_bar.margin(y));
    total += s.ell(z, v);
  }
  const Vector dz = sol.z.back() - s.ross.zs;
  if (problem.mode == Mode::tc) {
    if (problem.terminal.kind == TerminalSpec::Kind::equality_at_ross) {
      c.terminal = dz.cwiseAbs().maxCoeff();
    } else {
      const double vf = dz.dot(problem.terminal.quad.P * dz);
      c.terminal = std::max(0.0, vf - problem.terminal.quad.level);
      total += vf;
    }
  }
  c.value_error = std::abs(total - sol.value);
  return c;
}

}  // namespace tubempc::ocp
