#include <doctest.h>

#include "fixtures.hpp"
#include "tubempc/io/files.hpp"

using namespace tubempc;
using namespace fixtures;
using closedloop::DisturbanceKind;
using closedloop::DisturbanceSource;

TEST_CASE("closed-loop cost sums") {
  const auto s = e1();
  const auto eq = closedloop::run(e1_problem(10), scalar(1.5), 20, DisturbanceSource{});
  CHECK(std::abs(analysis::jcl_nominal(eq, *s, 20)) < 1e-9);
  CHECK(std::abs(analysis::jcl_real(eq, *s, 20)) < 1e-9);
  CHECK(analysis::jcl_nominal(eq, *s, 0) == 0.0);

  const auto log = closedloop::run(e1_problem(10), scalar(0.0), 40, DisturbanceSource{});
  REQUIRE(log.complete());
  double oracle = 0.0, real = 0.0;
  for (int t = 0; t < 40; ++t) {
    const auto& r = log.steps[static_cast<std::size_t>(t)];
    const double z = r.z0(0), v = r.v0(0), x = r.x(0);
    oracle += (z - 1.5) * (z - 1.5) + (v - 0.5 * z) * (v - 0.5 * z) - s->ell.offset;
    real += (x - 1.5) * (x - 1.5) + (v - 0.5 * x) * (v - 0.5 * x) - s->ell.offset;
  }
  CHECK(analysis::jcl_nominal(log, *s, 40) == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(analysis::jcl_real(log, *s, 40) == doctest::Approx(real).epsilon(1e-9));
}

TEST_CASE("turnpike profile") {
  const auto s = e1();
  const auto at = ocp::solve_ocp(e1_problem(20), s->ross.zs);
  for (double eps : {0.02, 0.1, 0.5}) CHECK(analysis::turnpike_profile(at, s->ross, eps).cardinality == 0);

  const auto sol = ocp::solve_ocp(e1_problem(40), scalar(0.0));
  REQUIRE(sol.optimal());
  int scan = 0;
  for (int k = 0; k < 40; ++k) {
    const double d = std::max(std::abs(sol.z[static_cast<std::size_t>(k)](0) - 1.5),
                              std::abs(sol.v[static_cast<std::size_t>(k)](0) - 0.75));
    scan += d >= 0.1 ? 1 : 0;
  }
  const auto prof = analysis::turnpike_profile(sol, s->ross, 0.1);
  CHECK(prof.cardinality == scan);
  CHECK(prof.indices.size() == static_cast<std::size_t>(scan));
  const auto longer = ocp::solve_ocp(e1_problem(80), scalar(0.0));
  CHECK(analysis::turnpike_profile(longer, s->ross, 0.1).cardinality == scan);
}

TEST_CASE("value-difference gap between finite and infinite horizons") {
  const auto p = e1_problem(10);
  CHECK(analysis::verify_lemma_gap(p, scalar(0.5), scalar(0.5), 300).gap == 0.0);
  std::vector<double> gaps;
  for (int N : {10, 20, 40, 60}) {
    auto q = p;
    q.N = N;
    const auto fwd = analysis::verify_lemma_gap(q, scalar(0.0), scalar(1.0), 600);
    const auto bwd = analysis::verify_lemma_gap(q, scalar(1.0), scalar(0.0), 600);
    CHECK(fwd.gap == doctest::Approx(-bwd.gap).epsilon(1e-9));
    gaps.push_back(std::max(fwd.gap, bwd.gap));
  }
  CHECK(analysis::nonincreasing(gaps, 1e-8));
}

TEST_CASE("non-averaged and transient reports at the equilibrium") {
  const auto p = e1_problem(10);
  const auto log = closedloop::run(p, scalar(1.5), 20, DisturbanceSource{});
  const auto nap = analysis::verify_nap(log, p, 300);
  CHECK(std::abs(nap.lhs) < 1e-8);
  CHECK(std::abs(nap.rhs_core) < 1e-8);
  CHECK(std::abs(nap.gap) < 1e-8);
  const auto tr = analysis::verify_transient(log, p, 20);
  CHECK(std::abs(tr.gap) < 1e-8);
  CHECK(tr.pass);
}

TEST_CASE("measured gaps are recomputable from their parts") {
  const auto p = e1_problem(10);
  const auto log = closedloop::run(p, scalar(0.0), 30, DisturbanceSource{});
  const auto nap = analysis::verify_nap(log, p, 300);
  CHECK(nap.gap == doctest::Approx(nap.lhs - nap.rhs_core).epsilon(1e-12));
  const double v0 = ocp::value_inf_proxy(p, log.steps.front().z0, 300);
  const double vT = ocp::value_inf_proxy(p, log.steps[30].z0, 300);
  CHECK(nap.rhs_core == doctest::Approx(v0 - vT).epsilon(1e-9));
  const auto tr = analysis::verify_transient(log, p, 30);
  CHECK(tr.gap == doctest::Approx(tr.lhs - tr.rhs_core).epsilon(1e-12));
  const double kappa = std::abs(log.steps[30].z0(0) - 1.5);
  CHECK(tr.rhs_core ==
        doctest::Approx(analysis::transient_baseline(p, log.steps.front().z0, 30, kappa)).epsilon(1e-9));
}

TEST_CASE("telescoping identity and per-step decrease") {
  const auto s = e1();
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto log =
        closedloop::run(e1_problem(10), scalar(0.0), 40, DisturbanceSource{DisturbanceKind::uniform_seeded, seed, {}});
    REQUIRE(log.complete());
    const auto rep = analysis::check_telescoping(log, *s, 40, true);
    CHECK(rep.pass);
    CHECK(rep.error <= 1e-9);
    CHECK(rep.worst_decrease >= -1e-6);
  }
}

TEST_CASE("real-state corollaries") {
  const auto s = e1();
  const double kappa = cost::lipschitz_const(s->stage, s->model, s->constraints.Z_pi);
  const auto zero = closedloop::run(e1_problem(10), scalar(1.5), 20, DisturbanceSource{});
  const auto z = analysis::verify_corollaries(zero, *s, 20, kappa);
  CHECK(z.jcl_real == doctest::Approx(z.jcl_nominal).epsilon(1e-9));

  for (std::uint64_t run = 0; run < 10; ++run) {
    closedloop::RunOptions opt;
    opt.run_index = run;
    const auto log = closedloop::run(e1_problem(10), scalar(0.0), 30,
                                     DisturbanceSource{DisturbanceKind::uniform_seeded, 17, {}}, opt);
    const auto rep = analysis::verify_corollaries(log, *s, 30, kappa);
    CHECK(rep.pass);
    CHECK(rep.excess <= 30 * kappa * 0.2 + 1e-9);
  }
  const auto wc = ocp::with_variant(*s, cost::CostVariant::worst_case);
  ocp::OcpProblem p{wc, 10, ocp::Mode::tc, {}, {}};
  for (std::uint64_t run = 0; run < 10; ++run) {
    closedloop::RunOptions opt;
    opt.run_index = run;
    const auto log =
        closedloop::run(p, scalar(0.0), 30, DisturbanceSource{DisturbanceKind::vertex_extreme, run, {}}, opt);
    const auto rep = analysis::verify_corollaries(log, *wc, 30, kappa);
    CHECK(rep.pass);
    CHECK(rep.jcl_real <= rep.jcl_nominal + 1e-9);
    CHECK(rep.worst_step_margin >= -1e-9);
  }
  const auto integ = ocp::with_variant(*s, cost::CostVariant::integral);
  ocp::OcpProblem pi{integ, 10, ocp::Mode::tc, {}, {}};
  const auto ilog = closedloop::run(pi, scalar(0.0), 10, DisturbanceSource{});
  CHECK_FALSE(analysis::verify_corollaries(ilog, *integ, 10, kappa).applicable);
}

TEST_CASE("sweeps are ordered and deterministic across thread counts") {
  analysis::SweepConfig cfg;
  cfg.N_list = {6, 10};
  cfg.T_list = {10, 20};
  cfg.seeds = 2;
  cfg.base_seed = 5;
  cfg.x0 = scalar(0.0);
  cfg.disturbance = DisturbanceKind::uniform_seeded;
  cfg.N_inf = 200;
  cfg.jobs = 1;
  const auto a = analysis::sweep(e1_problem(10), cfg);
  cfg.jobs = 3;
  const auto b = analysis::sweep(e1_problem(10), cfg);
  REQUIRE(a.tables.size() == b.tables.size());
  for (const auto& [name, rows] : a.tables) {
    CHECK(rows.size() == 8);
    CHECK(io::sweep_csv(rows) == io::sweep_csv(b.tables.at(name)));
    CHECK(rows.front().N == 6);
    CHECK(rows.back().N == 10);
    CHECK(rows[1].seed != rows[0].seed);
  }
  const auto j = analysis::judge(a, ocp::Mode::tc);
  CHECK(j.count("nap") == 1);
  CHECK(j.at("telescoping").pass);
}

TEST_CASE("monotonicity helper") {
  CHECK(analysis::nonincreasing({3.0, 2.0, 2.0, 1.0}, 0.0));
  CHECK_FALSE(analysis::nonincreasing({3.0, 2.0, 2.5}, 1e-8));
  CHECK(analysis::nonincreasing({1.0, 1.0 + 1e-9}, 1e-8));
  CHECK(analysis::max_error_norm(interval(-0.2, 0.2)) == doctest::Approx(0.2));
}
