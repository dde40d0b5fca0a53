#include "tubempc/convex/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/SparseCholesky>

namespace tubempc::convex {

namespace {

using Eigen::Index;
using Eigen::VectorXd;

double inf_norm(const VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

/// Problem after removing identically-zero inequality rows.
struct Reduced {
  const ConvexProgram* prog = nullptr;
  SparseMatrix G;
  VectorXd h;
  std::vector<Index> kept;  // original G row of each kept row
  bool trivially_infeasible = false;
};

Reduced reduce(const ConvexProgram& prog, double tol) {
  Reduced red;
  red.prog = &prog;
  const Index m = prog.G.rows();
  VectorXd row_norm = VectorXd::Zero(m);
  for (Index k = 0; k < prog.G.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(prog.G, k); it; ++it)
      row_norm(it.row()) = std::max(row_norm(it.row()), std::abs(it.value()));
  std::vector<Index> new_index(static_cast<std::size_t>(m), -1);
  for (Index i = 0; i < m; ++i) {
    if (row_norm(i) > 1e-14) {
      new_index[static_cast<std::size_t>(i)] = static_cast<Index>(red.kept.size());
      red.kept.push_back(i);
    } else if (prog.h(i) < -tol) {
      red.trivially_infeasible = true;
    }
  }
  Triplets trips;
  for (Index k = 0; k < prog.G.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(prog.G, k); it; ++it) {
      const Index r = new_index[static_cast<std::size_t>(it.row())];
      if (r >= 0) trips.emplace_back(r, it.col(), it.value());
    }
  red.G.resize(static_cast<Index>(red.kept.size()), prog.num_vars);
  red.G.setFromTriplets(trips.begin(), trips.end());
  red.h.resize(static_cast<Index>(red.kept.size()));
  for (std::size_t i = 0; i < red.kept.size(); ++i) red.h(static_cast<Index>(i)) = prog.h(red.kept[i]);
  return red;
}

struct CoreResult {
  VectorXd x, s, lambda, nu;
  bool converged = false;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
};

/// The interior point iteration on the reduced problem.
class Ipm {
 public:
  Ipm(const ConvexProgram& prog, const SparseMatrix& G, const VectorXd& h, const SolverOptions& opts)
      : prog_(prog), G_(G), h_(h), opts_(opts), n_(prog.num_vars), mg_(G.rows()),
        mq_(static_cast<Index>(prog.quadratic.size())), m_(mg_ + mq_), p_(prog.A.rows()) {}

  CoreResult run(const VectorXd& x_init) {
    CoreResult res;
    VectorXd x = x_init;
    VectorXd f = constraint_values(x);
    VectorXd s = (-f).cwiseMax(1.0);
    VectorXd lambda = VectorXd::Ones(m_);
    VectorXd nu = VectorXd::Zero(p_);

    const double scale_b = 1.0 + inf_norm(prog_.b);
    const double scale_h = 1.0 + inf_norm(h_);
    const double scale_q = 1.0 + inf_norm(prog_.q);

    struct Snapshot {
      VectorXd x, s, lambda, nu;
      double primal_residual, dual_residual, gap;
    };
    std::optional<Snapshot> best_near;
    for (int it = 0; it < opts_.max_iter; ++it) {
      res.iterations = it;
      f = constraint_values(x);
      const SparseMatrix J = jacobian(x);
      const VectorXd r_d = prog_.P * x + prog_.q + J.transpose() * lambda + prog_.A.transpose() * nu;
      const VectorXd r_p = prog_.A * x - prog_.b;
      const VectorXd r_i = f + s;
      const double gap = m_ > 0 ? s.dot(lambda) : 0.0;
      const double obj = prog_.objective(x);

      res.primal_residual = std::max(inf_norm(r_p) / scale_b, inf_norm(r_i) / scale_h);
      res.dual_residual = inf_norm(r_d) / scale_q;
      res.gap = gap;
      if (res.primal_residual <= opts_.feas_tol && res.dual_residual <= opts_.feas_tol &&
          gap <= opts_.gap_tol * (1.0 + std::abs(obj))) {
        res.converged = true;
        break;
      }
      // Rounding in the KKT solves can stall the residuals just above the
      // target once complementarity is exhausted; accept such iterates.
      const bool near = res.primal_residual <= 100.0 * opts_.feas_tol &&
                        res.dual_residual <= 100.0 * opts_.feas_tol && gap <= opts_.gap_tol * (1.0 + std::abs(obj));
      // Once complementarity is far below target the residuals no longer move.
      if (near && gap <= 1e-2 * opts_.gap_tol * (1.0 + std::abs(obj))) {
        res.converged = true;
        break;
      }
      if (near && (!best_near || res.primal_residual + res.dual_residual < best_near->primal_residual + best_near->dual_residual))
        best_near = Snapshot{x, s, lambda, nu, res.primal_residual, res.dual_residual, gap};
      if (!x.allFinite() || inf_norm(x) > 1e12 || (m_ > 0 && lambda.maxCoeff() > 1e14)) break;

      const VectorXd w = lambda.cwiseQuotient(s);
      if (!factorize(x, lambda, J, w)) {
        res.converged = near;
        break;
      }

      const double mu = m_ > 0 ? gap / static_cast<double>(m_) : 0.0;

      // Predictor.
      VectorXd dx, ds, dl, dn;
      VectorXd r_c = s.cwiseProduct(lambda);
      solve_direction(J, s, lambda, w, r_d, r_p, r_i, r_c, dx, ds, dl, dn);
      double alpha_aff = step_to_boundary(s, ds, lambda, dl, 1.0);

      // Corrector.
      if (m_ > 0) {
        const VectorXd s_aff = s + alpha_aff * ds;
        const VectorXd l_aff = lambda + alpha_aff * dl;
        const double mu_aff = s_aff.dot(l_aff) / static_cast<double>(m_);
        const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);
        r_c = s.cwiseProduct(lambda) + ds.cwiseProduct(dl) - VectorXd::Constant(m_, sigma * mu);
        solve_direction(J, s, lambda, w, r_d, r_p, r_i, r_c, dx, ds, dl, dn);
      }
      const double alpha = std::min(1.0, step_to_boundary(s, ds, lambda, dl, 0.99));

      x += alpha * dx;
      s += alpha * ds;
      lambda += alpha * dl;
      nu += alpha * dn;
      // Keep the iterate strictly interior.
      s = s.cwiseMax(1e-300);
      lambda = lambda.cwiseMax(1e-300);
      res.iterations = it + 1;
    }
    if (!res.converged && best_near) {
      x = best_near->x;
      s = best_near->s;
      lambda = best_near->lambda;
      nu = best_near->nu;
      res.primal_residual = best_near->primal_residual;
      res.dual_residual = best_near->dual_residual;
      res.gap = best_near->gap;
      res.converged = true;
    }
    res.x = std::move(x);
    res.s = std::move(s);
    res.lambda = std::move(lambda);
    res.nu = std::move(nu);
    return res;
  }

  VectorXd constraint_values(const VectorXd& x) const {
    VectorXd f(m_);
    if (mg_ > 0) f.head(mg_) = G_ * x - h_;
    for (Index i = 0; i < mq_; ++i) {
      const auto& row = prog_.quadratic[static_cast<std::size_t>(i)];
      VectorXd y(static_cast<Index>(row.index.size()));
      for (std::size_t k = 0; k < row.index.size(); ++k) y(static_cast<Index>(k)) = x(row.index[k]);
      f(mg_ + i) = 0.5 * y.dot(row.Q * y) + row.a.dot(x) - row.b;
    }
    return f;
  }

 private:
  SparseMatrix jacobian(const VectorXd& x) const {
    if (mq_ == 0) return G_;
    Triplets trips;
    trips.reserve(static_cast<std::size_t>(G_.nonZeros()) + static_cast<std::size_t>(mq_ * n_));
    for (Index k = 0; k < G_.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(G_, k); it; ++it) trips.emplace_back(it.row(), it.col(), it.value());
    for (Index i = 0; i < mq_; ++i) {
      const auto& row = prog_.quadratic[static_cast<std::size_t>(i)];
      VectorXd grad = row.a;
      VectorXd y(static_cast<Index>(row.index.size()));
      for (std::size_t k = 0; k < row.index.size(); ++k) y(static_cast<Index>(k)) = x(row.index[k]);
      const VectorXd qy = row.Q * y;
      for (std::size_t k = 0; k < row.index.size(); ++k) grad(row.index[k]) += qy(static_cast<Index>(k));
      for (Index j = 0; j < n_; ++j)
        if (grad(j) != 0.0) trips.emplace_back(mg_ + i, j, grad(j));
    }
    SparseMatrix J(m_, n_);
    J.setFromTriplets(trips.begin(), trips.end());
    return J;
  }

  bool factorize(const VectorXd& /*x*/, const VectorXd& lambda, const SparseMatrix& J, const VectorXd& w) {
    SparseMatrix H = prog_.P;
    if (mq_ > 0) {
      Triplets trips;
      for (Index i = 0; i < mq_; ++i) {
        const auto& row = prog_.quadratic[static_cast<std::size_t>(i)];
        const double li = lambda(mg_ + i);
        for (std::size_t a = 0; a < row.index.size(); ++a)
          for (std::size_t b = 0; b < row.index.size(); ++b)
            trips.emplace_back(row.index[a], row.index[b],
                               li * row.Q(static_cast<Index>(a), static_cast<Index>(b)));
      }
      SparseMatrix Hq(n_, n_);
      Hq.setFromTriplets(trips.begin(), trips.end());
      H += Hq;
    }
    if (m_ > 0) {
      SparseMatrix WJ = w.asDiagonal() * J;
      SparseMatrix JtWJ = SparseMatrix(J.transpose()) * WJ;
      H += JtWJ;
    }
    Triplets trips;
    trips.reserve(static_cast<std::size_t>(H.nonZeros() + 2 * prog_.A.nonZeros() + n_ + p_));
    for (Index k = 0; k < H.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(H, k); it; ++it) trips.emplace_back(it.row(), it.col(), it.value());
    for (Index k = 0; k < prog_.A.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(prog_.A, k); it; ++it) {
        trips.emplace_back(n_ + it.row(), it.col(), it.value());
        trips.emplace_back(it.col(), n_ + it.row(), it.value());
      }
    K0_.resize(n_ + p_, n_ + p_);
    K0_.setFromTriplets(trips.begin(), trips.end());
    // Near the optimum W spans many orders of magnitude; retry with a
    // stronger shift when a pivot vanishes (refinement against K0 removes it).
    const std::size_t base = trips.size();
    for (double delta = opts_.regularization; delta <= 1e-4; delta *= 100.0) {
      trips.resize(base);
      for (Index i = 0; i < n_; ++i) trips.emplace_back(i, i, delta);
      for (Index i = 0; i < p_; ++i) trips.emplace_back(n_ + i, n_ + i, -delta);
      SparseMatrix K(n_ + p_, n_ + p_);
      K.setFromTriplets(trips.begin(), trips.end());
      ldlt_.compute(K);
      if (ldlt_.info() == Eigen::Success) return true;
    }
    return false;
  }

  VectorXd solve_kkt(const VectorXd& rhs) const {
    VectorXd sol = ldlt_.solve(rhs);
    for (int k = 0; k < 5; ++k) {
      const VectorXd res = rhs - K0_ * sol;
      if (inf_norm(res) <= 1e-15 * (1.0 + inf_norm(rhs))) break;
      sol += ldlt_.solve(res);
    }
    return sol;
  }

  void solve_direction(const SparseMatrix& J, const VectorXd& s, const VectorXd& lambda, const VectorXd& w,
                       const VectorXd& r_d, const VectorXd& r_p, const VectorXd& r_i, const VectorXd& r_c,
                       VectorXd& dx, VectorXd& ds, VectorXd& dl, VectorXd& dn) const {
    // dl = S^{-1}(-r_c + Lambda r_i) + W J dx,  ds = -r_i - J dx.
    const VectorXd c = (lambda.cwiseProduct(r_i) - r_c).cwiseQuotient(s);
    VectorXd rhs(n_ + p_);
    rhs.head(n_) = -r_d - J.transpose() * c;
    rhs.tail(p_) = -r_p;
    const VectorXd sol = solve_kkt(rhs);
    dx = sol.head(n_);
    dn = sol.tail(p_);
    const VectorXd Jdx = J * dx;
    ds = -r_i - Jdx;
    dl = c + w.cwiseProduct(Jdx);
  }

  double step_to_boundary(const VectorXd& s, const VectorXd& ds, const VectorXd& l, const VectorXd& dl,
                          double fraction) const {
    double alpha = 1.0 / fraction;
    for (Index i = 0; i < m_; ++i) {
      if (ds(i) < 0.0) alpha = std::min(alpha, -s(i) / ds(i));
      if (dl(i) < 0.0) alpha = std::min(alpha, -l(i) / dl(i));
    }
    return std::min(1.0, fraction * alpha);
  }

  const ConvexProgram& prog_;
  const SparseMatrix& G_;
  const VectorXd& h_;
  SolverOptions opts_;
  Index n_, mg_, mq_, m_, p_;
  SparseMatrix K0_;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
};

/// Builds min{ sigma : G x - h <= sigma, quad <= sigma, A x = b, sigma >= -1 }
/// with a tiny proximal term that keeps the optimal face bounded.
ConvexProgram phase_one(const ConvexProgram& prog, const SparseMatrix& G, const VectorXd& h,
                        const VectorXd& center) {
  const Index n = prog.num_vars;
  const Index m = G.rows();
  ConvexProgram p1(n + 1);
  constexpr double prox = 1e-10;
  Triplets pt;
  for (Index i = 0; i < n; ++i) pt.emplace_back(i, i, prox);
  p1.P.setFromTriplets(pt.begin(), pt.end());
  p1.q.head(n) = -prox * center;
  p1.q(n) = 1.0;

  Triplets at;
  for (Index k = 0; k < prog.A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(prog.A, k); it; ++it) at.emplace_back(it.row(), it.col(), it.value());
  p1.A.resize(prog.A.rows(), n + 1);
  p1.A.setFromTriplets(at.begin(), at.end());
  p1.b = prog.b;

  Triplets gt;
  for (Index k = 0; k < G.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(G, k); it; ++it) gt.emplace_back(it.row(), it.col(), it.value());
  for (Index i = 0; i < m; ++i) gt.emplace_back(i, n, -1.0);
  gt.emplace_back(m, n, -1.0);
  p1.G.resize(m + 1, n + 1);
  p1.G.setFromTriplets(gt.begin(), gt.end());
  p1.h.resize(m + 1);
  p1.h.head(m) = h;
  p1.h(m) = 1.0;

  for (const auto& row : prog.quadratic) {
    QuadraticRow r = row;
    r.a.conservativeResize(n + 1);
    r.a(n) = -1.0;
    p1.quadratic.push_back(std::move(r));
  }
  return p1;
}

}  // namespace

ConvexProgram::ConvexProgram(Eigen::Index n)
    : num_vars(n), P(n, n), q(VectorXd::Zero(n)), A(0, n), b(0), G(0, n), h(0) {}

double ConvexProgram::objective(const Eigen::VectorXd& x) const {
  return 0.5 * x.dot(P * x) + q.dot(x) + r;
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::max_iter: return "max_iter";
  }
  return "unknown";
}

ConvexSolution solve_convex(const ConvexProgram& prog, const std::optional<Eigen::VectorXd>& x0_hint,
                            const SolverOptions& opts) {
  const Index n = prog.num_vars;
  ConvexSolution out;
  out.phase1_value = std::numeric_limits<double>::quiet_NaN();
  out.ineq_dual = VectorXd::Zero(prog.G.rows());
  out.quad_dual = VectorXd::Zero(static_cast<Index>(prog.quadratic.size()));
  out.eq_dual = VectorXd::Zero(prog.A.rows());

  const Reduced red = reduce(prog, 1e-9);
  if (red.trivially_infeasible) {
    out.status = SolveStatus::infeasible;
    out.x = x0_hint.value_or(VectorXd::Zero(n));
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }

  const VectorXd start = (x0_hint && x0_hint->size() == n) ? *x0_hint : VectorXd::Zero(n);
  Ipm ipm(prog, red.G, red.h, opts);
  CoreResult core = ipm.run(start);

  if (!core.converged) {
    const ConvexProgram p1 = phase_one(prog, red.G, red.h, start);
    Ipm ipm1(p1, p1.G, p1.h, opts);
    VectorXd s0(n + 1);
    s0.head(n) = start;
    const VectorXd f0 = ipm.constraint_values(start);
    s0(n) = (f0.size() > 0 ? std::max(f0.maxCoeff(), 0.0) : 0.0) + 1.0;
    const CoreResult c1 = ipm1.run(s0);
    out.phase1_value = c1.x(n);
    if (c1.x(n) > opts.infeasibility_tol) {
      out.status = SolveStatus::infeasible;
      out.x = c1.x.head(n);
      out.value = std::numeric_limits<double>::infinity();
      out.iterations = core.iterations + c1.iterations;
      return out;
    }
    // Feasible after all: restart from the phase-1 point.
    core = ipm.run(c1.x.head(n));
    core.iterations += c1.iterations;
  }

  out.x = core.x;
  out.value = prog.objective(core.x);
  out.status = core.converged ? SolveStatus::optimal : SolveStatus::max_iter;
  out.iterations = core.iterations;
  out.primal_residual = core.primal_residual;
  out.dual_residual = core.dual_residual;
  out.gap = core.gap;
  out.eq_dual = core.nu;
  for (std::size_t i = 0; i < red.kept.size(); ++i) out.ineq_dual(red.kept[i]) = core.lambda(static_cast<Index>(i));
  if (out.quad_dual.size() > 0) out.quad_dual = core.lambda.tail(out.quad_dual.size());
  return out;
}

}  // namespace tubempc::convex
