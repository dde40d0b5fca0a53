#include "tubempc/cost/stage_cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tubempc/error.hpp"

namespace tubempc::cost {

std::string_view to_string(CostVariant v) {
  switch (v) {
    case CostVariant::nominal: return "nominal";
    case CostVariant::integral: return "integral";
    case CostVariant::worst_case: return "worst_case";
  }
  return "unknown";
}

CostVariant parse_variant(std::string_view name) {
  if (name == "nominal") return CostVariant::nominal;
  if (name == "integral") return CostVariant::integral;
  if (name == "worst_case") return CostVariant::worst_case;
  throw ConfigError("unknown cost variant '" + std::string(name) + "'");
}

void StageCost::validate(int n, int m) const {
  const int d = n + m;
  if (H.rows() != d || H.cols() != d) throw DimensionError("cost H must be (n+m) x (n+m)");
  if (g.size() != d) throw DimensionError("cost g must have length n+m");
  if (!H.allFinite() || !g.allFinite() || !std::isfinite(c0)) throw ConfigError("cost data must be finite");
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw ConfigError("cost H must be symmetric");
}

double StageCost::L(const Vector& x, const Vector& u) const {
  Vector y(x.size() + u.size());
  y << x, u;
  return 0.5 * y.dot(H * y) + g.dot(y) + c0;
}

double StageCost::L_pi(const model::LinearTubeModel& model, const Vector& x, const Vector& v) const {
  return L(x, model.input(x, v));
}

QuadraticForm pi_form(const StageCost& cost, const model::LinearTubeModel& model) {
  const int n = model.n(), m = model.m();
  // (x, u) = T (x, v)
  Matrix T = Matrix::Identity(n + m, n + m);
  T.bottomLeftCorner(m, n) = model.K();
  return QuadraticForm{T.transpose() * cost.H * T, T.transpose() * cost.g, cost.c0};
}

double EconomicCost::raw(const Vector& y) const {
  double piece = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < g.size(); ++j) piece = std::max(piece, g[j].dot(y) + c[j]);
  return 0.5 * y.dot(H * y) + piece;
}

double EconomicCost::raw(const Vector& z, const Vector& v) const {
  Vector y(z.size() + v.size());
  y << z, v;
  return raw(y);
}

EconomicCost economic_cost(const StageCost& cost, const model::LinearTubeModel& model, const Polytope& omega) {
  const int n = model.n(), m = model.m();
  cost.validate(n, m);
  if (omega.dim() != n) throw DimensionError("Omega must live in the state space");
  const QuadraticForm q = pi_form(cost, model);
  EconomicCost out;
  out.n = n;
  out.m = m;
  out.variant = cost.variant;
  switch (cost.variant) {
    case CostVariant::nominal:
      out.H = q.H;
      out.g = {q.g};
      out.c = {q.c};
      break;
    case CostVariant::integral: {
      // int_Omega L_pi(y + E e) de with E = [I; 0]
      const auto mom = geometry::moments(omega);
      const Matrix Hxx = q.H.topLeftCorner(n, n);
      Vector shift = Vector::Zero(n + m);
      shift.head(n) = mom.first;
      double scale = 1.0;
      if (cost.normalize_integral) {
        if (mom.volume <= 0.0) throw AssumptionError("integral cost normalisation needs vol(Omega) > 0");
        scale = 1.0 / mom.volume;
      }
      out.H = scale * mom.volume * q.H;
      out.g = {scale * (mom.volume * q.g + q.H * shift)};
      out.c = {scale * (mom.volume * q.c + q.g.dot(shift) + 0.5 * (Hxx * mom.second).trace())};
      break;
    }
    case CostVariant::worst_case: {
      out.H = q.H;
      for (const auto& e : omega.vertices()) {
        Vector ey = Vector::Zero(n + m);
        ey.head(n) = e;
        out.g.push_back(q.g + q.H * ey);
        out.c.push_back(q.c + q.g.dot(ey) + 0.5 * ey.dot(q.H * ey));
      }
      break;
    }
  }
  return out;
}

double eval_stage(const StageCost& cost, const model::LinearTubeModel& model, const Polytope& omega, const Vector& z,
                  const Vector& v) {
  return economic_cost(cost, model, omega).raw(z, v);
}

double lipschitz_const(const StageCost& cost, const model::LinearTubeModel& model, const Polytope& region) {
  const QuadraticForm q = pi_form(cost, model);
  if (region.dim() != q.g.size()) throw DimensionError("lipschitz_const: region must live in (x, v)");
  double kappa = 0.0;
  for (const auto& y : region.vertices()) kappa = std::max(kappa, (q.H * y + q.g).norm());
  return kappa;
}

}  // namespace tubempc::cost
