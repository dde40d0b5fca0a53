#pragma once

#include <string_view>
#include <vector>

#include "tubempc/model/model.hpp"

namespace tubempc::cost {

using geometry::Matrix;
using geometry::Polytope;
using geometry::Vector;

enum class CostVariant { nominal, integral, worst_case };

std::string_view to_string(CostVariant v);
/// Throws ConfigError on unknown names.
CostVariant parse_variant(std::string_view name);

/// L(x,u) = 0.5 y'Hy + g'y + c0 with y = (x, u).
struct StageCost {
  Matrix H;
  Vector g;
  double c0 = 0.0;
  CostVariant variant = CostVariant::nominal;
  bool normalize_integral = false;  // divide the integral variant by vol(Omega)

  /// Shapes, symmetry to 1e-12, finiteness.
  void validate(int n, int m) const;
  double L(const Vector& x, const Vector& u) const;
  /// L_pi(x, v) = L(x, Kx + v)
  double L_pi(const model::LinearTubeModel& model, const Vector& x, const Vector& v) const;
};

/// Hessian, gradient and constant of L_pi over (x, v).
struct QuadraticForm {
  Matrix H;
  Vector g;
  double c = 0.0;
};
QuadraticForm pi_form(const StageCost& cost, const model::LinearTubeModel& model);

/**
 * The stage cost seen by the nominal optimal control problem,
 *
 *   ell(z, v) = 0.5 y'Hy + max_j (g_j'y + c_j) - offset,   y = (z, v).
 *
 * nominal and integral variants have a single affine piece; worst_case has
 * one piece per vertex of Omega (all pieces share the Hessian of L_pi).
 */
struct EconomicCost {
  int n = 0, m = 0;
  CostVariant variant = CostVariant::nominal;
  Matrix H;
  std::vector<Vector> g;
  std::vector<double> c;
  double offset = 0.0;

  bool piecewise() const { return g.size() > 1; }
  /// Value before the offset is subtracted.
  double raw(const Vector& y) const;
  double raw(const Vector& z, const Vector& v) const;
  double operator()(const Vector& z, const Vector& v) const { return raw(z, v) - offset; }
};

/// Throws CapacityError for worst_case when Omega has no enumerable vertices
/// and for integral when the moments of Omega are not available.
EconomicCost economic_cost(const StageCost& cost, const model::LinearTubeModel& model, const Polytope& omega);

/// L_pi, its integral over z + Omega, or its maximum over z + Omega,
/// depending on cost.variant (no offset).
double eval_stage(const StageCost& cost, const model::LinearTubeModel& model, const Polytope& omega, const Vector& z,
                  const Vector& v);

/// max over the vertices of region (a polytope over (x, v)) of |grad L_pi|_2.
double lipschitz_const(const StageCost& cost, const model::LinearTubeModel& model, const Polytope& region);

}  // namespace tubempc::cost
