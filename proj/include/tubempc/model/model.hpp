#pragma once

#include <functional>

#include "tubempc/geometry/polytope.hpp"

namespace tubempc::model {

using geometry::Matrix;
using geometry::Polytope;
using geometry::Vector;

/// Spectral radius via the eigenvalues of a square matrix.
double spectral_radius(const Matrix& M);

/**
 * x+ = A x + B u + w with the tube feedback u = K x + v.
 *
 * The nominal system z+ = (A + BK) z + B v and the error e = x - z
 * obey e+ = (A + BK) e + w independently of v.
 */
class LinearTubeModel {
 public:
  /// Throws DimensionError on inconsistent shapes and AssumptionError when
  /// A + BK is not Schur. m_steps <= 0 defaults to n.
  LinearTubeModel(Matrix A, Matrix B, Matrix K, int m_steps = 0);

  int n() const { return static_cast<int>(A_.rows()); }
  int m() const { return static_cast<int>(B_.cols()); }
  int m_steps() const { return m_steps_; }
  const Matrix& A() const { return A_; }
  const Matrix& B() const { return B_; }
  const Matrix& K() const { return K_; }
  const Matrix& AK() const { return AK_; }

  /// u = K x + v
  Vector input(const Vector& x, const Vector& v) const;
  Vector step_real(const Vector& x, const Vector& v, const Vector& w) const;
  Vector step_nominal(const Vector& z, const Vector& v) const;
  Vector error_next(const Vector& e, const Vector& w) const;

 private:
  Matrix A_, B_, K_, AK_;
  int m_steps_;
};

/// Optional plant used only by the closed-loop simulator: x+ = f(x, u, w).
using PlantMap = std::function<Vector(const Vector& x, const Vector& u, const Vector& w)>;

/// Preimage of Z (over (x,u)) under (x,v) -> (x, Kx + v).
Polytope build_z_pi(const Polytope& Z, const LinearTubeModel& model);

struct ConstraintData {
  Polytope Z;     // over (x, u)
  Polytope W;     // over w
  Polytope Z_pi;  // over (x, v)
};

/// Validates Z and W (interior, 0 in int W, dimensions) and derives Z_pi.
ConstraintData make_constraints(const Polytope& Z, const Polytope& W, const LinearTubeModel& model);

}  // namespace tubempc::model
