#include "tubempc/model/model.hpp"

#include <Eigen/Eigenvalues>

#include "tubempc/error.hpp"

namespace tubempc::model {

double spectral_radius(const Matrix& M) {
  if (M.rows() != M.cols()) throw DimensionError("spectral_radius: matrix must be square");
  if (M.size() == 0) return 0.0;
  return Eigen::EigenSolver<Matrix>(M, false).eigenvalues().cwiseAbs().maxCoeff();
}

LinearTubeModel::LinearTubeModel(Matrix A, Matrix B, Matrix K, int m_steps)
    : A_(std::move(A)), B_(std::move(B)), K_(std::move(K)) {
  if (A_.rows() < 1 || A_.rows() != A_.cols()) throw DimensionError("A must be square and nonempty");
  if (B_.rows() != A_.rows() || B_.cols() < 1) throw DimensionError("B must have n rows and at least one column");
  if (K_.rows() != B_.cols() || K_.cols() != A_.rows()) throw DimensionError("K must be m x n");
  if (!A_.allFinite() || !B_.allFinite() || !K_.allFinite()) throw DimensionError("model matrices must be finite");
  AK_ = A_ + B_ * K_;
  const double rho = spectral_radius(AK_);
  if (rho >= 1.0) throw AssumptionError("A + BK is not Schur (spectral radius " + std::to_string(rho) + ")");
  m_steps_ = m_steps > 0 ? m_steps : n();
}

Vector LinearTubeModel::input(const Vector& x, const Vector& v) const { return K_ * x + v; }

Vector LinearTubeModel::step_real(const Vector& x, const Vector& v, const Vector& w) const {
  return A_ * x + B_ * input(x, v) + w;
}

Vector LinearTubeModel::step_nominal(const Vector& z, const Vector& v) const { return AK_ * z + B_ * v; }

Vector LinearTubeModel::error_next(const Vector& e, const Vector& w) const { return AK_ * e + w; }

Polytope build_z_pi(const Polytope& Z, const LinearTubeModel& model) {
  const int n = model.n(), m = model.m();
  if (Z.dim() != n + m) throw DimensionError("Z must live in the (x, u) space");
  const Matrix& N = Z.normals();
  Matrix out(N.rows(), n + m);
  out.leftCols(n) = N.leftCols(n) + N.rightCols(m) * model.K();
  out.rightCols(m) = N.rightCols(m);
  return Polytope::from_halfspaces(out, Z.offsets());
}

ConstraintData make_constraints(const Polytope& Z, const Polytope& W, const LinearTubeModel& model) {
  if (W.dim() != model.n()) throw DimensionError("W must live in the state space");
  if (!Z.has_interior()) throw AssumptionError("Z has an empty interior");
  if (W.margin(Vector::Zero(model.n())) <= geometry::kTol)
    throw AssumptionError("W must contain the origin in its interior");
  return ConstraintData{Z, W, build_z_pi(Z, model)};
}

}  // namespace tubempc::model
