#include "tubempc/rci/rci.hpp"

#include <algorithm>
#include <cmath>

#include "tubempc/error.hpp"
#include "tubempc/geometry/sampling.hpp"

namespace tubempc::rci {

namespace {

constexpr int kMaxTerms = 10000;

double max_norm(const Polytope& p) {
  if (p.has_vertices()) {
    double r = 0.0;
    for (const auto& v : p.vertices()) r = std::max(r, v.norm());
    return r;
  }
  // box above the vertex cap: farthest corner
  return p.bounding_lo().cwiseAbs().cwiseMax(p.bounding_hi().cwiseAbs()).norm();
}

// Smallest alpha with M W in alpha W, for W = {w : F w <= g}, g > 0.
double containment_factor(const Matrix& M, const Polytope& W) {
  double alpha = 0.0;
  for (Eigen::Index i = 0; i < W.num_rows(); ++i) {
    const Vector dir = M.transpose() * W.normals().row(i).transpose();
    alpha = std::max(alpha, W.support(dir) / W.offsets()(i));
  }
  return alpha;
}

Polytope bounding_box_sum(const Matrix& AK, const Polytope& W, int terms) {
  const int n = W.dim();
  Vector lo = Vector::Zero(n), hi = Vector::Zero(n);
  Matrix P = Matrix::Identity(n, n);
  for (int k = 0; k < terms; ++k) {
    for (int j = 0; j < n; ++j) {
      const Vector d = P.transpose() * Vector::Unit(n, j);
      hi(j) += W.support(d);
      lo(j) -= W.support(-d);
    }
    P = AK * P;
  }
  return Polytope::box(lo, hi);
}

}  // namespace

RpiResult min_rpi(const Matrix& AK, const Polytope& W, double tol) {
  const int n = W.dim();
  if (AK.rows() != n || AK.cols() != n) throw DimensionError("min_rpi: A_K must be n x n with n = dim W");
  if (model::spectral_radius(AK) >= 1.0) throw AssumptionError("min_rpi: A_K is not Schur");
  if (W.margin(Vector::Zero(n)) <= geometry::kTol)
    throw AssumptionError("min_rpi: W must contain the origin in its interior");
  if (!(tol > 0.0)) throw Error("min_rpi: tol must be positive");

  // Above the vertex cap only the bounding box of F_s is tracked.
  const bool box_only = n > geometry::kMaxGeneralDim;

  Polytope F = W;
  Matrix power = AK;  // A_K^s for the current s
  for (int s = 1; s <= kMaxTerms; ++s) {
    const double alpha = containment_factor(power, W);
    if (alpha < 1.0) {
      const Polytope Fs = box_only ? bounding_box_sum(AK, W, s) : F;
      const double bound = alpha / (1.0 - alpha) * max_norm(Fs);
      if (bound <= tol) {
        return RpiResult{Fs.scaled(1.0 / (1.0 - alpha)), s, alpha, bound};
      }
    }
    if (!box_only) F = geometry::minkowski_sum(F, W.linear_map(power));
    power = AK * power;
  }
  throw Error("min_rpi: iteration cap of 10^4 terms exceeded");
}

VerificationReport verify_rci(const model::LinearTubeModel& model, const Polytope& omega, const Polytope& W,
                              std::size_t n_samples, std::uint64_t seed) {
  geometry::Rng rng(seed);
  VerificationReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  auto check = [&](const Vector& e, const Vector& w) {
    const double m = omega.margin(model.error_next(e, w));
    ++rep.pairs;
    if (m < rep.worst_margin) {
      rep.worst_margin = m;
      rep.worst_e = e;
      rep.worst_w = w;
    }
  };
  if (omega.has_vertices() && W.has_vertices())
    for (const auto& e : omega.vertices())
      for (const auto& w : W.vertices()) check(e, w);
  const auto es = geometry::sample_uniform(omega, n_samples, rng);
  const auto ws = geometry::sample_uniform(W, n_samples, rng);
  for (std::size_t k = 0; k < n_samples; ++k) check(es[k], ws[k]);
  return rep;
}

double rpi_certificate(const Matrix& AK, const Polytope& omega, const Polytope& W) {
  double worst = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < omega.num_rows(); ++i) {
    const Vector a = omega.normals().row(i).transpose();
    const double lhs = omega.support(AK.transpose() * a) + W.support(a);
    worst = std::max(worst, lhs - omega.offsets()(i));
  }
  return worst;
}

Polytope tighten(const Polytope& Z_pi, const Polytope& omega) {
  const int n = omega.dim();
  if (Z_pi.dim() <= n) throw DimensionError("tighten: Z_pi must live in (x, v) with x of dim Omega");
  Vector off = Z_pi.offsets();
  for (Eigen::Index i = 0; i < off.size(); ++i) {
    const Vector ax = Z_pi.normals().row(i).head(n).transpose();
    if (ax.cwiseAbs().maxCoeff() > 0.0) off(i) -= omega.support(ax);
  }
  try {
    Polytope out = Polytope::from_halfspaces(Z_pi.normals(), off);
    if (!out.has_interior()) throw AssumptionError("tightened constraint set has an empty interior");
    return out;
  } catch (const EmptySetError&) {
    throw AssumptionError("tightened constraint set is empty");
  }
}

}  // namespace tubempc::rci
