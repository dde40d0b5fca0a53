#pragma once

#include <cstdint>

#include "tubempc/model/model.hpp"

namespace tubempc::rci {

using geometry::Matrix;
using geometry::Polytope;
using geometry::Vector;

struct RpiResult {
  Polytope omega;
  int terms = 0;               // s in F_s = W + A W + ... + A^{s-1} W
  double alpha = 0.0;          // A^s W is contained in alpha W
  double hausdorff_bound = 0;  // alpha / (1 - alpha) * max |x| over F_s
};

/// Outer approximation (1 - alpha)^{-1} F_s of the minimal robust positively
/// invariant set of e+ = A_K e + w, with Hausdorff overshoot at most tol.
/// alpha is the exact smallest scalar with A_K^s W in alpha W.
/// Throws AssumptionError when A_K is not Schur or 0 is not in int W, and
/// Error when the iteration cap of 10^4 terms is exceeded.
RpiResult min_rpi(const Matrix& AK, const Polytope& W, double tol);

struct VerificationReport {
  double worst_margin = 0.0;  // min over sampled pairs of margin(Omega, A_K e + w)
  Vector worst_e, worst_w;
  std::size_t pairs = 0;
  bool holds(double tol = geometry::kTol) const { return worst_margin >= -tol; }
};

/// Samples e in Omega and w in W (all vertex pairs plus n_samples uniform
/// pairs) and reports the worst invariance margin. Violations are reported,
/// never thrown.
VerificationReport verify_rci(const model::LinearTubeModel& model, const Polytope& omega, const Polytope& W,
                              std::size_t n_samples, std::uint64_t seed);

/// max_i [support(A_K Omega + W, a_i) - support(Omega, a_i)] over the facet
/// normals a_i of Omega; <= 0 certifies invariance.
double rpi_certificate(const Matrix& AK, const Polytope& omega, const Polytope& W);

/// Z_bar = Z_pi eroded by Omega x {0}. Throws AssumptionError if the result is
/// empty or has no interior.
Polytope tighten(const Polytope& Z_pi, const Polytope& omega);

}  // namespace tubempc::rci
