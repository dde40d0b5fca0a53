#pragma once

#include <memory>

#include "tubempc/cost/dissipativity.hpp"
#include "tubempc/geometry/sampling.hpp"
#include "tubempc/io/scenario.hpp"

namespace fixtures {

using tubempc::geometry::Matrix;
using tubempc::geometry::Polytope;
using tubempc::geometry::Vector;

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Vector scalar(double x) { return vec({x}); }

inline Polytope interval(double lo, double hi) { return Polytope::box(vec({lo}), vec({hi})); }

inline const tubempc::io::Scenario& e1_scenario() {
  static const auto sc = tubempc::io::load_scenario(std::filesystem::path(TUBEMPC_DATA_DIR) / "e1.json");
  return sc;
}

inline std::shared_ptr<const tubempc::ocp::TubeSetup> e1() {
  static const auto setup = tubempc::io::build_setup(e1_scenario());
  return setup;
}

inline tubempc::ocp::OcpProblem e1_problem(int N = 10, tubempc::ocp::Mode mode = tubempc::ocp::Mode::tc) {
  auto p = tubempc::io::make_problem(e1_scenario(), e1());
  p.N = N;
  p.mode = mode;
  return p;
}

inline tubempc::model::LinearTubeModel e1_model() {
  return tubempc::model::LinearTubeModel(Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Constant(1, 1, -0.5), 1);
}

}  // namespace fixtures
