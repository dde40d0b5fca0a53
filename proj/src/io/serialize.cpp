#include "tubempc/io/serialize.hpp"

#include "tubempc/error.hpp"

namespace tubempc::io {

namespace {

double number(const json& j, const char* what) {
  if (!j.is_number()) throw ConfigError(std::string(what) + ": expected a number");
  return j.get<double>();
}

}  // namespace

Matrix matrix_from_json(const json& j, const char* what) {
  if (j.is_number()) return Matrix::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty()) throw ConfigError(std::string(what) + ": expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = j[0].is_array() ? static_cast<Eigen::Index>(j[0].size()) : 1;
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& r = j[static_cast<std::size_t>(i)];
    if (r.is_number() && cols == 1) {
      M(i, 0) = r.get<double>();
      continue;
    }
    if (!r.is_array() || static_cast<Eigen::Index>(r.size()) != cols)
      throw ConfigError(std::string(what) + ": ragged matrix");
    for (Eigen::Index k = 0; k < cols; ++k) M(i, k) = number(r[static_cast<std::size_t>(k)], what);
  }
  return M;
}

Vector vector_from_json(const json& j, const char* what) {
  if (j.is_number()) return Vector::Constant(1, j.get<double>());
  if (!j.is_array()) throw ConfigError(std::string(what) + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], what);
  return v;
}

json to_json(const Matrix& M) {
  json j = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) r.push_back(M(i, k));
    j.push_back(std::move(r));
  }
  return j;
}

json to_json(const Vector& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

Polytope polytope_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("polytope: expected an object");
  try {
    if (j.contains("box")) {
      const auto& b = j.at("box");
      return Polytope::box(vector_from_json(b.at("lo"), "box.lo"), vector_from_json(b.at("hi"), "box.hi"));
    }
    if (j.contains("normals")) {
      Matrix N = matrix_from_json(j.at("normals"), "normals");
      Vector o = vector_from_json(j.at("offsets"), "offsets");
      if (N.rows() != o.size()) throw ConfigError("polytope: normals and offsets differ in length");
      return Polytope::from_halfspaces(N, o);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("polytope: ") + e.what());
  }
  throw ConfigError("polytope: expected 'box' or 'normals'/'offsets'");
}

json to_json(const Polytope& p) {
  if (p.is_box()) return json{{"box", {{"lo", to_json(p.lo())}, {"hi", to_json(p.hi())}}}};
  return json{{"normals", to_json(p.normals())}, {"offsets", to_json(p.offsets())}};
}

model::LinearTubeModel model_from_json(const json& j) {
  try {
    return model::LinearTubeModel(matrix_from_json(j.at("A"), "A"), matrix_from_json(j.at("B"), "B"),
                                  matrix_from_json(j.at("K"), "K"), j.value("m_steps", 0));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

json to_json(const model::LinearTubeModel& m) {
  return json{{"A", to_json(m.A())}, {"B", to_json(m.B())}, {"K", to_json(m.K())}, {"m_steps", m.m_steps()}};
}

cost::StageCost cost_from_json(const json& j) {
  try {
    cost::StageCost c;
    c.H = matrix_from_json(j.at("H"), "H");
    c.g = vector_from_json(j.at("g"), "g");
    c.c0 = j.value("c0", 0.0);
    c.variant = cost::parse_variant(j.value("variant", std::string("nominal")));
    c.normalize_integral = j.value("normalize_integral", false);
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("cost: ") + e.what());
  }
}

json to_json(const cost::StageCost& c) {
  return json{{"H", to_json(c.H)},
              {"g", to_json(c.g)},
              {"c0", c.c0},
              {"variant", std::string(cost::to_string(c.variant))},
              {"normalize_integral", c.normalize_integral}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace tubempc::io
