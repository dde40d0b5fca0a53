#pragma once

#include <json.hpp>

#include "tubempc/ocp/ocp.hpp"

namespace tubempc::io {

using json = nlohmann::json;
using geometry::Matrix;
using geometry::Polytope;
using geometry::Vector;

inline constexpr int kSchemaVersion = 1;

/// Numbers are accepted as 1x1 matrices / length-1 vectors.
Matrix matrix_from_json(const json& j, const char* what);
Vector vector_from_json(const json& j, const char* what);
json to_json(const Matrix& M);
json to_json(const Vector& v);

/// {"box": {"lo": [...], "hi": [...]}} or {"normals": [[...]], "offsets": [...]}
Polytope polytope_from_json(const json& j);
json to_json(const Polytope& p);

/// {"A": [[..]], "B": [[..]], "K": [[..]], "m_steps": n}
model::LinearTubeModel model_from_json(const json& j);
json to_json(const model::LinearTubeModel& m);

/// {"H": [[..]], "g": [..], "c0": .., "variant": "worst_case", "normalize_integral": false}
cost::StageCost cost_from_json(const json& j);
json to_json(const cost::StageCost& c);

/// Serialised with 2-space indentation and a trailing newline.
std::string dump(const json& j);

}  // namespace tubempc::io
