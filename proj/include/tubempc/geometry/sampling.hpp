#pragma once

#include <random>
#include <vector>

#include "tubempc/geometry/polytope.hpp"

namespace tubempc::geometry {

using Rng = std::mt19937_64;

/// Uniform samples: per-axis for boxes, hit-and-run otherwise. Sets without
/// interior fall back to random convex combinations of their vertices.
std::vector<Vector> sample_uniform(const Polytope& p, std::size_t count, Rng& rng);

/// Regular grid with per_dim points per axis over the bounding box,
/// filtered to the points inside p.
std::vector<Vector> grid_points(const Polytope& p, int per_dim);

/// Vertices (when enumerable) followed by count uniform samples.
std::vector<Vector> vertices_and_samples(const Polytope& p, std::size_t count, Rng& rng);

}  // namespace tubempc::geometry
