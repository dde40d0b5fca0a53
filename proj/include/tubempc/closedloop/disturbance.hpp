#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "tubempc/geometry/polytope.hpp"

namespace tubempc::closedloop {

using geometry::Polytope;
using geometry::Vector;

enum class DisturbanceKind { zero, uniform_seeded, vertex_extreme, explicit_sequence };

std::string_view to_string(DisturbanceKind k);
/// Accepts zero, uniform, uniform_seeded, vertex, vertex_extreme, file,
/// explicit_sequence. Throws ConfigError otherwise.
DisturbanceKind parse_disturbance_kind(std::string_view name);

struct DisturbanceSource {
  DisturbanceKind kind = DisturbanceKind::zero;
  std::uint64_t seed = 0;
  std::vector<Vector> sequence;  // explicit_sequence only
};

/// splitmix64 finaliser applied to (seed, run, step): independent streams per
/// run and step, reproducible regardless of execution order.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t run, std::uint64_t step);

/// w(t) for the given run. Throws DisturbanceError when an explicit sample is
/// missing or lies outside W (tolerance 1e-9).
Vector draw(const DisturbanceSource& src, const Polytope& W, std::uint64_t run, int t);

}  // namespace tubempc::closedloop
