#include "tubempc/closedloop/disturbance.hpp"

#include <string>

#include "tubempc/error.hpp"
#include "tubempc/geometry/sampling.hpp"

namespace tubempc::closedloop {

namespace {

std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::string_view to_string(DisturbanceKind k) {
  switch (k) {
    case DisturbanceKind::zero: return "zero";
    case DisturbanceKind::uniform_seeded: return "uniform";
    case DisturbanceKind::vertex_extreme: return "vertex";
    case DisturbanceKind::explicit_sequence: return "file";
  }
  return "unknown";
}

DisturbanceKind parse_disturbance_kind(std::string_view name) {
  if (name == "zero") return DisturbanceKind::zero;
  if (name == "uniform" || name == "uniform_seeded") return DisturbanceKind::uniform_seeded;
  if (name == "vertex" || name == "vertex_extreme") return DisturbanceKind::vertex_extreme;
  if (name == "file" || name == "explicit_sequence") return DisturbanceKind::explicit_sequence;
  throw ConfigError("unknown disturbance kind '" + std::string(name) + "'");
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t run, std::uint64_t step) {
  return mix(mix(mix(seed) ^ run) ^ step);
}

Vector draw(const DisturbanceSource& src, const Polytope& W, std::uint64_t run, int t) {
  switch (src.kind) {
    case DisturbanceKind::zero:
      return Vector::Zero(W.dim());
    case DisturbanceKind::uniform_seeded: {
      geometry::Rng rng(split_seed(src.seed, run, static_cast<std::uint64_t>(t)));
      return geometry::sample_uniform(W, 1, rng).front();
    }
    case DisturbanceKind::vertex_extreme: {
      const auto& verts = W.vertices();
      return verts[static_cast<std::size_t>(t) % verts.size()];
    }
    case DisturbanceKind::explicit_sequence: {
      if (static_cast<std::size_t>(t) >= src.sequence.size())
        throw DisturbanceError("disturbance sequence too short at step " + std::to_string(t));
      const Vector& w = src.sequence[static_cast<std::size_t>(t)];
      if (w.size() != W.dim()) throw DisturbanceError("disturbance sample " + std::to_string(t) + " has wrong size");
      if (!W.contains(w, geometry::kTol))
        throw DisturbanceError("disturbance sample " + std::to_string(t) + " lies outside W");
      return w;
    }
  }
  return Vector::Zero(W.dim());
}

}  // namespace tubempc::closedloop
