#pragma once

#include <span>

#include "pogosim/geometry.hpp"
#include "pogosim/types.hpp"

namespace pogosim {

struct CollisionSettings {
  int max_iterations = 8;
  double tolerance = 1e-9;  // m, stop once no pair penetrates more than this
};

struct CollisionReport {
  int iterations = 0;
  double max_penetration = 0.0;  // largest overlap seen in the last pass
};

/// Iterative pairwise projection. Overlapping pairs are pushed apart along the
/// center line in proportion to inverse mass (non-movable bodies and walls
/// have infinite mass); movable bodies are then pushed out of wall segments and
/// clamped inside the arena.
CollisionReport resolve_collisions(std::span<BodyDisc> bodies, const Polygon* arena, std::span<const Segment> walls,
                                   const CollisionSettings& settings = {});

/// Projects a single disc out of wall segments and into the arena.
void constrain_disc(BodyDisc& body, const Polygon* arena, std::span<const Segment> walls);

/// Brute-force largest pairwise overlap among bodies of the given kind.
double max_pair_penetration(std::span<const BodyDisc> bodies, BodyKind kind);

}  // namespace pogosim
