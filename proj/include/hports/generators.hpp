#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hports/mesh.hpp"

namespace hports {

enum class Shape { sphere, torus, disk, annulus, ball, solid_torus };

inline constexpr Shape all_shapes[] = {Shape::sphere,  Shape::torus, Shape::disk,
                                       Shape::annulus, Shape::ball,  Shape::solid_torus};

std::string_view to_string(Shape shape);
std::optional<Shape> parse_shape(std::string_view name);

/// Smallest resolution accepted for a shape.
int minimum_resolution(Shape shape);

/**
 * Canonical test meshes.
 *
 *  - sphere: tetrahedron surface, each face split into resolution^2 triangles,
 *    projected onto the unit sphere.
 *  - torus: m x m structured grid (m = resolution >= 3) on a torus of radii 2, 1.
 *  - disk: unit square split into resolution^2 cells, two triangles each.
 *  - annulus: radii 1..2, `resolution` radial layers, 6*resolution sectors.
 *  - ball: unit cube, resolution^3 cells, six tetrahedra per cell.
 *  - solid_torus: square cross-section of `resolution`^2 cells swept around a
 *    polygonal ring of 4*resolution segments.
 *
 * Output is deterministic for fixed arguments.
 */
SimplicialComplex gen_mesh(Shape shape, int resolution);

}  // namespace hports
