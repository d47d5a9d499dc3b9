#pragma once

// Benchmark scenes shared by tests, the CLI and the acceptance suite.

#include "msdf/field.hpp"
#include "msdf/render.hpp"

namespace msdf {

// (gyroid_sum(eta p) + level) / 10
ScalarField gyroid_layer(double eta, double level = 0.3);

// Two gyroid scales split by the plane x = 0 and cut by the unit ball:
//   max(min(max(G_10, p_x), max(G_200, -p_x)), |p| - 1)
ScalarField two_scale_gyroid_scene(double coarse_eta = 10.0, double fine_eta = 200.0);

enum class FibreModel { Periodic, Direct, Agglomeration };

// Fibres along y on the lattice of spacing 1/eta, radius `rho` cells.
//   Periodic:       sin^2(pi eta x) + sin^2(pi eta z) - sin^2(pi rho)
//   Direct:         the four nearest infinite cylinders
//   Agglomeration:  27-neighbour spheres of radius 1 cell where q_x, q_z are even
// The lattice fibres of the agglomeration model sit on even cells, so its
// spacing is 2 / eta.
ScalarField fibre_field(FibreModel model, double eta, double rho = 0.3);

// Air bubbles of a suspended cloud; used inside an ice container.
ScalarField bubble_cloud(double w = 0.2, double size = 0.5, std::uint64_t salt = 0);

// Camera on -z looking at the origin.
Camera default_camera(int width, int height, double distance = 3.0, double fov_y_deg = 40.0);

}  // namespace msdf
