#pragma once

// Suspended particulate media on the half-offset dual grid.

#include "msdf/field.hpp"
#include "msdf/hashgrid.hpp"

#include <Eigen/Geometry>

#include <functional>

namespace msdf {

enum class Neighborhood { Dual8, Moore27 };

struct GridSpec {
  double w = 0.1;            // cell width, scene units
  double scene_scale = 1.0;  // metres per scene unit
  HashCoefficients coeffs;
  Neighborhood neighborhood = Neighborhood::Dual8;

  void validate() const;
  // Particles per cubic metre with one particle per cell.
  double number_density() const;
};

struct SizeLaw {
  enum class Kind { Fixed, Uniform, Normal };
  Kind kind = Kind::Fixed;
  double a = 0.5;  // Fixed: s; Uniform: lo; Normal: mean
  double b = 0.0;  // Uniform: hi; Normal: standard deviation

  static SizeLaw fixed(double s) { return {Kind::Fixed, s, 0.0}; }
  static SizeLaw uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
  static SizeLaw normal(double mean, double stddev) { return {Kind::Normal, mean, stddev}; }

  // Throws ConfigError if the law can produce s > s_max.
  void validate(double s_max) const;
  double max_size() const;
  int uniforms_needed() const;
};

// s from one or two uniforms. Normal draws use Box-Muller and are clamped to
// [max(0, mean - 4 sd), min(mean + 4 sd, s_max)].
double sample_size(const SizeLaw& law, double u1, double u2, double s_max = 1.0);

using AcceptanceFunction = std::function<double(const Vec3&)>;

// xi < g(centre). An empty g accepts everything.
bool accept_particle(const CellIndex& q, const AcceptanceFunction& g, double xi);

// Clusters of (n/2)^3 cells: 1 when mod(|p_i|, n) < n/2 on every axis.
// Evaluated on cell-scaled coordinates.
AcceptanceFunction modular_correlation_g(int n);

struct ParticleRecipe {
  enum class Shape { Sphere, Ellipsoid };
  Shape shape = Shape::Sphere;
  // Ellipsoid semi-axes relative to s/2; the largest must be 1.
  Vec3 axes{1.0, 0.5, 0.5};
  SizeLaw size = SizeLaw::fixed(0.5);
  // Receives the cell centre q + 1/2 in cell-scaled coordinates.
  AcceptanceFunction accept;
  // Particle centres are drawn inside this sub-box of the unit cell.
  Eigen::AlignedBox3d center_box{Vec3::Zero(), Vec3::Ones()};

  // Largest particle radius, cell units.
  double bounding_radius() const;
  // Uniforms consumed per cell.
  int uniforms_needed() const;
  void validate(Neighborhood mode) const;
};

// One realised particle, cell-scaled.
struct Particle {
  Vec3 center;
  double s = 0.0;
  Mat3 rotation = Mat3::Identity();  // ellipsoid frame, columns are axes
  bool accepted = true;
};

Particle realise_particle(const CellIndex& q, const GridSpec& grid, const ParticleRecipe& recipe);

// Signed distance, cell units, from cell-scaled p_w to an accepted particle.
double particle_distance(const Particle& particle, const ParticleRecipe& recipe, const Vec3& p_w);

// eval(p) = min(f(p) + w * min_i d_{q_i}((p + h(p)) / w), w / 2)
ScalarField suspended_sdf(const GridSpec& grid, const ParticleRecipe& recipe,
                          const OffsetFunction& f = {}, const WarpFunction& h = {});

// max(d(p; width 2w/n), d(p; width w)); the fine cloud uses a salted hash.
ScalarField cluster_sdf(const GridSpec& grid, const ParticleRecipe& recipe, double n);

// Amplitude matrix for the sine transform p' = p (A D(p)).
struct PhaseTransform {
  Mat3 A = Mat3::Zero();
  bool enabled = true;
  void validate() const;
};

Mat3 phase_sine_matrix(const Vec3& p);

// p -> p (A D(p)) as a displacement h(p) = p' - p. The Lipschitz bound is
// estimated by sampling over `domain`.
WarpFunction multiphase_warp(const PhaseTransform& transform,
                             const Eigen::AlignedBox3d& domain = Eigen::AlignedBox3d(
                                 Vec3::Constant(-1.0), Vec3::Constant(1.0)));

}  // namespace msdf
