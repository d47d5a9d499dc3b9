#pragma once

// Granular piles: a touching-sphere lattice sampled at a rotated and
// noise-deformed query point.

#include "msdf/field.hpp"
#include "msdf/noise.hpp"
#include "msdf/particulate.hpp"

#include <Eigen/Geometry>

#include <vector>

namespace msdf {

struct RealPolynomial {
  struct Term {
    double coef = 0.0;
    int ex = 0, ey = 0, ez = 0;
  };
  std::vector<Term> terms;

  double operator()(const Vec3& p) const;

  static RealPolynomial zero() { return {}; }
  static RealPolynomial constant(double c) { return {{{c, 0, 0, 0}}}; }
  static RealPolynomial linear(double a, double b, double c) {
    return {{{a, 1, 0, 0}, {b, 0, 1, 0}, {c, 0, 0, 1}}};
  }
};

enum class NoiseKind { Perlin, SparseConvolution, Constant };
enum class RotationAxis { X, Y, Z, XYZ };

struct PilingConfig {
  RealPolynomial theta;   // radians
  RealPolynomial deform;  // P(p), scene units
  NoiseKind noise = NoiseKind::Perlin;
  double noise_frequency = 1.0;  // Perlin input is p * noise_frequency
  SparseNoiseParams sparse;
  RotationAxis axis = RotationAxis::Z;
  // Region over which the deformation gradient bound is sampled.
  Eigen::AlignedBox3d domain{Vec3::Constant(-1.0), Vec3::Constant(1.0)};
  int lipschitz_samples = 10000;
};

double piling_noise(const PilingConfig& cfg, const Vec3& p);

Mat3 piling_rotation(RotationAxis axis, double theta);

// R_theta(p) p + P(p) N(p) (1, 1, 1)
Vec3 piling_map(const PilingConfig& cfg, const Vec3& p);

// Spheres of radius w/2 at cell centres, 27-neighbour min at piling_map(p) / w,
// plus f, clamped at w/2.
ScalarField piling_sdf(const GridSpec& grid, const PilingConfig& cfg, const OffsetFunction& f = {});

}  // namespace msdf
