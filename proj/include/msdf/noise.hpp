#pragma once

#include "msdf/core.hpp"
#include "msdf/hashgrid.hpp"

#include <vector>

namespace msdf {

// Improved gradient noise on the reference 256-entry permutation. Zero on the
// integer lattice, period 256 on every axis.
double perlin(const Vec3& p);

struct Impulse {
  Vec3 x;             // position, noise-cell units
  double weight = 0;  // in [-1, 1]
};

// Compact kernel (1 - (r/R)^2)^3 for r < R, else 0.
inline double sparse_kernel(double r, double radius) {
  if (!(radius > 0.0) || r >= radius) return 0.0;
  const double u = 1.0 - (r * r) / (radius * radius);
  return u * u * u;
}

double sparse_convolution_sum(const Vec3& p, const std::vector<Impulse>& impulses, double radius);

struct SparseNoiseParams {
  double frequency = 1.0;  // noise cells per scene unit
  double radius = 0.5;     // kernel support, noise-cell units, in [0, 1/2]
  HashCoefficients coeffs;

  void validate() const;
};

// One impulse per noise cell; kernels summed over the eight dual cells.
double sparse_convolution_noise(const Vec3& p, const SparseNoiseParams& params);

}  // namespace msdf
