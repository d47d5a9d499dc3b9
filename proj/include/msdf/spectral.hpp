#pragma once

// Fourier-domain discrepancy measures between sampled fields and images.

#include "msdf/core.hpp"

#include <complex>
#include <vector>

namespace msdf {

inline constexpr double kLossEpsilon = 1e-12;

using ComplexVec = std::vector<std::complex<double>>;

ComplexVec dft(const VecX& values);
// Row-major 2D transform of an H x W matrix.
Eigen::MatrixXcd dft2(const Eigen::MatrixXd& image);

// log( 1/(2N) sum_i (dA_i^2 + dtheta_i^2) + eps ), phases wrapped to (-pi, pi].
double loss_ft_3d(const VecX& values, const VecX& target);

// Target spectrum cached for repeated 3D loss evaluations.
class SpectralTarget {
 public:
  explicit SpectralTarget(const VecX& target);
  double loss(const VecX& values) const;
  Eigen::Index size() const { return amplitude_.size(); }

 private:
  VecX amplitude_;
  VecX phase_;
};

// log( 1/N sum_i dA_i^2 + eps ) over the 2D spectrum.
// Throws ContractError on a size mismatch.
double loss_ft_2d(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Wraps an angle difference into (-pi, pi].
double wrap_phase(double d);

}  // namespace msdf
