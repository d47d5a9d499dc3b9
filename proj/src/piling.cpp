#include "msdf/piling.hpp"

#include "msdf/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace msdf {

double RealPolynomial::operator()(const Vec3& p) const {
  double sum = 0.0;
  for (const Term& t : terms) {
    sum += t.coef * std::pow(p.x(), t.ex) * std::pow(p.y(), t.ey) * std::pow(p.z(), t.ez);
  }
  return sum;
}

double piling_noise(const PilingConfig& cfg, const Vec3& p) {
  switch (cfg.noise) {
    case NoiseKind::Perlin: return perlin(p * cfg.noise_frequency);
    case NoiseKind::SparseConvolution: return sparse_convolution_noise(p, cfg.sparse);
    case NoiseKind::Constant: return 1.0;
  }
  return 0.0;
}

Mat3 piling_rotation(RotationAxis axis, double theta) {
  using Eigen::AngleAxisd;
  switch (axis) {
    case RotationAxis::X: return AngleAxisd(theta, Vec3::UnitX()).toRotationMatrix();
    case RotationAxis::Y: return AngleAxisd(theta, Vec3::UnitY()).toRotationMatrix();
    case RotationAxis::Z: return AngleAxisd(theta, Vec3::UnitZ()).toRotationMatrix();
    case RotationAxis::XYZ:
      return (AngleAxisd(theta, Vec3::UnitZ()) * AngleAxisd(theta, Vec3::UnitY()) *
              AngleAxisd(theta, Vec3::UnitX()))
          .toRotationMatrix();
  }
  return Mat3::Identity();
}

Vec3 piling_map(const PilingConfig& cfg, const Vec3& p) {
  const double theta = cfg.theta(p);
  const Vec3 rotated = theta == 0.0 ? p : Vec3(piling_rotation(cfg.axis, theta) * p);
  const double pn = cfg.deform.terms.empty() ? 0.0 : cfg.deform(p) * piling_noise(cfg, p);
  return rotated + Vec3::Constant(pn);
}

ScalarField piling_sdf(const GridSpec& grid, const PilingConfig& cfg, const OffsetFunction& f) {
  grid.validate();
  if (cfg.noise == NoiseKind::SparseConvolution) cfg.sparse.validate();
  if (cfg.lipschitz_samples < 1) throw ConfigError("piling needs at least one Lipschitz sample");
  const double map_bound =
      1.05 * std::max(1.0, max_jacobian_estimate([cfg](const Vec3& p) { return piling_map(cfg, p); },
                                                 cfg.domain, cfg.lipschitz_samples, 0x9111));
  const double w = grid.w;
  const double inv_w = 1.0 / w;
  auto fn = [cfg, f, w, inv_w](const Vec3& p) {
    const Vec3 p_w = piling_map(cfg, p) * inv_w;
    double best = std::numeric_limits<double>::infinity();
    for (const CellIndex& q : moore_neighbors(floor_cell(p_w))) {
      instrument::count_primitive();
      best = std::min(best, sphere_distance(p_w - q.cast<double>() - Vec3::Constant(0.5), 0.5));
    }
    return std::min(f(p) + w * best, 0.5 * w);
  };
  return ScalarField(fn, map_bound + f.lipschitz, Smoothness::NonSmooth);
}

}  // namespace msdf
