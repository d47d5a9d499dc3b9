#include "msdf/scenes.hpp"

#include "msdf/agglomerate.hpp"
#include "msdf/particulate.hpp"
#include "msdf/periodic.hpp"
#include "msdf/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace msdf {

ScalarField gyroid_layer(double eta, double level) {
  if (!(eta > 0.0)) throw DomainError("gyroid layer needs eta > 0");
  // |grad| of the unit gyroid sum is at most 2 sqrt(3).
  const double lipschitz = 2.0 * std::sqrt(3.0) * eta / 10.0;
  return ScalarField(
      [eta, level](const Vec3& p) {
        instrument::count_primitive();
        return (detail::gyroid_sum(Vec3(eta * p)) + level) / 10.0;
      },
      lipschitz);
}

ScalarField two_scale_gyroid_scene(double coarse_eta, double fine_eta) {
  const ScalarField left = intersection(gyroid_layer(coarse_eta), plane(Vec3::UnitX(), 0.0));
  const ScalarField right = intersection(gyroid_layer(fine_eta), plane(-Vec3::UnitX(), 0.0));
  return intersection(union_of(left, right), sphere(Vec3::Zero(), 1.0));
}

ScalarField fibre_field(FibreModel model, double eta, double rho) {
  if (!(eta > 0.0)) throw DomainError("fibre density must be positive");
  if (!(rho > 0.0 && rho < 0.5)) throw DomainError("fibre radius must lie in (0, 1/2) cells");
  switch (model) {
    case FibreModel::Periodic: {
      const double k = kPi * eta;
      const double s = std::sin(kPi * rho);
      const double level = s * s;
      return ScalarField(
          [k, level](const Vec3& p) {
            instrument::count_primitive();
            const double sx = std::sin(k * p.x());
            const double sz = std::sin(k * p.z());
            return sx * sx + sz * sz - level;
          },
          std::sqrt(2.0) * k);
    }
    case FibreModel::Direct: {
      const double inv = 1.0 / eta;
      const double radius = rho * inv;
      return ScalarField(
          [eta, inv, radius](const Vec3& p) {
            const double bx = std::floor(p.x() * eta);
            const double bz = std::floor(p.z() * eta);
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < 4; ++i) {
              const Vec3 axis_point((bx + (i & 1)) * inv, 0.0, (bz + (i >> 1)) * inv);
              instrument::count_primitive();
              best = std::min(best, cylinder_distance(Vec3(p - axis_point), Vec3::UnitY(), radius));
            }
            return best;
          },
          1.0);
    }
    case FibreModel::Agglomeration: {
      GridSpec grid;
      grid.w = 0.5 / eta;
      grid.neighborhood = Neighborhood::Moore27;
      AggloParticle particle;
      particle.r = 2.0 * rho * grid.w;
      LatticeRule rule;
      rule.polys = {IntPolynomial{{{1, 1, 0, 0}}}, IntPolynomial{{{1, 0, 0, 1}}}};
      rule.moduli = {2, 2};
      rule.classes = {{ClassSelector{1, 0}}, {ClassSelector{1, 0}}};
      rule.outer = Reduce::And;
      return subset_sdf(grid, particle, rule);
    }
  }
  throw ConfigError("unknown fibre model");
}

ScalarField bubble_cloud(double w, double size, std::uint64_t salt) {
  GridSpec grid;
  grid.w = w;
  grid.coeffs.salt = salt;
  ParticleRecipe recipe;
  recipe.size = SizeLaw::fixed(size);
  return suspended_sdf(grid, recipe);
}

Camera default_camera(int width, int height, double distance, double fov_y_deg) {
  return Camera::look_at(Vec3(0.0, 0.0, -distance), Vec3::Zero(), Vec3::UnitY(), fov_y_deg, width,
                         height);
}

}  // namespace msdf
