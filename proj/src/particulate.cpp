#include "msdf/particulate.hpp"

#include "msdf/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace msdf {

void GridSpec::validate() const {
  if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("grid cell width must be positive");
  if (!(scene_scale > 0.0)) throw ConfigError("scene scale must be positive");
  coeffs.validate();
}

double GridSpec::number_density() const {
  const double cell = scene_scale * w;
  return 1.0 / (cell * cell * cell);
}

void SizeLaw::validate(double s_max) const {
  switch (kind) {
    case Kind::Fixed:
      if (!(a > 0.0) || a > s_max) throw ConfigError("fixed size must lie in (0, s_max]");
      break;
    case Kind::Uniform:
      if (!(a >= 0.0) || !(b > a) || b > s_max) {
        throw ConfigError("uniform size law needs 0 <= lo < hi <= s_max");
      }
      break;
    case Kind::Normal:
      if (!(b >= 0.0)) throw ConfigError("normal size law needs a non-negative deviation");
      if (!(a > 0.0) || a > s_max) throw ConfigError("normal size mean must lie in (0, s_max]");
      break;
  }
}

double SizeLaw::max_size() const {
  switch (kind) {
    case Kind::Fixed: return a;
    case Kind::Uniform: return b;
    case Kind::Normal: return a + 4.0 * b;
  }
  return a;
}

int SizeLaw::uniforms_needed() const {
  switch (kind) {
    case Kind::Fixed: return 0;
    case Kind::Uniform: return 1;
    case Kind::Normal: return 2;
  }
  return 0;
}

double sample_size(const SizeLaw& law, double u1, double u2, double s_max) {
  switch (law.kind) {
    case SizeLaw::Kind::Fixed: return law.a;
    case SizeLaw::Kind::Uniform: return law.a + u1 * (law.b - law.a);
    case SizeLaw::Kind::Normal: {
      const double z = std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * kPi * u2);
      const double lo = std::max(0.0, law.a - 4.0 * law.b);
      const double hi = std::min(law.a + 4.0 * law.b, s_max);
      return std::clamp(law.a + law.b * z, lo, hi);
    }
  }
  return law.a;
}

bool accept_particle(const CellIndex& q, const AcceptanceFunction& g, double xi) {
  if (!g) return true;
  return xi < g(q.cast<double>() + Vec3::Constant(0.5));
}

AcceptanceFunction modular_correlation_g(int n) {
  if (n < 2) throw DomainError("correlation period must be >= 2");
  const double period = n;
  return [period](const Vec3& p) {
    for (int i = 0; i < 3; ++i) {
      if (!(std::abs(std::fmod(std::abs(p[i]), period)) < 0.5 * period)) return 0.0;
    }
    return 1.0;
  };
}

double ParticleRecipe::bounding_radius() const { return 0.5 * size.max_size(); }

int ParticleRecipe::uniforms_needed() const {
  int n = 3 + size.uniforms_needed();
  if (shape == Shape::Ellipsoid) n += 2;
  if (accept) n += 1;
  return n;
}

void ParticleRecipe::validate(Neighborhood mode) const {
  // s is a diameter in cell units; Dual8 allows radius 1/2, Moore27 radius 1.
  const double s_max = mode == Neighborhood::Dual8 ? 1.0 : 2.0;
  size.validate(s_max);
  if (bounding_radius() > 0.5 * s_max) {
    throw ConfigError("particle bounding radius exceeds the neighbourhood limit");
  }
  if (shape == Shape::Ellipsoid) {
    if (!(axes.minCoeff() > 0.0) || std::abs(axes.maxCoeff() - 1.0) > 1e-12) {
      throw ConfigError("ellipsoid relative axes must be positive with maximum 1");
    }
  }
  if (center_box.isEmpty() || center_box.min().minCoeff() < 0.0 || center_box.max().maxCoeff() > 1.0) {
    throw ConfigError("centre constraint must be a non-empty sub-box of the unit cell");
  }
  if (uniforms_needed() > kMaxUniforms) throw ConfigError("recipe needs too many uniforms");
}

namespace {

HashCoefficients coefficients_for(const GridSpec& grid, const ParticleRecipe& recipe) {
  HashCoefficients c = grid.coeffs;
  c.n = std::max(c.n, recipe.uniforms_needed());
  return c;
}

Particle realise_with(const CellIndex& q, const HashCoefficients& coeffs,
                      const ParticleRecipe& recipe, double s_max) {
  SplitMix64 gen(seed_for_cell(q, coeffs));
  Particle out;
  const Vec3 xi(gen.uniform(), gen.uniform(), gen.uniform());
  out.center = q.cast<double>() + recipe.center_box.min() +
               xi.cwiseProduct(recipe.center_box.sizes());
  double u1 = 0.0;
  double u2 = 0.0;
  const int size_uniforms = recipe.size.uniforms_needed();
  if (size_uniforms >= 1) u1 = gen.uniform();
  if (size_uniforms >= 2) u2 = gen.uniform();
  out.s = sample_size(recipe.size, u1, u2, s_max);
  if (recipe.shape == ParticleRecipe::Shape::Ellipsoid) {
    const double z = 2.0 * gen.uniform() - 1.0;
    const double phi = 2.0 * kPi * gen.uniform();
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const Vec3 axis(rho * std::cos(phi), rho * std::sin(phi), z);
    out.rotation = Eigen::Quaterniond::FromTwoVectors(Vec3::UnitX(), axis).toRotationMatrix();
  }
  if (recipe.accept) out.accepted = accept_particle(q, recipe.accept, gen.uniform());
  return out;
}

double s_max_for(Neighborhood mode) { return mode == Neighborhood::Dual8 ? 1.0 : 2.0; }

}  // namespace

Particle realise_particle(const CellIndex& q, const GridSpec& grid, const ParticleRecipe& recipe) {
  return realise_with(q, coefficients_for(grid, recipe), recipe, s_max_for(grid.neighborhood));
}

double particle_distance(const Particle& particle, const ParticleRecipe& recipe, const Vec3& p_w) {
  const Vec3 d = p_w - particle.center;
  if (recipe.shape == ParticleRecipe::Shape::Sphere) return sphere_distance(d, 0.5 * particle.s);
  const Vec3 local = particle.rotation.transpose() * d;
  return ellipsoid_distance(local, Vec3(0.5 * particle.s * recipe.axes));
}

ScalarField suspended_sdf(const GridSpec& grid, const ParticleRecipe& recipe,
                          const OffsetFunction& f, const WarpFunction& h) {
  grid.validate();
  recipe.validate(Neighborhood::Dual8);
  const HashCoefficients coeffs = coefficients_for(grid, recipe);
  const double w = grid.w;
  const double inv_w = 1.0 / w;
  auto fn = [coeffs, recipe, f, h, w, inv_w](const Vec3& p) {
    const Vec3 p_w = h.apply(p) * inv_w;
    double best = std::numeric_limits<double>::infinity();
    for (const CellIndex& q : dual_neighbors(p_w)) {
      instrument::count_primitive();
      const Particle particle = realise_with(q, coeffs, recipe, 1.0);
      if (!particle.accepted || !(particle.s > 0.0)) continue;
      best = std::min(best, particle_distance(particle, recipe, p_w));
    }
    return std::min(f(p) + w * best, 0.5 * w);
  };
  return ScalarField(fn, 1.0 + h.lipschitz + f.lipschitz, Smoothness::NonSmooth);
}

ScalarField cluster_sdf(const GridSpec& grid, const ParticleRecipe& recipe, double n) {
  if (!(n > 0.0)) throw DomainError("cluster size must be positive");
  GridSpec fine = grid;
  fine.w = 2.0 * grid.w / n;
  fine.coeffs.salt = scramble(CellIndex(1, 2, 3)) ^ grid.coeffs.salt;
  return intersection(suspended_sdf(fine, recipe), suspended_sdf(grid, recipe));
}

void PhaseTransform::validate() const {
  if (A.minCoeff() < 0.0 || A.maxCoeff() > 1.0) {
    throw ConfigError("phase amplitude entries must lie in [0, 1]");
  }
}

Mat3 phase_sine_matrix(const Vec3& p) {
  const double sx = std::sin(p.x());
  const double sy = std::sin(p.y());
  const double sz = std::sin(p.z());
  Mat3 d;
  d << sy, sz, sx,
       sz, sx, sy,
       sx, sy, sz;
  return d;
}

WarpFunction multiphase_warp(const PhaseTransform& transform, const Eigen::AlignedBox3d& domain) {
  transform.validate();
  if (!transform.enabled) return WarpFunction::none();
  const Mat3 A = transform.A;
  auto map = [A](const Vec3& p) -> Vec3 {
    return (p.transpose() * (A * phase_sine_matrix(p))).transpose();
  };
  WarpFunction out;
  out.h = [map](const Vec3& p) -> Vec3 { return map(p) - p; };
  out.lipschitz = 1.05 * max_jacobian_estimate(out.h, domain, 10000, 0x5EED);
  double bound = 0.0;
  for (const Vec3& c : {domain.min(), domain.max()}) bound = std::max(bound, c.norm());
  // |p (A D)| <= |p| |A|_F and |D| entries <= 1, so |D|_F <= 3.
  out.bound = bound * (1.0 + 3.0 * A.norm());
  return out;
}

}  // namespace msdf
