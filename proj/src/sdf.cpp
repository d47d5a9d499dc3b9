#include "msdf/sdf.hpp"

#include "msdf/hashgrid.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace msdf {

namespace instrument {

std::uint64_t& primitive_counter() {
  thread_local std::uint64_t counter = 0;
  return counter;
}

}  // namespace instrument

ScalarField::ScalarField(Fn fn, double lipschitz, Smoothness smooth, VecX params)
    : fn_(std::make_shared<const Fn>(std::move(fn))),
      lipschitz_(lipschitz),
      smooth_(smooth),
      params_(std::move(params)) {
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
    throw DomainError("field Lipschitz bound must be positive and finite");
  }
}

ScalarField ScalarField::with_lipschitz(double lipschitz) const {
  ScalarField copy = *this;
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
    throw DomainError("field Lipschitz bound must be positive and finite");
  }
  copy.lipschitz_ = lipschitz;
  return copy;
}

OffsetFunction OffsetFunction::constant(double c) {
  return {[c](const Vec3&) { return c; }, 0.0};
}

OffsetFunction OffsetFunction::sinusoid(double amplitude, const Vec3& frequency) {
  return {[amplitude, frequency](const Vec3& p) { return amplitude * std::sin(frequency.dot(p)); },
          std::abs(amplitude) * frequency.norm()};
}

WarpFunction WarpFunction::translation(const Vec3& t) {
  return {[t](const Vec3&) { return t; }, 0.0, t.norm()};
}

WarpFunction WarpFunction::sinusoid(double amplitude, double frequency) {
  return {[amplitude, frequency](const Vec3& p) {
            return Vec3(amplitude * std::sin(frequency * p.y()), amplitude * std::sin(frequency * p.z()),
                        amplitude * std::sin(frequency * p.x()));
          },
          std::abs(amplitude * frequency), std::abs(amplitude) * std::sqrt(3.0)};
}

ScalarField sphere(const Vec3& center, double radius) {
  if (!(radius > 0.0)) throw DomainError("sphere radius must be positive");
  return ScalarField(
      [center, radius](const Vec3& p) {
        instrument::count_primitive();
        return sphere_distance(p - center, radius);
      },
      1.0);
}

ScalarField ellipsoid(const Vec3& center, const Vec3& semi_axes) {
  if (!(semi_axes.minCoeff() > 0.0)) throw DomainError("ellipsoid semi-axes must be positive");
  return ScalarField(
      [center, semi_axes](const Vec3& p) {
        instrument::count_primitive();
        return ellipsoid_distance(p - center, semi_axes);
      },
      1.0);
}

ScalarField cylinder(const Vec3& axis, double radius, const Vec3& point) {
  const double len = axis.norm();
  if (!(len > 0.0)) throw DomainError("cylinder axis must be non-zero");
  if (!(radius > 0.0)) throw DomainError("cylinder radius must be positive");
  const Vec3 a = axis / len;
  return ScalarField(
      [a, radius, point](const Vec3& p) {
        instrument::count_primitive();
        return cylinder_distance(p - point, a, radius);
      },
      1.0);
}

ScalarField box(const Vec3& center, const Vec3& half_extents) {
  if (!(half_extents.minCoeff() > 0.0)) throw DomainError("box extents must be positive");
  return ScalarField(
      [center, half_extents](const Vec3& p) {
        instrument::count_primitive();
        const Vec3 q = (p - center).cwiseAbs() - half_extents;
        return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
      },
      1.0);
}

ScalarField plane(const Vec3& normal, double offset) {
  const double len = normal.norm();
  if (!(len > 0.0)) throw DomainError("plane normal must be non-zero");
  const Vec3 n = normal / len;
  return ScalarField(
      [n, offset](const Vec3& p) {
        instrument::count_primitive();
        return n.dot(p) - offset;
      },
      1.0);
}

ScalarField union_of(const ScalarField& a, const ScalarField& b) {
  return ScalarField([a, b](const Vec3& p) { return std::min(a(p), b(p)); },
                     std::max(a.lipschitz(), b.lipschitz()),
                     a.smooth() && b.smooth() ? Smoothness::Smooth : Smoothness::NonSmooth);
}

ScalarField intersection(const ScalarField& a, const ScalarField& b) {
  return ScalarField([a, b](const Vec3& p) { return std::max(a(p), b(p)); },
                     std::max(a.lipschitz(), b.lipschitz()),
                     a.smooth() && b.smooth() ? Smoothness::Smooth : Smoothness::NonSmooth);
}

ScalarField subtraction(const ScalarField& a, const ScalarField& b) {
  return ScalarField([a, b](const Vec3& p) { return std::max(a(p), -b(p)); },
                     std::max(a.lipschitz(), b.lipschitz()),
                     a.smooth() && b.smooth() ? Smoothness::Smooth : Smoothness::NonSmooth);
}

ScalarField smooth_min(const ScalarField& a, const ScalarField& b, double k) {
  return ScalarField([a, b, k](const Vec3& p) { return smooth_min_value(a(p), b(p), k); },
                     std::max(a.lipschitz(), b.lipschitz()),
                     a.smooth() && b.smooth() ? Smoothness::Smooth : Smoothness::NonSmooth);
}

ScalarField negate(const ScalarField& a) {
  return ScalarField([a](const Vec3& p) { return -a(p); }, a.lipschitz(), a.smoothness(),
                     a.params());
}

ScalarField scaled(const ScalarField& a, double c) {
  if (c == 0.0) throw DomainError("scale factor must be non-zero");
  return ScalarField([a, c](const Vec3& p) { return c * a(p); }, std::abs(c) * a.lipschitz(),
                     a.smoothness(), a.params());
}

ScalarField normalized(const ScalarField& a) {
  const double inv = 1.0 / a.lipschitz();
  return ScalarField([a, inv](const Vec3& p) { return inv * a(p); }, 1.0, a.smoothness(),
                     a.params());
}

ScalarField offset(const ScalarField& field, const OffsetFunction& f) {
  if (!f.active()) return field;
  return ScalarField([field, f](const Vec3& p) { return f.f(p) + field(p); },
                     field.lipschitz() + f.lipschitz, field.smoothness(), field.params());
}

ScalarField warp(const ScalarField& field, const WarpFunction& h) {
  if (!h.active()) return field;
  const double inv = 1.0 / (1.0 + h.lipschitz);
  // |grad| of eval(p + h(p)) is at most L * (1 + L_h); dividing by (1 + L_h)
  // restores the original bound.
  return ScalarField([field, h, inv](const Vec3& p) { return field(Vec3(p + h.h(p))) * inv; },
                     field.lipschitz(), field.smoothness(), field.params());
}

Vec3 gradient(const ScalarField& field, const Vec3& p, double eps) {
  if (!(eps > 0.0)) throw DomainError("finite-difference step must be positive");
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    Vec3 dp = Vec3::Zero();
    dp[i] = eps;
    g[i] = (field(Vec3(p + dp)) - field(Vec3(p - dp))) / (2.0 * eps);
  }
  return g;
}

Vec3 normal(const ScalarField& field, const Vec3& p, double eps) {
  const Vec3 g = gradient(field, p, eps);
  const double len = g.norm();
  if (!(len > 0.0) || !std::isfinite(len)) {
    throw DegenerateNormalError("gradient vanishes; normal undefined");
  }
  return g / len;
}

namespace {

Vec3 sample_box(SplitMix64& gen, const Eigen::AlignedBox3d& domain) {
  const Vec3 u(gen.uniform(), gen.uniform(), gen.uniform());
  return domain.min() + u.cwiseProduct(domain.sizes());
}

}  // namespace

double max_gradient_estimate(const ScalarField& field, const Eigen::AlignedBox3d& domain,
                             int samples, std::uint64_t seed, double eps) {
  if (samples < 1) throw DomainError("max_gradient_estimate needs at least one sample");
  SplitMix64 gen(seed);
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vec3 p = sample_box(gen, domain);
    const double g = gradient(field, p, eps).norm();
    if (std::isfinite(g)) best = std::max(best, g);
  }
  return best;
}

double max_jacobian_estimate(const std::function<Vec3(const Vec3&)>& map,
                             const Eigen::AlignedBox3d& domain, int samples, std::uint64_t seed,
                             double eps) {
  if (samples < 1) throw DomainError("max_jacobian_estimate needs at least one sample");
  SplitMix64 gen(seed);
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vec3 p = sample_box(gen, domain);
    Mat3 jac;
    for (int i = 0; i < 3; ++i) {
      Vec3 dp = Vec3::Zero();
      dp[i] = eps;
      jac.col(i) = (map(Vec3(p + dp)) - map(Vec3(p - dp))) / (2.0 * eps);
    }
    const double n = Eigen::JacobiSVD<Mat3>(jac).singularValues()[0];
    if (std::isfinite(n)) best = std::max(best, n);
  }
  return best;
}

}  // namespace msdf
