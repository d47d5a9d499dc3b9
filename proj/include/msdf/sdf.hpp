#pragma once

// Primitive distance functions, CSG combinators, domain operators and
// gradient estimation. The inline formula templates accept any Eigen
// 3-vector expression.

#include "msdf/field.hpp"

#include <Eigen/Geometry>

#include <cstdint>

namespace msdf {

template <typename Derived>
typename Derived::Scalar sphere_distance(const Eigen::MatrixBase<Derived>& p,
                                         typename Derived::Scalar radius) {
  return p.norm() - radius;
}

// Directionally scaled sphere, multiplied by the smallest semi-axis so that the
// result is 1-Lipschitz and a lower bound of the Euclidean distance.
template <typename Derived, typename AxesDerived>
typename Derived::Scalar ellipsoid_distance(const Eigen::MatrixBase<Derived>& p,
                                            const Eigen::MatrixBase<AxesDerived>& semi_axes) {
  return semi_axes.minCoeff() * (p.cwiseQuotient(semi_axes).norm() - 1);
}

// Infinite cylinder around the line through the origin along unit `axis`.
template <typename Derived, typename AxisDerived>
typename Derived::Scalar cylinder_distance(const Eigen::MatrixBase<Derived>& p,
                                           const Eigen::MatrixBase<AxisDerived>& axis,
                                           typename Derived::Scalar radius) {
  return (p - p.dot(axis) * axis).norm() - radius;
}

// Quadratic polynomial smooth minimum with blend width k (k <= 0 is min).
template <typename Scalar>
Scalar smooth_min_value(Scalar a, Scalar b, Scalar k) {
  using std::abs;
  using std::max;
  using std::min;
  if (k <= 0) return min(a, b);
  const Scalar h = max(k - abs(a - b), Scalar(0)) / k;
  return min(a, b) - h * h * k * Scalar(0.25);
}

ScalarField sphere(const Vec3& center, double radius);
ScalarField ellipsoid(const Vec3& center, const Vec3& semi_axes);
ScalarField cylinder(const Vec3& axis, double radius, const Vec3& point = Vec3::Zero());
// Axis-aligned box, exact Euclidean distance.
ScalarField box(const Vec3& center, const Vec3& half_extents);
// Half-space n.p - offset <= 0 for unit n.
ScalarField plane(const Vec3& normal, double offset);

ScalarField union_of(const ScalarField& a, const ScalarField& b);
ScalarField intersection(const ScalarField& a, const ScalarField& b);
ScalarField subtraction(const ScalarField& a, const ScalarField& b);  // a minus b
ScalarField smooth_min(const ScalarField& a, const ScalarField& b, double k);
ScalarField negate(const ScalarField& a);
// c * field, Lipschitz |c| * L.
ScalarField scaled(const ScalarField& a, double c);
// field / lipschitz, declared 1.
ScalarField normalized(const ScalarField& a);

// eval'(p) = f(p) + eval(p)
ScalarField offset(const ScalarField& field, const OffsetFunction& f);
// eval'(p) = eval(p + h(p)) / (1 + lipschitz_h)
ScalarField warp(const ScalarField& field, const WarpFunction& h);

// Normalized central-difference gradient. Throws DegenerateNormalError when
// the gradient vanishes.
Vec3 normal(const ScalarField& field, const Vec3& p, double eps = 1e-4);

// Central-difference gradient, unnormalized.
Vec3 gradient(const ScalarField& field, const Vec3& p, double eps = 1e-4);

// Largest central-difference gradient magnitude over uniform random probes
// in `domain`.
double max_gradient_estimate(const ScalarField& field, const Eigen::AlignedBox3d& domain,
                             int samples, std::uint64_t seed = 1, double eps = 1e-6);

// Largest spectral norm of the finite-difference Jacobian of a point map over
// uniform random probes in `domain`.
double max_jacobian_estimate(const std::function<Vec3(const Vec3&)>& map,
                             const Eigen::AlignedBox3d& domain, int samples,
                             std::uint64_t seed = 1, double eps = 1e-6);

}  // namespace msdf
