#pragma once

// Grid-free periodic fields: nested sine/cosine sums, TPMS level sets and the
// analytic dataset microstructures. The scalar formulas are templates over
// Eigen 3-vector expressions.

#include "msdf/field.hpp"
#include "msdf/hashgrid.hpp"

#include <cmath>
#include <limits>
#include <string_view>
#include <vector>

namespace msdf {

struct TrigTerm {
  enum class Func { Sin, Cos };
  Func func = Func::Sin;
  int coord = 0;  // 0, 1, 2 for x, y, z
  double amplitude = 1.0;
  double frequency = 1.0;
  double phase = 0.0;
  int power = 1;

  double operator()(const Vec3& p) const {
    const double arg = frequency * p[coord] + phase;
    const double v = amplitude * (func == Func::Sin ? std::sin(arg) : std::cos(arg));
    double out = 1.0;
    for (int i = 0; i < power; ++i) out *= v;
    return out;
  }
};

// SC(p) = sum_i prod_j T_ij(p)^k_ij + w
struct SCFormula {
  std::vector<std::vector<TrigTerm>> terms;
  double width = 0.0;

  void validate() const;
  // Sum over outer terms of the product-rule gradient bound.
  double lipschitz_bound() const;
};

double sc_eval(const SCFormula& formula, const Vec3& p);

// Counts one primitive evaluation per call.
ScalarField sc_field(const SCFormula& formula);

namespace detail {

template <typename Derived>
typename Derived::Scalar gyroid_sum(const Eigen::MatrixBase<Derived>& x) {
  using std::cos;
  using std::sin;
  return sin(x[0]) * cos(x[1]) + sin(x[1]) * cos(x[2]) + sin(x[2]) * cos(x[0]);
}

template <typename Derived>
typename Derived::Scalar gyroid_sum(const Eigen::MatrixBase<Derived>& x, const Vec3& k) {
  using std::cos;
  using std::sin;
  return sin(k[0] * x[0]) * cos(k[1] * x[1]) + sin(k[1] * x[1]) * cos(k[2] * x[2]) +
         sin(k[2] * x[2]) * cos(k[0] * x[0]);
}

inline void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw DomainError(what);
}

inline double wave_number(double cell) {
  if (cell == 0.0 || !std::isfinite(cell)) throw DomainError("gyroid cell size must be non-zero");
  return 2.0 * 3.14159265358979323846 / cell;
}

}  // namespace detail

// sum_i sin(eta x_i) / eta
template <typename Derived>
double gyroid1d(const Eigen::MatrixBase<Derived>& p, double eta) {
  detail::require_positive(eta, "gyroid1d needs eta > 0");
  return (p * eta).array().sin().sum() / eta;
}

// g(eta p | k, t) / eta with k = 2 pi / a
template <typename Derived>
double gyroid3d(const Eigen::MatrixBase<Derived>& p, double eta, double a, double t) {
  detail::require_positive(eta, "gyroid3d needs eta > 0");
  const double k = detail::wave_number(a);
  return (detail::gyroid_sum(Vec3(p * eta), Vec3::Constant(k)) + t) / eta;
}

template <typename Derived>
double gyroid5d(const Eigen::MatrixBase<Derived>& p, double eta, const Vec3& a, double t) {
  detail::require_positive(eta, "gyroid5d needs eta > 0");
  const Vec3 k(detail::wave_number(a[0]), detail::wave_number(a[1]), detail::wave_number(a[2]));
  return (detail::gyroid_sum(Vec3(p * eta), k) + t) / eta;
}

inline Mat3 rotation_about_y(double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  Mat3 r;
  r << c, 0, s,
       0, 1, 0,
      -s, 0, c;
  return r;
}

// h(eta p | phi) / eta with
//   h = min(u(x) + u(x1, x1, x1), u(T x) + u(T (x1, x1, x1))), u = gyroid_sum^2
template <typename Derived>
double fibers2d(const Eigen::MatrixBase<Derived>& p, double eta, double phi) {
  detail::require_positive(eta, "fibers2d needs eta > 0");
  const Vec3 x = p * eta;
  const Vec3 splat = Vec3::Constant(x[1]);
  const Mat3 T = rotation_about_y(phi);
  auto u = [](const Vec3& v) {
    const double s = detail::gyroid_sum(v);
    return s * s;
  };
  return std::min(u(x) + u(splat), u(Vec3(T * x)) + u(Vec3(T * splat))) / eta;
}

// Hash coefficients used by the random-sphere microstructure.
HashCoefficients spheres2d_coefficients();

// (min over the eight dual cells l of |c_l - eta p| - r) / eta, where
// c_l = q_l + (xi_1, xi_2, xi_3) and q_l = floor(eta p - 1/2) + U_l.
template <typename Derived>
double spheres2d(const Eigen::MatrixBase<Derived>& p, double eta, double r) {
  detail::require_positive(eta, "spheres2d needs eta > 0");
  detail::require_positive(r, "spheres2d needs r > 0");
  static const HashCoefficients coeffs = spheres2d_coefficients();
  const Vec3 x = p * eta;
  double best = std::numeric_limits<double>::infinity();
  for (const CellIndex& q : dual_neighbors(x)) {
    SplitMix64 gen(seed_for_cell(q, coeffs));
    const Vec3 c = q.cast<double>() + Vec3(gen.uniform(), gen.uniform(), gen.uniform());
    best = std::min(best, (c - x).norm());
  }
  return (best - r) / eta;
}

inline constexpr double kPorousEpsilon = 1e-3;

// min(eps, v(eta T1 p) + w(eta T2 p) v(eta T3 p)) / eta, T stored row-major in
// 27 consecutive entries.
template <typename Derived, typename TDerived>
double porous28d(const Eigen::MatrixBase<Derived>& p, double eta,
                 const Eigen::MatrixBase<TDerived>& T) {
  detail::require_positive(eta, "porous28d needs eta > 0");
  if (T.size() != 27) throw ContractError("porous28d needs 27 transform entries");
  auto mat = [&T](int i) {
    Mat3 m;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) = T[9 * i + 3 * r + c];
    return m;
  };
  auto v = [](const Vec3& x) {
    const double s = detail::gyroid_sum(x);
    return s * s;
  };
  auto w = [](const Vec3& x) {
    const double s = std::sin(x[0]) * std::sin(x[1]) + std::sin(x[1]) * std::sin(x[2]) +
                     std::sin(x[2]) * std::sin(x[0]);
    return s * s;
  };
  const Vec3 x = p * eta;
  const double value = v(Vec3(mat(0) * x)) + w(Vec3(mat(1) * x)) * v(Vec3(mat(2) * x));
  return std::min(kPorousEpsilon, value) / eta;
}

enum class TpmsKind { Gyroid, Diamond, Primitive };

TpmsKind tpms_kind(std::string_view name);

// Level-set formula at frequency 2 pi / cell plus thickness.
template <typename Derived>
double tpms(TpmsKind kind, const Eigen::MatrixBase<Derived>& p, double cell, double thickness) {
  detail::require_positive(cell, "TPMS cell size must be positive");
  const Vec3 x = p * detail::wave_number(cell);
  const double sx = std::sin(x[0]), sy = std::sin(x[1]), sz = std::sin(x[2]);
  const double cx = std::cos(x[0]), cy = std::cos(x[1]), cz = std::cos(x[2]);
  switch (kind) {
    case TpmsKind::Gyroid: return sx * cy + sy * cz + sz * cx + thickness;
    case TpmsKind::Diamond:
      return sx * sy * sz + sx * cy * cz + cx * sy * cz + cx * cy * sz + thickness;
    case TpmsKind::Primitive: return cx + cy + cz + thickness;
  }
  return thickness;
}

// sin^2(omega p_x) + sin^2(omega p_y) + sin^2(omega p_z) + w
template <typename Derived>
double sc_particles(const Eigen::MatrixBase<Derived>& p, double omega, double w) {
  return (p * omega).array().sin().square().sum() + w;
}

}  // namespace msdf
