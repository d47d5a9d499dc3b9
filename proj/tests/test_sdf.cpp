#include "msdf/periodic.hpp"
#include "msdf/sdf.hpp"

#include <doctest.h>

#include <cmath>

using namespace msdf;

namespace {

Vec3 random_point(SplitMix64& g, double half) {
  return Vec3(g.uniform() * 2 - 1, g.uniform() * 2 - 1, g.uniform() * 2 - 1) * half;
}

double gyroid(const Vec3& p, double eta) {
  return std::sin(eta * p.x()) * std::cos(eta * p.y()) + std::sin(eta * p.y()) * std::cos(eta * p.z()) +
         std::sin(eta * p.z()) * std::cos(eta * p.x());
}

Vec3 gyroid_gradient(const Vec3& p, double eta) {
  const double sx = std::sin(eta * p.x()), sy = std::sin(eta * p.y()), sz = std::sin(eta * p.z());
  const double cx = std::cos(eta * p.x()), cy = std::cos(eta * p.y()), cz = std::cos(eta * p.z());
  return eta * Vec3(cx * cy - sz * sx, cy * cz - sx * sy, cz * cx - sy * sz);
}

}  // namespace

TEST_CASE("sphere") {
  const Vec3 c(0.3, -0.2, 0.5);
  const ScalarField s = sphere(c, 0.4);
  CHECK(s(c) == doctest::Approx(-0.4));
  CHECK(s(c + Vec3(0.4, 0, 0)) == doctest::Approx(0.0));
  CHECK(s(c + Vec3(0.8, 0, 0)) == doctest::Approx(0.4));
  CHECK(s.lipschitz() == 1.0);
  CHECK_THROWS_AS(sphere(c, 0.0), DomainError);
  CHECK_THROWS_AS(sphere(c, -1.0), DomainError);
}

TEST_CASE("ellipsoid") {
  const Vec3 c(0.1, 0.2, 0.3);
  const ScalarField e = ellipsoid(c, Vec3(0.5, 0.5, 0.5));
  const ScalarField s = sphere(c, 0.5);
  SplitMix64 g(1);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p = random_point(g, 2.0);
    REQUIRE(std::abs(e(p) - s(p)) < 1e-12);
  }
  const Vec3 axes(0.6, 0.3, 0.2);
  const ScalarField f = ellipsoid(c, axes);
  CHECK(std::abs(f(c + Vec3(0.6, 0, 0))) < 1e-12);
  CHECK(std::abs(f(c - Vec3(0.6, 0, 0))) < 1e-12);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p = random_point(g, 1.0);
    const Vec3 d = (p - c).cwiseQuotient(axes);
    const double implicit = d.squaredNorm() - 1.0;
    if (std::abs(implicit) < 1e-9) continue;
    REQUIRE((f(p) < 0) == (implicit < 0));
  }
  CHECK_THROWS_AS(ellipsoid(c, Vec3(1, 0, 1)), DomainError);
}

TEST_CASE("cylinder") {
  const Vec3 axis = Vec3(1, 2, 2).normalized();
  const Vec3 point(0.1, 0.0, -0.2);
  const ScalarField cyl = cylinder(axis, 0.25, point);
  CHECK(cyl(point + 3.0 * axis) == doctest::Approx(-0.25));
  const Vec3 perp = axis.cross(Vec3::UnitX()).normalized();
  CHECK(std::abs(cyl(point + 0.25 * perp + axis)) < 1e-12);
  SplitMix64 g(2);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p = random_point(g, 3.0);
    // Distance to the line via the cross product.
    const double line = (p - point).cross(axis).norm();
    REQUIRE(std::abs(cyl(p) - (line - 0.25)) < 1e-12);
  }
  CHECK_THROWS_AS(cylinder(Vec3::Zero(), 0.2), DomainError);
}

TEST_CASE("box and plane") {
  const ScalarField b = box(Vec3::Zero(), Vec3(1, 2, 3));
  CHECK(b(Vec3::Zero()) == doctest::Approx(-1.0));
  CHECK(b(Vec3(2, 0, 0)) == doctest::Approx(1.0));
  CHECK(b(Vec3(2, 3, 0)) == doctest::Approx(std::sqrt(2.0)));
  const ScalarField h = plane(Vec3(0, 0, 2), 0.5);
  CHECK(h(Vec3(0, 0, 1.5)) == doctest::Approx(1.0));
}

TEST_CASE("booleans") {
  const ScalarField a = sphere(Vec3(0.2, 0, 0), 0.5);
  const ScalarField b = sphere(Vec3(-0.3, 0.1, 0), 0.4);
  const ScalarField c = box(Vec3(0, 0.2, 0.1), Vec3(0.3, 0.3, 0.3));
  const ScalarField ab = union_of(a, b);
  const ScalarField ba = union_of(b, a);
  const ScalarField aa = union_of(a, a);
  const ScalarField ia = intersection(intersection(a, b), c);
  const ScalarField ib = intersection(a, intersection(b, c));
  const ScalarField sm = smooth_min(a, b, 0.2);
  const ScalarField tiny = smooth_min(a, b, 1e-6);
  SplitMix64 g(3);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p = random_point(g, 1.5);
    REQUIRE(aa(p) == a(p));
    REQUIRE(ab(p) == std::min(a(p), b(p)));
    REQUIRE(ab(p) == ba(p));
    REQUIRE(ia(p) == ib(p));
    REQUIRE(sm(p) <= std::min(a(p), b(p)));
    REQUIRE(std::abs(tiny(p) - std::min(a(p), b(p))) < 1e-5);
  }
  CHECK(subtraction(a, b)(Vec3(0.6, 0, 0)) == doctest::Approx(std::max(a(Vec3(0.6, 0, 0)), -b(Vec3(0.6, 0, 0)))));
  CHECK(negate(a)(Vec3::Zero()) == doctest::Approx(-a(Vec3::Zero())));
  CHECK(union_of(a, scaled(b, 3.0)).lipschitz() == 3.0);
}

TEST_CASE("offset") {
  const ScalarField s = sphere(Vec3::Zero(), 0.5);
  SplitMix64 g(4);
  const ScalarField same = offset(s, OffsetFunction::none());
  const ScalarField grown = offset(s, OffsetFunction::constant(-0.1));
  const OffsetFunction wave = OffsetFunction::sinusoid(0.05, Vec3(7, 3, 5));
  const ScalarField bumpy = offset(s, wave);
  CHECK(bumpy.lipschitz() == doctest::Approx(1.0 + wave.lipschitz));
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p = random_point(g, 1.0);
    REQUIRE(same(p) == s(p));
    REQUIRE(std::abs(bumpy(p) - s(p)) <= 0.05 + 1e-15);
  }
  // Radius grows by c when the offset is -c.
  CHECK(std::abs(grown(Vec3(0.6, 0, 0))) < 1e-12);
  // Surface points of the perturbed sphere stay within the offset amplitude.
  for (int i = 0; i < 200; ++i) {
    const Vec3 dir = random_point(g, 1.0).normalized();
    double lo = 0.0, hi = 1.0;
    for (int k = 0; k < 60; ++k) {
      const double mid = 0.5 * (lo + hi);
      (bumpy(mid * dir) < 0 ? lo : hi) = mid;
    }
    REQUIRE(std::abs(lo - 0.5) <= 0.05 + 1e-9);
  }
}

TEST_CASE("warp") {
  const ScalarField s = sphere(Vec3::Zero(), 0.5);
  const Vec3 t(0.1, -0.2, 0.05);
  const ScalarField id = warp(s, WarpFunction::none());
  const ScalarField moved = warp(s, WarpFunction::translation(t));
  const ScalarField target = sphere(-t, 0.5);
  SplitMix64 g(5);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p = random_point(g, 1.0);
    REQUIRE(id(p) == s(p));
    REQUIRE(std::abs(moved(p) - target(p)) < 1e-12);
  }
  const ScalarField wobbly = warp(s, WarpFunction::sinusoid(0.1, 4.0));
  CHECK(max_gradient_estimate(wobbly, Eigen::AlignedBox3d(Vec3::Constant(-1), Vec3::Constant(1)), 10000) <=
        wobbly.lipschitz() * 1.05);
}

TEST_CASE("normals") {
  const ScalarField s = sphere(Vec3::Zero(), 0.7);
  CHECK((normal(s, Vec3(0.7, 0, 0)) - Vec3::UnitX()).norm() < 1e-6);
  const double eta = 10.0;
  const ScalarField g([eta](const Vec3& p) { return gyroid(p, eta) / eta; }, 3.0);
  SplitMix64 rng(6);
  for (int i = 0; i < 200; ++i) {
    // Root-find a surface point along a random segment.
    Vec3 a = random_point(rng, 1.0);
    Vec3 b = a + random_point(rng, 0.3);
    if ((g(a) < 0) == (g(b) < 0)) continue;
    for (int k = 0; k < 80; ++k) {
      const Vec3 m = 0.5 * (a + b);
      ((g(m) < 0) == (g(a) < 0) ? a : b) = m;
    }
    const Vec3 analytic = gyroid_gradient(a, eta).normalized();
    const Vec3 n = normal(g, a);
    REQUIRE(std::abs(n.norm() - 1.0) < 1e-9);
    REQUIRE((n - analytic).norm() < 1e-3);
  }
  const ScalarField flat([](const Vec3&) { return 1.0; }, 1.0);
  CHECK_THROWS_AS(normal(flat, Vec3::Zero()), DegenerateNormalError);
}

TEST_CASE("lipschitz estimates") {
  const Eigen::AlignedBox3d dom(Vec3::Constant(-1), Vec3::Constant(1));
  const ScalarField s = sphere(Vec3(0.1, 0, 0), 0.3);
  const double e = max_gradient_estimate(s, dom, 10000);
  CHECK(e == doctest::Approx(1.0).epsilon(0.02));
  CHECK(max_gradient_estimate(scaled(s, 2.5), dom, 10000) == doctest::Approx(2.5 * e).epsilon(1e-6));
  const double eta = 100.0;
  const ScalarField g([eta](const Vec3& p) { return gyroid(p, eta); }, 3.0 * std::sqrt(2.0) * eta);
  const double est = max_gradient_estimate(g, dom, 10000);
  // Sum of amplitude times frequency over the six factors.
  CHECK(est <= 6.0 * eta);
  CHECK(est <= g.lipschitz() * 1.05);
  CHECK(est > eta);

  for (const ScalarField& f : {s, ellipsoid(Vec3::Zero(), Vec3(0.5, 0.2, 0.3)), box(Vec3::Zero(), Vec3(0.2, 0.3, 0.4)),
                               cylinder(Vec3::UnitY(), 0.2), smooth_min(s, box(Vec3::Zero(), Vec3(0.2, 0.3, 0.4)), 0.3)}) {
    CHECK(max_gradient_estimate(f, dom, 10000) <= f.lipschitz() * 1.05);
  }
}

TEST_CASE("distance bound: marching never overshoots") {
  const ScalarField f = union_of(ellipsoid(Vec3(0.2, 0, 0), Vec3(0.5, 0.2, 0.3)),
                                 offset(sphere(Vec3(-0.4, 0.1, 0), 0.3), OffsetFunction::sinusoid(0.03, Vec3(9, 0, 4))));
  const ScalarField n = normalized(f);
  SplitMix64 g(8);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p = random_point(g, 1.5);
    const Vec3 dir = random_point(g, 1.0).normalized();
    double t = 0.0;
    const bool outside = n(p) > 0;
    if (!outside) continue;
    for (int k = 0; k < 200; ++k) {
      const double d = n(p + t * dir);
      REQUIRE(d > -1e-12);
      if (d < 1e-9 || t > 5) break;
      t += d;
    }
  }
}
