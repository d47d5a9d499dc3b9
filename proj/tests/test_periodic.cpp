#include "msdf/dataset.hpp"
#include "msdf/periodic.hpp"
#include "msdf/sdf.hpp"

#include <doctest.h>

#include <cmath>

using namespace msdf;

namespace {

Vec3 probe(SplitMix64& g, double half) {
  return Vec3(g.uniform() * 2 - 1, g.uniform() * 2 - 1, g.uniform() * 2 - 1) * half;
}

double g_sum(double x, double y, double z) {
  return std::sin(x) * std::cos(y) + std::sin(y) * std::cos(z) + std::sin(z) * std::cos(x);
}

TrigTerm term(TrigTerm::Func f, int coord, double a, double w, double ph, int k) {
  TrigTerm t;
  t.func = f;
  t.coord = coord;
  t.amplitude = a;
  t.frequency = w;
  t.phase = ph;
  t.power = k;
  return t;
}

}  // namespace

TEST_CASE("sine-cosine formulas") {
  SCFormula single;
  single.terms = {{term(TrigTerm::Func::Sin, 0, 1, 1, 0, 1)}};
  single.width = 0.3;
  CHECK(sc_eval(single, Vec3(kPi / 2, 0, 0)) == doctest::Approx(1.3));

  SCFormula gyroid;
  using F = TrigTerm::Func;
  gyroid.terms = {{term(F::Sin, 0, 1, 1, 0, 1), term(F::Cos, 1, 1, 1, 0, 1)},
                  {term(F::Sin, 1, 1, 1, 0, 1), term(F::Cos, 2, 1, 1, 0, 1)},
                  {term(F::Sin, 2, 1, 1, 0, 1), term(F::Cos, 0, 1, 1, 0, 1)}};
  gyroid.width = -0.2;
  CHECK(sc_eval(gyroid, Vec3::Zero()) == doctest::Approx(-0.2));

  SplitMix64 g(1);
  for (int trial = 0; trial < 50; ++trial) {
    SCFormula f;
    const int u = 1 + static_cast<int>(g.next() % 4);
    for (int i = 0; i < u; ++i) {
      std::vector<TrigTerm> prod;
      const int v = 1 + static_cast<int>(g.next() % 3);
      for (int j = 0; j < v; ++j) {
        prod.push_back(term(g.uniform() < 0.5 ? F::Sin : F::Cos, static_cast<int>(g.next() % 3), 2 * g.uniform() - 1,
                            10 * g.uniform(), 6 * g.uniform(), static_cast<int>(g.next() % 4)));
      }
      f.terms.push_back(prod);
    }
    f.width = g.uniform();
    const ScalarField field = sc_field(f);
    for (int k = 0; k < 20; ++k) {
      const Vec3 p = probe(g, 2.0);
      double expected = f.width;
      for (const auto& prod : f.terms) {
        double m = 1.0;
        for (const TrigTerm& t : prod) {
          const double arg = t.frequency * p[t.coord] + t.phase;
          m *= std::pow(t.amplitude * (t.func == F::Sin ? std::sin(arg) : std::cos(arg)), t.power);
        }
        expected += m;
      }
      REQUIRE(sc_eval(f, p) == doctest::Approx(expected).epsilon(1e-12));
      const std::uint64_t before = instrument::primitive_counter();
      (void)field(p);
      REQUIRE(instrument::primitive_counter() - before == 1);
    }
    const Eigen::AlignedBox3d box(Vec3::Constant(-2), Vec3::Constant(2));
    REQUIRE(max_gradient_estimate(field, box, 2000, trial + 1) <= field.lipschitz() * 1.05 + 1e-9);
  }
}

TEST_CASE("gyroid fields") {
  const double eta = 100.0;
  CHECK(gyroid1d(Vec3::Zero(), eta) == 0.0);
  CHECK(gyroid1d(Vec3(kPi / (2 * eta), 0, 0), eta) == doctest::Approx(1.0 / eta));
  const Vec3 p(0.01, 0.02, 0.03);
  CHECK(gyroid1d(p, eta) == doctest::Approx((std::sin(1.0) + std::sin(2.0) + std::sin(3.0)) / 100.0));
  CHECK_THROWS_AS(gyroid1d(p, 0.0), DomainError);

  CHECK(gyroid3d(Vec3::Zero(), eta, 7.0, 1.2) == doctest::Approx(1.2 / eta));
  CHECK_THROWS_AS(gyroid3d(p, eta, 0.0, 1.2), DomainError);
  SplitMix64 g(2);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 q = probe(g, 1.0);
    const double k = 2 * kPi / 7.0;
    const double direct = (g_sum(k * eta * q.x(), k * eta * q.y(), k * eta * q.z()) + 1.2) / eta;
    REQUIRE(gyroid3d(q, eta, 7.0, 1.2) == doctest::Approx(direct).epsilon(1e-12));
    REQUIRE(gyroid5d(q, eta, Vec3::Constant(7.0), 1.2) == gyroid3d(q, eta, 7.0, 1.2));
    // Period a / eta along every axis.
    for (int axis = 0; axis < 3; ++axis) {
      REQUIRE(std::abs(gyroid3d(Vec3(q + Vec3::Unit(axis) * 7.0 / eta), eta, 7.0, 1.2) - gyroid3d(q, eta, 7.0, 1.2)) <
              1e-9);
    }
    REQUIRE(std::abs(gyroid1d(Vec3(q + Vec3::Unit(i % 3) * 2 * kPi / eta), eta) - gyroid1d(q, eta)) < 1e-9);
  }
}

TEST_CASE("fibres") {
  const double eta = 100.0;
  SplitMix64 g(3);
  auto u = [](const Vec3& v) {
    const double s = g_sum(v.x(), v.y(), v.z());
    return s * s;
  };
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p = probe(g, 1.0);
    const Vec3 x = eta * p;
    const Vec3 splat = Vec3::Constant(x.y());
    REQUIRE(fibers2d(p, eta, 0.0) == doctest::Approx((u(x) + u(splat)) / eta).epsilon(1e-12));
    const double phi = kPi * g.uniform();
    const double c = std::cos(phi), s = std::sin(phi);
    auto rot = [&](const Vec3& v) { return Vec3(c * v.x() + s * v.z(), v.y(), -s * v.x() + c * v.z()); };
    const double direct = std::min(u(x) + u(splat), u(rot(x)) + u(rot(splat))) / eta;
    REQUIRE(fibers2d(p, eta, phi) == doctest::Approx(direct).epsilon(1e-12));
    REQUIRE(std::abs(fibers2d(Vec3(-p), eta, phi) - fibers2d(p, eta, phi)) < 1e-12);
    for (int axis = 0; axis < 3; ++axis) {
      const Vec3 shifted = p + Vec3::Unit(axis) * 2 * kPi / eta;
      REQUIRE(std::abs(fibers2d(shifted, eta, 0.0) - fibers2d(p, eta, 0.0)) < 1e-9);
    }
  }
}

TEST_CASE("random spheres") {
  const double eta = 30.0, r = 0.08;
  const HashCoefficients coeffs = spheres2d_coefficients();
  const CellIndex q(4, -7, 2);
  SplitMix64 gen(seed_for_cell(q, coeffs));
  const Vec3 c = q.cast<double>() + Vec3(gen.uniform(), gen.uniform(), gen.uniform());
  CHECK(spheres2d(Vec3(c / eta), eta, r) == doctest::Approx(-r / eta));

  SplitMix64 g(4);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p = probe(g, 1.0);
    const double v = spheres2d(p, eta, r);
    REQUIRE(v == spheres2d(p, eta, r));
    const Vec3 x = eta * p;
    const CellIndex base = floor_cell(x);
    double best = 1e300;
    for (int dz = -2; dz <= 2; ++dz)
      for (int dy = -2; dy <= 2; ++dy)
        for (int dx = -2; dx <= 2; ++dx) {
          const CellIndex cell = base + CellIndex(dx, dy, dz);
          SplitMix64 s(seed_for_cell(cell, coeffs));
          const Vec3 centre = cell.cast<double>() + Vec3(s.uniform(), s.uniform(), s.uniform());
          best = std::min(best, (centre - x).norm());
        }
    // Spheres of radius <= 1/2 around the brute-force nearest centre are covered.
    if (best <= 0.5) REQUIRE(v == doctest::Approx((best - r) / eta).epsilon(1e-12));
  }
}

TEST_CASE("porous") {
  const VecX zero = VecX::Zero(27);
  SplitMix64 g(5);
  for (int i = 0; i < 100; ++i) CHECK(porous28d(probe(g, 1.0), 30.0, zero) == 0.0);
  const VecX T = porous_reference_transform();
  CHECK(T.minCoeff() >= -4.0);
  CHECK(T.maxCoeff() <= 7.0);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p = probe(g, 1.0);
    const double v = porous28d(p, 30.0, T);
    REQUIRE(v <= kPorousEpsilon / 30.0);
    Mat3 m[3];
    for (int k = 0; k < 3; ++k)
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m[k](r, c) = T[9 * k + 3 * r + c];
    const Vec3 a = m[0] * (30.0 * p), b = m[1] * (30.0 * p), c = m[2] * (30.0 * p);
    const double va = std::pow(g_sum(a.x(), a.y(), a.z()), 2);
    const double vc = std::pow(g_sum(c.x(), c.y(), c.z()), 2);
    const double wb = std::pow(std::sin(b.x()) * std::sin(b.y()) + std::sin(b.y()) * std::sin(b.z()) +
                                   std::sin(b.z()) * std::sin(b.x()),
                               2);
    REQUIRE(v == doctest::Approx(std::min(kPorousEpsilon, va + wb * vc) / 30.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(porous28d(Vec3::Zero(), 30.0, VecX::Zero(5)), ContractError);
}

TEST_CASE("tpms") {
  CHECK(tpms(TpmsKind::Gyroid, Vec3::Zero(), 1.0, 0.4) == 0.4);
  CHECK(tpms(TpmsKind::Primitive, Vec3::Zero(), 1.0, 0.4) == doctest::Approx(3.4));
  CHECK(tpms(TpmsKind::Diamond, Vec3::Zero(), 1.0, 0.4) == doctest::Approx(0.4));
  CHECK(tpms_kind("diamond") == TpmsKind::Diamond);
  CHECK_THROWS_AS(tpms_kind("lidinoid"), ConfigError);
  SplitMix64 g(6);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p = probe(g, 3.0);
    REQUIRE(tpms(TpmsKind::Gyroid, p, 7.0, 1.2) == doctest::Approx(gyroid3d(p, 1.0, 7.0, 1.2)).epsilon(1e-12));
  }
}

TEST_CASE("particle formula and its quadratic model") {
  const double omega = 3.0, w = -0.2;
  CHECK(sc_particles(Vec3::Zero(), omega, w) == w);
  CHECK(sc_particles(Vec3(kPi / (2 * omega), 0, 0), omega, w) == doctest::Approx(1.0 + w));
  SplitMix64 g(7);
  double lo = 1e300, hi = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p = probe(g, 1.0).normalized() * (0.1 / omega) * (0.05 + 0.95 * g.uniform());
    const double r2 = p.squaredNorm();
    const double c = std::abs(sc_particles(p, omega, w) - (w + omega * omega * r2)) / (r2 * r2);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  // sin^2 x = x^2 - x^4 / 3 + ..., so the ratio sits in [omega^4 / 9, omega^4 / 3].
  const double w4 = std::pow(omega, 4);
  CHECK(hi <= w4 / 3.0 * 1.01);
  CHECK(lo >= w4 / 9.0 * 0.99);
}

TEST_CASE("dataset registry") {
  const auto all = microstructures();
  REQUIRE(all.size() == 6);
  const char* names[] = {"gyroid1d", "gyroid3d", "gyroid5d", "fibers2d", "spheres2d", "porous28d"};
  for (int i = 0; i < 6; ++i) CHECK(all[i].name == names[i]);
  CHECK(microstructure("gyroid1d").ground_truth[0] == 100.0);
  CHECK(microstructure("gyroid3d").ground_truth == (VecX(3) << 100, 7, 1.2).finished());
  CHECK(microstructure("gyroid5d").ground_truth == (VecX(5) << 100, 7, 10, 15, 1.2).finished());
  CHECK(microstructure("fibers2d").ground_truth == (VecX(2) << 100, kPi / 4).finished());
  CHECK(microstructure("spheres2d").ground_truth == (VecX(2) << 30, 0.08).finished());
  CHECK(microstructure("porous28d").dims() == 28);
  CHECK(microstructure("porous28d").ground_truth[0] == 30.0);
  CHECK_FALSE(microstructure("spheres2d").smooth);
  CHECK(microstructure("gyroid3d").smooth);
  CHECK(microstructure("fibers2d").smooth);
  CHECK_THROWS_AS(microstructure("foam"), ConfigError);
  CHECK_THROWS_AS(microstructure("gyroid3d").check(VecX::Ones(2)), DomainError);
  for (const Microstructure& ms : all) {
    const ScalarField f = ms.field(ms.ground_truth);
    SplitMix64 g(8);
    for (int i = 0; i < 100; ++i) {
      const Vec3 p = probe(g, 1.0);
      REQUIRE(f(p) == ms.eval(p, ms.ground_truth));
    }
  }
}
