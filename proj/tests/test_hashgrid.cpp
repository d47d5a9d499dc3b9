#include "msdf/hashgrid.hpp"

#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

using namespace msdf;

namespace {

// Naive multilinear polynomial in wrapping 64-bit arithmetic.
std::uint64_t naive_seed(const CellIndex& q, const HashCoefficients& c) {
  std::uint64_t sum = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        std::uint64_t term = c.a[i + 2 * j + 4 * k];
        if (i) term *= static_cast<std::uint64_t>(q.x());
        if (j) term *= static_cast<std::uint64_t>(q.y());
        if (k) term *= static_cast<std::uint64_t>(q.z());
        sum += term;
      }
  return sum * static_cast<std::uint64_t>(c.n);
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("seed polynomial") {
  HashCoefficients c;
  c.n = 4;
  CHECK(seed_for_cell(CellIndex(0, 0, 0), c) == 4 * c.a[0]);
  CHECK(seed_for_cell(CellIndex(1, 0, 0), c) == 4 * (c.a[0] + c.a[1]));
  CHECK(seed_for_cell(CellIndex(3, 5, 7), c) == naive_seed(CellIndex(3, 5, 7), c));
  SplitMix64 gen(5);
  for (int i = 0; i < 1000; ++i) {
    const CellIndex q(static_cast<std::int64_t>(gen.next() % 2000001) - 1000000,
                      static_cast<std::int64_t>(gen.next() % 2000001) - 1000000,
                      static_cast<std::int64_t>(gen.next() % 2000001) - 1000000);
    REQUIRE(seed_for_cell(q, c) == naive_seed(q, c));
  }
}

TEST_CASE("cell range and coefficient validation") {
  CHECK_THROWS_AS(check_cell(CellIndex(kMaxCellIndex + 1, 0, 0)), DomainError);
  CHECK_NOTHROW(check_cell(CellIndex(-kMaxCellIndex, kMaxCellIndex, 0)));
  HashCoefficients dup;
  dup.a[3] = dup.a[4];
  CHECK_THROWS(dup.validate());
  HashCoefficients one;
  one.a[0] = 1;
  CHECK_THROWS(one.validate());
  HashCoefficients many;
  many.n = kMaxUniforms + 1;
  CHECK_THROWS(many.validate());
}

TEST_CASE("splitmix reference values") {
  // First outputs for seed 0 of the reference splitmix64.
  SplitMix64 g(0);
  CHECK(g.next() == 0xE220A8397B1DCDAFull);
  CHECK(g.next() == 0x6E789E6AA1B965F4ull);
  CHECK(g.next() == 0x06C45D188009454Full);
}

TEST_CASE("rnd determinism, range and uniformity") {
  CHECK(rnd(42, 4) == rnd(42, 4));
  for (double v : rnd(42, 4)) CHECK((v >= 0.0 && v < 1.0));

  const std::vector<double> draws = rnd(7, 100000);
  std::array<int, 20> bins{};
  for (double v : draws) ++bins[static_cast<std::size_t>(v * 20)];
  double chi2 = 0.0;
  for (int b : bins) chi2 += (b - 5000.0) * (b - 5000.0) / 5000.0;
  // 19 dof, p = 0.01 critical value.
  CHECK(chi2 < 36.19);

  const std::uint64_t t = 1234567;
  CHECK(std::abs(pearson(rnd(t, 10000), rnd(t + 4, 10000))) < 0.05);
}

TEST_CASE("instantiate") {
  HashCoefficients c;
  c.n = 5;
  for (int i = -3; i <= 3; ++i) {
    const CellIndex q(i, 2 * i, -i);
    const ParticleInstance p = instantiate(q, c);
    const Vec3 off = p.x - q.cast<double>();
    CHECK((off.minCoeff() >= 0.0 && off.maxCoeff() < 1.0));
    CHECK((p.s >= 0.0 && p.s < 1.0));
    CHECK(p.extra.size() == 1);
    const std::vector<double> xi = rnd(seed_for_cell(q, c), 5);
    CHECK(p.x.x() == q.x() + xi[0]);
    CHECK(p.s == xi[3]);
    CHECK(p.extra[0] == xi[4]);
  }
  HashCoefficients three;
  three.n = 3;
  CHECK(instantiate(CellIndex(1, 2, 3), three, 0.3).s == 0.3);
  HashCoefficients six;
  six.n = 6;
  CHECK(instantiate(CellIndex(0, 0, 0), six).extra.size() == 2);
}

TEST_CASE("dual neighbours") {
  auto as_set = [](const std::array<CellIndex, 8>& cells) {
    std::set<std::array<std::int64_t, 3>> s;
    for (const CellIndex& q : cells) s.insert({q.x(), q.y(), q.z()});
    return s;
  };
  std::set<std::array<std::int64_t, 3>> upper, lower;
  for (int i = 0; i < 8; ++i) {
    upper.insert({i & 1, (i >> 1) & 1, (i >> 2) & 1});
    lower.insert({(i & 1) - 1, ((i >> 1) & 1) - 1, ((i >> 2) & 1) - 1});
  }
  CHECK(as_set(dual_neighbors(Vec3(0.5, 0.5, 0.5))) == upper);
  CHECK(as_set(dual_neighbors(Vec3(0.2, 0.2, 0.2))) == lower);
}

TEST_CASE("nearest particle lies in the dual neighbourhood") {
  HashCoefficients c;
  c.n = 3;
  SplitMix64 gen(99);
  for (int trial = 0; trial < 2000; ++trial) {
    const Vec3 p(20 * gen.uniform() - 10, 20 * gen.uniform() - 10, 20 * gen.uniform() - 10);
    const CellIndex base = floor_cell(p);
    double best = 1e300;
    CellIndex arg = base;
    for (int dz = -2; dz <= 2; ++dz)
      for (int dy = -2; dy <= 2; ++dy)
        for (int dx = -2; dx <= 2; ++dx) {
          const CellIndex q = base + CellIndex(dx, dy, dz);
          const double d = (instantiate(q, c).x - p).norm();
          if (d < best) {
            best = d;
            arg = q;
          }
        }
    // Particles of radius <= 1/2 only matter while the point is within reach.
    if (best > 0.5) continue;
    const auto cells = dual_neighbors(p);
    CHECK(std::find(cells.begin(), cells.end(), arg) != cells.end());
  }
}

TEST_CASE("moore neighbours") {
  const auto cells = moore_neighbors(CellIndex(0, 0, 0));
  CHECK(cells.size() == 27);
  CHECK(cells[13] == CellIndex(0, 0, 0));
  int centre = 0;
  std::set<std::array<std::int64_t, 3>> unique;
  for (const CellIndex& q : cells) {
    CHECK(q.cwiseAbs().maxCoeff() <= 1);
    centre += q == CellIndex(0, 0, 0);
    unique.insert({q.x(), q.y(), q.z()});
  }
  CHECK(centre == 1);
  CHECK(unique.size() == 27);
  CHECK(cells[0] == CellIndex(-1, -1, -1));
  CHECK(cells[1] == CellIndex(0, -1, -1));
}

TEST_CASE("scramble") {
  // fmix64 of the packed zero index xored with the golden-ratio constant.
  std::uint64_t k = 0x9E3779B97F4A7C15ull;
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdull;
  k ^= k >> 33;
  k *= 0xc4ceb9fe1a85ec53ull;
  k ^= k >> 33;
  CHECK(scramble(CellIndex(0, 0, 0)) == k);
  CHECK(scramble(CellIndex(4, -2, 9)) == scramble(CellIndex(4, -2, 9)));

  SplitMix64 gen(3);
  double flips = 0.0;
  double neighbour = 0.0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    const CellIndex q(static_cast<std::int64_t>(gen.next() % 1000000) - 500000,
                      static_cast<std::int64_t>(gen.next() % 1000000) - 500000,
                      static_cast<std::int64_t>(gen.next() % 1000000) - 500000);
    CellIndex r = q;
    const int axis = static_cast<int>(gen.next() % 3);
    r[axis] ^= std::int64_t{1} << (gen.next() % 19);
    flips += std::popcount(scramble(q) ^ scramble(r));
    neighbour += std::popcount(scramble(q) ^ scramble(CellIndex(q + CellIndex(1, 0, 0))));
  }
  CHECK(flips / trials >= 20.0);
  CHECK(neighbour / trials >= 10.0);
}

TEST_CASE("instantiated centres have uniform marginals") {
  HashCoefficients c;
  c.n = 4;
  std::array<std::array<int, 16>, 3> bins{};
  int count = 0;
  for (int z = 0; z < 22; ++z)
    for (int y = 0; y < 22; ++y)
      for (int x = 0; x < 22; ++x) {
        const CellIndex q(x, y, z);
        const Vec3 off = instantiate(q, c).x - q.cast<double>();
        for (int a = 0; a < 3; ++a) ++bins[a][static_cast<std::size_t>(off[a] * 16)];
        ++count;
      }
  const double expected = count / 16.0;
  for (const auto& axis : bins) {
    double chi2 = 0.0;
    for (int b : axis) chi2 += (b - expected) * (b - expected) / expected;
    // 15 dof, p = 0.01 critical value.
    CHECK(chi2 < 30.58);
  }
}
