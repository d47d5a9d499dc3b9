#include "msdf/hashgrid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace msdf {

void check_cell(const CellIndex& q) {
  for (int i = 0; i < 3; ++i) {
    if (q[i] > kMaxCellIndex || q[i] < -kMaxCellIndex) {
      throw DomainError("cell index component " + std::to_string(q[i]) +
                        " outside [-2^20, 2^20]");
    }
  }
}

void HashCoefficients::validate() const {
  if (n < 1 || n > kMaxUniforms) {
    throw ConfigError("uniforms per cell must be in [1, " + std::to_string(kMaxUniforms) + "]");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] <= 1) throw ConfigError("hash coefficients must be > 1");
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if (a[i] == a[j]) throw ConfigError("hash coefficients must be pairwise distinct");
    }
  }
}

double SplitMix64::normal() {
  // 1 - u keeps the logarithm argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

std::uint64_t seed_for_cell(const CellIndex& q, const HashCoefficients& coeffs) {
  check_cell(q);
  // Two's complement reinterpretation gives wrapping arithmetic mod 2^64.
  const auto qx = static_cast<std::uint64_t>(q.x());
  const auto qy = static_cast<std::uint64_t>(q.y());
  const auto qz = static_cast<std::uint64_t>(q.z());
  const auto& a = coeffs.a;
  std::uint64_t sum = a[0];
  sum += a[1] * qx;
  sum += a[2] * qy;
  sum += a[3] * qx * qy;
  sum += a[4] * qz;
  sum += a[5] * qx * qz;
  sum += a[6] * qy * qz;
  sum += a[7] * qx * qy * qz;
  return (static_cast<std::uint64_t>(coeffs.n) * sum) ^ coeffs.salt;
}

std::vector<double> rnd(std::uint64_t seed, int n) {
  if (n < 1) throw DomainError("rnd: n must be >= 1");
  SplitMix64 gen(seed);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& v : out) v = gen.uniform();
  return out;
}

ParticleInstance instantiate(const CellIndex& q, const HashCoefficients& coeffs,
                             double fixed_scale) {
  if (coeffs.n < 3) throw ConfigError("instantiate needs at least 3 uniforms per cell");
  SplitMix64 gen(seed_for_cell(q, coeffs));
  ParticleInstance inst;
  const double xi1 = gen.uniform();
  const double xi2 = gen.uniform();
  const double xi3 = gen.uniform();
  inst.x = q.cast<double>() + Vec3(xi1, xi2, xi3);
  if (coeffs.n == 3) {
    inst.s = fixed_scale;
    inst.extra.resize(0);
    return inst;
  }
  inst.s = gen.uniform();
  inst.extra.resize(coeffs.n - 4);
  for (int i = 0; i < coeffs.n - 4; ++i) inst.extra[i] = gen.uniform();
  return inst;
}

std::array<CellIndex, 8> dual_neighbors(const Vec3& p_w) {
  const CellIndex base = floor_cell(p_w - Vec3::Constant(0.5));
  std::array<CellIndex, 8> out;
  for (int i = 0; i < 8; ++i) {
    out[i] = base + CellIndex(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  }
  return out;
}

std::array<CellIndex, 27> moore_neighbors(const CellIndex& q) {
  std::array<CellIndex, 27> out;
  int i = 0;
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) out[i++] = q + CellIndex(dx, dy, dz);
  return out;
}

std::uint64_t scramble(const CellIndex& q) {
  check_cell(q);
  constexpr std::uint64_t mask = (std::uint64_t{1} << 21) - 1;
  std::uint64_t v = (static_cast<std::uint64_t>(q.x()) & mask) |
                    ((static_cast<std::uint64_t>(q.y()) & mask) << 21) |
                    ((static_cast<std::uint64_t>(q.z()) & mask) << 42);
  v ^= 0x9E3779B97F4A7C15ull;
  v ^= v >> 33;
  v *= 0xFF51AFD7ED558CCDull;
  v ^= v >> 33;
  v *= 0xC4CEB9FE1A85EC53ull;
  v ^= v >> 33;
  return v;
}

}  // namespace msdf
