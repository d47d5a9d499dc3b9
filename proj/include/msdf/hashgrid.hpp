#pragma once

// Deterministic space-filling point distribution on a cubic lattice.
//
// A cell index q is hashed with a multilinear polynomial
//
//   t = N * sum_{i,j,k in {0,1}} a_ijk * qx^i * qy^j * qz^k    (mod 2^64)
//
// and t seeds a splitmix64 stream that yields the N uniforms of the cell.
// Everything here is a pure function of its arguments.

#include "msdf/core.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace msdf {

using CellIndex = Eigen::Matrix<std::int64_t, 3, 1>;

inline constexpr std::int64_t kMaxCellIndex = std::int64_t{1} << 20;
inline constexpr int kMaxUniforms = 16;

// Throws DomainError when any component exceeds kMaxCellIndex in magnitude.
void check_cell(const CellIndex& q);

struct HashCoefficients {
  // a[i + 2*j + 4*k] holds a_ijk.
  std::array<std::uint64_t, 8> a{73, 79, 83, 89, 97, 101, 103, 107};
  int n = 4;  // uniforms drawn per cell
  std::uint64_t salt = 0;  // xored into the seed; separates independent clouds

  // Pairwise distinct, all > 1, 1 <= n <= kMaxUniforms.
  void validate() const;
};

// splitmix64 with the published constants:
//   state += 0x9E3779B97F4A7C15
//   z = (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   out = z ^ (z >> 31)
// Uniforms take the top 53 bits: (out >> 11) * 2^-53, so they lie in [0, 1).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller on two uniforms.
  double normal();

 private:
  std::uint64_t state_;
};

std::uint64_t seed_for_cell(const CellIndex& q, const HashCoefficients& coeffs);

// n uniforms in [0, 1) from the stream seeded with `seed`.
std::vector<double> rnd(std::uint64_t seed, int n);

using Uniforms = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxUniforms, 1>;

struct ParticleInstance {
  Vec3 x;          // cell-scaled position, x - q in [0,1)^3
  double s = 0.0;  // scale in [0,1)
  Uniforms extra;  // xi_5 .. xi_N
};

// With coeffs.n == 3 the scale is not drawn and `fixed_scale` is used.
ParticleInstance instantiate(const CellIndex& q, const HashCoefficients& coeffs,
                             double fixed_scale = 0.5);

// The eight cells of the half-offset dual grid around a cell-scaled point:
// floor(p_w - 1/2) + (i & 1, (i >> 1) & 1, (i >> 2) & 1), i = 0..7.
std::array<CellIndex, 8> dual_neighbors(const Vec3& p_w);

// q + {-1,0,1}^3, x fastest, then y, then z. The centre is entry 13.
std::array<CellIndex, 27> moore_neighbors(const CellIndex& q);

// Packs q into 3x21 bits and applies an xorshift-multiply finalizer
// (murmur3 fmix64) after xoring with 0x9E3779B97F4A7C15.
std::uint64_t scramble(const CellIndex& q);

// Uniform in [0,1) from an arbitrary 64-bit key.
inline double unit_from_bits(std::uint64_t v) { return static_cast<double>(v >> 11) * 0x1.0p-53; }

inline CellIndex floor_cell(const Vec3& p) {
  return CellIndex(static_cast<std::int64_t>(std::floor(p.x())),
                   static_cast<std::int64_t>(std::floor(p.y())),
                   static_cast<std::int64_t>(std::floor(p.z())));
}

}  // namespace msdf
