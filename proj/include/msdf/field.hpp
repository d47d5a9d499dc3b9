#pragma once

#include "msdf/core.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <utility>

namespace msdf {

namespace instrument {

// Per-thread count of primitive distance-formula evaluations. Every leaf
// formula (one sphere in one cell, one cylinder, one periodic expression)
// adds one. The tracer reports deltas of this counter as sdf_evals.
std::uint64_t& primitive_counter();

inline void count_primitive(std::uint64_t n = 1) { primitive_counter() += n; }

}  // namespace instrument

enum class Smoothness { Smooth, NonSmooth };

// Immutable procedural signed distance function with a declared upper bound
// on its gradient magnitude. Copies share the underlying closure.
class ScalarField {
 public:
  using Fn = std::function<double(const Vec3&)>;

  ScalarField(Fn fn, double lipschitz, Smoothness smooth = Smoothness::Smooth, VecX params = {});

  double operator()(const Vec3& p) const { return (*fn_)(p); }
  double eval(const Vec3& p) const { return (*fn_)(p); }

  double lipschitz() const { return lipschitz_; }
  bool smooth() const { return smooth_ == Smoothness::Smooth; }
  Smoothness smoothness() const { return smooth_; }
  const VecX& params() const { return params_; }

  ScalarField with_lipschitz(double lipschitz) const;

 private:
  std::shared_ptr<const Fn> fn_;
  double lipschitz_;
  Smoothness smooth_;
  VecX params_;
};

// Spatially varying surface offset f(p), in scene units.
struct OffsetFunction {
  std::function<double(const Vec3&)> f;
  double lipschitz = 0.0;

  static OffsetFunction none() { return {}; }
  static OffsetFunction constant(double c);
  // amplitude * sin(frequency . p)
  static OffsetFunction sinusoid(double amplitude, const Vec3& frequency);

  bool active() const { return static_cast<bool>(f); }
  double operator()(const Vec3& p) const { return f ? f(p) : 0.0; }
};

// Domain warp displacement h(p); the warped point is p + h(p).
struct WarpFunction {
  std::function<Vec3(const Vec3&)> h;
  double lipschitz = 0.0;  // bound on the operator norm of dh/dp
  double bound = 0.0;      // bound on |h| over the domain of interest

  static WarpFunction none() { return {}; }
  static WarpFunction translation(const Vec3& t);
  // amplitude * sin(frequency * p_{i+1}) on axis i (a smooth shear-like warp).
  static WarpFunction sinusoid(double amplitude, double frequency);

  bool active() const { return static_cast<bool>(h); }
  Vec3 apply(const Vec3& p) const { return h ? Vec3(p + h(p)) : p; }
};

}  // namespace msdf
