#pragma once

// Parameter fitting against SDF samples and analysis by synthesis against
// rendered images.

#include "msdf/dataset.hpp"
#include "msdf/optim.hpp"
#include "msdf/render.hpp"

#include <array>
#include <optional>
#include <string>

namespace msdf {

struct SamplingSpec {
  std::array<int, 3> dims{8, 32, 32};  // D, W, H
  // A generic tilt keeps lattice rows from aliasing axis-aligned periodic fields.
  Mat3 rotation = Eigen::AngleAxisd(0.7, Vec3(1.0, 2.0, 3.0).normalized()).toRotationMatrix();
  double spacing = 2.0 / 32.0;
  double sigma = 1e-3;
  std::uint64_t seed = 1;
};

struct SampleSet {
  Eigen::Matrix3Xd points;
  VecX values;
  std::array<int, 3> dims{0, 0, 0};
  double sigma = 0.0;

  Eigen::Index size() const { return points.cols(); }
};

// Lattice centred at the origin (D along z, W along y, H along x), rotated,
// restricted to the closed unit ball, then jittered by N(0, sigma^2 I).
SampleSet sample_points(const SamplingSpec& spec);

// Sample set with values of a microstructure at phi.
SampleSet synthesize_target(const Microstructure& ms, const VecX& phi, const SamplingSpec& spec);

struct OptimizerConfig {
  enum class Method { CmaEs, Powell, BasinHopping, NelderMead };
  Method method = Method::CmaEs;
  // Marks configurations that need loss gradients; refused on non-smooth fields.
  bool requires_gradient = false;
  std::optional<VecX> initial;  // defaults to the microstructure's start point
  CmaOptions cma;
  PowellOptions powell;
  BasinHoppingOptions basin;
  NelderMeadOptions nelder_mead;

  // cma-es, powell, basin-hopping, nelder-mead; a "-gradient" suffix sets requires_gradient.
  static OptimizerConfig parse(const std::string& name);
  std::string name() const;
  void set_budget(std::int64_t budget);
  void set_seed(std::uint64_t seed);
};

ParamSpace param_space(const Microstructure& ms);

FitReport run_optimizer(const LossFn& loss, const ParamSpace& space, const VecX& phi0,
                        const OptimizerConfig& config);

// Fits ms to the target values with the 3D Fourier loss. When `reference` is
// given the report carries its validation error.
FitReport fit_parameters(const Microstructure& ms, const SampleSet& target,
                         OptimizerConfig config,
                         const std::optional<VecX>& reference = std::nullopt);

// Renders ms at phi clipped to the unit ball.
Image render_microstructure(const Microstructure& ms, const VecX& phi, const Camera& camera,
                            const RenderSettings& settings);

FitReport analysis_by_synthesis(const Microstructure& ms, const Image& target, const Camera& camera,
                                const OptimizerConfig& config, const RenderSettings& settings = {},
                                const std::optional<VecX>& reference = std::nullopt);

}  // namespace msdf
