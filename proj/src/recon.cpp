#include "msdf/recon.hpp"

#include "msdf/hashgrid.hpp"
#include "msdf/sdf.hpp"
#include "msdf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace msdf {

SampleSet sample_points(const SamplingSpec& spec) {
  if (!(spec.spacing > 0.0)) throw DomainError("sample spacing must be positive");
  if (!(spec.sigma >= 0.0)) throw DomainError("sample jitter must be non-negative");
  for (int d : spec.dims) {
    if (d < 1) throw DomainError("sample dims must be positive");
  }
  const auto [nd, nw, nh] = spec.dims;
  std::vector<Vec3> kept;
  kept.reserve(static_cast<std::size_t>(nd) * nw * nh);
  for (int k = 0; k < nd; ++k) {
    for (int j = 0; j < nw; ++j) {
      for (int i = 0; i < nh; ++i) {
        const Vec3 base((i - 0.5 * (nh - 1)) * spec.spacing, (j - 0.5 * (nw - 1)) * spec.spacing,
                        (k - 0.5 * (nd - 1)) * spec.spacing);
        const Vec3 p = spec.rotation * base;
        if (p.squaredNorm() <= 1.0) kept.push_back(p);
      }
    }
  }
  SplitMix64 rng(scramble(CellIndex(17, 3, 5)) ^ spec.seed);
  SampleSet out;
  out.dims = spec.dims;
  out.sigma = spec.sigma;
  out.points.resize(3, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    Vec3 p = kept[c];
    if (spec.sigma > 0.0) {
      for (int a = 0; a < 3; ++a) p[a] += spec.sigma * rng.normal();
    }
    out.points.col(static_cast<Eigen::Index>(c)) = p;
  }
  return out;
}

SampleSet synthesize_target(const Microstructure& ms, const VecX& phi, const SamplingSpec& spec) {
  SampleSet s = sample_points(spec);
  s.values = ms.sample(phi, s.points);
  return s;
}

OptimizerConfig OptimizerConfig::parse(const std::string& name) {
  OptimizerConfig c;
  std::string base = name;
  const std::string suffix = "-gradient";
  if (base.size() > suffix.size() && base.compare(base.size() - suffix.size(), suffix.size(), suffix) == 0) {
    c.requires_gradient = true;
    base.resize(base.size() - suffix.size());
  }
  if (base == "cma-es" || base == "cmaes") {
    c.method = Method::CmaEs;
  } else if (base == "powell") {
    c.method = Method::Powell;
  } else if (base == "basin-hopping" || base == "bh") {
    c.method = Method::BasinHopping;
  } else if (base == "nelder-mead") {
    c.method = Method::NelderMead;
  } else {
    throw ConfigError("unknown optimizer '" + name + "'");
  }
  return c;
}

std::string OptimizerConfig::name() const {
  std::string n;
  switch (method) {
    case Method::CmaEs: n = "cma-es"; break;
    case Method::Powell: n = "powell"; break;
    case Method::BasinHopping: n = "basin-hopping"; break;
    case Method::NelderMead: n = "nelder-mead"; break;
  }
  return requires_gradient ? n + "-gradient" : n;
}

void OptimizerConfig::set_budget(std::int64_t budget) {
  cma.budget = budget;
  powell.budget = budget;
  basin.budget = budget;
  nelder_mead.budget = budget;
}

void OptimizerConfig::set_seed(std::uint64_t seed) {
  cma.seed = seed;
  basin.seed = seed;
}

ParamSpace param_space(const Microstructure& ms) {
  ParamSpace s;
  s.bounds = ms.bounds;
  s.names = ms.param_names;
  s.smooth = ms.smooth;
  return s;
}

FitReport run_optimizer(const LossFn& loss, const ParamSpace& space, const VecX& phi0,
                        const OptimizerConfig& config) {
  FitReport r;
  switch (config.method) {
    case OptimizerConfig::Method::CmaEs: r = cma_es(loss, space, phi0, config.cma); break;
    case OptimizerConfig::Method::Powell: r = powell(loss, space, phi0, config.powell); break;
    case OptimizerConfig::Method::BasinHopping: r = basin_hopping(loss, space, phi0, config.basin); break;
    case OptimizerConfig::Method::NelderMead: r = nelder_mead(loss, space, phi0, config.nelder_mead); break;
  }
  r.method = config.name();
  return r;
}

namespace {

FitReport unsupported_report(const Microstructure& ms, const OptimizerConfig& config,
                             const VecX& phi0, const LossFn& loss) {
  FitReport r;
  r.method = config.name();
  r.unsupported = true;
  r.phi_hat = phi0;
  r.loss = loss(phi0);
  r.loss_trace.push_back({1, r.loss});
  r.evals = 1;
  r.message = "unsupported combination: " + config.name() + " needs gradients but " + ms.name +
              " is not differentiable";
  return r;
}

FitReport finish(const Microstructure& ms, const OptimizerConfig& config, const VecX& phi0,
                 const LossFn& loss, const std::optional<VecX>& reference) {
  const ParamSpace space = param_space(ms);
  FitReport r = config.requires_gradient && !ms.smooth
                    ? unsupported_report(ms, config, phi0, loss)
                    : run_optimizer(loss, space, phi0, config);
  if (reference) r.val_error = validation_error(r.phi_hat, *reference, space);
  return r;
}

}  // namespace

FitReport fit_parameters(const Microstructure& ms, const SampleSet& target,
                         OptimizerConfig config, const std::optional<VecX>& reference) {
  if (target.values.size() != target.points.cols()) {
    throw ContractError("target values and points differ in count");
  }
  if (!target.values.allFinite()) throw DomainError("target values must be finite");
  const VecX phi0 = config.initial.value_or(ms.initial);
  ms.check(phi0);
  const Eigen::Matrix3Xd points = target.points;
  // A loss this close to the floor means the target was reproduced.
  const double floor_hit = std::log(kLossEpsilon) + 0.01;
  config.cma.target_loss = std::max(config.cma.target_loss, floor_hit);
  config.powell.target_loss = std::max(config.powell.target_loss, floor_hit);
  config.basin.target_loss = std::max(config.basin.target_loss, floor_hit);
  config.nelder_mead.target_loss = std::max(config.nelder_mead.target_loss, floor_hit);
  auto spectrum = std::make_shared<const SpectralTarget>(target.values);
  LossFn loss = [&ms, points, spectrum](const VecX& phi) {
    return spectrum->loss(ms.sample(phi, points));
  };
  return finish(ms, config, phi0, loss, reference);
}

Image render_microstructure(const Microstructure& ms, const VecX& phi, const Camera& camera,
                            const RenderSettings& settings) {
  return render(ms.field(phi), camera, settings).image;
}

FitReport analysis_by_synthesis(const Microstructure& ms, const Image& target, const Camera& camera,
                                const OptimizerConfig& config, const RenderSettings& settings,
                                const std::optional<VecX>& reference) {
  camera.validate();
  if (target.width != camera.width || target.height != camera.height) {
    throw ContractError("target image and camera resolution differ");
  }
  const VecX phi0 = config.initial.value_or(ms.initial);
  ms.check(phi0);
  const Eigen::MatrixXd target_lum = target.luminance();
  LossFn loss = [&ms, &camera, settings, target_lum](const VecX& phi) {
    return loss_ft_2d(render_microstructure(ms, phi, camera, settings).luminance(), target_lum);
  };
  return finish(ms, config, phi0, loss, reference);
}

}  // namespace msdf
