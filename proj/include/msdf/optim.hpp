#pragma once

// Derivative-free box-constrained optimizers. All searches run in the unit
// cube [0, 1]^n and map back to the parameter box for every loss call.

#include "msdf/core.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace msdf {

struct ParamSpace {
  std::vector<std::pair<double, double>> bounds;
  std::vector<std::string> names;
  bool smooth = true;

  int dims() const { return static_cast<int>(bounds.size()); }
  void validate() const;
  bool contains(const VecX& phi) const;
  VecX lower() const;
  VecX upper() const;
  VecX range() const;
  VecX to_unit(const VecX& phi) const;
  VecX from_unit(const VecX& u) const;
};

using LossFn = std::function<double(const VecX&)>;

struct TracePoint {
  std::int64_t eval = 0;
  double loss = 0.0;
};

struct FitReport {
  std::string method;
  VecX phi_hat;
  double loss = 0.0;
  // Best-so-far loss, appended whenever it improves.
  std::vector<TracePoint> loss_trace;
  double val_error = -1.0;  // filled when a reference is known
  double wall_seconds = 0.0;
  std::int64_t evals = 0;
  bool converged = false;
  bool unsupported = false;
  std::string message;
};

struct CmaOptions {
  double sigma0 = 0.3;  // fraction of each parameter range
  int population = 0;   // 0 selects 4 + 3 ln n
  std::int64_t budget = 20000;
  std::uint64_t seed = 1;
  double tol_x = 1e-12;
  double tol_fun = 1e-13;
  int restarts = 0;  // IPOP restarts with doubled population
  // After every global run, refine the best point with sigma0 * local_sigma_ratio.
  bool local_refine = true;
  double local_sigma_ratio = 0.01;
  double target_loss = -std::numeric_limits<double>::infinity();  // stop once reached
};

struct PowellOptions {
  std::int64_t budget = 20000;
  double ftol = 1e-12;
  double xtol = 1e-10;
  // Coarse samples along each search line before Brent refinement; 0 runs
  // Brent on the whole feasible interval.
  int line_scan = 0;
  double target_loss = -std::numeric_limits<double>::infinity();
};

struct NelderMeadOptions {
  std::int64_t budget = 2000;
  double initial_step = 0.05;
  double xtol = 1e-10;
  double ftol = 1e-12;
  double target_loss = -std::numeric_limits<double>::infinity();
};

struct BasinHoppingOptions {
  double step = 0.5;  // half-width of the uniform perturbation, unit-cube units
  double temperature = 1e-3;
  std::int64_t budget = 20000;
  std::uint64_t seed = 1;
  NelderMeadOptions local{400, 0.1, 1e-10, 1e-12};
  double target_loss = -std::numeric_limits<double>::infinity();
};

FitReport cma_es(const LossFn& loss, const ParamSpace& space, const VecX& phi0,
                 const CmaOptions& opts = {});
FitReport powell(const LossFn& loss, const ParamSpace& space, const VecX& phi0,
                 const PowellOptions& opts = {});
FitReport nelder_mead(const LossFn& loss, const ParamSpace& space, const VecX& phi0,
                      const NelderMeadOptions& opts = {});
FitReport basin_hopping(const LossFn& loss, const ParamSpace& space, const VecX& phi0,
                        const BasinHoppingOptions& opts = {});

// Metropolis rule: improvements always pass, otherwise u < exp(-(new - old) / T).
bool metropolis_accept(double old_loss, double new_loss, double temperature, double u);

// Mean over dimensions of |phi_hat - phi_gt| / range, clamped to 1.
double validation_error(const VecX& phi_hat, const VecX& phi_gt, const ParamSpace& space);

}  // namespace msdf
