#include "msdf/optim.hpp"

#include "msdf/hashgrid.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace msdf {

void ParamSpace::validate() const {
  if (bounds.empty()) throw ConfigError("parameter space is empty");
  if (!names.empty() && names.size() != bounds.size()) {
    throw ConfigError("parameter names and bounds differ in length");
  }
  for (const auto& [a, b] : bounds) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
      throw ConfigError("parameter bounds need finite a < b");
    }
  }
}

bool ParamSpace::contains(const VecX& phi) const {
  if (phi.size() != dims()) return false;
  for (int i = 0; i < dims(); ++i) {
    if (!(phi[i] >= bounds[i].first && phi[i] <= bounds[i].second)) return false;
  }
  return true;
}

VecX ParamSpace::lower() const {
  VecX v(dims());
  for (int i = 0; i < dims(); ++i) v[i] = bounds[i].first;
  return v;
}

VecX ParamSpace::upper() const {
  VecX v(dims());
  for (int i = 0; i < dims(); ++i) v[i] = bounds[i].second;
  return v;
}

VecX ParamSpace::range() const { return upper() - lower(); }

VecX ParamSpace::to_unit(const VecX& phi) const {
  return (phi - lower()).cwiseQuotient(range());
}

VecX ParamSpace::from_unit(const VecX& u) const {
  return lower() + u.cwiseMax(0.0).cwiseMin(1.0).cwiseProduct(range());
}

bool metropolis_accept(double old_loss, double new_loss, double temperature, double u) {
  if (new_loss <= old_loss) return true;
  if (!(temperature > 0.0)) return false;
  return u < std::exp(-(new_loss - old_loss) / temperature);
}

double validation_error(const VecX& phi_hat, const VecX& phi_gt, const ParamSpace& space) {
  if (phi_hat.size() != phi_gt.size() || phi_hat.size() != space.dims()) {
    throw ContractError("validation_error: dimension mismatch");
  }
  const double mean = (phi_hat - phi_gt).cwiseAbs().cwiseQuotient(space.range()).mean();
  return std::min(mean, 1.0);
}

namespace {

using Clock = std::chrono::steady_clock;

struct BudgetExhausted {};
struct TargetReached {};

VecX clamp_unit(const VecX& u) { return u.cwiseMax(0.0).cwiseMin(1.0); }

// Folds x back into [0, 1] by mirroring at the faces.
double reflect_unit(double x) {
  x = std::fmod(std::abs(x), 2.0);
  return x > 1.0 ? 2.0 - x : x;
}

// Counts evaluations in the unit cube and keeps the best point seen.
class Objective {
 public:
  Objective(const LossFn& loss, const ParamSpace& space, std::int64_t budget,
            double target = -std::numeric_limits<double>::infinity())
      : loss_(loss), space_(space), budget_(budget), target_(target) {}

  double operator()(const VecX& u) {
    if (evals_ >= budget_) throw BudgetExhausted{};
    const VecX x = clamp_unit(u);
    double f = loss_(space_.from_unit(x));
    if (!std::isfinite(f)) f = std::numeric_limits<double>::infinity();
    ++evals_;
    if (f < best_loss_ || best_u_.size() == 0) {
      best_loss_ = f;
      best_u_ = x;
      trace_.push_back({evals_, f});
      if (f <= target_) throw TargetReached{};
    }
    return f;
  }

  std::int64_t evals() const { return evals_; }
  std::int64_t remaining() const { return budget_ - evals_; }
  double best_loss() const { return best_loss_; }
  const VecX& best_u() const { return best_u_; }

  FitReport report(std::string method, Clock::time_point start, bool converged) const {
    FitReport r;
    r.method = std::move(method);
    r.phi_hat = space_.from_unit(best_u_);
    r.loss = best_loss_;
    r.loss_trace = trace_;
    r.evals = evals_;
    r.converged = converged;
    r.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return r;
  }

 private:
  const LossFn& loss_;
  const ParamSpace& space_;
  std::int64_t budget_;
  double target_;
  std::int64_t evals_ = 0;
  double best_loss_ = std::numeric_limits<double>::infinity();
  VecX best_u_;
  std::vector<TracePoint> trace_;
};

void check_start(const ParamSpace& space, const VecX& phi0) {
  space.validate();
  if (!space.contains(phi0)) throw DomainError("initial point lies outside the parameter box");
}

// ---------------------------------------------------------------- CMA-ES

bool cma_run(Objective& obj, VecX mean, double sigma, int lambda, SplitMix64& rng,
             const CmaOptions& opts) {
  const int n = static_cast<int>(mean.size());
  const int mu = lambda / 2;
  VecX weights(mu);
  for (int i = 0; i < mu; ++i) weights[i] = std::log(mu + 0.5) - std::log(i + 1.0);
  weights /= weights.sum();
  const double mueff = 1.0 / weights.squaredNorm();

  const double cc = (4.0 + mueff / n) / (n + 4.0 + 2.0 * mueff / n);
  const double cs = (mueff + 2.0) / (n + mueff + 5.0);
  const double c1 = 2.0 / ((n + 1.3) * (n + 1.3) + mueff);
  const double cmu =
      std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((n + 2.0) * (n + 2.0) + mueff));
  const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (n + 1.0)) - 1.0) + cs;
  const double chi_n = std::sqrt(double(n)) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  Eigen::MatrixXd C = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n, n);
  VecX D = VecX::Ones(n);
  VecX pc = VecX::Zero(n);
  VecX ps = VecX::Zero(n);

  Eigen::MatrixXd ys(n, lambda);
  VecX fit(lambda);
  std::vector<int> order(lambda);
  std::vector<double> history;
  const int flat_window = 10 + static_cast<int>(std::ceil(30.0 * n / lambda));

  for (int gen = 0;; ++gen) {
    for (int k = 0; k < lambda; ++k) {
      VecX z(n);
      for (int i = 0; i < n; ++i) z[i] = rng.normal();
      const VecX x = clamp_unit(mean + sigma * (B * D.cwiseProduct(z)));
      ys.col(k) = (x - mean) / sigma;
      fit[k] = obj(x);
    }
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&fit](int a, int b) { return fit[a] < fit[b]; });

    VecX y_w = VecX::Zero(n);
    for (int i = 0; i < mu; ++i) y_w += weights[i] * ys.col(order[i]);
    mean = mean + sigma * y_w;

    const Eigen::MatrixXd c_inv_sqrt = B * D.cwiseInverse().asDiagonal() * B.transpose();
    ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * (c_inv_sqrt * y_w);
    const double ps_norm = ps.norm();
    const bool hsig = ps_norm / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * (gen + 1))) / chi_n <
                      1.4 + 2.0 / (n + 1.0);
    pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * y_w;

    Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < mu; ++i) {
      const VecX y = ys.col(order[i]);
      rank_mu.noalias() += weights[i] * y * y.transpose();
    }
    const double old_weight = 1.0 - c1 - cmu + (hsig ? 0.0 : c1 * cc * (2.0 - cc));
    C = old_weight * C + c1 * pc * pc.transpose() + cmu * rank_mu;
    C = 0.5 * (C + C.transpose()).eval();

    sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1.0));
    sigma = std::min(sigma, 1.0);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C);
    B = eig.eigenvectors();
    D = eig.eigenvalues().cwiseMax(1e-300).cwiseSqrt();

    history.push_back(fit[order[0]]);
    const double spread = fit[order[lambda - 1]] - fit[order[0]];
    if (sigma * std::sqrt(C.diagonal().maxCoeff()) < opts.tol_x) return true;
    if (static_cast<int>(history.size()) >= flat_window) {
      const auto first = history.end() - flat_window;
      const auto [lo, hi] = std::minmax_element(first, history.end());
      if (*hi - *lo < opts.tol_fun && spread < opts.tol_fun) return true;
    }
    if (D.maxCoeff() > 1e7 * D.minCoeff()) return true;
  }
}

// ----------------------------------------------------------- Brent / Powell

// Bounded Brent minimisation of g on [a, b]; returns (t, g(t)).
template <typename G>
std::pair<double, double> brent_bounded(G&& g, double a, double b, double xtol) {
  const double golden = 0.5 * (3.0 - std::sqrt(5.0));
  const double sqrt_eps = std::sqrt(2.2e-16);
  double x = a + golden * (b - a);
  double w = x;
  double v = x;
  double fx = g(x);
  double fw = fx;
  double fv = fx;
  double d = 0.0;
  double e = 0.0;
  for (int iter = 0; iter < 500; ++iter) {
    const double xm = 0.5 * (a + b);
    const double tol1 = sqrt_eps * std::abs(x) + xtol / 3.0;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;
    bool use_golden = true;
    if (std::abs(e) > tol1) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      r = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * r) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = xm >= x ? tol1 : -tol1;
        use_golden = false;
      }
    }
    if (use_golden) {
      e = x >= xm ? a - x : b - x;
      d = golden * e;
    }
    const double u = x + (std::abs(d) >= tol1 ? d : (d >= 0.0 ? tol1 : -tol1));
    const double fu = g(u);
    if (fu <= fx) {
      if (u >= x) a = x; else b = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  return {x, fx};
}

// Feasible step interval [lo, hi] keeping u + t d inside the unit cube.
std::pair<double, double> feasible_interval(const VecX& u, const VecX& d) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::abs(d[i]) < 1e-300) continue;
    const double t0 = (0.0 - u[i]) / d[i];
    const double t1 = (1.0 - u[i]) / d[i];
    lo = std::max(lo, std::min(t0, t1));
    hi = std::min(hi, std::max(t0, t1));
  }
  if (!std::isfinite(lo)) lo = 0.0;
  if (!std::isfinite(hi)) hi = 0.0;
  return {std::min(lo, 0.0), std::max(hi, 0.0)};
}

// Minimises along d from u; moves u only on improvement.
void line_minimise(Objective& obj, VecX& u, double& fu, const VecX& d, const PowellOptions& opts) {
  auto [lo, hi] = feasible_interval(u, d);
  if (!(hi - lo > 1e-15)) return;
  auto g = [&](double t) { return obj(u + t * d); };
  if (opts.line_scan > 1) {
    const int k = opts.line_scan;
    double best_t = 0.0;
    double best_f = fu;
    int best_i = -1;
    for (int i = 0; i <= k; ++i) {
      const double t = lo + (hi - lo) * i / k;
      const double f = g(t);
      if (f < best_f) {
        best_f = f;
        best_t = t;
        best_i = i;
      }
    }
    if (best_i >= 0) {
      const double step = (hi - lo) / k;
      lo = std::max(lo, best_t - step);
      hi = std::min(hi, best_t + step);
    } else {
      const double step = (hi - lo) / k;
      lo = std::max(lo, -step);
      hi = std::min(hi, step);
    }
  }
  const auto [t, ft] = brent_bounded(g, lo, hi, opts.xtol);
  if (ft < fu) {
    u = clamp_unit(u + t * d);
    fu = ft;
  }
}

// ---------------------------------------------------------- Nelder-Mead

bool nm_run(Objective& obj, VecX& u, double& fu, const NelderMeadOptions& opts) {
  const int n = static_cast<int>(u.size());
  const std::int64_t stop_at = obj.evals() + opts.budget;
  std::vector<VecX> xs(n + 1, u);
  std::vector<double> fs(n + 1);
  fs[0] = fu;
  for (int i = 0; i < n; ++i) {
    xs[i + 1][i] += u[i] + opts.initial_step <= 1.0 ? opts.initial_step : -opts.initial_step;
    fs[i + 1] = obj(xs[i + 1]);
  }
  std::vector<int> idx(n + 1);
  bool converged = false;
  while (obj.evals() < stop_at) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&fs](int a, int b) { return fs[a] < fs[b]; });
    const int best = idx[0];
    const int worst = idx[n];
    const int second = idx[n - 1];
    double xspread = 0.0;
    double fspread = 0.0;
    for (int i = 0; i <= n; ++i) {
      xspread = std::max(xspread, (xs[i] - xs[best]).cwiseAbs().maxCoeff());
      fspread = std::max(fspread, std::abs(fs[i] - fs[best]));
    }
    if (xspread <= opts.xtol && fspread <= opts.ftol) {
      converged = true;
      break;
    }
    VecX centroid = VecX::Zero(n);
    for (int i = 0; i < n; ++i) centroid += xs[idx[i]];
    centroid /= n;

    const VecX xr = clamp_unit(centroid + (centroid - xs[worst]));
    const double fr = obj(xr);
    if (fr < fs[best]) {
      const VecX xe = clamp_unit(centroid + 2.0 * (centroid - xs[worst]));
      const double fe = obj(xe);
      if (fe < fr) {
        xs[worst] = xe; fs[worst] = fe;
      } else {
        xs[worst] = xr; fs[worst] = fr;
      }
      continue;
    }
    if (fr < fs[second]) {
      xs[worst] = xr; fs[worst] = fr;
      continue;
    }
    const bool outside = fr < fs[worst];
    const VecX xc = outside ? VecX(centroid + 0.5 * (xr - centroid))
                            : VecX(centroid + 0.5 * (xs[worst] - centroid));
    const double fc = obj(xc);
    if (fc < (outside ? fr : fs[worst])) {
      xs[worst] = xc; fs[worst] = fc;
      continue;
    }
    for (int i = 1; i <= n; ++i) {
      const int j = idx[i];
      xs[j] = xs[best] + 0.5 * (xs[j] - xs[best]);
      fs[j] = obj(xs[j]);
    }
  }
  const auto it = std::min_element(fs.begin(), fs.end());
  u = xs[static_cast<std::size_t>(it - fs.begin())];
  fu = *it;
  return converged;
}

}  // namespace

FitReport cma_es(const LossFn& loss, const ParamSpace& space, const VecX& phi0,
                 const CmaOptions& opts) {
  check_start(space, phi0);
  if (!(opts.sigma0 > 0.0)) throw ConfigError("cma_es needs sigma0 > 0");
  if (opts.budget < 1) throw ConfigError("cma_es needs a positive budget");
  const auto start = Clock::now();
  const int n = space.dims();
  int lambda = opts.population > 0 ? opts.population
                                   : 4 + static_cast<int>(std::floor(3.0 * std::log(double(n))));
  lambda = std::max(lambda, 2);
  Objective obj(loss, space, opts.budget, opts.target_loss);
  SplitMix64 rng(opts.seed);
  const int base_lambda = lambda;
  bool converged = false;
  try {
    VecX mean = space.to_unit(phi0);
    obj(mean);
    for (int run = 0; run <= opts.restarts; ++run) {
      converged = cma_run(obj, mean, opts.sigma0, lambda, rng, opts);
      if (opts.local_refine && obj.remaining() >= base_lambda) {
        converged = cma_run(obj, obj.best_u(), opts.sigma0 * opts.local_sigma_ratio, base_lambda,
                            rng, opts);
      }
      if (obj.remaining() < 2 * lambda) break;
      lambda *= 2;
      mean = VecX(n);
      for (int i = 0; i < n; ++i) mean[i] = rng.uniform();
    }
  } catch (const BudgetExhausted&) {
    converged = false;
  } catch (const TargetReached&) {
    converged = true;
  }
  return obj.report("cma-es", start, converged);
}

FitReport powell(const LossFn& loss, const ParamSpace& space, const VecX& phi0,
                 const PowellOptions& opts) {
  check_start(space, phi0);
  if (opts.budget < 1) throw ConfigError("powell needs a positive budget");
  const auto start = Clock::now();
  const int n = space.dims();
  Objective obj(loss, space, opts.budget, opts.target_loss);
  bool converged = false;
  try {
    VecX u = space.to_unit(phi0);
    double fu = obj(u);
    std::vector<VecX> dirs;
    for (int i = 0; i < n; ++i) dirs.push_back(VecX::Unit(n, i));
    for (;;) {
      const VecX u_start = u;
      const double f_start = fu;
      int ibig = 0;
      double biggest = 0.0;
      for (int i = 0; i < n; ++i) {
        const double before = fu;
        line_minimise(obj, u, fu, dirs[i], opts);
        if (before - fu > biggest) {
          biggest = before - fu;
          ibig = i;
        }
      }
      if (2.0 * (f_start - fu) <= opts.ftol * (std::abs(f_start) + std::abs(fu)) + 1e-300) {
        converged = true;
        break;
      }
      const VecX shift = u - u_start;
      if (shift.norm() < opts.xtol) {
        converged = true;
        break;
      }
      const double f_ext = obj(clamp_unit(u + shift));
      if (f_ext < f_start) {
        const double a = f_start - fu - biggest;
        const double b = f_start - f_ext;
        const double test = 2.0 * (f_start - 2.0 * fu + f_ext) * a * a - biggest * b * b;
        if (test < 0.0) {
          const VecX dir = shift / shift.norm();
          line_minimise(obj, u, fu, dir, opts);
          dirs[ibig] = dirs.back();
          dirs.back() = dir;
        }
      }
    }
  } catch (const BudgetExhausted&) {
    converged = false;
  } catch (const TargetReached&) {
    converged = true;
  }
  return obj.report("powell", start, converged);
}

FitReport nelder_mead(const LossFn& loss, const ParamSpace& space, const VecX& phi0,
                      const NelderMeadOptions& opts) {
  check_start(space, phi0);
  if (opts.budget < 1) throw ConfigError("nelder_mead needs a positive budget");
  const auto start = Clock::now();
  Objective obj(loss, space, opts.budget, opts.target_loss);
  bool converged = false;
  try {
    VecX u = space.to_unit(phi0);
    double fu = obj(u);
    converged = nm_run(obj, u, fu, opts);
  } catch (const BudgetExhausted&) {
    converged = false;
  } catch (const TargetReached&) {
    converged = true;
  }
  return obj.report("nelder-mead", start, converged);
}

FitReport basin_hopping(const LossFn& loss, const ParamSpace& space, const VecX& phi0,
                        const BasinHoppingOptions& opts) {
  check_start(space, phi0);
  if (!(opts.step > 0.0)) throw DomainError("basin hopping needs step > 0");
  if (opts.budget < 1) throw ConfigError("basin hopping needs a positive budget");
  const auto start = Clock::now();
  const int n = space.dims();
  Objective obj(loss, space, opts.budget, opts.target_loss);
  SplitMix64 rng(opts.seed);
  bool reached = false;
  try {
    VecX u = space.to_unit(phi0);
    double fu = obj(u);
    nm_run(obj, u, fu, opts.local);
    for (;;) {
      VecX trial = u;
      for (int i = 0; i < n; ++i) {
        trial[i] = reflect_unit(trial[i] + opts.step * (2.0 * rng.uniform() - 1.0));
      }
      double ft = obj(trial);
      nm_run(obj, trial, ft, opts.local);
      if (metropolis_accept(fu, ft, opts.temperature, rng.uniform())) {
        u = trial;
        fu = ft;
      }
    }
  } catch (const BudgetExhausted&) {
  } catch (const TargetReached&) {
    reached = true;
  }
  // Without a target, basin hopping spends its whole budget.
  return obj.report("basin-hopping", start, reached);
}

}  // namespace msdf
