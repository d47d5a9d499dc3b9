#include "msdf/optim.hpp"

#include <doctest.h>

#include <cmath>

using namespace msdf;

namespace {

ParamSpace box(int n, double lo, double hi) {
  ParamSpace s;
  for (int i = 0; i < n; ++i) s.bounds.push_back({lo, hi});
  return s;
}

}  // namespace

TEST_CASE("parameter space mapping") {
  ParamSpace s;
  s.bounds = {{1.0, 500.0}, {-10.0, 10.0}};
  const VecX phi = (VecX(2) << 100.0, 1.2).finished();
  CHECK(s.from_unit(s.to_unit(phi)).isApprox(phi));
  CHECK(s.contains(phi));
  CHECK_FALSE(s.contains((VecX(2) << 0.5, 0.0).finished()));
  ParamSpace bad;
  bad.bounds = {{1.0, 1.0}};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("cma-es sphere and rosenbrock") {
  const ParamSpace space = box(5, -200.0, 200.0);
  const VecX c = (VecX(5) << 10.0, -20.0, 30.0, 5.0, -7.0).finished();
  VecX start = c;
  start[0] += 100.0;
  const LossFn sphere = [c](const VecX& x) { return (x - c).squaredNorm(); };
  CmaOptions o;
  o.budget = 5000;
  o.tol_fun = 1e-20;
  o.target_loss = 1e-12;
  const FitReport r = cma_es(sphere, space, start, o);
  CHECK(r.evals <= 5000);
  CHECK((r.phi_hat - c).norm() < 1e-6);
  CHECK(r.converged);
  for (std::size_t i = 1; i < r.loss_trace.size(); ++i) {
    REQUIRE(r.loss_trace[i].loss < r.loss_trace[i - 1].loss);
    REQUIRE(r.loss_trace[i].eval > r.loss_trace[i - 1].eval);
  }

  const ParamSpace plane = box(2, -3.0, 3.0);
  const LossFn rosen = [](const VecX& x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  CmaOptions ro;
  ro.budget = 20000;
  ro.target_loss = 1e-7;
  const FitReport rr = cma_es(rosen, plane, (VecX(2) << -1.5, 2.0).finished(), ro);
  CHECK(rr.loss < 1e-6);
  CHECK(rr.evals <= 20000);

  // Same seed, same run.
  const FitReport again = cma_es(rosen, plane, (VecX(2) << -1.5, 2.0).finished(), ro);
  CHECK(again.phi_hat == rr.phi_hat);
  CHECK(again.evals == rr.evals);
}

TEST_CASE("budget exhaustion is reported") {
  const ParamSpace space = box(3, -1.0, 1.0);
  const LossFn f = [](const VecX& x) { return std::abs(x.sum() - 0.1234567); };
  CmaOptions o;
  o.budget = 37;
  const FitReport r = cma_es(f, space, VecX::Zero(3), o);
  CHECK(r.evals == 37);
  CHECK_FALSE(r.converged);
  CHECK_THROWS_AS(cma_es(f, space, VecX::Constant(3, 2.0), o), DomainError);
}

TEST_CASE("powell on a convex quadratic") {
  const ParamSpace space = box(3, -10.0, 10.0);
  Mat3 A;
  A << 4, 1, 0.5,
       1, 3, 0.2,
       0.5, 0.2, 2;
  const Vec3 c(1.0, -2.0, 0.5);
  std::int64_t calls = 0;
  const LossFn q = [&](const VecX& x) {
    ++calls;
    const Vec3 d = Vec3(x[0], x[1], x[2]) - c;
    return d.dot(A * d);
  };
  const FitReport r = powell(q, space, VecX::Zero(3), PowellOptions{});
  CHECK((Vec3(r.phi_hat[0], r.phi_hat[1], r.phi_hat[2]) - c).norm() < 1e-8);
  CHECK(r.converged);
  CHECK(r.evals == calls);
}

TEST_CASE("nelder-mead") {
  const ParamSpace space = box(2, -5.0, 5.0);
  const LossFn f = [](const VecX& x) { return std::pow(x[0] - 1.0, 2) + 10.0 * std::pow(x[1] + 2.0, 2); };
  NelderMeadOptions o;
  o.budget = 2000;
  const FitReport r = nelder_mead(f, space, VecX::Zero(2), o);
  CHECK(std::abs(r.phi_hat[0] - 1.0) < 1e-4);
  CHECK(std::abs(r.phi_hat[1] + 2.0) < 1e-4);
}

TEST_CASE("basin hopping double well") {
  ParamSpace space;
  space.bounds = {{-3.0, 3.0}};
  // Tilted wells at -1 and 1; the tilt makes x = -1 the global minimum.
  const LossFn tilted = [](const VecX& x) { return std::pow(x[0] * x[0] - 1.0, 2) + 0.1 * (x[0] + 1.0); };
  BasinHoppingOptions o;
  o.budget = 3000;
  const FitReport r = basin_hopping(tilted, space, (VecX(1) << 2.0).finished(), o);
  CHECK(r.phi_hat[0] < -0.9);
  CHECK(r.evals == 3000);

  const LossFn wells = [](const VecX& x) { return std::pow(x[0] * x[0] - 1.0, 2); };
  const FitReport w = basin_hopping(wells, space, (VecX(1) << 2.0).finished(), o);
  CHECK(std::abs(std::abs(w.phi_hat[0]) - 1.0) < 1e-4);
}

TEST_CASE("metropolis rule") {
  CHECK(metropolis_accept(1.0, 0.5, 0.0, 0.99));
  CHECK(metropolis_accept(1.0, 1.0, 0.0, 0.99));
  CHECK_FALSE(metropolis_accept(1.0, 1.0 + 1e-12, 0.0, 0.0));
  CHECK_FALSE(metropolis_accept(1.0, 1.001, 1e-9, 0.0 + 1e-300));
  CHECK(metropolis_accept(1.0, 2.0, 1.0, std::exp(-1.0) - 1e-9));
  CHECK_FALSE(metropolis_accept(1.0, 2.0, 1.0, std::exp(-1.0) + 1e-9));
}
