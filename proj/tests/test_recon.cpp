#include "msdf/dataset.hpp"
#include "msdf/hashgrid.hpp"
#include "msdf/recon.hpp"
#include "msdf/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace msdf;

namespace {

ComplexVec naive_dft(const VecX& x) {
  const Eigen::Index n = x.size();
  ComplexVec out(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    std::complex<double> s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = -2.0 * kPi * static_cast<double>((k * j) % n) / static_cast<double>(n);
      s += x[j] * std::complex<double>(std::cos(a), std::sin(a));
    }
    out[static_cast<std::size_t>(k)] = s;
  }
  return out;
}

// Returns (sum dA^2, sum dtheta^2).
std::pair<double, double> naive_terms(const VecX& a, const VecX& b) {
  const ComplexVec fa = naive_dft(a);
  const ComplexVec fb = naive_dft(b);
  double amp = 0.0, phase = 0.0;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    const double da = std::abs(fa[i]) - std::abs(fb[i]);
    double dt = std::arg(fa[i]) - std::arg(fb[i]);
    while (dt > kPi) dt -= 2.0 * kPi;
    while (dt <= -kPi) dt += 2.0 * kPi;
    amp += da * da;
    phase += dt * dt;
  }
  return {amp, phase};
}

double naive_loss_3d(const VecX& a, const VecX& b) {
  const auto [amp, phase] = naive_terms(a, b);
  return std::log((amp + phase) / (2.0 * a.size()) + kLossEpsilon);
}

double naive_loss_2d(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::Index h = a.rows(), w = a.cols();
  double sum = 0.0;
  for (Eigen::Index u = 0; u < h; ++u) {
    for (Eigen::Index v = 0; v < w; ++v) {
      std::complex<double> sa = 0.0, sb = 0.0;
      for (Eigen::Index y = 0; y < h; ++y) {
        for (Eigen::Index x = 0; x < w; ++x) {
          const double ang = -2.0 * kPi * (double(u * y) / h + double(v * x) / w);
          const std::complex<double> e(std::cos(ang), std::sin(ang));
          sa += a(y, x) * e;
          sb += b(y, x) * e;
        }
      }
      const double d = std::abs(sa) - std::abs(sb);
      sum += d * d;
    }
  }
  return std::log(sum / static_cast<double>(a.size()) + kLossEpsilon);
}

VecX random_vec(SplitMix64& g, int n) {
  VecX v(n);
  for (int i = 0; i < n; ++i) v[i] = 2.0 * g.uniform() - 1.0;
  return v;
}

}  // namespace

TEST_CASE("sample lattice") {
  SamplingSpec spec;
  spec.sigma = 0.0;
  spec.rotation = Mat3::Identity();
  spec.dims = {1, 3, 3};
  spec.spacing = 0.25;
  const SampleSet s = sample_points(spec);
  REQUIRE(s.size() == 9);
  for (Eigen::Index c = 0; c < s.size(); ++c) {
    CHECK(s.points(2, c) == 0.0);
    for (int a = 0; a < 2; ++a) {
      const double k = s.points(a, c) / 0.25;
      CHECK(std::abs(k - std::round(k)) < 1e-15);
      CHECK(std::abs(k) <= 1.0);
    }
  }

  // Zero jitter is the exact rotated lattice restricted to the ball.
  SamplingSpec def;
  def.sigma = 0.0;
  const SampleSet exact = sample_points(def);
  CHECK(exact.size() > 0);
  CHECK(exact.size() <= 8 * 32 * 32);
  for (Eigen::Index c = 0; c < exact.size(); ++c) {
    const Vec3 base = def.rotation.transpose() * exact.points.col(c);
    REQUIRE(exact.points.col(c).norm() <= 1.0);
    for (int a = 0; a < 3; ++a) {
      const double k = base[a] / def.spacing - 0.5;
      REQUIRE(std::abs(k - std::round(k)) < 1e-9);
    }
  }

  // Jitter statistics.
  SamplingSpec jit = def;
  jit.sigma = 0.01;
  jit.dims = {16, 32, 32};
  jit.spacing = 1.0 / 32.0;
  const SampleSet a = sample_points(jit);
  jit.sigma = 0.0;
  const SampleSet b = sample_points(jit);
  REQUIRE(a.size() == b.size());
  REQUIRE(a.size() >= 10000);
  const Eigen::Matrix3Xd d = a.points - b.points;
  for (int ax = 0; ax < 3; ++ax) {
    const double sd = std::sqrt(d.row(ax).squaredNorm() / static_cast<double>(d.cols()));
    CHECK(std::abs(sd / 0.01 - 1.0) < 0.05);
  }

  def.sigma = -1.0;
  CHECK_THROWS_AS(sample_points(def), DomainError);
}

TEST_CASE("three-dimensional loss") {
  SplitMix64 g(11);
  const VecX a = random_vec(g, 32);
  const VecX b = random_vec(g, 32);
  CHECK(loss_ft_3d(a, a) == std::log(kLossEpsilon));
  CHECK(std::abs(loss_ft_3d(a, b) - naive_loss_3d(a, b)) < 1e-9);

  // Doubling both inputs quadruples the amplitude term and keeps phases.
  const auto [amp, phase] = naive_terms(a, b);
  const double doubled = std::log((4.0 * amp + phase) / 64.0 + kLossEpsilon);
  CHECK(std::abs(loss_ft_3d(2.0 * a, 2.0 * b) - doubled) < 1e-9);

  // Prime length goes through the chirp transform.
  const VecX p = random_vec(g, 397);
  const VecX q = random_vec(g, 397);
  CHECK(std::abs(loss_ft_3d(p, q) - naive_loss_3d(p, q)) < 1e-9);

  const ComplexVec f = dft(p);
  const ComplexVec n = naive_dft(p);
  for (std::size_t i = 0; i < f.size(); ++i) REQUIRE(std::abs(f[i] - n[i]) < 1e-9);

  CHECK_THROWS_AS(loss_ft_3d(a, random_vec(g, 31)), ContractError);
  CHECK(wrap_phase(kPi) == doctest::Approx(kPi));
  CHECK(wrap_phase(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_phase(3.0 * kPi + 0.1) == doctest::Approx(-kPi + 0.1));
}

TEST_CASE("loss separates gyroid scales") {
  const Microstructure& ms = microstructure("gyroid1d");
  SamplingSpec spec;
  const SampleSet target = synthesize_target(ms, ms.ground_truth, spec);
  const SpectralTarget st(target.values);
  CHECK(st.loss(target.values) == std::log(kLossEpsilon));
  VecX off = ms.ground_truth;
  off[0] *= 1.1;
  CHECK(st.loss(ms.sample(ms.ground_truth, target.points)) < st.loss(ms.sample(off, target.points)));
}

TEST_CASE("image loss") {
  SplitMix64 g(12);
  Eigen::MatrixXd a(4, 8), b(4, 8);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    a(i) = g.uniform();
    b(i) = g.uniform();
  }
  CHECK(loss_ft_2d(a, a) == std::log(kLossEpsilon));
  CHECK(std::abs(loss_ft_2d(a, b) - naive_loss_2d(a, b)) < 1e-9);

  Eigen::MatrixXd big(24, 20);
  for (Eigen::Index i = 0; i < big.size(); ++i) big(i) = g.uniform();
  Eigen::MatrixXd shifted(24, 20);
  for (int y = 0; y < 24; ++y) {
    for (int x = 0; x < 20; ++x) shifted((y + 5) % 24, (x + 13) % 20) = big(y, x);
  }
  Eigen::MatrixXd other(24, 20);
  for (Eigen::Index i = 0; i < other.size(); ++i) other(i) = g.uniform();
  CHECK(std::abs(loss_ft_2d(big, other) - loss_ft_2d(shifted, other)) < 1e-9);
  CHECK(std::abs(loss_ft_2d(big, shifted) - std::log(kLossEpsilon)) < 1e-9);

  CHECK_THROWS_AS(loss_ft_2d(a, Eigen::MatrixXd(4, 7)), ContractError);
}

TEST_CASE("validation error") {
  ParamSpace space;
  space.bounds = {{1.0, 500.0}, {0.0, 1.0}, {-10.0, 10.0}};
  const VecX gt = (VecX(3) << 100.0, 0.5, 1.2).finished();
  CHECK(validation_error(gt, gt, space) == 0.0);
  VecX off = gt;
  off[2] += 20.0;
  CHECK(validation_error(off, gt, space) == doctest::Approx(1.0 / 3.0));
  const VecX near = (VecX(3) << 100.0002, 0.5, 1.2).finished();
  CHECK(validation_error(near, gt, space) < 1e-6);
  CHECK_THROWS_AS(validation_error(VecX::Zero(2), gt, space), ContractError);
}

TEST_CASE("optimizer config names") {
  const OptimizerConfig c = OptimizerConfig::parse("powell-gradient");
  CHECK(c.requires_gradient);
  CHECK(c.method == OptimizerConfig::Method::Powell);
  CHECK(OptimizerConfig::parse(c.name()).name() == c.name());
  CHECK_THROWS_AS(OptimizerConfig::parse("adam"), ConfigError);
}

TEST_CASE("unsupported gradient configurations") {
  const Microstructure& ms = microstructure("spheres2d");
  SamplingSpec spec;
  spec.dims = {4, 16, 16};
  spec.spacing = 2.0 / 16.0;
  const SampleSet target = synthesize_target(ms, ms.ground_truth, spec);
  const FitReport r = fit_parameters(ms, target, OptimizerConfig::parse("cma-es-gradient"), ms.ground_truth);
  CHECK(r.unsupported);
  CHECK(r.evals == 1);
  CHECK(r.phi_hat == ms.initial);
  CHECK(r.val_error > 0.0);
}

TEST_CASE("powell fits gyroid1d") {
  const Microstructure& ms = microstructure("gyroid1d");
  const SampleSet target = synthesize_target(ms, ms.ground_truth, SamplingSpec{});
  OptimizerConfig c = OptimizerConfig::parse("powell");
  c.powell.line_scan = 400;
  c.set_budget(4000);
  const FitReport r = fit_parameters(ms, target, c, ms.ground_truth);
  CAPTURE(r.phi_hat[0]);
  CHECK(std::abs(r.phi_hat[0] - 100.0) <= 1e-3);
}

TEST_CASE("analysis by synthesis") {
  const Microstructure& ms = microstructure("gyroid1d");
  const Camera cam = Camera::look_at(Vec3(0, 0, -3), Vec3::Zero(), Vec3::UnitY(), 40.0, 24, 24);
  RenderSettings rs;
  rs.threads = 1;
  rs.shading = Shading::Lambert;
  rs.precision = 1e-4;
  const Image target = render_microstructure(ms, ms.ground_truth, cam, rs);

  OptimizerConfig self = OptimizerConfig::parse("nelder-mead");
  self.initial = ms.ground_truth;
  self.set_budget(1);
  const FitReport at_gt = analysis_by_synthesis(ms, target, cam, self, rs);
  REQUIRE(!at_gt.loss_trace.empty());
  CHECK(at_gt.loss_trace.front().loss == std::log(kLossEpsilon));

  Image wrong(23, 24);
  CHECK_THROWS_AS(analysis_by_synthesis(ms, wrong, cam, self, rs), ContractError);
}
