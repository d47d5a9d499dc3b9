#include "msdf/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>

namespace msdf {

namespace {

int largest_prime_factor(std::size_t n) {
  int largest = 1;
  for (std::size_t f = 2; f * f <= n; ++f) {
    while (n % f == 0) {
      largest = static_cast<int>(f);
      n /= f;
    }
  }
  return n > 1 ? static_cast<int>(n) : largest;
}

Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

// Chirp-z evaluation of an arbitrary-length DFT through power-of-two transforms.
struct ChirpPlan {
  std::size_t n = 0;
  std::size_t m = 0;
  ComplexVec chirp;
  ComplexVec kernel_spectrum;
};

const ChirpPlan& chirp_plan(std::size_t n) {
  thread_local ChirpPlan plan;
  if (plan.n == n) return plan;
  plan.n = n;
  plan.m = 1;
  while (plan.m < 2 * n - 1) plan.m <<= 1;
  plan.chirp.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the angle argument small.
    const std::size_t k2 = (k * k) % (2 * n);
    plan.chirp[k] = std::polar(1.0, -kPi * static_cast<double>(k2) / static_cast<double>(n));
  }
  ComplexVec b(plan.m, 0.0);
  b[0] = std::conj(plan.chirp[0]);
  for (std::size_t k = 1; k < n; ++k) b[k] = b[plan.m - k] = std::conj(plan.chirp[k]);
  fft_engine().fwd(plan.kernel_spectrum, b);
  return plan;
}

ComplexVec bluestein(const double* x, std::size_t n) {
  const ChirpPlan& plan = chirp_plan(n);
  ComplexVec a(plan.m, 0.0);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * plan.chirp[k];
  ComplexVec fa, conv;
  fft_engine().fwd(fa, a);
  for (std::size_t k = 0; k < plan.m; ++k) fa[k] *= plan.kernel_spectrum[k];
  fft_engine().inv(conv, fa);
  ComplexVec out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = conv[k] * plan.chirp[k];
  return out;
}

}  // namespace

ComplexVec dft(const VecX& values) {
  const auto n = static_cast<std::size_t>(values.size());
  if (n > 64 && largest_prime_factor(n) > 13) {
    return bluestein(values.data(), n);
  }
  std::vector<double> in(values.data(), values.data() + n);
  ComplexVec out;
  fft_engine().fwd(out, in);
  return out;
}

Eigen::MatrixXcd dft2(const Eigen::MatrixXd& image) {
  Eigen::FFT<double>& fft = fft_engine();
  const Eigen::Index h = image.rows();
  const Eigen::Index w = image.cols();
  Eigen::MatrixXcd rows(h, w);
  std::vector<std::complex<double>> in(w), out;
  for (Eigen::Index r = 0; r < h; ++r) {
    for (Eigen::Index c = 0; c < w; ++c) in[c] = image(r, c);
    fft.fwd(out, in);
    for (Eigen::Index c = 0; c < w; ++c) rows(r, c) = out[c];
  }
  Eigen::MatrixXcd result(h, w);
  in.resize(h);
  for (Eigen::Index c = 0; c < w; ++c) {
    for (Eigen::Index r = 0; r < h; ++r) in[r] = rows(r, c);
    fft.fwd(out, in);
    for (Eigen::Index r = 0; r < h; ++r) result(r, c) = out[r];
  }
  return result;
}

double wrap_phase(double d) {
  d = std::remainder(d, 2.0 * kPi);
  if (d <= -kPi) d += 2.0 * kPi;
  return d;
}

SpectralTarget::SpectralTarget(const VecX& target) {
  if (target.size() < 2) throw ContractError("loss_ft_3d: need at least two samples");
  const ComplexVec f = dft(target);
  amplitude_.resize(static_cast<Eigen::Index>(f.size()));
  phase_.resize(static_cast<Eigen::Index>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) {
    amplitude_[static_cast<Eigen::Index>(i)] = std::abs(f[i]);
    phase_[static_cast<Eigen::Index>(i)] = std::arg(f[i]);
  }
}

double SpectralTarget::loss(const VecX& values) const {
  if (values.size() != amplitude_.size()) throw ContractError("loss_ft_3d: size mismatch");
  const ComplexVec f = dft(values);
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const double da = std::sqrt(std::norm(f[i])) - amplitude_[k];
    const double dt = wrap_phase(std::arg(f[i]) - phase_[k]);
    sum += da * da + dt * dt;
  }
  return std::log(sum / (2.0 * static_cast<double>(f.size())) + kLossEpsilon);
}

double loss_ft_3d(const VecX& values, const VecX& target) {
  if (values.size() != target.size()) throw ContractError("loss_ft_3d: size mismatch");
  return SpectralTarget(target).loss(values);
}

double loss_ft_2d(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ContractError("loss_ft_2d: image sizes differ");
  }
  if (a.size() == 0) throw ContractError("loss_ft_2d: empty image");
  const Eigen::MatrixXd diff = dft2(a).cwiseAbs() - dft2(b).cwiseAbs();
  return std::log(diff.squaredNorm() / static_cast<double>(a.size()) + kLossEpsilon);
}

}  // namespace msdf
