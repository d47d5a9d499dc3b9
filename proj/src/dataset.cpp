#include "msdf/dataset.hpp"

#include "msdf/hashgrid.hpp"
#include "msdf/periodic.hpp"

#include <cmath>
#include <string>

namespace msdf {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
// |grad| of the unit-frequency gyroid sum is at most 2 sqrt(3); its range is [-1.5, 1.5].
constexpr double kGyroidGrad = 2.0 * kSqrt3;
constexpr double kGyroidMax = 1.5;

VecX vec(std::initializer_list<double> v) {
  VecX out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

double spectral_norm(const VecX& T, int i) {
  Mat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = T[9 * i + 3 * r + c];
  return m.norm();
}

std::vector<Microstructure> build() {
  std::vector<Microstructure> out;

  {
    Microstructure m;
    m.name = "gyroid1d";
    m.param_names = {"eta"};
    m.bounds = {{1.0, 500.0}};
    m.ground_truth = vec({100.0});
    m.initial = vec({300.0});
    m.eval = [](const Vec3& p, const VecX& phi) { return gyroid1d(p, phi[0]); };
    m.lipschitz = [](const VecX&) { return kSqrt3; };
    out.push_back(std::move(m));
  }
  {
    Microstructure m;
    m.name = "gyroid3d";
    m.param_names = {"eta", "a", "t"};
    m.bounds = {{1.0, 500.0}, {1.0, 20.0}, {-10.0, 10.0}};
    m.ground_truth = vec({100.0, 7.0, 1.2});
    m.initial = vec({300.0, 6.0, 0.0});
    m.eval = [](const Vec3& p, const VecX& phi) { return gyroid3d(p, phi[0], phi[1], phi[2]); };
    m.lipschitz = [](const VecX& phi) { return kGyroidGrad * 2.0 * kPi / std::abs(phi[1]); };
    out.push_back(std::move(m));
  }
  {
    Microstructure m;
    m.name = "gyroid5d";
    m.param_names = {"eta", "a1", "a2", "a3", "t"};
    m.bounds = {{1.0, 500.0}, {1.0, 20.0}, {1.0, 20.0}, {1.0, 20.0}, {-10.0, 10.0}};
    m.ground_truth = vec({100.0, 7.0, 10.0, 15.0, 1.2});
    m.initial = vec({200.0, 6.0, 6.0, 6.0, 6.0});
    m.eval = [](const Vec3& p, const VecX& phi) {
      return gyroid5d(p, phi[0], Vec3(phi[1], phi[2], phi[3]), phi[4]);
    };
    m.lipschitz = [](const VecX& phi) {
      const double a = std::min({std::abs(phi[1]), std::abs(phi[2]), std::abs(phi[3])});
      return kGyroidGrad * 2.0 * kPi / a;
    };
    out.push_back(std::move(m));
  }
  {
    Microstructure m;
    m.name = "fibers2d";
    m.param_names = {"eta", "phi"};
    m.bounds = {{1.0, 500.0}, {0.0, kPi}};
    m.ground_truth = vec({100.0, kPi / 4.0});
    m.initial = vec({200.0, kPi});
    m.eval = [](const Vec3& p, const VecX& phi) { return fibers2d(p, phi[0], phi[1]); };
    // u(x): 2 |s| |grad s|; u(y, y, y) = 2.25 sin^2(2y) has slope <= 4.5.
    m.lipschitz = [](const VecX&) { return 2.0 * kGyroidMax * kGyroidGrad + 4.5; };
    out.push_back(std::move(m));
  }
  {
    Microstructure m;
    m.name = "spheres2d";
    m.param_names = {"eta", "r"};
    m.bounds = {{1.0, 500.0}, {0.01, 0.5}};
    m.ground_truth = vec({30.0, 0.08});
    m.initial = vec({150.0, 0.2});
    m.smooth = false;
    m.eval = [](const Vec3& p, const VecX& phi) { return spheres2d(p, phi[0], phi[1]); };
    m.lipschitz = [](const VecX&) { return 1.0; };
    out.push_back(std::move(m));
  }
  {
    Microstructure m;
    m.name = "porous28d";
    m.param_names.push_back("eta");
    m.bounds.push_back({1.0, 100.0});
    for (int i = 0; i < 27; ++i) {
      m.param_names.push_back("T" + std::to_string(i / 9 + 1) + "_" + std::to_string(i % 9));
      m.bounds.push_back({-4.0, 7.0});
    }
    m.ground_truth.resize(28);
    m.ground_truth[0] = 30.0;
    m.ground_truth.tail(27) = porous_reference_transform(28);
    m.initial.resize(28);
    m.initial[0] = 50.0;
    m.initial.tail(27) = porous_reference_transform(2828);
    m.eval = [](const Vec3& p, const VecX& phi) { return porous28d(p, phi[0], phi.tail(27)); };
    m.lipschitz = [](const VecX& phi) {
      const VecX T = phi.tail(27);
      // v <= 2.25 with |grad v| <= 2 * 1.5 * 2 sqrt(3); w <= 9 with |grad w| <= 2 * 3 * 2 sqrt(3).
      const double gv = 2.0 * kGyroidMax * kGyroidGrad;
      const double gw = 2.0 * 3.0 * kGyroidGrad;
      const double bound = gv * spectral_norm(T, 0) + gw * 2.25 * spectral_norm(T, 1) +
                           9.0 * gv * spectral_norm(T, 2);
      return bound > 0.0 ? bound : 1.0;
    };
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

void Microstructure::check(const VecX& phi) const {
  if (phi.size() != dims()) {
    throw DomainError(name + " expects " + std::to_string(dims()) + " parameters, got " +
                      std::to_string(phi.size()));
  }
}

ScalarField Microstructure::field(const VecX& phi) const {
  check(phi);
  auto f = eval;
  return ScalarField(
      [f, phi](const Vec3& p) {
        instrument::count_primitive();
        return f(p, phi);
      },
      lipschitz(phi), smooth ? Smoothness::Smooth : Smoothness::NonSmooth, phi);
}

VecX Microstructure::sample(const VecX& phi, const Eigen::Matrix3Xd& points) const {
  check(phi);
  VecX out(points.cols());
  for (Eigen::Index i = 0; i < points.cols(); ++i) out[i] = eval(points.col(i), phi);
  return out;
}

std::span<const Microstructure> microstructures() {
  static const std::vector<Microstructure> all = build();
  return all;
}

const Microstructure& microstructure(std::string_view name) {
  for (const Microstructure& m : microstructures()) {
    if (m.name == name) return m;
  }
  throw ConfigError("unknown microstructure '" + std::string(name) + "'");
}

VecX porous_reference_transform(std::uint64_t seed) {
  SplitMix64 gen(scramble(CellIndex(static_cast<std::int64_t>(seed % 1000003), 28, 3)));
  VecX T(27);
  for (int i = 0; i < 27; ++i) T[i] = -4.0 + 11.0 * gen.uniform();
  return T;
}

}  // namespace msdf
