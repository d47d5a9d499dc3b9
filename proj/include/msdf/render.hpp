#pragma once

// Pinhole camera, tiled parallel rendering, and a small path tracer for
// dielectric inclusions in an absorbing host or opaque Lambertian surfaces.

#include "msdf/field.hpp"
#include "msdf/tracer.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace msdf {

// x_cam = R x + t; pixel (u, v) looks along R^T K^-1 (u + 1/2, v + 1/2, 1).
struct Camera {
  Mat3 K = Mat3::Identity();
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();
  int width = 64;
  int height = 64;

  static Camera look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double fov_y_deg,
                        int width, int height);

  void validate() const;
  Vec3 center() const { return -R.transpose() * t; }
  Ray ray(double u, double v) const;
};

struct Image {
  int width = 0;
  int height = 0;
  std::vector<float> rgb;  // linear, row-major, 3 per pixel

  Image() = default;
  Image(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(3 * w * h), 0.0f) {}

  Vec3 at(int x, int y) const;
  void set(int x, int y, const Vec3& c);
  // Rec. 709 luminance per pixel, row-major.
  Eigen::MatrixXd luminance() const;
  double mean_intensity() const;
};

struct Light {
  Vec3 direction = Vec3(-0.4, -0.6, 1.0).normalized();  // direction the light travels
  Vec3 color = Vec3::Ones();
  double ambient = 0.1;
};

struct PathConfig {
  enum class Material { Dielectric, Lambertian };
  Material material = Material::Dielectric;
  int max_depth = 8;
  int samples_per_pixel = 4;
  std::uint64_t seed = 1;
  bool russian_roulette = true;
  // Dielectric: inclusions (field < 0) inside a host sphere.
  double container_radius = 1.0;
  double host_ior = 1.31;
  double inclusion_ior = 1.0;
  double host_absorption = 0.5;  // per scene unit
  // Lambertian surfaces.
  double albedo = 0.7;
  Vec3 sky = Vec3::Ones();
};

enum class Shading { NormalColor, Lambert, PathTrace };

struct RenderSettings {
  Shading shading = Shading::NormalColor;
  StepPolicy policy;
  double precision = 1e-4;
  double bound_radius = 1.0;  // rays are clipped to this origin-centred sphere; <= 0 disables
  double normal_eps = 1e-4;
  int max_steps = 20000;
  Light light;
  PathConfig path;
  int threads = 0;  // 0 = hardware concurrency
  int tile = 16;
};

struct RenderResult {
  Image image;
  TraceStats stats;
};

RenderResult render(const ScalarField& field, const Camera& camera, const RenderSettings& settings);

// Radiance along one camera ray. `seed` drives the path's random stream.
Vec3 path_radiance(const ScalarField& field, const Ray& ray, const RenderSettings& settings,
                   std::uint64_t seed, TraceStats* stats = nullptr);

struct DepthSweepPoint {
  int depth = 0;
  double intensity = 0.0;
};

struct DepthCalibration {
  int depth = 0;
  std::vector<DepthSweepPoint> sweep;
};

// Doubling sweep 0, 1, 2, 4, ... up to max_depth; returns the first depth d
// whose relative mean-intensity change against max(1, 2d) is below tol.
DepthCalibration depth_autocalibrate(const ScalarField& field, const Camera& camera,
                                     const RenderSettings& settings, double tol, int max_depth = 1024);

// Binary P6 with gamma 2.2.
void write_ppm(const Image& image, const std::string& path);
std::string encode_ppm(const Image& image);

}  // namespace msdf
