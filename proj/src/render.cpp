#include "msdf/render.hpp"

#include "msdf/hashgrid.hpp"
#include "msdf/sdf.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

namespace msdf {

Camera Camera::look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double fov_y_deg,
                       int width, int height) {
  if (width < 1 || height < 1) throw DomainError("camera resolution must be positive");
  const Vec3 forward = (target - eye).normalized();
  Vec3 right = forward.cross(up);
  if (!(right.norm() > 1e-12)) throw DomainError("camera up vector is parallel to the view axis");
  right.normalize();
  const Vec3 down = forward.cross(right);
  Camera cam;
  cam.R.row(0) = right.transpose();
  cam.R.row(1) = down.transpose();
  cam.R.row(2) = forward.transpose();
  cam.t = -cam.R * eye;
  const double f = 0.5 * height / std::tan(0.5 * fov_y_deg * kPi / 180.0);
  cam.K << f, 0, 0.5 * width,
           0, f, 0.5 * height,
           0, 0, 1;
  cam.width = width;
  cam.height = height;
  return cam;
}

void Camera::validate() const {
  if (width < 1 || height < 1) throw DomainError("camera resolution must be positive");
  if (std::abs(K.determinant()) < 1e-300) throw DomainError("camera intrinsics must be invertible");
  if (!(R * R.transpose()).isApprox(Mat3::Identity(), 1e-9) || R.determinant() < 0.0) {
    throw DomainError("camera rotation must be orthonormal");
  }
}

Ray Camera::ray(double u, double v) const {
  const Vec3 pix(u, v, 1.0);
  return Ray::make(center(), R.transpose() * K.inverse() * pix);
}

Vec3 Image::at(int x, int y) const {
  const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
  return Vec3(rgb[i], rgb[i + 1], rgb[i + 2]);
}

void Image::set(int x, int y, const Vec3& c) {
  const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
  rgb[i] = static_cast<float>(c.x());
  rgb[i + 1] = static_cast<float>(c.y());
  rgb[i + 2] = static_cast<float>(c.z());
}

Eigen::MatrixXd Image::luminance() const {
  Eigen::MatrixXd out(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Vec3 c = at(x, y);
      out(y, x) = 0.2126 * c.x() + 0.7152 * c.y() + 0.0722 * c.z();
    }
  }
  return out;
}

double Image::mean_intensity() const {
  if (width == 0 || height == 0) return 0.0;
  return luminance().mean();
}

namespace {

constexpr double kSurfaceOffset = 1e-4;

Vec3 reflect(const Vec3& d, const Vec3& n) { return d - 2.0 * d.dot(n) * n; }

// Dielectric interface. `n` faces the incoming side. Returns the new direction
// and whether the ray was transmitted.
std::pair<Vec3, bool> scatter_dielectric(const Vec3& d, const Vec3& n, double n1, double n2,
                                         SplitMix64& rng) {
  const double cos_i = std::clamp(-d.dot(n), 0.0, 1.0);
  const double eta = n1 / n2;
  const double sin2_t = eta * eta * (1.0 - cos_i * cos_i);
  if (sin2_t >= 1.0) {
    rng.uniform();
    return {reflect(d, n), false};
  }
  const double cos_t = std::sqrt(1.0 - sin2_t);
  const double rs = (n1 * cos_i - n2 * cos_t) / (n1 * cos_i + n2 * cos_t);
  const double rp = (n1 * cos_t - n2 * cos_i) / (n1 * cos_t + n2 * cos_i);
  const double fresnel = 0.5 * (rs * rs + rp * rp);
  if (rng.uniform() < fresnel) return {reflect(d, n), false};
  return {(eta * d + (eta * cos_i - cos_t) * n).normalized(), true};
}

Vec3 cosine_sample(const Vec3& n, SplitMix64& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  const double r = std::sqrt(u1);
  const double phi = 2.0 * kPi * u2;
  const Vec3 a = std::abs(n.x()) > 0.9 ? Vec3::UnitY() : Vec3::UnitX();
  const Vec3 tx = n.cross(a).normalized();
  const Vec3 ty = n.cross(tx);
  return (r * std::cos(phi) * tx + r * std::sin(phi) * ty + std::sqrt(std::max(0.0, 1.0 - u1)) * n)
      .normalized();
}

TraceOptions trace_options(const RenderSettings& s) {
  TraceOptions o;
  o.precision = s.precision;
  o.max_steps = s.max_steps;
  o.normal_eps = s.normal_eps;
  return o;
}

// Ray segment within the bounding sphere, or false.
bool bounded_ray(const Ray& ray, double radius, Ray& out) {
  if (radius <= 0.0) {
    out = ray;
    return true;
  }
  double t0 = 0.0;
  double t1 = 0.0;
  if (!clip_to_sphere(ray, Vec3::Zero(), radius, t0, t1)) return false;
  out = ray;
  out.t_min = std::max(ray.t_min, t0);
  out.t_max = std::min(ray.t_max, t1);
  return out.t_min < out.t_max;
}

Vec3 lambertian_path(const ScalarField& field, Ray ray, const RenderSettings& s, SplitMix64& rng,
                     TraceStats* stats) {
  const PathConfig& cfg = s.path;
  const TraceOptions opts = trace_options(s);
  double throughput = 1.0;
  int k = 0;
  for (;;) {
    Ray seg;
    if (!bounded_ray(ray, s.bound_radius, seg)) return throughput * cfg.sky;
    const Hit hit = sphere_trace(field, seg, s.policy, opts, stats);
    if (!hit.hit) return throughput * cfg.sky;
    if (++k > cfg.max_depth) return Vec3::Zero();
    if (cfg.russian_roulette) {
      if (rng.uniform() >= cfg.albedo) return Vec3::Zero();
    } else {
      throughput *= cfg.albedo;
    }
    Vec3 n = hit.normal;
    if (n.dot(ray.direction) > 0.0) n = -n;
    ray = Ray::make(hit.position + kSurfaceOffset * n, cosine_sample(n, rng));
  }
}

enum class Region { Outside, Host, Inclusion };

Vec3 dielectric_path(const ScalarField& field, Ray ray, const RenderSettings& s, SplitMix64& rng,
                     TraceStats* stats) {
  const PathConfig& cfg = s.path;
  const TraceOptions opts = trace_options(s);
  const double R = cfg.container_radius;
  double throughput = 1.0;
  int k = 0;
  Vec3 pos = ray.origin;
  Vec3 dir = ray.direction;
  Region region = Region::Outside;
  if (pos.norm() < R) region = field(pos) < 0.0 ? Region::Inclusion : Region::Host;

  for (;;) {
    const Ray probe = Ray::make(pos, dir);
    double t0 = 0.0;
    double t1 = 0.0;
    const bool meets = clip_to_sphere(probe, Vec3::Zero(), R, t0, t1);
    if (region == Region::Outside) {
      if (!meets || t0 <= 0.0) return throughput * cfg.sky;
      const Vec3 p = probe.at(t0);
      if (++k > cfg.max_depth) return Vec3::Zero();
      const Vec3 n = p.normalized();
      const double inner_ior = field(p) < 0.0 ? cfg.inclusion_ior : cfg.host_ior;
      const auto [nd, transmitted] = scatter_dielectric(dir, n, 1.0, inner_ior, rng);
      dir = nd;
      if (transmitted) {
        region = field(p) < 0.0 ? Region::Inclusion : Region::Host;
        pos = p - kSurfaceOffset * n;
      } else {
        pos = p + kSurfaceOffset * n;
      }
      continue;
    }

    const double t_exit = meets ? std::max(t1, kSurfaceOffset) : kSurfaceOffset;
    Ray seg = Ray::make(pos, dir, 0.0, t_exit);
    const Hit hit = sphere_trace(field, seg, s.policy, opts, stats);
    const bool at_container = !hit.hit || hit.t >= t_exit;
    const double travelled = at_container ? t_exit : hit.t;
    if (region == Region::Host) {
      const double transmittance = std::exp(-cfg.host_absorption * travelled);
      if (cfg.russian_roulette) {
        if (rng.uniform() >= transmittance) return Vec3::Zero();
      } else {
        throughput *= transmittance;
      }
    }
    if (++k > cfg.max_depth) return Vec3::Zero();
    const double here_ior = region == Region::Host ? cfg.host_ior : cfg.inclusion_ior;

    if (at_container) {
      const Vec3 p = probe.at(t_exit);
      const Vec3 n_out = p.normalized();
      const auto [nd, transmitted] = scatter_dielectric(dir, -n_out, here_ior, 1.0, rng);
      dir = nd;
      if (transmitted) {
        region = Region::Outside;
        pos = p + kSurfaceOffset * n_out;
      } else {
        pos = p - kSurfaceOffset * n_out;
      }
      continue;
    }

    // Field normal points from inclusion (negative) into host (positive).
    Vec3 n = hit.normal;
    if (n.dot(dir) > 0.0) n = -n;
    const double there_ior = region == Region::Host ? cfg.inclusion_ior : cfg.host_ior;
    const auto [nd, transmitted] = scatter_dielectric(dir, n, here_ior, there_ior, rng);
    dir = nd;
    if (transmitted) {
      region = region == Region::Host ? Region::Inclusion : Region::Host;
      pos = hit.position - kSurfaceOffset * n;
    } else {
      pos = hit.position + kSurfaceOffset * n;
    }
  }
}

std::uint64_t pixel_seed(std::uint64_t seed, int x, int y, int sample) {
  return scramble(CellIndex(x, y, sample)) ^ (seed * 0x9E3779B97F4A7C15ull);
}

Vec3 shade(const ScalarField& field, const Camera& camera, const RenderSettings& s, int x, int y,
           TraceStats& stats) {
  if (s.shading == Shading::PathTrace) {
    Vec3 sum = Vec3::Zero();
    const int spp = std::max(1, s.path.samples_per_pixel);
    for (int i = 0; i < spp; ++i) {
      SplitMix64 rng(pixel_seed(s.path.seed, x, y, i));
      const double jx = spp == 1 ? 0.5 : rng.uniform();
      const double jy = spp == 1 ? 0.5 : rng.uniform();
      sum += path_radiance(field, camera.ray(x + jx, y + jy), s, rng.next(), &stats);
    }
    return sum / spp;
  }
  Ray seg;
  if (!bounded_ray(camera.ray(x + 0.5, y + 0.5), s.bound_radius, seg)) return Vec3::Zero();
  const Hit hit = sphere_trace(field, seg, s.policy, trace_options(s), &stats);
  if (!hit.hit) return Vec3::Zero();
  if (s.shading == Shading::NormalColor) return 0.5 * (hit.normal + Vec3::Ones());
  const Vec3 l = -s.light.direction.normalized();
  return s.light.color * std::max(0.0, hit.normal.dot(l)) + Vec3::Constant(s.light.ambient);
}

}  // namespace

Vec3 path_radiance(const ScalarField& field, const Ray& ray, const RenderSettings& settings,
                   std::uint64_t seed, TraceStats* stats) {
  SplitMix64 rng(seed);
  if (settings.path.max_depth < 0) throw ConfigError("max trace depth must be >= 0");
  if (settings.path.material == PathConfig::Material::Lambertian) {
    return lambertian_path(field, ray, settings, rng, stats);
  }
  return dielectric_path(field, ray, settings, rng, stats);
}

RenderResult render(const ScalarField& field, const Camera& camera, const RenderSettings& settings) {
  camera.validate();
  settings.policy.validate();
  if (settings.tile < 1) throw ConfigError("tile size must be positive");
  RenderResult result;
  result.image = Image(camera.width, camera.height);
  const int tiles_x = (camera.width + settings.tile - 1) / settings.tile;
  const int tiles_y = (camera.height + settings.tile - 1) / settings.tile;
  const int tiles = tiles_x * tiles_y;
  int threads = settings.threads > 0 ? settings.threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, std::max(1, tiles));

  std::atomic<int> next{0};
  std::vector<TraceStats> per_thread(static_cast<std::size_t>(threads));
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&](int id) {
    try {
      for (int tile = next++; tile < tiles; tile = next++) {
        const int x0 = (tile % tiles_x) * settings.tile;
        const int y0 = (tile / tiles_x) * settings.tile;
        for (int y = y0; y < std::min(y0 + settings.tile, camera.height); ++y) {
          for (int x = x0; x < std::min(x0 + settings.tile, camera.width); ++x) {
            result.image.set(x, y, shade(field, camera, settings, x, y, per_thread[id]));
          }
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
      next = tiles;
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker, i);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  for (const TraceStats& s : per_thread) result.stats += s;
  return result;
}

DepthCalibration depth_autocalibrate(const ScalarField& field, const Camera& camera,
                                     const RenderSettings& settings, double tol, int max_depth) {
  if (!(tol > 0.0 && tol <= 0.1)) throw DomainError("calibration tolerance must lie in (0, 0.1]");
  RenderSettings s = settings;
  s.shading = Shading::PathTrace;
  DepthCalibration out;
  auto intensity = [&](int depth) {
    for (const DepthSweepPoint& p : out.sweep) {
      if (p.depth == depth) return p.intensity;
    }
    s.path.max_depth = depth;
    const double v = render(field, camera, s).image.mean_intensity();
    out.sweep.push_back({depth, v});
    return v;
  };
  int d = 0;
  for (;;) {
    const int next = std::max(1, 2 * d);
    const double a = intensity(d);
    const double b = intensity(next);
    const double scale = std::max(std::abs(b), 1e-12);
    if (std::abs(b - a) / scale < tol || next > max_depth) {
      out.depth = d;
      return out;
    }
    d = next;
  }
}

std::string encode_ppm(const Image& image) {
  std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.reserve(out.size() + image.rgb.size());
  for (float v : image.rgb) {
    const double c = std::clamp(static_cast<double>(v), 0.0, 1.0);
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * std::pow(c, 1.0 / 2.2)))));
  }
  return out;
}

void write_ppm(const Image& image, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  const std::string data = encode_ppm(image);
  f.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!f) throw ConfigError("failed writing '" + path + "'");
}

}  // namespace msdf
