#include "msdf/config.hpp"

#include "msdf/agglomerate.hpp"
#include "msdf/dataset.hpp"
#include "msdf/hashgrid.hpp"
#include "msdf/io.hpp"
#include "msdf/particulate.hpp"
#include "msdf/periodic.hpp"
#include "msdf/piling.hpp"
#include "msdf/scenes.hpp"
#include "msdf/sdf.hpp"

#include <cmath>

namespace msdf {

using nlohmann::json;

std::uint64_t sub_seed(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  SplitMix64 mix(seed ^ h);
  return mix.next();
}

Camera CameraSpec::camera() const {
  return Camera::look_at(eye, target, up, fov_y, width, height);
}

Shading parse_shading(std::string_view name) {
  if (name == "normal") return Shading::NormalColor;
  if (name == "lambert") return Shading::Lambert;
  if (name == "path") return Shading::PathTrace;
  throw ConfigError("unknown shading '" + std::string(name) + "'");
}

std::string shading_name(Shading s) {
  switch (s) {
    case Shading::NormalColor: return "normal";
    case Shading::Lambert: return "lambert";
    case Shading::PathTrace: return "path";
  }
  return "normal";
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

const json& require(const json& node, const char* key, const std::string& path) {
  if (!node.is_object()) fail(path, "expected an object");
  const auto it = node.find(key);
  if (it == node.end()) fail(path, std::string("missing '") + key + "'");
  return *it;
}

double number(const json& node, const char* key, const std::string& path) {
  const json& v = require(node, key, path);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

double number_or(const json& node, const char* key, double fallback, const std::string& path) {
  return node.contains(key) ? number(node, key, path) : fallback;
}

std::int64_t integer_or(const json& node, const char* key, std::int64_t fallback,
                        const std::string& path) {
  if (!node.contains(key)) return fallback;
  const json& v = node.at(key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<std::int64_t>();
}

std::string string_or(const json& node, const char* key, const std::string& fallback,
                      const std::string& path) {
  if (!node.contains(key)) return fallback;
  const json& v = node.at(key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

bool bool_or(const json& node, const char* key, bool fallback, const std::string& path) {
  if (!node.contains(key)) return fallback;
  const json& v = node.at(key);
  if (!v.is_boolean()) fail(path + "." + key, "expected true or false");
  return v.get<bool>();
}

VecX vector_of(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  VecX out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "expected a number");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

Vec3 vec3(const json& node, const char* key, const std::string& path) {
  const VecX v = vector_of(require(node, key, path), path + "." + key);
  if (v.size() != 3) fail(path + "." + key, "expected three numbers");
  return v;
}

Vec3 vec3_or(const json& node, const char* key, const Vec3& fallback, const std::string& path) {
  return node.contains(key) ? vec3(node, key, path) : fallback;
}

json to_array(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json to_array(const VecX& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ScalarField child(const json& node, const char* key, const std::string& path) {
  return build_field(require(node, key, path), path + "." + key);
}

ScalarField fold_children(const json& node, const std::string& path,
                          ScalarField (*op)(const ScalarField&, const ScalarField&)) {
  const json& kids = require(node, "children", path);
  if (!kids.is_array() || kids.empty()) fail(path + ".children", "expected a non-empty array");
  ScalarField acc = build_field(kids[0], path + ".children[0]");
  for (std::size_t i = 1; i < kids.size(); ++i) {
    acc = op(acc, build_field(kids[i], path + ".children[" + std::to_string(i) + "]"));
  }
  return acc;
}

GridSpec grid_from(const json& node, const std::string& path) {
  GridSpec grid;
  grid.w = number(node, "w", path);
  grid.coeffs.salt = static_cast<std::uint64_t>(integer_or(node, "salt", 0, path));
  return grid;
}

SizeLaw size_law(const json& node, const std::string& path) {
  if (node.is_number()) return SizeLaw::fixed(node.get<double>());
  const std::string kind = string_or(node, "kind", "fixed", path);
  if (kind == "fixed") return SizeLaw::fixed(number(node, "s", path));
  if (kind == "uniform") return SizeLaw::uniform(number(node, "lo", path), number(node, "hi", path));
  if (kind == "normal") return SizeLaw::normal(number(node, "mean", path), number(node, "stddev", path));
  fail(path + ".kind", "unknown size law '" + kind + "'");
}

ScalarField tpms_field(const json& node, const std::string& path) {
  const TpmsKind kind = tpms_kind(string_or(node, "kind", "gyroid", path));
  const double cell = number_or(node, "cell", 0.25, path);
  const double thickness = number_or(node, "thickness", 0.0, path);
  if (!(cell > 0.0)) fail(path + ".cell", "must be positive");
  const double k = 2.0 * kPi / cell;
  const double bound = kind == TpmsKind::Primitive ? std::sqrt(3.0) * k
                       : kind == TpmsKind::Gyroid  ? 3.0 * std::sqrt(2.0) * k
                                                   : 4.0 * std::sqrt(3.0) * k;
  return ScalarField(
      [kind, cell, thickness](const Vec3& p) {
        instrument::count_primitive();
        return tpms(kind, p, cell, thickness);
      },
      bound);
}

ScalarField piling_field(const json& node, const std::string& path) {
  GridSpec grid = grid_from(node, path);
  grid.neighborhood = Neighborhood::Moore27;
  PilingConfig cfg;
  cfg.theta = RealPolynomial::constant(number_or(node, "theta", 0.0, path));
  cfg.deform = RealPolynomial::constant(number_or(node, "deform", 0.0, path));
  const std::string noise = string_or(node, "noise", "perlin", path);
  if (noise == "perlin") {
    cfg.noise = NoiseKind::Perlin;
  } else if (noise == "sparse") {
    cfg.noise = NoiseKind::SparseConvolution;
  } else if (noise == "constant") {
    cfg.noise = NoiseKind::Constant;
  } else {
    fail(path + ".noise", "unknown noise '" + noise + "'");
  }
  cfg.noise_frequency = number_or(node, "noise_frequency", 1.0, path);
  const std::string axis = string_or(node, "axis", "z", path);
  if (axis == "x") {
    cfg.axis = RotationAxis::X;
  } else if (axis == "y") {
    cfg.axis = RotationAxis::Y;
  } else if (axis == "z") {
    cfg.axis = RotationAxis::Z;
  } else if (axis == "xyz") {
    cfg.axis = RotationAxis::XYZ;
  } else {
    fail(path + ".axis", "unknown rotation axis '" + axis + "'");
  }
  return piling_sdf(grid, cfg);
}

FibreModel fibre_model(const std::string& name, const std::string& path) {
  if (name == "periodic") return FibreModel::Periodic;
  if (name == "direct") return FibreModel::Direct;
  if (name == "agglomeration") return FibreModel::Agglomeration;
  fail(path + ".model", "unknown fibre model '" + name + "'");
}

}  // namespace

ScalarField build_field(const json& node, const std::string& path) {
  if (!node.is_object()) fail(path, "expected a geometry object");
  const std::string type = string_or(node, "type", "", path);
  try {
    if (type == "sphere") return sphere(vec3_or(node, "center", Vec3::Zero(), path), number(node, "radius", path));
    if (type == "ellipsoid") return ellipsoid(vec3_or(node, "center", Vec3::Zero(), path), vec3(node, "semi_axes", path));
    if (type == "box") return box(vec3_or(node, "center", Vec3::Zero(), path), vec3(node, "half_extents", path));
    if (type == "plane") return plane(vec3(node, "normal", path), number_or(node, "offset", 0.0, path));
    if (type == "cylinder") {
      return cylinder(vec3(node, "axis", path), number(node, "radius", path),
                      vec3_or(node, "point", Vec3::Zero(), path));
    }
    if (type == "union") return fold_children(node, path, &union_of);
    if (type == "intersection") return fold_children(node, path, &intersection);
    if (type == "subtraction") return subtraction(child(node, "a", path), child(node, "b", path));
    if (type == "smooth_min") return smooth_min(child(node, "a", path), child(node, "b", path), number(node, "k", path));
    if (type == "negate") return negate(child(node, "child", path));
    if (type == "microstructure") {
      const Microstructure& ms = microstructure(string_or(node, "name", "", path));
      const VecX phi = node.contains("params") ? vector_of(node.at("params"), path + ".params") : ms.ground_truth;
      return ms.field(phi);
    }
    if (type == "gyroid_layer") return gyroid_layer(number(node, "eta", path), number_or(node, "level", 0.3, path));
    if (type == "two_scale_gyroid") {
      return two_scale_gyroid_scene(number_or(node, "coarse", 10.0, path), number_or(node, "fine", 200.0, path));
    }
    if (type == "fibres") {
      return fibre_field(fibre_model(string_or(node, "model", "periodic", path), path),
                         number(node, "eta", path), number_or(node, "rho", 0.3, path));
    }
    if (type == "bubble_cloud") {
      return bubble_cloud(number_or(node, "w", 0.2, path), number_or(node, "size", 0.5, path),
                          static_cast<std::uint64_t>(integer_or(node, "salt", 0, path)));
    }
    if (type == "suspended") {
      const GridSpec grid = grid_from(node, path);
      ParticleRecipe recipe;
      if (node.contains("size")) recipe.size = size_law(node.at("size"), path + ".size");
      const std::string shape = string_or(node, "shape", "sphere", path);
      if (shape == "ellipsoid") {
        recipe.shape = ParticleRecipe::Shape::Ellipsoid;
        recipe.axes = vec3_or(node, "axes", recipe.axes, path);
      } else if (shape != "sphere") {
        fail(path + ".shape", "unknown particle shape '" + shape + "'");
      }
      const std::int64_t correlation = integer_or(node, "correlation", 0, path);
      if (correlation > 0) recipe.accept = modular_correlation_g(static_cast<int>(correlation));
      return suspended_sdf(grid, recipe);
    }
    if (type == "agglomerate") {
      GridSpec grid = grid_from(node, path);
      grid.neighborhood = Neighborhood::Moore27;
      AggloParticle particle;
      particle.r = number(node, "r", path);
      if (!node.contains("bezier")) return agglomerate_sdf(grid, particle);
      const json& b = node.at("bezier");
      const std::string bp = path + ".bezier";
      const LatticeRule rule = bezier_gel_rule(integer_or(b, "n1", 3, bp), integer_or(b, "n2", 5, bp),
                                               integer_or(b, "n", 2, bp), number_or(b, "t", 0.5, bp),
                                               bool_or(b, "animated", false, bp));
      return subset_sdf(grid, particle, rule);
    }
    if (type == "piling") return piling_field(node, path);
    if (type == "tpms") return tpms_field(node, path);
  } catch (const ParseError&) {
    throw;
  } catch (const DomainError& e) {
    fail(path, e.what());
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    if (what.rfind("geometry", 0) == 0) throw;
    fail(path, what);
  }
  fail(path + ".type", type.empty() ? "missing geometry type" : "unknown geometry type '" + type + "'");
}

namespace {

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    int line = 1;
    int column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError("parse error at line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + e.what(),
                     line, column);
  }
}

void check_schema(const json& root) {
  if (!root.is_object()) fail("$", "expected an object");
  const std::int64_t version = integer_or(root, "schema_version", -1, "$");
  if (version != kSchemaVersion) {
    fail("schema_version", "expected " + std::to_string(kSchemaVersion) + ", got " + std::to_string(version));
  }
}

std::uint64_t seed_of(const json& node, const std::string& path) {
  const std::int64_t s = integer_or(node, "seed", 1, path);
  if (s < 0) fail(path + ".seed", "must be non-negative");
  return static_cast<std::uint64_t>(s);
}

}  // namespace

ScalarField SceneConfig::field() const { return build_field(geometry); }

RenderSettings SceneConfig::render_settings() const {
  RenderSettings s;
  s.shading = shading;
  s.policy = StepPolicy::parse(policy);
  s.precision = precision;
  s.bound_radius = bound_radius;
  s.light = light;
  s.path = path;
  s.path.seed = sub_seed(seed, "path");
  return s;
}

SceneConfig parse_scene(std::string_view text) {
  const json root = parse_json(text);
  check_schema(root);
  SceneConfig sc;
  sc.geometry = require(root, "geometry", "$");
  build_field(sc.geometry);
  if (root.contains("camera")) {
    const json& c = root.at("camera");
    CameraSpec& cam = sc.camera;
    cam.eye = vec3_or(c, "eye", cam.eye, "camera");
    cam.target = vec3_or(c, "target", cam.target, "camera");
    cam.up = vec3_or(c, "up", cam.up, "camera");
    cam.fov_y = number_or(c, "fov_y", cam.fov_y, "camera");
    cam.width = static_cast<int>(integer_or(c, "width", cam.width, "camera"));
    cam.height = static_cast<int>(integer_or(c, "height", cam.height, "camera"));
    cam.camera().validate();
  }
  sc.shading = parse_shading(string_or(root, "shading", "normal", "$"));
  if (root.contains("light")) {
    const json& l = root.at("light");
    sc.light.direction = vec3_or(l, "direction", sc.light.direction, "light").normalized();
    sc.light.color = vec3_or(l, "color", sc.light.color, "light");
    sc.light.ambient = number_or(l, "ambient", sc.light.ambient, "light");
  }
  if (root.contains("path")) {
    const json& p = root.at("path");
    PathConfig& pc = sc.path;
    const std::string material = string_or(p, "material", "dielectric", "path");
    if (material == "dielectric") {
      pc.material = PathConfig::Material::Dielectric;
    } else if (material == "lambertian") {
      pc.material = PathConfig::Material::Lambertian;
    } else {
      fail("path.material", "unknown material '" + material + "'");
    }
    pc.max_depth = static_cast<int>(integer_or(p, "max_depth", pc.max_depth, "path"));
    pc.samples_per_pixel = static_cast<int>(integer_or(p, "samples_per_pixel", pc.samples_per_pixel, "path"));
    pc.russian_roulette = bool_or(p, "russian_roulette", pc.russian_roulette, "path");
    pc.container_radius = number_or(p, "container_radius", pc.container_radius, "path");
    pc.host_ior = number_or(p, "host_ior", pc.host_ior, "path");
    pc.inclusion_ior = number_or(p, "inclusion_ior", pc.inclusion_ior, "path");
    pc.host_absorption = number_or(p, "host_absorption", pc.host_absorption, "path");
    pc.albedo = number_or(p, "albedo", pc.albedo, "path");
    pc.sky = vec3_or(p, "sky", pc.sky, "path");
    if (pc.max_depth < 0) fail("path.max_depth", "must be non-negative");
    if (pc.samples_per_pixel < 1) fail("path.samples_per_pixel", "must be positive");
  }
  sc.policy = string_or(root, "policy", sc.policy, "$");
  try {
    StepPolicy::parse(sc.policy).validate();
  } catch (const std::exception& e) {
    fail("policy", e.what());
  }
  sc.precision = number_or(root, "precision", sc.precision, "$");
  sc.bound_radius = number_or(root, "bound_radius", sc.bound_radius, "$");
  sc.seed = seed_of(root, "$");
  if (!(sc.precision > 0.0)) fail("precision", "must be positive");
  return sc;
}

std::string emit_scene(const SceneConfig& sc) {
  json root;
  root["schema_version"] = sc.schema_version;
  root["geometry"] = sc.geometry;
  root["camera"] = {{"eye", to_array(sc.camera.eye)},       {"target", to_array(sc.camera.target)},
                    {"up", to_array(sc.camera.up)},         {"fov_y", sc.camera.fov_y},
                    {"width", sc.camera.width},             {"height", sc.camera.height}};
  root["shading"] = shading_name(sc.shading);
  root["light"] = {{"direction", to_array(sc.light.direction)},
                   {"color", to_array(sc.light.color)},
                   {"ambient", sc.light.ambient}};
  const PathConfig& pc = sc.path;
  root["path"] = {{"material", pc.material == PathConfig::Material::Dielectric ? "dielectric" : "lambertian"},
                  {"max_depth", pc.max_depth},
                  {"samples_per_pixel", pc.samples_per_pixel},
                  {"russian_roulette", pc.russian_roulette},
                  {"container_radius", pc.container_radius},
                  {"host_ior", pc.host_ior},
                  {"inclusion_ior", pc.inclusion_ior},
                  {"host_absorption", pc.host_absorption},
                  {"albedo", pc.albedo},
                  {"sky", to_array(pc.sky)}};
  root["policy"] = sc.policy;
  root["precision"] = sc.precision;
  root["bound_radius"] = sc.bound_radius;
  root["seed"] = sc.seed;
  return root.dump(2) + "\n";
}

OptimizerConfig JobConfig::optimizer_config() const {
  OptimizerConfig c = OptimizerConfig::parse(optimizer);
  c.set_budget(budget);
  c.set_seed(sub_seed(seed, "optimizer"));
  c.cma.population = population;
  c.cma.sigma0 = sigma0;
  c.cma.restarts = restarts;
  c.initial = initial;
  return c;
}

JobConfig parse_job(std::string_view text) {
  const json root = parse_json(text);
  check_schema(root);
  JobConfig job;
  job.microstructure = string_or(root, "microstructure", "", "$");
  const Microstructure& ms = microstructure(job.microstructure);
  if (root.contains("target_params")) {
    job.target_params = vector_of(root.at("target_params"), "target_params");
    if (job.target_params->size() != ms.dims()) fail("target_params", "wrong number of parameters");
  }
  if (root.contains("initial")) {
    job.initial = vector_of(root.at("initial"), "initial");
    if (job.initial->size() != ms.dims()) fail("initial", "wrong number of parameters");
    const ParamSpace space = param_space(ms);
    if (!space.contains(*job.initial)) fail("initial", "outside the parameter bounds");
  }
  job.target_file = string_or(root, "target_file", "", "$");
  job.optimizer = string_or(root, "optimizer", job.optimizer, "$");
  OptimizerConfig::parse(job.optimizer);
  job.budget = integer_or(root, "budget", job.budget, "$");
  if (job.budget < 1) fail("budget", "must be positive");
  job.seed = seed_of(root, "$");
  job.population = static_cast<int>(integer_or(root, "population", job.population, "$"));
  job.sigma0 = number_or(root, "sigma0", job.sigma0, "$");
  job.restarts = static_cast<int>(integer_or(root, "restarts", job.restarts, "$"));
  if (root.contains("sampling")) {
    const json& s = root.at("sampling");
    if (s.contains("dims")) {
      const VecX d = vector_of(s.at("dims"), "sampling.dims");
      if (d.size() != 3) fail("sampling.dims", "expected three integers");
      for (int i = 0; i < 3; ++i) job.sampling.dims[i] = static_cast<int>(d[i]);
    }
    job.sampling.spacing = number_or(s, "spacing", job.sampling.spacing, "sampling");
    job.sampling.sigma = number_or(s, "sigma", job.sampling.sigma, "sampling");
  }
  job.sampling.seed = sub_seed(job.seed, "sampling");
  return job;
}

std::string emit_job(const JobConfig& job) {
  json root;
  root["schema_version"] = job.schema_version;
  root["microstructure"] = job.microstructure;
  if (job.target_params) root["target_params"] = to_array(*job.target_params);
  if (!job.target_file.empty()) root["target_file"] = job.target_file;
  if (job.initial) root["initial"] = to_array(*job.initial);
  root["optimizer"] = job.optimizer;
  root["budget"] = job.budget;
  root["seed"] = job.seed;
  root["population"] = job.population;
  root["sigma0"] = job.sigma0;
  root["restarts"] = job.restarts;
  root["sampling"] = {{"dims", json::array({job.sampling.dims[0], job.sampling.dims[1], job.sampling.dims[2]})},
                      {"spacing", job.sampling.spacing},
                      {"sigma", job.sampling.sigma}};
  return root.dump(2) + "\n";
}

}  // namespace msdf
