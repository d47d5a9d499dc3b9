#pragma once

// Declarative scene and fit-job files (JSON with a schema version).

#include "msdf/recon.hpp"
#include "msdf/render.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace msdf {

inline constexpr int kSchemaVersion = 1;

// Thrown for malformed JSON; carries the 1-based line and column.
struct ParseError : ConfigError {
  ParseError(const std::string& what, int line, int column)
      : ConfigError(what), line(line), column(column) {}
  int line;
  int column;
};

// Sub-seed for a named subsystem derived from the global seed.
std::uint64_t sub_seed(std::uint64_t seed, std::string_view tag);

struct CameraSpec {
  Vec3 eye{0.0, 0.0, -3.0};
  Vec3 target = Vec3::Zero();
  Vec3 up = Vec3::UnitY();
  double fov_y = 40.0;
  int width = 64;
  int height = 64;

  Camera camera() const;
};

struct SceneConfig {
  int schema_version = kSchemaVersion;
  nlohmann::json geometry;
  CameraSpec camera;
  Shading shading = Shading::NormalColor;
  Light light;
  PathConfig path;
  std::string policy = "sphere";
  double precision = 1e-4;
  double bound_radius = 1.0;
  std::uint64_t seed = 1;

  ScalarField field() const;
  RenderSettings render_settings() const;
};

// Builds a field from a tagged geometry node; errors name the JSON path.
ScalarField build_field(const nlohmann::json& node, const std::string& path = "geometry");

SceneConfig parse_scene(std::string_view text);
std::string emit_scene(const SceneConfig& scene);

struct JobConfig {
  int schema_version = kSchemaVersion;
  std::string microstructure;
  std::optional<VecX> target_params;  // defaults to the reference parameters
  std::string target_file;            // MSDF volume; overrides target_params
  std::optional<VecX> initial;
  std::string optimizer = "cma-es";
  std::int64_t budget = 20000;
  std::uint64_t seed = 1;
  int population = 0;
  double sigma0 = 0.3;
  int restarts = 20;
  SamplingSpec sampling;

  OptimizerConfig optimizer_config() const;
};

JobConfig parse_job(std::string_view text);
std::string emit_job(const JobConfig& job);

Shading parse_shading(std::string_view name);
std::string shading_name(Shading s);

}  // namespace msdf
