// msdf: render scenes, sample fields, build dataset volumes, run fit jobs,
// benchmark step policies and calibrate path-trace depth.

#include "msdf/config.hpp"
#include "msdf/dataset.hpp"
#include "msdf/io.hpp"
#include "msdf/recon.hpp"
#include "msdf/render.hpp"
#include "msdf/scenes.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace msdf;
using nlohmann::json;

namespace {

struct Common {
  std::uint64_t seed = 1;
  CLI::Option* seed_opt = nullptr;
  std::string out;
  std::string resolution;
  std::string policy;
  std::string microstructure;
  std::string params;
  std::string scene_file;
};

void add_geometry_options(CLI::App* cmd, Common& c) {
  cmd->add_option("scene", c.scene_file, "Scene file (JSON)");
  cmd->add_option("--microstructure", c.microstructure, "Dataset field used instead of a scene file");
  cmd->add_option("--params", c.params, "Comma-separated parameters for --microstructure");
  c.seed_opt = cmd->add_option("--seed", c.seed, "Global seed");
}

VecX parse_params(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--params: cannot read '" + item + "' as a number");
    }
  }
  return Eigen::Map<VecX>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::pair<int, int> parse_resolution(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    const int w = std::stoi(text.substr(0, x));
    const int h = std::stoi(text.substr(x + 1));
    if (w < 1 || h < 1) throw std::invalid_argument(text);
    return {w, h};
  } catch (const std::exception&) {
    throw ConfigError("--resolution expects WxH, got '" + text + "'");
  }
}

// Scene from a file, or a dataset microstructure wrapped in a default scene.
SceneConfig load_scene(const Common& c) {
  SceneConfig scene;
  if (!c.scene_file.empty()) {
    try {
      scene = parse_scene(read_file(c.scene_file));
    } catch (const ParseError& e) {
      throw ParseError(c.scene_file + ":" + std::to_string(e.line) + ":" + std::to_string(e.column) +
                           ": " + e.what(),
                       e.line, e.column);
    }
  } else if (!c.microstructure.empty()) {
    const Microstructure& ms = microstructure(c.microstructure);
    json node = {{"type", "microstructure"}, {"name", ms.name}};
    if (!c.params.empty()) {
      const VecX phi = parse_params(c.params);
      ms.check(phi);
      node["params"] = std::vector<double>(phi.data(), phi.data() + phi.size());
    }
    scene.geometry = {{"type", "intersection"},
                      {"children", json::array({node, {{"type", "sphere"}, {"radius", 1.0}}})}};
  } else {
    throw ConfigError("a scene file or --microstructure is required");
  }
  if (*c.seed_opt) scene.seed = c.seed;
  if (!c.resolution.empty()) {
    const auto [w, h] = parse_resolution(c.resolution);
    scene.camera.width = w;
    scene.camera.height = h;
  }
  if (!c.policy.empty()) {
    StepPolicy::parse(c.policy).validate();
    scene.policy = c.policy;
  }
  return scene;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_file(out, text);
  }
}

int cmd_render(const Common& c, const std::string& stats_mode, const std::string& stats_out,
               const std::string& shading) {
  SceneConfig scene = load_scene(c);
  if (!shading.empty()) scene.shading = parse_shading(shading);
  if (c.out.empty()) throw ConfigError("render needs --out");
  const RenderResult result = render(scene.field(), scene.camera.camera(), scene.render_settings());
  write_file(c.out, encode_ppm(result.image));
  if (stats_mode == "json") {
    emit(stats_out, to_json(result.stats).dump(2) + "\n");
  } else if (stats_mode != "none") {
    throw ConfigError("--stats expects json or none");
  }
  return 0;
}

int cmd_dump(const Common& c, std::uint32_t n, double extent) {
  const SceneConfig scene = load_scene(c);
  if (c.out.empty()) throw ConfigError("dump-sdf needs --out");
  if (n < 1) throw ConfigError("--dims must be positive");
  if (!(extent > 0.0)) throw ConfigError("--extent must be positive");
  const Eigen::AlignedBox3d box(Vec3::Constant(-extent), Vec3::Constant(extent));
  write_volume(sample_volume(scene.field(), {n, n, n}, box), c.out);
  return 0;
}

int cmd_dataset(const Common& c, bool list, std::uint32_t n, bool with_render) {
  if (list) {
    for (const Microstructure& ms : microstructures()) std::cout << ms.name << "\n";
    return 0;
  }
  if (c.microstructure.empty()) throw ConfigError("dataset needs a microstructure name or --list");
  const Microstructure& ms = microstructure(c.microstructure);
  const VecX phi = c.params.empty() ? ms.ground_truth : parse_params(c.params);
  ms.check(phi);
  const std::string dir = c.out.empty() ? "." : c.out;
  std::filesystem::create_directories(dir);
  const Eigen::AlignedBox3d box(Vec3::Constant(-1.0), Vec3::Constant(1.0));
  write_volume(sample_volume(ms.field(phi), {n, n, n}, box), dir + "/" + ms.name + ".msdf");
  if (with_render) {
    int w = 64;
    int h = 64;
    if (!c.resolution.empty()) std::tie(w, h) = parse_resolution(c.resolution);
    RenderSettings settings;
    if (!c.policy.empty()) settings.policy = StepPolicy::parse(c.policy);
    const Image image = render_microstructure(ms, phi, default_camera(w, h), settings);
    write_file(dir + "/" + ms.name + ".ppm", encode_ppm(image));
  }
  return 0;
}

int cmd_fit(const std::string& job_file, const std::string& out, std::optional<std::int64_t> budget,
            std::optional<std::uint64_t> seed, bool timing) {
  JobConfig job;
  try {
    job = parse_job(read_file(job_file));
  } catch (const ParseError& e) {
    throw ParseError(job_file + ":" + std::to_string(e.line) + ":" + std::to_string(e.column) + ": " +
                         e.what(),
                     e.line, e.column);
  }
  if (budget) job.budget = *budget;
  if (seed) {
    job.seed = *seed;
    job.sampling.seed = sub_seed(job.seed, "sampling");
  }
  const Microstructure& ms = microstructure(job.microstructure);
  const VecX reference = job.target_params ? *job.target_params : ms.ground_truth;
  SampleSet target;
  if (!job.target_file.empty()) {
    target = volume_samples(read_volume(job.target_file));
  } else {
    target = synthesize_target(ms, reference, job.sampling);
  }
  const FitReport report = fit_parameters(ms, target, job.optimizer_config(), reference);
  json doc = to_json(report, param_space(ms), timing);
  doc["microstructure"] = ms.name;
  doc["samples"] = target.size();
  emit(out, doc.dump(2) + "\n");
  return 0;
}

int cmd_bench(const Common& c, std::vector<std::string> policies) {
  const SceneConfig scene = load_scene(c);
  if (policies.empty()) policies = {"fixed:0.5", "sphere", "poly:11,5,7"};
  const ScalarField field = scene.field();
  const Camera camera = scene.camera.camera();
  std::string table = stats_csv_header() + "\n";
  for (const std::string& name : policies) {
    RenderSettings settings = scene.render_settings();
    settings.policy = StepPolicy::parse(name);
    settings.policy.validate();
    table += stats_csv_row(settings.policy.name(), render(field, camera, settings).stats) + "\n";
  }
  emit(c.out, table);
  return 0;
}

int cmd_calibrate(const Common& c, double tol, int max_depth) {
  SceneConfig scene = load_scene(c);
  scene.shading = Shading::PathTrace;
  const DepthCalibration cal =
      depth_autocalibrate(scene.field(), scene.camera.camera(), scene.render_settings(), tol, max_depth);
  json doc;
  doc["depth"] = cal.depth;
  doc["tolerance"] = tol;
  doc["sweep"] = json::array();
  for (const DepthSweepPoint& p : cal.sweep) {
    doc["sweep"].push_back({{"depth", p.depth}, {"intensity", p.intensity}});
  }
  emit(c.out, doc.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Microstructure signed distance fields: rendering and parameter fitting"};
  app.require_subcommand(1);

  Common render_opts;
  std::string stats_mode = "none";
  std::string stats_out;
  std::string shading;
  auto* render_cmd = app.add_subcommand("render", "Render a scene to a binary PPM");
  add_geometry_options(render_cmd, render_opts);
  render_cmd->add_option("--out", render_opts.out, "Output image")->required();
  render_cmd->add_option("--resolution", render_opts.resolution, "Image size WxH");
  render_cmd->add_option("--policy", render_opts.policy, "Step policy");
  render_cmd->add_option("--shading", shading, "normal, lambert or path");
  render_cmd->add_option("--stats", stats_mode, "json or none");
  render_cmd->add_option("--stats-out", stats_out, "File for the stats JSON (default stdout)");

  Common dump_opts;
  std::uint32_t dump_dims = 64;
  double extent = 1.0;
  auto* dump_cmd = app.add_subcommand("dump-sdf", "Sample a field on a regular lattice");
  add_geometry_options(dump_cmd, dump_opts);
  dump_cmd->add_option("--out", dump_opts.out, "Output volume")->required();
  dump_cmd->add_option("--dims", dump_dims, "Samples per axis");
  dump_cmd->add_option("--extent", extent, "Half-width of the sampled cube");

  Common data_opts;
  bool list = false;
  bool with_render = false;
  std::uint32_t data_dims = 32;
  auto* data_cmd = app.add_subcommand("dataset", "Write reference volumes of the dataset fields");
  data_cmd->add_option("name", data_opts.microstructure, "Microstructure name");
  data_cmd->add_option("--microstructure", data_opts.microstructure, "Microstructure name");
  data_cmd->add_option("--params", data_opts.params, "Comma-separated parameters");
  data_cmd->add_option("--out", data_opts.out, "Output directory");
  data_cmd->add_option("--dims", data_dims, "Samples per axis");
  data_cmd->add_option("--resolution", data_opts.resolution, "Reference render size WxH");
  data_cmd->add_option("--policy", data_opts.policy, "Step policy for the reference render");
  data_cmd->add_flag("--render", with_render, "Also write a reference render");
  data_cmd->add_flag("--list", list, "List the dataset fields");
  data_opts.seed_opt = data_cmd->add_option("--seed", data_opts.seed, "Global seed");

  std::string job_file;
  std::string fit_out;
  std::int64_t fit_budget = 0;
  std::uint64_t fit_seed = 1;
  bool timing = false;
  auto* fit_cmd = app.add_subcommand("fit", "Run a parameter fitting job");
  fit_cmd->add_option("job", job_file, "Job file (JSON)")->required();
  fit_cmd->add_option("--out", fit_out, "Report file (default stdout)");
  auto* budget_opt = fit_cmd->add_option("--budget", fit_budget, "Loss evaluation budget");
  auto* fit_seed_opt = fit_cmd->add_option("--seed", fit_seed, "Global seed");
  fit_cmd->add_flag("--timing", timing, "Include wall-clock seconds in the report");

  Common bench_opts;
  std::vector<std::string> policies;
  auto* bench_cmd = app.add_subcommand("bench", "Trace statistics per step policy as CSV");
  add_geometry_options(bench_cmd, bench_opts);
  bench_cmd->add_option("--out", bench_opts.out, "CSV file (default stdout)");
  bench_cmd->add_option("--resolution", bench_opts.resolution, "Image size WxH");
  bench_cmd->add_option("--policy", policies, "Step policy; repeat for several");

  Common cal_opts;
  double tol = 0.01;
  int max_depth = 1024;
  auto* cal_cmd = app.add_subcommand("calibrate", "Raise the path-trace depth until brightness settles");
  add_geometry_options(cal_cmd, cal_opts);
  cal_cmd->add_option("--out", cal_opts.out, "Report file (default stdout)");
  cal_cmd->add_option("--resolution", cal_opts.resolution, "Image size WxH");
  cal_cmd->add_option("--tol", tol, "Relative intensity change");
  cal_cmd->add_option("--max-depth", max_depth, "Largest depth tried");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*render_cmd) return cmd_render(render_opts, stats_mode, stats_out, shading);
    if (*dump_cmd) return cmd_dump(dump_opts, dump_dims, extent);
    if (*data_cmd) return cmd_dataset(data_opts, list, data_dims, with_render);
    if (*fit_cmd) {
      return cmd_fit(job_file, fit_out, *budget_opt ? std::optional(fit_budget) : std::nullopt,
                     *fit_seed_opt ? std::optional(fit_seed) : std::nullopt, timing);
    }
    if (*bench_cmd) return cmd_bench(bench_opts, policies);
    if (*cal_cmd) return cmd_calibrate(cal_opts, tol, max_depth);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const FieldEvalError& e) {
    std::fprintf(stderr, "error: %s (ray origin %g %g %g, direction %g %g %g, t = %g)\n", e.what(),
                 e.origin.x(), e.origin.y(), e.origin.z(), e.direction.x(), e.direction.y(),
                 e.direction.z(), e.t);
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
