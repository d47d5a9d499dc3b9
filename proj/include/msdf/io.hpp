#pragma once

// Flat binary SDF volumes and JSON/CSV encodings of reports.

#include "msdf/field.hpp"
#include "msdf/optim.hpp"
#include "msdf/recon.hpp"
#include "msdf/tracer.hpp"

#include <json.hpp>

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace msdf {

// Little-endian layout: "MSDF", u32 nx ny nz, f32 xmin ymin zmin xmax ymax zmax,
// then nx * ny * nz f32 samples with x fastest.
struct Volume {
  std::array<std::uint32_t, 3> dims{0, 0, 0};
  std::array<float, 6> bounds{0, 0, 0, 0, 0, 0};
  std::vector<float> samples;

  std::size_t count() const { return std::size_t{dims[0]} * dims[1] * dims[2]; }
  // Lattice point (i, j, k); endpoints inclusive, a single sample sits at the minimum.
  Vec3 point(std::uint32_t i, std::uint32_t j, std::uint32_t k) const;
  float at(std::uint32_t i, std::uint32_t j, std::uint32_t k) const;
};

Volume sample_volume(const ScalarField& field, const std::array<std::uint32_t, 3>& dims,
                     const Eigen::AlignedBox3d& box);

std::string encode_volume(const Volume& v);
// Throws ConfigError on a malformed buffer.
Volume decode_volume(std::string_view bytes);
void write_volume(const Volume& v, const std::string& path);
Volume read_volume(const std::string& path);

// Lattice points of a volume as a sample set, in storage order.
SampleSet volume_samples(const Volume& v);

void write_file(const std::string& path, std::string_view bytes);
std::string read_file(const std::string& path);

nlohmann::json to_json(const TraceStats& s);
// wall_seconds is emitted only when `with_timing` is set so reports stay reproducible.
nlohmann::json to_json(const FitReport& r, const ParamSpace& space, bool with_timing = false);

std::string stats_csv_header();
std::string stats_csv_row(const std::string& label, const TraceStats& s);

}  // namespace msdf
