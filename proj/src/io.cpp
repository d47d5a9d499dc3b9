#include "msdf/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace msdf {

namespace {

constexpr char kMagic[4] = {'M', 'S', 'D', 'F'};
constexpr std::size_t kHeaderBytes = 4 + 3 * 4 + 6 * 4;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

void put_f32(std::string& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

std::uint32_t get_u32(std::string_view in, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  }
  return v;
}

float get_f32(std::string_view in, std::size_t offset) {
  return std::bit_cast<float>(get_u32(in, offset));
}

double lattice_coord(float lo, float hi, std::uint32_t n, std::uint32_t i) {
  if (n <= 1) return lo;
  return lo + (static_cast<double>(hi) - lo) * i / (n - 1);
}

}  // namespace

Vec3 Volume::point(std::uint32_t i, std::uint32_t j, std::uint32_t k) const {
  return Vec3(lattice_coord(bounds[0], bounds[3], dims[0], i),
              lattice_coord(bounds[1], bounds[4], dims[1], j),
              lattice_coord(bounds[2], bounds[5], dims[2], k));
}

float Volume::at(std::uint32_t i, std::uint32_t j, std::uint32_t k) const {
  return samples[(std::size_t{k} * dims[1] + j) * dims[0] + i];
}

Volume sample_volume(const ScalarField& field, const std::array<std::uint32_t, 3>& dims,
                     const Eigen::AlignedBox3d& box) {
  for (std::uint32_t d : dims) {
    if (d == 0) throw DomainError("volume dims must be positive");
  }
  if (box.isEmpty()) throw DomainError("volume bounds are empty");
  Volume v;
  v.dims = dims;
  v.bounds = {float(box.min().x()), float(box.min().y()), float(box.min().z()),
              float(box.max().x()), float(box.max().y()), float(box.max().z())};
  v.samples.reserve(v.count());
  for (std::uint32_t k = 0; k < dims[2]; ++k) {
    for (std::uint32_t j = 0; j < dims[1]; ++j) {
      for (std::uint32_t i = 0; i < dims[0]; ++i) {
        v.samples.push_back(static_cast<float>(field(v.point(i, j, k))));
      }
    }
  }
  return v;
}

std::string encode_volume(const Volume& v) {
  if (v.samples.size() != v.count()) throw ContractError("volume sample count does not match dims");
  std::string out(kMagic, 4);
  out.reserve(kHeaderBytes + 4 * v.samples.size());
  for (std::uint32_t d : v.dims) put_u32(out, d);
  for (float b : v.bounds) put_f32(out, b);
  for (float s : v.samples) put_f32(out, s);
  return out;
}

Volume decode_volume(std::string_view bytes) {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw ConfigError("not an MSDF volume");
  }
  Volume v;
  for (int i = 0; i < 3; ++i) v.dims[i] = get_u32(bytes, 4 + 4 * i);
  for (int i = 0; i < 6; ++i) v.bounds[i] = get_f32(bytes, 16 + 4 * i);
  const std::size_t n = v.count();
  if (bytes.size() != kHeaderBytes + 4 * n) throw ConfigError("MSDF volume is truncated or oversized");
  v.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) v.samples[i] = get_f32(bytes, kHeaderBytes + 4 * i);
  return v;
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_volume(const Volume& v, const std::string& path) { write_file(path, encode_volume(v)); }

Volume read_volume(const std::string& path) { return decode_volume(read_file(path)); }

SampleSet volume_samples(const Volume& v) {
  SampleSet s;
  s.dims = {int(v.dims[2]), int(v.dims[1]), int(v.dims[0])};
  s.points.resize(3, static_cast<Eigen::Index>(v.count()));
  s.values.resize(static_cast<Eigen::Index>(v.count()));
  Eigen::Index c = 0;
  for (std::uint32_t k = 0; k < v.dims[2]; ++k) {
    for (std::uint32_t j = 0; j < v.dims[1]; ++j) {
      for (std::uint32_t i = 0; i < v.dims[0]; ++i, ++c) {
        s.points.col(c) = v.point(i, j, k);
        s.values[c] = v.at(i, j, k);
      }
    }
  }
  return s;
}

nlohmann::json to_json(const TraceStats& s) {
  return {{"sdf_evals", s.sdf_evals},   {"field_calls", s.field_calls},
          {"gradient_evals", s.gradient_evals}, {"steps", s.steps},
          {"backtracks", s.backtracks}, {"reverts", s.reverts}};
}

nlohmann::json to_json(const FitReport& r, const ParamSpace& space, bool with_timing) {
  nlohmann::json j;
  j["method"] = r.method;
  nlohmann::json phi = nlohmann::json::object();
  for (Eigen::Index i = 0; i < r.phi_hat.size(); ++i) {
    const std::string key = static_cast<std::size_t>(i) < space.names.size()
                                ? space.names[static_cast<std::size_t>(i)]
                                : "p" + std::to_string(i);
    phi[key] = r.phi_hat[i];
  }
  j["phi_hat"] = phi;
  j["loss"] = r.loss;
  nlohmann::json trace = nlohmann::json::array();
  for (const TracePoint& t : r.loss_trace) trace.push_back({t.eval, t.loss});
  j["loss_trace"] = trace;
  if (r.val_error >= 0.0) j["val_error"] = r.val_error;
  j["evals"] = r.evals;
  j["converged"] = r.converged;
  j["unsupported"] = r.unsupported;
  if (!r.message.empty()) j["message"] = r.message;
  if (with_timing) j["wall_seconds"] = r.wall_seconds;
  return j;
}

std::string stats_csv_header() {
  return "policy,sdf_evals,field_calls,gradient_evals,steps,backtracks,reverts\n";
}

std::string stats_csv_row(const std::string& label, const TraceStats& s) {
  std::ostringstream ss;
  if (label.find_first_of(",\"") != std::string::npos) {
    ss << '"';
    for (char c : label) ss << (c == '"' ? std::string("\"\"") : std::string(1, c));
    ss << '"';
  } else {
    ss << label;
  }
  ss << ',' << s.sdf_evals << ',' << s.field_calls << ',' << s.gradient_evals << ','
     << s.steps << ',' << s.backtracks << ',' << s.reverts << '\n';
  return ss.str();
}

}  // namespace msdf
