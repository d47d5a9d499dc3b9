#pragma once

// The six named benchmark microstructures with parameter boxes, starting
// points and reference parameters.

#include "msdf/field.hpp"

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace msdf {

struct Microstructure {
  std::string name;
  std::vector<std::string> param_names;
  std::vector<std::pair<double, double>> bounds;
  VecX ground_truth;
  VecX initial;
  bool smooth = true;
  std::function<double(const Vec3&, const VecX&)> eval;
  std::function<double(const VecX&)> lipschitz;

  int dims() const { return static_cast<int>(bounds.size()); }
  // Throws DomainError when phi has the wrong size.
  void check(const VecX& phi) const;
  ScalarField field(const VecX& phi) const;
  // Column-wise evaluation of a 3 x N point matrix.
  VecX sample(const VecX& phi, const Eigen::Matrix3Xd& points) const;
};

std::span<const Microstructure> microstructures();

// Throws ConfigError for unknown names.
const Microstructure& microstructure(std::string_view name);

// Porous transform entries drawn uniformly from [-4, 7] with `seed`.
VecX porous_reference_transform(std::uint64_t seed = 28);

}  // namespace msdf
