#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace msdf {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;

// Thrown when an argument lies outside the mathematical domain of an operation.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Thrown for inconsistent scene, recipe, rule or job configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when two operands violate a shape/size contract.
struct ContractError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DegenerateNormalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A field returned a non-finite value while tracing.
struct FieldEvalError : std::runtime_error {
  FieldEvalError(const std::string& what, Vec3 origin, Vec3 dir, double t)
      : std::runtime_error(what), origin(origin), direction(dir), t(t) {}
  Vec3 origin;
  Vec3 direction;
  double t;
};

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace msdf
