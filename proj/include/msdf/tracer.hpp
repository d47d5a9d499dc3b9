#pragma once

// Sphere tracing with sign handling, bisection backtracking and adaptive
// step-length policies.

#include "msdf/field.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace msdf {

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();
  double t_min = 0.0;
  double t_max = 1e9;

  // Normalizes `direction`; throws DomainError on a zero direction or t_min >= t_max.
  static Ray make(const Vec3& origin, const Vec3& direction, double t_min = 0.0, double t_max = 1e9);
  Vec3 at(double t) const { return origin + t * direction; }
};

struct TraceStats {
  std::uint64_t sdf_evals = 0;       // primitive evaluations
  std::uint64_t field_calls = 0;     // top-level field evaluations
  std::uint64_t gradient_evals = 0;  // grid-scale probes
  std::uint64_t steps = 0;
  std::uint64_t backtracks = 0;      // sign flips resolved by bisection
  std::uint64_t reverts = 0;         // over-relaxed steps undone

  TraceStats& operator+=(const TraceStats& o);
};

struct DpRule {
  enum class Kind { FmCase, ScCase };
  Kind kind = Kind::FmCase;
  double n1 = 11, n2 = 5, n3 = 7;
  double band = 0.02;
  double level = 0.5;
  double tol = 0.05;

  static DpRule fm_case(double n1, double n2, double n3, double band = 0.02) {
    return {Kind::FmCase, n1, n2, n3, band, 0.5, 0.05};
  }
  static DpRule sc_case(double level, double tol) {
    return {Kind::ScCase, 11, 5, 7, 0.05, level, tol};
  }
};

// FmCase: |fmod(p_y, n1)| < band or (|fmod(p_z, n2)| < band and |fmod(p_x, n3)| < band).
// ScCase: |sin p_x cos p_y + sin p_y cos p_z + sin p_z cos p_x - level| < tol.
bool d_p_gate(const DpRule& rule, const Vec3& p);

// Adaptive kinds over-relax the step by 1 / lerp(delta_min, 1, grid scale) and
// fall back to the plain step when consecutive bounding spheres do not overlap.
struct StepPolicy {
  enum class Kind { Fixed, PureSphere, AdaptiveEveryN, AdaptivePoly, Bijection };
  Kind kind = Kind::PureSphere;
  double delta = 0.5;      // Fixed step factor
  int every_n = 8;         // AdaptiveEveryN refresh period
  DpRule rule;             // AdaptivePoly gate
  double delta_min = 0.6;

  static StepPolicy pure_sphere() { return {}; }
  static StepPolicy fixed(double delta);
  static StepPolicy every(int n, double delta_min = 0.6);
  static StepPolicy poly(const DpRule& rule, double delta_min = 0.6);
  static StepPolicy bijection();

  void validate() const;
  std::string name() const;
  // fixed[:delta], sphere, every[:n], poly[:n1,n2,n3], bijection
  static StepPolicy parse(std::string_view text);
};

struct TraceOptions {
  double precision = 1e-5;
  int max_steps = 20000;
  int max_bisections = 40;
  bool compute_normal = true;
  double normal_eps = 1e-4;
};

struct Hit {
  bool hit = false;
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 normal = Vec3::Zero();
  bool started_inside = false;
};

// Central differences with step 0.01 on the Lipschitz-normalized field;
// clamp(|grad| * 0.5, 0, 1).
double compute_grid_scale(const ScalarField& field, const Vec3& p, TraceStats* stats = nullptr);

// Throws FieldEvalError when the field returns a non-finite value.
Hit sphere_trace(const ScalarField& field, const Ray& ray, const StepPolicy& policy,
                 const TraceOptions& options, TraceStats* stats = nullptr);

inline Hit sphere_trace(const ScalarField& field, const Ray& ray, const StepPolicy& policy,
                        double precision, TraceStats* stats = nullptr) {
  TraceOptions options;
  options.precision = precision;
  return sphere_trace(field, ray, policy, options, stats);
}

// Parameter interval of the ray inside a sphere; false when it misses.
bool clip_to_sphere(const Ray& ray, const Vec3& center, double radius, double& t0, double& t1);

}  // namespace msdf
