#pragma once

// Full-lattice Moore-neighbourhood SDFs with integer lattice subset rules.

#include "msdf/field.hpp"
#include "msdf/hashgrid.hpp"
#include "msdf/particulate.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace msdf {

// Exact range for lattice polynomial values.
__extension__ typedef __int128 Int128;

struct AggloParticle {
  Vec3 c = Vec3::Constant(0.5);  // centre relative to the cell origin
  double r = 0.05;               // radius, scene units
};

struct Monomial {
  std::int64_t coef = 0;
  int ex = 0, ey = 0, ez = 0;
};

// Integer polynomial in (q_x, q_y, q_z), evaluated exactly in 128-bit.
struct IntPolynomial {
  std::vector<Monomial> terms;

  Int128 operator()(const CellIndex& q) const;
  int degree() const;
};

// q_x + q_y + n round(B_x) or q_y + q_x q_y + n round(B_y) with
//   B = (1-t)^2 q + 2 (1-t) (q + n_i) + t^2 (q - n_i).
// t is quantised to multiples of 2^-16 so B is rounded in exact arithmetic.
struct BezierPolynomial {
  enum class Which { First, Second };
  Which which = Which::First;
  std::int64_t n1 = 0, n2 = 0, n = 1;
  std::int64_t t_num = 0;     // t = t_num / 65536
  bool per_cell_t = false;    // draw t from scramble(q) instead

  static constexpr std::int64_t kTDen = 65536;
  static std::int64_t quantise(double t);

  Int128 operator()(const CellIndex& q) const;
};

using LatticePolynomial = std::variant<IntPolynomial, BezierPolynomial>;

Int128 eval_polynomial(const LatticePolynomial& poly, const CellIndex& q);

enum class Reduce { Or, And };

struct ClassSelector {
  int c = 1;            // +1 selects the class, -1 excludes it
  std::int64_t m = 0;   // 0 <= m < modulus
};

// Strict open interval; nullopt is unbounded.
struct Band {
  std::optional<std::int64_t> lo;
  std::optional<std::int64_t> hi;
};

struct LatticeRule {
  enum class Mode { Congruence, Inequality };
  Mode mode = Mode::Congruence;
  std::vector<LatticePolynomial> polys;
  std::vector<std::int64_t> moduli;                 // Congruence
  std::vector<std::vector<ClassSelector>> classes;  // Congruence, one list per poly
  std::vector<Band> bands;                          // Inequality, one per poly
  Reduce inner = Reduce::Or;
  Reduce outer = Reduce::Or;

  void validate() const;

  static LatticeRule always(bool value);
};

bool eval_rule(const LatticeRule& rule, const CellIndex& q);

// Whether D is applied to each contributing cell or must hold on all 27.
enum class RuleGating { PerCell, Conjunction27 };

ScalarField agglomerate_sdf(const GridSpec& grid, const AggloParticle& particle,
                            const OffsetFunction& f = {}, const WarpFunction& h = {});

ScalarField subset_sdf(const GridSpec& grid, const AggloParticle& particle, const LatticeRule& rule,
                       const OffsetFunction& f = {}, const WarpFunction& h = {},
                       RuleGating gating = RuleGating::PerCell);

LatticeRule bezier_gel_rule(std::int64_t n1, std::int64_t n2, std::int64_t n, double t,
                            bool per_cell_t = false);

ScalarField meso_surface_sdf(const GridSpec& grid, const AggloParticle& particle,
                             const std::vector<IntPolynomial>& polys, const std::vector<Band>& bands,
                             const OffsetFunction& f = {}, const WarpFunction& h = {});

// 2 q_x + q_y^2 + q_z^2 - q_x q_y - q_y q_z - q_z q_x
IntPolynomial quadric_surface_polynomial();

}  // namespace msdf
