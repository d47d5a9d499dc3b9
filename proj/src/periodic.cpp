#include "msdf/periodic.hpp"

#include <cmath>
#include <string>

namespace msdf {

void SCFormula::validate() const {
  if (terms.empty()) throw ConfigError("SC formula needs at least one summand");
  for (const auto& product : terms) {
    if (product.empty()) throw ConfigError("SC summand needs at least one factor");
    for (const TrigTerm& t : product) {
      if (t.coord < 0 || t.coord > 2) throw ConfigError("trig term coordinate must be 0, 1 or 2");
      if (t.power < 0) throw ConfigError("trig term power must be non-negative");
    }
  }
}

double SCFormula::lipschitz_bound() const {
  double total = 0.0;
  for (const auto& product : terms) {
    for (std::size_t j = 0; j < product.size(); ++j) {
      const TrigTerm& tj = product[j];
      if (tj.power == 0) continue;
      const double a = std::abs(tj.amplitude);
      double bound = tj.power * std::pow(a, tj.power) * std::abs(tj.frequency);
      for (std::size_t l = 0; l < product.size(); ++l) {
        if (l != j) bound *= std::pow(std::abs(product[l].amplitude), product[l].power);
      }
      total += bound;
    }
  }
  return total;
}

double sc_eval(const SCFormula& formula, const Vec3& p) {
  double sum = formula.width;
  for (const auto& product : formula.terms) {
    double prod = 1.0;
    for (const TrigTerm& t : product) prod *= t(p);
    sum += prod;
  }
  return sum;
}

ScalarField sc_field(const SCFormula& formula) {
  formula.validate();
  const double bound = formula.lipschitz_bound();
  return ScalarField(
      [formula](const Vec3& p) {
        instrument::count_primitive();
        return sc_eval(formula, p);
      },
      bound > 0.0 ? bound : 1.0);
}

HashCoefficients spheres2d_coefficients() {
  HashCoefficients c;
  c.n = 3;
  return c;
}

TpmsKind tpms_kind(std::string_view name) {
  if (name == "gyroid") return TpmsKind::Gyroid;
  if (name == "diamond") return TpmsKind::Diamond;
  if (name == "primitive") return TpmsKind::Primitive;
  throw ConfigError("unknown TPMS '" + std::string(name) + "'");
}

}  // namespace msdf
