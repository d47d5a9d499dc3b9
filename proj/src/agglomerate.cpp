#include "msdf/agglomerate.hpp"

#include "msdf/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace msdf {

namespace {

Int128 ipow(Int128 base, int e) {
  Int128 out = 1;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

// Nearest integer to num / den for den > 0, halves rounded up.
Int128 round_div(Int128 num, Int128 den) {
  const Int128 twice = 2 * num + den;
  const Int128 d2 = 2 * den;
  Int128 q = twice / d2;
  if (twice % d2 != 0 && twice < 0) --q;
  return q;
}

Int128 mod_nonneg(Int128 v, std::int64_t m) {
  Int128 r = v % m;
  if (r < 0) r += m;
  return r;
}

bool reduce_init(Reduce op) { return op == Reduce::And; }

}  // namespace

Int128 IntPolynomial::operator()(const CellIndex& q) const {
  Int128 sum = 0;
  for (const Monomial& t : terms) {
    sum += static_cast<Int128>(t.coef) * ipow(q.x(), t.ex) * ipow(q.y(), t.ey) * ipow(q.z(), t.ez);
  }
  return sum;
}

int IntPolynomial::degree() const {
  int d = 0;
  for (const Monomial& t : terms) {
    if (t.coef != 0) d = std::max(d, t.ex + t.ey + t.ez);
  }
  return d;
}

std::int64_t BezierPolynomial::quantise(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("Bezier parameter t must lie in [0, 1]");
  return static_cast<std::int64_t>(std::llround(t * kTDen));
}

Int128 BezierPolynomial::operator()(const CellIndex& q) const {
  const Int128 a = per_cell_t ? static_cast<Int128>(scramble(q) >> 48) : t_num;
  const Int128 D = kTDen;
  const Int128 v = which == Which::First ? q.x() : q.y();
  const Int128 ni = which == Which::First ? n1 : n2;
  // B * D^2 = (D - a)^2 v + 2 (D - a) D (v + n_i) + a^2 (v - n_i)
  const Int128 scaled = (D - a) * (D - a) * v + 2 * (D - a) * D * (v + ni) + a * a * (v - ni);
  const Int128 b = round_div(scaled, D * D);
  if (which == Which::First) return static_cast<Int128>(q.x()) + q.y() + n * b;
  return static_cast<Int128>(q.y()) + static_cast<Int128>(q.x()) * q.y() + n * b;
}

Int128 eval_polynomial(const LatticePolynomial& poly, const CellIndex& q) {
  return std::visit([&q](const auto& p) { return p(q); }, poly);
}

void LatticeRule::validate() const {
  if (polys.empty()) throw ConfigError("lattice rule needs at least one polynomial");
  if (mode == Mode::Congruence) {
    if (moduli.size() != polys.size() || classes.size() != polys.size()) {
      throw ConfigError("lattice rule needs one modulus and one class list per polynomial");
    }
    for (std::size_t i = 0; i < polys.size(); ++i) {
      if (moduli[i] < 1) throw ConfigError("lattice rule moduli must be >= 1");
      if (static_cast<std::int64_t>(classes[i].size()) > moduli[i]) {
        throw ConfigError("more class selectors than residues");
      }
      for (const ClassSelector& s : classes[i]) {
        if (s.c != 1 && s.c != -1) throw ConfigError("class selector sign must be +1 or -1");
        if (s.m < 0 || s.m >= moduli[i]) throw ConfigError("class residue outside [0, modulus)");
      }
    }
  } else {
    if (bands.size() != polys.size()) throw ConfigError("lattice rule needs one band per polynomial");
    for (const Band& b : bands) {
      if (b.lo && b.hi && !(*b.lo < *b.hi)) throw ConfigError("band needs lo < hi");
    }
  }
  for (const auto& p : polys) {
    if (const auto* ip = std::get_if<IntPolynomial>(&p); ip && ip->degree() > 4) {
      throw ConfigError("lattice polynomials are limited to total degree 4");
    }
  }
}

LatticeRule LatticeRule::always(bool value) {
  LatticeRule rule;
  rule.polys.push_back(IntPolynomial{{{0, 0, 0, 0}}});
  rule.moduli.push_back(1);
  rule.classes.push_back({ClassSelector{value ? 1 : -1, 0}});
  return rule;
}

bool eval_rule(const LatticeRule& rule, const CellIndex& q) {
  bool outer = reduce_init(rule.outer);
  for (std::size_t i = 0; i < rule.polys.size(); ++i) {
    const Int128 v = eval_polynomial(rule.polys[i], q);
    bool term = false;
    if (rule.mode == LatticeRule::Mode::Congruence) {
      const Int128 r = mod_nonneg(v, rule.moduli[i]);
      bool any = false;
      bool inner = reduce_init(rule.inner);
      for (const ClassSelector& s : rule.classes[i]) {
        if (s.c != 1) continue;
        any = true;
        const bool hit = r == s.m;
        inner = rule.inner == Reduce::Or ? (inner || hit) : (inner && hit);
      }
      term = any && inner;
    } else {
      const Band& b = rule.bands[i];
      term = (!b.lo || v > *b.lo) && (!b.hi || v < *b.hi);
    }
    outer = rule.outer == Reduce::Or ? (outer || term) : (outer && term);
  }
  return outer;
}

namespace {

void validate_particle(const GridSpec& grid, const AggloParticle& particle) {
  grid.validate();
  if (!(particle.r > 0.0)) throw ConfigError("agglomerate radius must be positive");
  if (particle.r > grid.w * (1.0 + 1e-12)) throw ConfigError("agglomerate radius must not exceed w");
}

ScalarField lattice_field(const GridSpec& grid, const AggloParticle& particle,
                          std::optional<LatticeRule> rule, const OffsetFunction& f,
                          const WarpFunction& h, RuleGating gating) {
  validate_particle(grid, particle);
  if (rule) rule->validate();
  const double w = grid.w;
  const double inv_w = 1.0 / w;
  const double r_cell = particle.r * inv_w;
  const Vec3 c = particle.c;
  auto fn = [w, inv_w, r_cell, c, rule, f, h, gating](const Vec3& p) {
    const Vec3 p_w = h.apply(p) * inv_w;
    const auto cells = moore_neighbors(floor_cell(p_w));
    if (rule && gating == RuleGating::Conjunction27) {
      for (const CellIndex& q : cells) {
        if (!eval_rule(*rule, q)) return 0.5 * w;
      }
    }
    double best = std::numeric_limits<double>::infinity();
    for (const CellIndex& q : cells) {
      instrument::count_primitive();
      if (rule && gating == RuleGating::PerCell && !eval_rule(*rule, q)) continue;
      best = std::min(best, sphere_distance(p_w - q.cast<double>() - c, r_cell));
    }
    if (!std::isfinite(best)) return 0.5 * w;
    return std::min(f(p) + w * best, 0.5 * w);
  };
  return ScalarField(fn, 1.0 + h.lipschitz + f.lipschitz, Smoothness::NonSmooth);
}

}  // namespace

ScalarField agglomerate_sdf(const GridSpec& grid, const AggloParticle& particle,
                            const OffsetFunction& f, const WarpFunction& h) {
  return lattice_field(grid, particle, std::nullopt, f, h, RuleGating::PerCell);
}

ScalarField subset_sdf(const GridSpec& grid, const AggloParticle& particle, const LatticeRule& rule,
                       const OffsetFunction& f, const WarpFunction& h, RuleGating gating) {
  return lattice_field(grid, particle, rule, f, h, gating);
}

LatticeRule bezier_gel_rule(std::int64_t n1, std::int64_t n2, std::int64_t n, double t,
                            bool per_cell_t) {
  const std::int64_t t_num = BezierPolynomial::quantise(t);
  LatticeRule rule;
  rule.polys.push_back(BezierPolynomial{BezierPolynomial::Which::First, n1, n2, n, t_num, per_cell_t});
  rule.polys.push_back(BezierPolynomial{BezierPolynomial::Which::Second, n1, n2, n, t_num, per_cell_t});
  rule.moduli = {31, 11};
  rule.classes = {{ClassSelector{1, 7}}, {ClassSelector{1, 7}}};
  rule.inner = Reduce::Or;
  rule.outer = Reduce::Or;
  return rule;
}

ScalarField meso_surface_sdf(const GridSpec& grid, const AggloParticle& particle,
                             const std::vector<IntPolynomial>& polys, const std::vector<Band>& bands,
                             const OffsetFunction& f, const WarpFunction& h) {
  LatticeRule rule;
  rule.mode = LatticeRule::Mode::Inequality;
  rule.polys.assign(polys.begin(), polys.end());
  rule.bands = bands;
  rule.outer = Reduce::And;
  return lattice_field(grid, particle, rule, f, h, RuleGating::PerCell);
}

IntPolynomial quadric_surface_polynomial() {
  return IntPolynomial{{{2, 1, 0, 0}, {1, 0, 2, 0}, {1, 0, 0, 2}, {-1, 1, 1, 0}, {-1, 0, 1, 1}, {-1, 1, 0, 1}}};
}

}  // namespace msdf
