#include "msdf/tracer.hpp"

#include "msdf/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace msdf {

Ray Ray::make(const Vec3& origin, const Vec3& direction, double t_min, double t_max) {
  const double len = direction.norm();
  if (!(len > 0.0) || !std::isfinite(len)) throw DomainError("ray direction must be non-zero");
  if (!(t_min < t_max)) throw DomainError("ray needs t_min < t_max");
  return Ray{origin, direction / len, t_min, t_max};
}

TraceStats& TraceStats::operator+=(const TraceStats& o) {
  sdf_evals += o.sdf_evals;
  field_calls += o.field_calls;
  gradient_evals += o.gradient_evals;
  steps += o.steps;
  backtracks += o.backtracks;
  reverts += o.reverts;
  return *this;
}

bool d_p_gate(const DpRule& rule, const Vec3& p) {
  if (rule.kind == DpRule::Kind::FmCase) {
    const bool y = std::abs(std::fmod(p.y(), rule.n1)) < rule.band;
    const bool z = std::abs(std::fmod(p.z(), rule.n2)) < rule.band;
    const bool x = std::abs(std::fmod(p.x(), rule.n3)) < rule.band;
    return y || (z && x);
  }
  const double g = std::sin(p.x()) * std::cos(p.y()) + std::sin(p.y()) * std::cos(p.z()) +
                   std::sin(p.z()) * std::cos(p.x());
  return std::abs(g - rule.level) < rule.tol;
}

StepPolicy StepPolicy::fixed(double delta) {
  StepPolicy p;
  p.kind = Kind::Fixed;
  p.delta = delta;
  return p;
}

StepPolicy StepPolicy::every(int n, double delta_min) {
  StepPolicy p;
  p.kind = Kind::AdaptiveEveryN;
  p.every_n = n;
  p.delta_min = delta_min;
  return p;
}

StepPolicy StepPolicy::poly(const DpRule& rule, double delta_min) {
  StepPolicy p;
  p.kind = Kind::AdaptivePoly;
  p.rule = rule;
  p.delta_min = delta_min;
  return p;
}

StepPolicy StepPolicy::bijection() {
  StepPolicy p;
  p.kind = Kind::Bijection;
  return p;
}

void StepPolicy::validate() const {
  if (!(delta_min > 0.0 && delta_min <= 1.0)) throw ConfigError("delta_min must lie in (0, 1]");
  if (kind == Kind::Fixed && !(delta > 0.0 && delta <= 1.0)) {
    throw ConfigError("fixed step factor must lie in (0, 1]");
  }
  if (kind == Kind::AdaptiveEveryN && every_n < 1) throw ConfigError("every-N period must be >= 1");
  if (kind == Kind::AdaptivePoly && rule.kind == DpRule::Kind::FmCase &&
      (rule.n1 == 0 || rule.n2 == 0 || rule.n3 == 0 || !(rule.band > 0.0))) {
    throw ConfigError("fm-case gate needs non-zero periods and a positive band");
  }
  if (kind == Kind::AdaptivePoly && rule.kind == DpRule::Kind::ScCase && !(rule.tol > 0.0)) {
    throw ConfigError("sc-case gate needs tol > 0");
  }
}

std::string StepPolicy::name() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::Fixed: out << "fixed:" << delta; break;
    case Kind::PureSphere: out << "sphere"; break;
    case Kind::AdaptiveEveryN: out << "every:" << every_n; break;
    case Kind::AdaptivePoly:
      if (rule.kind == DpRule::Kind::FmCase) {
        out << "poly:" << rule.n1 << "," << rule.n2 << "," << rule.n3;
      } else {
        out << "polysc:" << rule.level << "," << rule.tol;
      }
      break;
    case Kind::Bijection: out << "bijection"; break;
  }
  return out.str();
}

namespace {

std::vector<double> parse_numbers(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size() && !text.empty()) {
    const std::size_t comma = text.find(',', pos);
    const std::string part(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos));
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
      if (used != part.size()) throw ConfigError("bad number '" + part + "' in step policy");
    } catch (const std::logic_error&) {
      throw ConfigError("bad number '" + part + "' in step policy");
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

StepPolicy StepPolicy::parse(std::string_view text) {
  const std::size_t colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::vector<double> args =
      colon == std::string_view::npos ? std::vector<double>{} : parse_numbers(text.substr(colon + 1));
  StepPolicy p;
  if (head == "sphere") {
    p = pure_sphere();
  } else if (head == "fixed") {
    p = fixed(args.empty() ? 0.5 : args[0]);
  } else if (head == "every") {
    p = every(args.empty() ? 8 : static_cast<int>(args[0]), args.size() > 1 ? args[1] : 0.25);
  } else if (head == "poly") {
    DpRule rule = DpRule::fm_case(11, 5, 7);
    if (args.size() >= 3) rule = DpRule::fm_case(args[0], args[1], args[2]);
    if (args.size() >= 4) rule.band = args[3];
    p = poly(rule);
  } else if (head == "polysc") {
    p = poly(DpRule::sc_case(args.size() > 0 ? args[0] : 0.5, args.size() > 1 ? args[1] : 0.05));
  } else if (head == "bijection") {
    p = bijection();
  } else {
    throw ConfigError("unknown step policy '" + std::string(text) + "'");
  }
  p.validate();
  return p;
}

namespace {

constexpr double kGridScaleEps = 0.01;

class Sampler {
 public:
  Sampler(const ScalarField& field, const Ray& ray, TraceStats& stats)
      : field_(field), ray_(ray), stats_(stats), inv_l_(1.0 / field.lipschitz()) {}

  double operator()(double t) {
    const std::uint64_t before = instrument::primitive_counter();
    const double v = field_(ray_.at(t));
    stats_.sdf_evals += instrument::primitive_counter() - before;
    ++stats_.field_calls;
    if (!std::isfinite(v)) {
      throw FieldEvalError("field returned a non-finite value", ray_.origin, ray_.direction, t);
    }
    return v * inv_l_;
  }

 private:
  const ScalarField& field_;
  const Ray& ray_;
  TraceStats& stats_;
  double inv_l_;
};

}  // namespace

double compute_grid_scale(const ScalarField& field, const Vec3& p, TraceStats* stats) {
  const std::uint64_t before = instrument::primitive_counter();
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    Vec3 dp = Vec3::Zero();
    dp[i] = kGridScaleEps;
    g[i] = (field(Vec3(p + dp)) - field(Vec3(p - dp))) / (2.0 * kGridScaleEps);
  }
  g /= field.lipschitz();
  if (stats) {
    stats->sdf_evals += instrument::primitive_counter() - before;
    stats->field_calls += 6;
    ++stats->gradient_evals;
  }
  const double scale = std::clamp(g.norm() * 0.5, 0.0, 1.0);
  return std::isfinite(scale) ? scale : 1.0;
}

bool clip_to_sphere(const Ray& ray, const Vec3& center, double radius, double& t0, double& t1) {
  const Vec3 oc = ray.origin - center;
  const double b = oc.dot(ray.direction);
  const double c = oc.squaredNorm() - radius * radius;
  const double disc = b * b - c;
  if (disc < 0.0) return false;
  const double s = std::sqrt(disc);
  t0 = -b - s;
  t1 = -b + s;
  return t1 > 0.0;
}

Hit sphere_trace(const ScalarField& field, const Ray& ray, const StepPolicy& policy,
                 const TraceOptions& options, TraceStats* stats) {
  if (!(options.precision > 0.0)) throw DomainError("trace precision must be positive");
  TraceStats local;
  Sampler sample(field, ray, local);
  const bool adaptive = policy.kind == StepPolicy::Kind::AdaptiveEveryN ||
                        policy.kind == StepPolicy::Kind::AdaptivePoly;
  auto tolerance = [&options](double t) { return options.precision * std::max(t, 1e-6); };

  Hit hit;
  double t = ray.t_min;
  double d = sample(t);
  const double s = d < 0.0 ? -1.0 : 1.0;
  hit.started_inside = s < 0.0;
  double scale = adaptive ? compute_grid_scale(field, ray.at(t), &local) : 0.0;
  bool found = false;

  auto bisect = [&](double a, double b) {
    for (int i = 0; i < options.max_bisections; ++i) {
      const double mid = 0.5 * (a + b);
      const double dm = sample(mid);
      if (std::abs(dm) < tolerance(mid)) return mid;
      if (s * dm > 0.0) {
        a = mid;
      } else {
        b = mid;
      }
    }
    return 0.5 * (a + b);
  };

  for (int iter = 0; iter < options.max_steps; ++iter) {
    const double ad = s * d;
    if (std::abs(d) < tolerance(t)) {
      found = true;
      break;
    }
    if (adaptive && iter > 0) {
      const bool refresh = policy.kind == StepPolicy::Kind::AdaptiveEveryN
                               ? iter % policy.every_n == 0
                               : d_p_gate(policy.rule, ray.at(t));
      if (refresh) scale = compute_grid_scale(field, ray.at(t), &local);
    }

    double factor = 1.0;
    if (policy.kind == StepPolicy::Kind::Fixed) factor = policy.delta;
    if (adaptive) factor = 1.0 / (policy.delta_min + (1.0 - policy.delta_min) * scale);

    if (policy.kind == StepPolicy::Kind::Bijection && ad < 10.0 * tolerance(t)) {
      const double tp = std::min(t + ad + 10.0 * tolerance(t), ray.t_max);
      const double dp = sample(tp);
      ++local.steps;
      if (s * dp < 0.0) {
        ++local.backtracks;
        t = bisect(t, tp);
        found = true;
        break;
      }
    }

    double step = ad * factor;
    if (t + step > ray.t_max && factor > 1.0) step = ad;
    if (t + step > ray.t_max) break;
    double t_new = t + step;
    double d_new = sample(t_new);
    ++local.steps;

    if (factor > 1.0 && (s * d_new < 0.0 || ad + s * d_new < step)) {
      // Unbounding spheres do not overlap: fall back to the safe step.
      ++local.reverts;
      t_new = t + ad;
      d_new = sample(t_new);
    }
    if (s * d_new < 0.0) {
      ++local.backtracks;
      t = bisect(t, t_new);
      found = true;
      break;
    }
    t = t_new;
    d = d_new;
  }

  if (found) {
    hit.hit = true;
    hit.t = t;
    hit.position = ray.at(t);
    if (options.compute_normal) {
      const std::uint64_t before = instrument::primitive_counter();
      try {
        hit.normal = normal(field, hit.position, options.normal_eps);
      } catch (const DegenerateNormalError&) {
        hit.normal = -ray.direction;
      }
      local.sdf_evals += instrument::primitive_counter() - before;
      local.field_calls += 6;
    }
  }
  if (stats) *stats += local;
  return hit;
}

}  // namespace msdf
