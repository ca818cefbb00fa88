#include "gcvx/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace gcvx {

namespace {

constexpr double kGradStopTol = 1e-14;
constexpr double kDivergenceFactor = 1e6;

double divergence_threshold(double f0) { return std::max(1.0, std::abs(f0)) * kDivergenceFactor; }

void guard_divergence(double fv, double threshold, SolverTrace& trace) {
  if (!std::isfinite(fv) || fv > threshold)
    throw DivergedError("objective value " + std::to_string(fv) + " breached the divergence guard",
                        std::move(trace));
}

std::uint64_t now_ns() {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::steady_clock::now().time_since_epoch())
          .count());
}

void record_row(SolverTrace& trace, const Manifold& m, const Point& x, double fv, double gnorm,
                std::uint64_t calls, const std::optional<Point>& ref) {
  trace.iterates.push_back(x);
  trace.f_values.push_back(fv);
  trace.grad_norms.push_back(gnorm);
  trace.oracle_calls.push_back(calls);
  trace.wall_ns.push_back(now_ns());
  if (ref) {
    double d = m.dist(x, *ref);
    trace.dist_to_ref_sq.push_back(d * d);
  }
}

void flag_increase(SolverTrace& trace, int t, double prev, double cur) {
  if (cur > prev + 1e-12 * (1.0 + std::abs(prev)))
    trace.violations.push_back("f increased at step " + std::to_string(t) + ": " +
                               std::to_string(prev) + " -> " + std::to_string(cur));
}

}  // namespace

StepRule StepRule::inverse_l(std::optional<double> r_bound) {
  StepRule r;
  r.kind = Kind::InverseL;
  r.r_bound = r_bound;
  return r;
}

StepRule StepRule::inverse_l_zeta(double r_bound) {
  StepRule r;
  r.kind = Kind::InverseLZeta;
  r.r_bound = r_bound;
  return r;
}

StepRule StepRule::subgradient(double r_bound, int horizon) {
  StepRule r;
  r.kind = Kind::Subgradient;
  r.r_bound = r_bound;
  r.horizon = horizon;
  return r;
}

StepRule StepRule::fixed(double eta) {
  StepRule r;
  r.kind = Kind::Fixed;
  r.eta = eta;
  return r;
}

// Radius of the ball around x* certified for the 1/L step from R >= d(x0, x*):
// phi * R * zeta_R in general; on the hyperboloid the refined bound phi * R.
static double inverse_l_cert_radius(const Manifold& m, double r_bound) {
  if (m.kind() == ManifoldKind::Hyperbolic) return kGoldenRatio * r_bound;
  return kGoldenRatio * r_bound * zeta(r_bound, m.kappa_min());
}

ResolvedStep resolve_step(const Objective& f, const Point& x0, const StepRule& rule, int iters) {
  const Manifold& m = *f.manifold;
  double ref_shift = m.dist(f.reference, x0);
  ResolvedStep out;
  switch (rule.kind) {
    case StepRule::Kind::Fixed: {
      if (!rule.eta || !(*rule.eta > 0.0))
        throw Error(ErrorCode::StepRuleUnresolvable, "fixed rule needs a positive eta");
      out.eta = *rule.eta;
      out.source = "fixed";
      return out;
    }
    case StepRule::Kind::InverseL: {
      if (!rule.r_bound) {
        // Without a distance bound the rule only resolves for objectives whose
        // smoothness does not depend on the region.
        double l1 = f.smoothness_on(1.0), l2 = f.smoothness_on(2.0);
        if (std::abs(l1 - l2) > 1e-12 * (1.0 + std::abs(l1)))
          throw Error(ErrorCode::StepRuleUnresolvable,
                      "1/L rule needs a distance bound when smoothness is region-dependent");
        out.eta = 1.0 / l1;
        out.smoothness = l1;
        out.source = "inverse_l(global)";
        return out;
      }
      double R = *rule.r_bound;
      out.cert_radius = inverse_l_cert_radius(m, R);
      // cover B(x*, cert_radius) from the reference: d(ref, .) <= ref_shift + R + cert_radius
      out.smoothness = f.smoothness_on(ref_shift + R + out.cert_radius);
      out.eta = 1.0 / out.smoothness;
      out.source = "inverse_l";
      return out;
    }
    case StepRule::Kind::InverseLZeta: {
      if (!rule.r_bound)
        throw Error(ErrorCode::StepRuleUnresolvable, "1/(zeta L) rule needs a distance bound");
      double R = *rule.r_bound;
      out.cert_radius = std::sqrt(1.5) * R;
      out.smoothness = f.smoothness_on(ref_shift + R + out.cert_radius);
      double z = zeta(std::sqrt(1.5) * R, m.kappa_min());
      out.eta = 1.0 / (z * out.smoothness);
      out.source = "inverse_l_zeta";
      return out;
    }
    case StepRule::Kind::Subgradient: {
      if (!rule.r_bound)
        throw Error(ErrorCode::StepRuleUnresolvable, "subgradient rule needs a distance bound");
      int horizon = rule.horizon.value_or(iters);
      if (horizon < 1) throw Error(ErrorCode::StepRuleUnresolvable, "subgradient rule needs a horizon");
      double R = *rule.r_bound;
      out.cert_radius = std::sqrt(2.0) * R;
      out.lipschitz = f.lipschitz_on(ref_shift + R + out.cert_radius);
      double z = zeta(std::sqrt(2.0) * R, m.kappa_min());
      out.eta = R / (out.lipschitz * std::sqrt(z * static_cast<double>(horizon)));
      out.source = "subgradient";
      return out;
    }
  }
  throw Error(ErrorCode::StepRuleUnresolvable, "unknown step rule");
}

static std::optional<IterateBoundCertificate> make_certificate(const Manifold& m,
                                                               const std::optional<Point>& ref,
                                                               const Point& x0,
                                                               const StepRule& rule) {
  if (!ref) return std::nullopt;
  double R = m.dist(x0, *ref);
  IterateBoundCertificate cert;
  cert.center = *ref;
  switch (rule.kind) {
    case StepRule::Kind::InverseL:
      cert.radius = inverse_l_cert_radius(m, R);
      cert.source = "rgd(1/L)";
      break;
    case StepRule::Kind::InverseLZeta:
      cert.radius = std::sqrt(1.5) * R;
      cert.source = "rgd(1/(zeta L))";
      break;
    case StepRule::Kind::Subgradient:
      cert.radius = std::sqrt(2.0) * R;
      cert.source = "subgradient";
      break;
    case StepRule::Kind::Fixed:
      return std::nullopt;  // no certified radius is associated with an arbitrary step
  }
  return cert;
}

SolverTrace rgd(const Objective& f, const Point& x0, const StepRule& rule, int iters,
                std::optional<Point> ref) {
  if (iters < 1) throw Error(ErrorCode::ConfigInvalid, "iteration count must be >= 1");
  const Manifold& m = *f.manifold;
  m.check_point(x0);
  ResolvedStep step = resolve_step(f, x0, rule, iters);

  SolverTrace trace;
  trace.resolved_eta = step.eta;
  trace.certificate = make_certificate(m, ref, x0, rule);

  Point x = x0;
  double fv = f.value(x);
  double threshold = divergence_threshold(fv);
  std::uint64_t calls = 0;
  TangentVector g = f.gradient(x);
  ++calls;
  record_row(trace, m, x, fv, m.norm(g), calls, ref);

  bool monotone_expected = std::isfinite(step.smoothness) && step.eta <= 1.0 / step.smoothness + 1e-15;

  for (int t = 0; t < iters; ++t) {
    if (m.norm(g) <= kGradStopTol) {
      trace.converged = true;
      break;
    }
    TangentVector move{x.coords, -step.eta * g.vec};
    x = m.exp(x, move);
    double fprev = fv;
    fv = f.value(x);
    guard_divergence(fv, threshold, trace);
    if (monotone_expected) flag_increase(trace, t, fprev, fv);
    g = f.gradient(x);
    ++calls;
    record_row(trace, m, x, fv, m.norm(g), calls, ref);
  }
  return trace;
}

SolverTrace subgradient_rgd(const Objective& f, const Point& x0, double r_bound, int iters,
                            std::optional<Point> ref) {
  if (iters < 1) throw Error(ErrorCode::ConfigInvalid, "iteration count must be >= 1");
  const Manifold& m = *f.manifold;
  m.check_point(x0);
  StepRule rule = StepRule::subgradient(r_bound, iters);
  ResolvedStep step = resolve_step(f, x0, rule, iters);

  SolverTrace trace;
  trace.resolved_eta = step.eta;
  trace.certificate = make_certificate(m, ref, x0, rule);

  Point x = x0;
  double fv = f.value(x);
  double threshold = divergence_threshold(fv);
  std::uint64_t calls = 0;
  TangentVector g = f.gradient(x);
  ++calls;
  record_row(trace, m, x, fv, m.norm(g), calls, ref);

  GeodesicAverager avg(m);
  for (int t = 0; t < iters; ++t) {
    avg.add(x);  // averages x_0 .. x_{T-1}
    if (m.norm(g) <= kGradStopTol) {
      trace.converged = true;
      break;
    }
    x = m.exp(x, TangentVector{x.coords, -step.eta * g.vec});
    fv = f.value(x);
    guard_divergence(fv, threshold, trace);
    g = f.gradient(x);
    ++calls;
    record_row(trace, m, x, fv, m.norm(g), calls, ref);
  }
  trace.averaged_output = avg.value();
  return trace;
}

SolverTrace prgd(const Objective& f, const Point& x0, const StepRule& rule, const Ball& ball,
                 int iters, std::optional<Point> ref) {
  if (iters < 1) throw Error(ErrorCode::ConfigInvalid, "iteration count must be >= 1");
  const Manifold& m = *f.manifold;
  m.check_point(x0);
  if (m.dist(ball.center, x0) > ball.radius + 1e-9)
    throw Error(ErrorCode::ConfigInvalid, "initial point lies outside the projection ball");
  ResolvedStep step = resolve_step(f, x0, rule, iters);

  SolverTrace trace;
  trace.resolved_eta = step.eta;
  trace.certificate = make_certificate(m, ref, x0, rule);

  Point x = x0;
  double fv = f.value(x);
  double threshold = divergence_threshold(fv);
  std::uint64_t calls = 0;
  TangentVector g = f.gradient(x);
  ++calls;
  record_row(trace, m, x, fv, m.norm(g), calls, ref);

  for (int t = 0; t < iters; ++t) {
    if (m.norm(g) <= kGradStopTol) {
      trace.converged = true;
      break;
    }
    Point moved = m.exp(x, TangentVector{x.coords, -step.eta * g.vec});
    x = project_ball(m, ball.center, ball.radius, moved);
    double fprev = fv;
    fv = f.value(x);
    guard_divergence(fv, threshold, trace);
    flag_increase(trace, t, fprev, fv);
    g = f.gradient(x);
    ++calls;
    record_row(trace, m, x, fv, m.norm(g), calls, ref);
  }
  return trace;
}

CompositePart CompositePart::squared_distance(Point center, double weight) {
  if (!(weight > 0.0)) throw Error(ErrorCode::ConfigInvalid, "composite weight must be positive");
  CompositePart g;
  g.kind = Kind::SquaredDistance;
  g.center = std::move(center);
  g.weight = weight;
  return g;
}

CompositePart CompositePart::ball_indicator(Point center, double radius) {
  if (!(radius >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "indicator radius must be nonnegative");
  CompositePart g;
  g.kind = Kind::BallIndicator;
  g.center = std::move(center);
  g.radius = radius;
  return g;
}

double CompositePart::value(const Manifold& m, const Point& x) const {
  double d = m.dist(center, x);
  switch (kind) {
    case Kind::SquaredDistance: return 0.5 * weight * d * d;
    case Kind::BallIndicator:
      return d <= radius + 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

Point composite_step(const Manifold& m, const Point& x, const Vec& grad, double smoothness,
                     const CompositePart& g, const std::optional<Ball>& trust) {
  if (!(smoothness > 0.0)) throw Error(ErrorCode::ConfigInvalid, "smoothness must be positive");

  if (g.kind == CompositePart::Kind::BallIndicator) {
    if (trust)
      throw Error(ErrorCode::UnsupportedComposite,
                  "indicator composite does not combine with an extra trust ball");
    // The model <grad, v> + (L/2)|v|^2 is isotropic, so the constrained
    // minimizer is the pulled-back ball projection of the free step.
    Point free = m.exp(x, TangentVector{x.coords, -grad / smoothness});
    return project_ball(m, g.center, g.radius, free);
  }

  // g = (w/2) d(c, .)^2 modeled in T_x M as (w/2) |v - log_x(c)|^2, exact when
  // c = x (or the space is flat) and the documented surrogate otherwise.
  double w = g.weight;
  Vec wvec = m.log(x, g.center).vec;
  Vec v = (w * wvec - grad) / (smoothness + w);
  if (!trust) return m.exp(x, TangentVector{x.coords, v});

  // Projected gradient on the quadratic model, with the trust ball pulled back
  // through exp/log around x. The model Hessian is (L + w) I, so the free step
  // is exact and iterations only refine the constrained case.
  auto pullback_project = [&](const Vec& cand) {
    Point y = m.exp(x, TangentVector{x.coords, cand});
    Point proj = project_ball(m, trust->center, trust->radius, y);
    return m.log(x, proj).vec;
  };
  Vec cur = pullback_project(v);
  for (int k = 0; k < 1000; ++k) {
    Vec grad_model = grad + smoothness * cur + w * (cur - wvec);
    Vec next = pullback_project(cur - grad_model / (smoothness + w));
    double move = m.norm(Point{x.coords}, next - cur);
    cur = next;
    if (move <= 1e-10) break;
  }
  return m.exp(x, TangentVector{x.coords, cur});
}

SolverTrace crgd(const Objective& f, const CompositePart& g, const Point& x0, double smoothness,
                 int iters, std::optional<Point> ref, std::optional<Ball> trust) {
  if (iters < 1) throw Error(ErrorCode::ConfigInvalid, "iteration count must be >= 1");
  if (!(smoothness > 0.0)) throw Error(ErrorCode::ConfigInvalid, "smoothness must be positive");
  const Manifold& m = *f.manifold;
  m.check_point(x0);

  SolverTrace trace;
  trace.resolved_eta = 1.0 / smoothness;

  auto total = [&](const Point& p) { return f.value(p) + g.value(m, p); };

  Point x = x0;
  double fv = total(x);
  double threshold = divergence_threshold(fv);
  std::uint64_t calls = 0;
  TangentVector gr = f.gradient(x);
  ++calls;
  record_row(trace, m, x, fv, m.norm(gr), calls, ref);

  for (int t = 0; t < iters; ++t) {
    Point next = composite_step(m, x, gr.vec, smoothness, g, trust);
    if (m.dist(x, next) <= 1e-15 && m.norm(gr) <= kGradStopTol) {
      trace.converged = true;
      break;
    }
    x = next;
    double fprev = fv;
    fv = total(x);
    guard_divergence(fv, threshold, trace);
    flag_increase(trace, t, fprev, fv);
    gr = f.gradient(x);
    ++calls;
    record_row(trace, m, x, fv, m.norm(gr), calls, ref);
  }
  return trace;
}

SolverTrace rgda(const SaddleObjective& f, const Point& z0, double eta, int iters,
                 std::optional<Point> ref) {
  if (iters < 1) throw Error(ErrorCode::ConfigInvalid, "iteration count must be >= 1");
  if (!(eta > 0.0)) throw Error(ErrorCode::ConfigInvalid, "step size must be positive");
  const ProductManifold& m = *f.product;
  m.check_point(z0);

  SolverTrace trace;
  trace.resolved_eta = eta;

  Point z = z0;
  std::uint64_t calls = 0;
  TangentVector fld = f.field(z);
  ++calls;
  double fnorm = m.norm(Point{z.coords}, fld.vec);
  double fnorm0 = fnorm;
  record_row(trace, m, z, f.value(m.left_part(z), m.right_part(z)), fnorm, calls, ref);

  for (int t = 0; t < iters; ++t) {
    if (fnorm <= kGradStopTol) {
      trace.converged = true;
      break;
    }
    z = m.exp(z, TangentVector{z.coords, -eta * fld.vec});
    fld = f.field(z);
    ++calls;
    fnorm = m.norm(Point{z.coords}, fld.vec);
    if (!std::isfinite(fnorm) || fnorm > kDivergenceFactor * (1.0 + fnorm0))
      throw DivergedError("saddle field norm blew up", std::move(trace));
    record_row(trace, m, z, f.value(m.left_part(z), m.right_part(z)), fnorm, calls, ref);
  }
  return trace;
}

}  // namespace gcvx
