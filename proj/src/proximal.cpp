#include "gcvx/proximal.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace gcvx {

namespace {

std::uint64_t now_ns() {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::steady_clock::now().time_since_epoch())
          .count());
}

constexpr double kExactResidualTol = 1e-12;
// Below this the subproblem is solved to machine precision and every
// criterion is met a fortiori (covers anchors that already sit at the
// minimizer, where the relative criterion is 0 <= 0).
constexpr double kResidualFloor = 1e-13;

struct InnerContext {
  const Manifold* m = nullptr;
  Point anchor;
  double eta = 1.0;
  double r_bound = 1.0;
  double smoothness = 0.0;   // L of the smooth part over the working region
  double inner_step = 0.0;   // 1 / (L + zeta_{2R}/eta)
  double mu_h = 0.0;         // delta_{2R}/eta, strong convexity of the regularized problem
  double delta5 = 1.0;       // delta at radius 5R
  bool hadamard = true;
};

InnerContext make_context(const Manifold& m, const Point& anchor, double eta, double r_bound,
                          double smoothness) {
  InnerContext c;
  c.m = &m;
  c.anchor = anchor;
  c.eta = eta;
  c.r_bound = r_bound;
  c.smoothness = smoothness;
  double zeta2 = zeta(2.0 * r_bound, m.kappa_min());
  c.inner_step = 1.0 / (smoothness + zeta2 / eta);
  c.mu_h = delta(2.0 * r_bound, m.kappa_max()) / eta;
  c.delta5 = delta(5.0 * r_bound, m.kappa_max());
  c.hadamard = m.is_hadamard();
  return c;
}

bool criterion_holds(const InnerContext& c, const InexactnessBudget& b, double r_norm,
                     double dist_anchor) {
  if (r_norm <= kResidualFloor) return true;
  if (r_norm * r_norm > b.delta_t * c.delta5 * dist_anchor * dist_anchor) return false;
  if (c.hadamard) return true;
  // Positively curved case: enforce d(z, z*_+)^2 <= C_t d(z*_+, anchor)^2 via
  // the strong-convexity error bound d(z, z*_+) <= |r| / (eta mu_h).
  double e = r_norm / (c.eta * c.mu_h);
  double root_c = std::sqrt(b.c_t);
  return e <= dist_anchor * root_c / (1.0 + root_c);
}

int criterion_max_inner(const InnerContext& c, const InexactnessBudget& b) {
  double z = zeta(c.r_bound, c.m->kappa_min());
  double cap = 10.0 * std::ceil(z * z) * std::log(1.0 / std::max(1e-300, b.c_t));
  return static_cast<int>(std::min(1e5, std::max(1.0, std::ceil(cap))));
}

}  // namespace

double budget_delta(InexactnessBudget::Mode mode, int outer_t, double eta, double mu) {
  if (mode == InexactnessBudget::Mode::MuPositive) {
    if (!(mu > 0.0)) throw Error(ErrorCode::ConfigInvalid, "MuPositive budget needs mu > 0");
    return 0.5 * eta * mu;
  }
  double t = static_cast<double>(outer_t);
  return 1.0 / ((t + 2.0) * (t + 2.0));
}

double budget_c(const Manifold& m, double delta_tp1, double eta, double smoothness, double r_bound) {
  double z3 = zeta(3.0 * r_bound, m.kappa_min());
  double d3 = delta(3.0 * r_bound, m.kappa_max());
  double a = eta * smoothness + z3;
  double c = delta_tp1 * d3 / (2.0 * a * a + 2.0 * delta_tp1 * d3);
  return std::min(0.25, c);
}

double inexactness_product(double c, int T) {
  if (!(c > 1.0)) throw Error(ErrorCode::ConfigInvalid, "product needs c > 1");
  double t = static_cast<double>(T);
  return c * (c + t) / ((c - 1.0) * (c + t + 1.0));
}

const char* inner_solver_name(InnerSolver s) {
  switch (s) {
    case InnerSolver::Exact: return "exact";
    case InnerSolver::CRGD: return "crgd";
    case InnerSolver::PRGD: return "prgd";
    case InnerSolver::RGDA: return "rgda";
  }
  return "unknown";
}

// Shared inner driver: `grad` maps a point to the (sub)gradient/field of the
// un-regularized objective; `step` advances one inner iterate given that
// vector and the residual r = eta*v - log_z(anchor) (note grad of the
// regularized problem is r / eta).
template <typename GradFn, typename StepFn>
static ProxResult run_inner(const InnerContext& c, const InexactnessBudget& budget,
                            int fixed_inner_iters, bool exact, GradFn&& grad, StepFn&& step) {
  const Manifold& m = *c.m;
  ProxResult out;
  Point y = c.anchor;
  TangentVector v = grad(y);
  out.inner_calls = 1;

  auto residual_at = [&](const Point& z, const TangentVector& vz) {
    TangentVector l = m.log(z, c.anchor);
    return TangentVector{z.coords, c.eta * vz.vec - l.vec};
  };

  if (fixed_inner_iters > 0 && !exact) {
    for (int k = 0; k < fixed_inner_iters; ++k) {
      TangentVector r = residual_at(y, v);
      y = step(y, v, r);
      v = grad(y);
      ++out.inner_calls;
      out.inner_iters = k + 1;
    }
    TangentVector r = residual_at(y, v);
    out.z = y;
    out.residual = r;
    out.v = v;
    out.residual_norm = m.norm(r);
    out.criterion_met = criterion_holds(c, budget, out.residual_norm, m.dist(y, c.anchor));
    return out;
  }

  int max_inner = exact ? 200000 : criterion_max_inner(c, budget);
  for (int k = 0;; ++k) {
    TangentVector r = residual_at(y, v);
    double rn = m.norm(r);
    bool done = exact ? (rn <= kExactResidualTol)
                      : criterion_holds(c, budget, rn, m.dist(y, c.anchor));
    if (done) {
      out.z = y;
      out.residual = r;
      out.v = v;
      out.residual_norm = rn;
      out.inner_iters = k;
      out.criterion_met = true;
      return out;
    }
    if (k >= max_inner)
      throw Error(ErrorCode::InnerBudgetExceeded,
                  "prox subproblem did not meet its criterion within " +
                      std::to_string(max_inner) + " inner iterations");
    y = step(y, v, r);
    v = grad(y);
    ++out.inner_calls;
  }
}

ProxResult prox_solve(const ProxProblem& p, InnerSolver inner, const InexactnessBudget& budget,
                      int fixed_inner_iters) {
  if (!(p.eta > 0.0)) throw Error(ErrorCode::ConfigInvalid, "prox eta must be positive");
  if (!(p.r_bound > 0.0)) throw Error(ErrorCode::ConfigInvalid, "prox r_bound must be positive");
  if (inner == InnerSolver::RGDA)
    throw Error(ErrorCode::ConfigInvalid, "descent-ascent inner solver requires a saddle objective");
  const Manifold& m = *p.objective.manifold;
  m.check_point(p.anchor);

  // Closed-form prox short-circuits the loop entirely.
  if (inner == InnerSolver::Exact && p.objective.exact_prox) {
    ProxResult out;
    out.z = p.objective.exact_prox(p.anchor, p.eta);
    out.v = p.objective.gradient(out.z);
    out.inner_calls = 1;
    TangentVector l = m.log(out.z, p.anchor);
    out.residual = TangentVector{out.z.coords, p.eta * out.v.vec - l.vec};
    out.residual_norm = m.norm(out.residual);
    out.criterion_met = true;
    return out;
  }

  double shift = m.dist(p.objective.reference, p.anchor);
  double smooth = p.objective.smoothness_on(shift + 2.0 * p.r_bound);
  InnerContext c = make_context(m, p.anchor, p.eta, p.r_bound, smooth);

  auto grad = [&](const Point& z) { return p.objective.gradient(z); };

  switch (inner) {
    case InnerSolver::Exact: {
      // plain gradient steps on the regularized problem, no ball needed
      auto step = [&](const Point& z, const TangentVector&, const TangentVector& r) {
        return m.exp(z, TangentVector{z.coords, -(c.inner_step / c.eta) * r.vec});
      };
      return run_inner(c, budget, 0, true, grad, step);
    }
    case InnerSolver::PRGD: {
      auto step = [&](const Point& z, const TangentVector&, const TangentVector& r) {
        Point moved = m.exp(z, TangentVector{z.coords, -(c.inner_step / c.eta) * r.vec});
        return project_ball(m, p.anchor, 2.0 * p.r_bound, moved);
      };
      return run_inner(c, budget, fixed_inner_iters, false, grad, step);
    }
    case InnerSolver::CRGD: {
      CompositePart g = CompositePart::squared_distance(p.anchor, 1.0 / p.eta);
      Ball trust{p.anchor, 2.0 * p.r_bound};
      auto step = [&](const Point& z, const TangentVector& v, const TangentVector&) {
        return composite_step(m, z, v.vec, c.smoothness, g, trust);
      };
      return run_inner(c, budget, fixed_inner_iters, false, grad, step);
    }
    case InnerSolver::RGDA:
      break;
  }
  throw Error(ErrorCode::ConfigInvalid, "unsupported inner solver");
}

ProxResult prox_solve(const SaddleProxProblem& p, InnerSolver inner, const InexactnessBudget& budget,
                      int fixed_inner_iters) {
  if (!(p.eta > 0.0)) throw Error(ErrorCode::ConfigInvalid, "prox eta must be positive");
  if (!(p.r_bound > 0.0)) throw Error(ErrorCode::ConfigInvalid, "prox r_bound must be positive");
  if (inner != InnerSolver::RGDA && inner != InnerSolver::Exact)
    throw Error(ErrorCode::ConfigInvalid, "saddle prox subproblems use the descent-ascent inner solver");
  const ProductManifold& m = *p.objective.product;
  m.check_point(p.anchor);

  double shift = m.dist(Point{p.objective.reference.coords}, p.anchor);
  double smooth = p.objective.smoothness_on(shift + 2.0 * p.r_bound);
  InnerContext c = make_context(m, p.anchor, p.eta, p.r_bound, smooth);

  auto grad = [&](const Point& z) { return p.objective.field(z); };
  // Simultaneous descent-ascent on the regularized saddle problem is a step
  // along its field, which is exactly r / eta.
  auto step = [&](const Point& z, const TangentVector&, const TangentVector& r) {
    return m.exp(z, TangentVector{z.coords, -(c.inner_step / c.eta) * r.vec});
  };
  bool exact = inner == InnerSolver::Exact;
  return run_inner(c, budget, exact ? 0 : fixed_inner_iters, exact, grad, step);
}

SolverTrace rppa(const Objective& f, const Point& z0, double eta, int iters,
                 std::optional<Point> ref) {
  if (iters < 1) throw Error(ErrorCode::ConfigInvalid, "iteration count must be >= 1");
  if (!(eta > 0.0)) throw Error(ErrorCode::ConfigInvalid, "eta must be positive");
  const Manifold& m = *f.manifold;
  m.check_point(z0);

  SolverTrace trace;
  trace.resolved_eta = eta;
  if (ref) {
    trace.certificate =
        IterateBoundCertificate{*ref, m.dist(z0, *ref), "rppa(exact, nonincreasing distances)"};
  }

  Point z = z0;
  std::uint64_t calls = 0;
  InexactnessBudget budget;  // ignored by exact solves
  for (int t = 0;; ++t) {
    double fv = f.value(z);
    TangentVector g = f.gradient(z);
    ++calls;
    trace.iterates.push_back(z);
    trace.f_values.push_back(fv);
    trace.grad_norms.push_back(m.norm(g));
    trace.oracle_calls.push_back(calls);
    trace.wall_ns.push_back(now_ns());
    if (ref) {
      double d = m.dist(z, *ref);
      trace.dist_to_ref_sq.push_back(d * d);
      std::size_t n = trace.dist_to_ref_sq.size();
      if (n >= 2 && trace.dist_to_ref_sq[n - 1] > trace.dist_to_ref_sq[n - 2] + 1e-9)
        trace.violations.push_back("distance to reference increased at step " + std::to_string(t));
    }
    if (t == iters) break;
    if (m.norm(g) <= 1e-14) {
      trace.converged = true;
      break;
    }
    ProxProblem pp{f, z, eta, std::max(1e-8, m.dist(z0, ref ? *ref : z0)) + 1e-8};
    ProxResult res = prox_solve(pp, InnerSolver::Exact, budget);
    calls += res.inner_calls;
    trace.residual_norms.push_back(res.residual_norm);
    z = res.z;
  }
  return trace;
}

namespace {

template <typename ObjT, typename ProxT>
SolverTrace rippa_impl(const ObjT& f, const Manifold& m, const Point& z0, const RippaOptions& opt,
                       std::optional<Point> ref,
                       const std::function<double(const Point&)>& value_fn,
                       const std::function<double(const Point&)>& grad_norm_fn,
                       const std::function<ProxT(const Point&)>& make_prox) {
  if (opt.outer_iters < 1) throw Error(ErrorCode::ConfigInvalid, "outer iteration count must be >= 1");
  if (!(opt.eta > 0.0)) throw Error(ErrorCode::ConfigInvalid, "eta must be positive");
  if (!(opt.r_bound > 0.0)) throw Error(ErrorCode::ConfigInvalid, "r_bound must be positive");
  m.check_point(z0);

  double shift = 0.0;  // reference offset resolved by make_prox per anchor
  (void)shift;
  double smooth_for_c = f.smoothness_on(m.dist(Point{f.reference.coords}, z0) + 5.0 * opt.r_bound);

  SolverTrace trace;
  trace.resolved_eta = opt.eta;
  if (ref)
    trace.certificate =
        IterateBoundCertificate{*ref, std::sqrt(2.0) * m.dist(z0, *ref), "rippa(sqrt(2) R)"};

  GeodesicAverager avg(m);
  Point z = z0;
  std::uint64_t calls = 0;

  auto record = [&](const Point& p) {
    trace.iterates.push_back(p);
    trace.f_values.push_back(value_fn(p));
    trace.grad_norms.push_back(grad_norm_fn(p));
    ++calls;  // the gradient/field evaluation behind grad_norm_fn
    trace.oracle_calls.push_back(calls);
    trace.wall_ns.push_back(now_ns());
    if (ref) {
      double d = m.dist(p, *ref);
      trace.dist_to_ref_sq.push_back(d * d);
    }
  };

  record(z);
  for (int t = 0; t < opt.outer_iters; ++t) {
    if (trace.grad_norms.back() <= 1e-14) {
      trace.converged = true;
      break;
    }
    InexactnessBudget budget;
    budget.mode = opt.mu > 0.0 ? InexactnessBudget::Mode::MuPositive : InexactnessBudget::Mode::MuZero;
    budget.delta_t = budget_delta(budget.mode, t, opt.eta, opt.mu);
    budget.c_t = budget_c(m, budget.delta_t, opt.eta, smooth_for_c, opt.r_bound);

    ProxT pp = make_prox(z);
    ProxResult res = prox_solve(pp, opt.inner, budget, opt.inner_iters);
    calls += res.inner_calls;
    trace.residual_norms.push_back(res.residual_norm);
    z = res.z;
    if (opt.mu <= 0.0) avg.add(z);  // uniform average of z_1 .. z_T
    record(z);
  }
  if (opt.mu <= 0.0 && !avg.empty()) trace.averaged_output = avg.value();
  return trace;
}

}  // namespace

SolverTrace rippa(const Objective& f, const Point& z0, const RippaOptions& opt,
                  std::optional<Point> ref) {
  const Manifold& m = *f.manifold;
  std::function<double(const Point&)> value_fn = [&f](const Point& p) { return f.value(p); };
  std::function<double(const Point&)> grad_norm_fn = [&f, &m](const Point& p) {
    return m.norm(f.gradient(p));
  };
  std::function<ProxProblem(const Point&)> make_prox = [&](const Point& anchor) {
    return ProxProblem{f, anchor, opt.eta, opt.r_bound};
  };
  return rippa_impl<Objective, ProxProblem>(f, m, z0, opt, std::move(ref), value_fn, grad_norm_fn,
                                            make_prox);
}

SolverTrace rippa(const SaddleObjective& f, const Point& z0, const RippaOptions& opt,
                  std::optional<Point> ref) {
  if (opt.inner != InnerSolver::RGDA && opt.inner != InnerSolver::Exact)
    throw Error(ErrorCode::ConfigInvalid, "saddle proximal point needs the descent-ascent inner solver");
  const ProductManifold& m = *f.product;
  std::function<double(const Point&)> value_fn = [&f, &m](const Point& p) {
    return f.value(m.left_part(p), m.right_part(p));
  };
  std::function<double(const Point&)> grad_norm_fn = [&f](const Point& p) { return f.field_norm(p); };
  std::function<SaddleProxProblem(const Point&)> make_prox = [&](const Point& anchor) {
    return SaddleProxProblem{f, anchor, opt.eta, opt.r_bound};
  };
  return rippa_impl<SaddleObjective, SaddleProxProblem>(f, m, z0, opt, std::move(ref), value_fn,
                                                        grad_norm_fn, make_prox);
}

Point moreau_prox(const Objective& f, const Ball& domain, const Point& x, double eta) {
  if (!(eta > 0.0)) throw Error(ErrorCode::ConfigInvalid, "eta must be positive");
  const Manifold& m = *f.manifold;
  m.check_point(x);
  m.check_point(domain.center);

  // Closed-form prox applies whenever its output already satisfies the domain
  // constraint; otherwise run projected gradient on the subproblem.
  if (f.exact_prox) {
    Point p = f.exact_prox(x, eta);
    if (m.dist(domain.center, p) <= domain.radius + 1e-12) return p;
  }

  double reach = m.dist(x, domain.center) + domain.radius;
  double lf = f.smooth ? f.smoothness_on(m.dist(f.reference, domain.center) + domain.radius)
                       : throw Error(ErrorCode::ConfigInvalid, "Moreau prox needs a smooth objective");
  double lh = lf + zeta(reach, m.kappa_min()) / eta;
  double step = 1.0 / lh;

  Point z = project_ball(m, domain.center, domain.radius, x);
  for (int k = 0; k < 100000; ++k) {
    TangentVector gf = f.gradient(z);
    TangentVector lx = m.log(z, x);
    TangentVector gh{z.coords, gf.vec - lx.vec / eta};
    Point moved = m.exp(z, TangentVector{z.coords, -step * gh.vec});
    Point next = project_ball(m, domain.center, domain.radius, moved);
    double fp_res = m.dist(z, next) / step;
    z = next;
    if (fp_res <= 1e-10) return z;
  }
  throw Error(ErrorCode::InnerBudgetExceeded, "Moreau prox did not reach its fixed-point tolerance");
}

double moreau_value(const Objective& f, const Ball& domain, const Point& x, double eta) {
  const Manifold& m = *f.manifold;
  Point p = moreau_prox(f, domain, x, eta);
  double d = m.dist(x, p);
  return f.value(p) + d * d / (2.0 * eta);
}

TangentVector moreau_grad(const Objective& f, const Ball& domain, const Point& x, double eta) {
  const Manifold& m = *f.manifold;
  Point p = moreau_prox(f, domain, x, eta);
  TangentVector l = m.log(x, p);
  return TangentVector{x.coords, -l.vec / eta};
}

}  // namespace gcvx
