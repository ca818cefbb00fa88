#include "gcvx/verify.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace gcvx {

namespace {

// Per-manifold sampling configuration. `ball` keeps samples comfortably inside
// the region where every tested guarantee applies (on the cap: far from the
// boundary, so exp/log never leave it); `vmax` caps tangent norms for the
// roundtrip checks.
struct Ctx {
  std::shared_ptr<const Manifold> m;
  const char* label;
  double ball;
  double vmax;
};

std::vector<Ctx> all_ctxs() {
  return {{make_euclidean(5), "euclidean", 0.8, 5.0},
          {make_hyperbolic(5), "hyperbolic", 0.8, 5.0},
          {make_spd(3), "spd", 0.7, 4.0},
          {make_spherical_cap(4, 1.4), "cap", 0.30, 0.9}};
}

std::vector<Ctx> hadamard_ctxs() {
  auto v = all_ctxs();
  v.pop_back();
  return v;
}

std::uint64_t name_stream(const char* name) {
  std::uint64_t h = 1469598103934665603ull;
  for (const char* p = name; *p; ++p) h = (h ^ static_cast<unsigned char>(*p)) * 1099511628211ull;
  return h;
}

int n_samples(int def, int override_n) { return override_n > 0 ? override_n : def; }

Point sample_near(const Manifold& m, const Point& c, double radius, Rng& rng) {
  return m.exp(c, m.random_tangent_in_ball(c, radius, rng));
}

// Plain fixed-step descent run to near machine precision; the reference
// minimizer each certificate and rate check is measured against.
Point solve_reference(const Objective& f, const Point& x0, double grad_tol = 1e-13) {
  const Manifold& m = *f.manifold;
  double L = f.smoothness_on(m.dist(f.reference, x0) + 2.0);
  Point x = x0;
  for (int i = 0; i < 200000; ++i) {
    TangentVector g = f.gradient(x);
    if (m.norm(g) <= grad_tol) break;
    x = m.exp(x, TangentVector{x.coords, -(1.0 / L) * g.vec});
  }
  return x;
}

struct KarcherInstance {
  Objective f;
  std::vector<Point> centers;
  Point x0;
  Point xstar;
  double big_r = 0.0;  // d(x0, xstar)
};

KarcherInstance make_karcher(const Ctx& c, int n_centers, Rng& rng, bool solve = true) {
  KarcherInstance inst;
  Point base = c.m->base_point();
  for (int i = 0; i < n_centers; ++i) inst.centers.push_back(sample_near(*c.m, base, c.ball, rng));
  inst.f = karcher(c.m, inst.centers);
  inst.x0 = sample_near(*c.m, base, c.ball, rng);
  if (solve) {
    inst.xstar = solve_reference(inst.f, inst.x0);
    inst.big_r = c.m->dist(inst.x0, inst.xstar);
  }
  return inst;
}

CheckReport make_report(const char* name, const char* module, std::uint64_t samples,
                        double max_violation, double tolerance, std::string notes) {
  CheckReport r;
  r.name = name;
  r.module = module;
  r.samples = samples;
  r.max_violation = max_violation;
  r.tolerance = tolerance;
  r.passed = max_violation <= tolerance;
  r.notes = std::move(notes);
  return r;
}

// ---------------------------------------------------------------- manifolds

CheckReport check_roundtrip(std::uint64_t seed, int samples) {
  const char* name = "manifolds-roundtrip";
  double worst = 0.0;
  std::uint64_t count = 0;
  for (const Ctx& c : all_ctxs()) {
    Rng rng(seed, name_stream(name) ^ name_stream(c.label));
    int n = n_samples(200, samples);
    for (int i = 0; i < n; ++i) {
      Point x = sample_near(*c.m, c.m->base_point(), c.ball, rng);
      TangentVector v = c.m->random_tangent_in_ball(x, c.vmax, rng);
      Point y = c.m->exp(x, v);
      double nv = c.m->norm(v);
      double vd = std::abs(c.m->dist(x, y) - nv) / (1.0 + nv);
      TangentVector l = c.m->log(x, y);
      double vl = c.m->norm(x, Vec(l.vec - v.vec)) / (1.0 + nv);
      worst = std::max({worst, vd, vl});
      ++count;
    }
  }
  return make_report(name, "manifolds", count, worst, 1e-7,
                     "dist(exp(x,v),x) = |v| and log(x,exp(x,v)) = v on random points");
}

CheckReport check_transport_isometry(std::uint64_t seed, int samples) {
  const char* name = "manifolds-transport-isometry";
  double worst = 0.0;
  std::uint64_t count = 0;
  for (const Ctx& c : all_ctxs()) {
    Rng rng(seed, name_stream(name) ^ name_stream(c.label));
    int n = n_samples(200, samples);
    for (int i = 0; i < n; ++i) {
      Point x = sample_near(*c.m, c.m->base_point(), c.ball, rng);
      Point y = c.m->exp(x, c.m->random_tangent_in_ball(x, c.ball, rng));
      TangentVector u = c.m->random_gaussian_tangent(x, rng);
      TangentVector v = c.m->random_gaussian_tangent(x, rng);
      TangentVector tu = c.m->transport(x, y, u);
      TangentVector tv = c.m->transport(x, y, v);
      double before = c.m->inner(x, u.vec, v.vec);
      double after = c.m->inner(y, tu.vec, tv.vec);
      double scale = std::max(1e-12, c.m->norm(u) * c.m->norm(v));
      worst = std::max(worst, std::abs(after - before) / scale);
      ++count;
    }
  }
  return make_report(name, "manifolds", count, worst, 1e-9,
                     "parallel transport preserves inner products");
}

CheckReport check_vector_contraction(std::uint64_t seed, int samples) {
  const char* name = "manifolds-vector-contraction";
  double worst = 0.0;
  std::uint64_t count = 0;
  for (const Ctx& c : hadamard_ctxs()) {
    Rng rng(seed, name_stream(name) ^ name_stream(c.label));
    int n = n_samples(300, samples);
    for (int i = 0; i < n; ++i) {
      Point base = c.m->base_point();
      Point z = sample_near(*c.m, base, 1.2, rng);
      Point x = sample_near(*c.m, base, 1.2, rng);
      Point y = sample_near(*c.m, base, 1.2, rng);
      TangentVector lx = c.m->log(z, x);
      TangentVector ly = c.m->log(z, y);
      double lhs = c.m->norm(z, Vec(lx.vec - ly.vec));
      worst = std::max(worst, lhs - c.m->dist(x, y));
      ++count;
    }
  }
  return make_report(name, "manifolds", count, worst, 1e-9,
                     "on nonpositively curved spaces the log map contracts vector differences");
}

CheckReport check_product_distance(std::uint64_t seed, int samples) {
  const char* name = "manifolds-product-distance";
  double worst = 0.0;
  std::uint64_t count = 0;
  struct Pair {
    std::shared_ptr<const Manifold> a, b;
    double ball;
  };
  std::vector<Pair> pairs = {{make_hyperbolic(3), make_euclidean(2), 0.8},
                             {make_spd(2), make_spherical_cap(3, 1.4), 0.3}};
  int pi = 0;
  for (const Pair& pr : pairs) {
    auto pm = std::static_pointer_cast<const ProductManifold>(make_product(pr.a, pr.b));
    Rng rng(seed, name_stream(name) + static_cast<std::uint64_t>(pi++));
    int n = n_samples(300, samples);
    for (int i = 0; i < n; ++i) {
      Point z1 = sample_near(*pm, pm->base_point(), pr.ball, rng);
      Point z2 = sample_near(*pm, pm->base_point(), pr.ball, rng);
      double d = pm->dist(z1, z2);
      double dl = pr.a->dist(pm->left_part(z1), pm->left_part(z2));
      double dr = pr.b->dist(pm->right_part(z1), pm->right_part(z2));
      worst = std::max(worst, std::abs(d * d - dl * dl - dr * dr) / (1.0 + d * d));
      ++count;
    }
  }
  return make_report(name, "manifolds", count, worst, 1e-12,
                     "product distance composes factor distances by the Pythagorean rule");
}

// ----------------------------------------------------------------- geometry

CheckReport check_zeta_delta_monotonicity(std::uint64_t seed, int samples) {
  const char* name = "zeta-delta-monotonicity";
  double worst = 0.0;
  std::uint64_t count = 0;
  for (const Ctx& c : all_ctxs()) {
    Rng rng(seed, name_stream(name) ^ name_stream(c.label));
    int n = n_samples(500, samples);
    for (int i = 0; i < n; ++i) {
      double r1 = rng.uniform(1e-3, 3.0);
      double r2 = rng.uniform(1e-3, 3.0);
      if (r1 > r2) std::swap(r1, r2);
      worst = std::max(worst, zeta(r1, c.m->kappa_min()) - zeta(r2, c.m->kappa_min()));
      worst = std::max(worst, delta(r2, c.m->kappa_max()) - delta(r1, c.m->kappa_max()));
      ++count;
    }
  }
  return make_report(name, "geometry", count, worst, 1e-12,
                     "zeta grows and delta shrinks with the ball radius");
}

CheckReport check_zeta_bracketing(std::uint64_t seed, int samples) {
  const char* name = "zeta-bracketing";
  double worst = 0.0;
  std::uint64_t count = 0;
  int ki = 0;
  for (double kappa : {-1.0, -0.5, -0.07}) {
    Rng rng(seed, name_stream(name) + static_cast<std::uint64_t>(ki++));
    int n = n_samples(500, samples);
    for (int i = 0; i < n; ++i) {
      double r = rng.uniform(1e-4, 5.0);
      double a = r * std::sqrt(-kappa);
      double z = zeta(r, kappa);
      worst = std::max({worst, a - z, z - (a + 1.0)});
      ++count;
    }
  }
  return make_report(name, "geometry", count, worst, 1e-12,
                     "r*sqrt(|kappa|) <= zeta_r <= r*sqrt(|kappa|) + 1 for kappa < 0");
}

CheckReport check_cosine_slacks(std::uint64_t seed, int samples) {
  const char* name = "cosine-slacks-nonnegative";
  double worst = 0.0;
  std::uint64_t count = 0;
  for (const Ctx& c : all_ctxs()) {
    Rng rng(seed, name_stream(name) ^ name_stream(c.label));
    int n = n_samples(10000, samples);
    for (int i = 0; i < n; ++i) {
      Point center = sample_near(*c.m, c.m->base_point(), 0.6 * c.ball, rng);
      Point x = sample_near(*c.m, center, 0.8 * c.ball, rng);
      Point y = sample_near(*c.m, center, 0.8 * c.ball, rng);
      Point p = sample_near(*c.m, center, 0.8 * c.ball, rng);
      CosineSlacks s = cosine_slacks(*c.m, x, y, p);
      worst = std::max({worst, -s.lower, -s.upper});
      ++count;
    }
  }
  return make_report(name, "geometry", count, worst, 1e-8,
                     "two-sided law-of-cosines comparison holds on random triangles");
}

CheckReport check_average_convexity(std::uint64_t seed, int samples) {
  const char* name = "geodesic-average-convexity";
  double worst = 0.0;
  std::uint64_t count = 0;
  for (const Ctx& c : all_ctxs()) {
    Rng rng(seed, name_stream(name) ^ name_stream(c.label));
    int n = n_samples(150, samples);
    for (int i = 0; i < n; ++i) {
      KarcherInstance inst = make_karcher(c, 4, rng, false);
      std::vector<Point> pts;
      std::vector<double> w;
      double wsum = 0.0, fsum = 0.0;
      for (int k = 0; k < 5; ++k) {
        pts.push_back(sample_near(*c.m, c.m->base_point(), c.ball, rng));
        w.push_back(rng.uniform(0.1, 1.0));
        wsum += w.back();
        fsum += w.back() * inst.f.value(pts.back());
      }
      Point avg = geodesic_average(*c.m, pts, w);
      worst = std::max(worst, inst.f.value(avg) - fsum / wsum);
      ++count;
    }
  }
  return make_report(name, "geometry", count, worst, 1e-9,
                     "the running geodesic average satisfies the convex combination bound");
}

CheckReport check_hessian_sandwich(std::uint64_t seed, int samples) {
  const char* name = "squared-distance-hessian-sandwich";
  double worst = 0.0;
  std::uint64_t count = 0;
  const double h = 1e-3;
  for (const Ctx& c : all_ctxs()) {
    Rng rng(seed, name_stream(name) ^ name_stream(c.label));
    int n = n_samples(200, samples);
    for (int i = 0; i < n; ++i) {
      Point p = sample_near(*c.m, c.m->base_point(), c.ball, rng);
      Point x = sample_near(*c.m, c.m->base_point(), c.ball, rng);
      TangentVector u = c.m->random_gaussian_tangent(x, rng);
      double nu = c.m->norm(u);
      if (nu < 1e-9) continue;
      u.vec /= nu;
      auto phi = [&](const Point& q) {
        double d = c.m->dist(p, q);
        return 0.5 * d * d;
      };
      Point xp = c.m->exp(x, TangentVector{x.coords, h * u.vec});
      Point xm = c.m->exp(x, TangentVector{x.coords, -h * u.vec});
      double second = (phi(xp) - 2.0 * phi(x) + phi(xm)) / (h * h);
      double big_d = c.m->dist(x, p) + h;
      double lo = delta(big_d, c.m->kappa_max());
      double hi = zeta(big_d, c.m->kappa_min());
      worst = std::max({worst, lo - second, second - hi});
      ++count;
    }
  }
  return make_report(name, "geometry", count, worst, 5e-4,
                     "geodesic second differences of half squared distance lie in [delta_D, zeta_D]");
}

// --------------------------------------------------------------- objectives

CheckReport check_gradient_fd(std::uint64_t seed, int samples) {
  const char* name = "gradient-finite-difference-agreement";
  double worst = 0.0;
  std::uint64_t count = 0;
  const double h = 1e-4;
  for (const Ctx& c : all_ctxs()) {
    Rng rng(seed, name_stream(name) ^ name_stream(c.label));
    Point base = c.m->base_point();
    KarcherInstance inst = make_karcher(c, 4, rng, false);
    Objective sq = squared_distance(c.m, sample_near(*c.m, base, c.ball, rng), 1.3);
    Objective reg = regularize(inst.f, sample_near(*c.m, base, c.ball, rng), 0.1, 1.0);
    Point p1 = sample_near(*c.m, base, c.ball, rng);
    Point p2 = sample_near(*c.m, base, c.ball, rng);
    Objective mx = max_of_two_squared_distances(c.m, p1, p2);
    std::vector<const Objective*> objs = {&inst.f, &sq, &reg, &mx};
    int n = n_samples(50, samples);
    for (const Objective* f : objs) {
      for (int i = 0; i < n; ++i) {
        Point x = sample_near(*c.m, base, c.ball, rng);
        if (f == &mx) {
          // the max of two branches is smooth only away from the tie surface
          for (int tries = 0;
               tries < 50 && std::abs(c.m->dist(x, p1) - c.m->dist(x, p2)) < 0.05; ++tries)
            x = sample_near(*c.m, base, c.ball, rng);
          if (std::abs(c.m->dist(x, p1) - c.m->dist(x, p2)) < 0.05) continue;
        }
        TangentVector g = f->gradient(x);
        TangentVector fd = fd_gradient(*f, x, h);
        worst = std::max(worst, c.m->norm(x, Vec(fd.vec - g.vec)) / (1.0 + c.m->norm(g)));
        ++count;
      }
    }
  }
  // the 1-d absolute value away from the origin
  {
    Objective av = abs_value();
    Rng rng(seed, name_stream(name) ^ name_stream("abs"));
    for (int i = 0; i < n_samples(30, samples); ++i) {
      double t = rng.uniform(0.1, 2.0) * (rng.uniform01() < 0.5 ? -1.0 : 1.0);
      Point x{Vec::Constant(1, t)};
      TangentVector fd = fd_gradient(av, x, h);
      TangentVector g = av.gradient(x);
      worst = std::max(worst, std::abs(fd.vec[0] - g.vec[0]));
      ++count;
    }
  }
  return make_report(name, "objectives", count, worst, 1e-5,
                     "analytic gradients match geodesic central differences for every objective");
}

CheckReport check_midpoint_convexity(std::uint64_t seed, int samples) {
  const char* name = "midpoint-g-convexity";
  double worst = 0.0;
  std::uint64_t count = 0;
  for (const Ctx& c : hadamard_ctxs()) {
    Rng rng(seed, name_stream(name) ^ name_stream(c.label));
    Point base = c.m->base_point();
    KarcherInstance inst = make_karcher(c, 4, rng, false);
    Objective sq = squared_distance(c.m, sample_near(*c.m, base, c.ball, rng), 0.9);
    Objective reg = regularize(inst.f, sample_near(*c.m, base, c.ball, rng), 0.2, 1.0);
    int n = n_samples(300, samples);
    for (const Objective* f : {&inst.f, &sq, &reg}) {
      for (int i = 0; i < n; ++i) {
        Point x = sample_near(*c.m, base, 1.2, rng);
        Point y = sample_near(*c.m, base, 1.2, rng);
        TangentVector l = c.m->log(x, y);
        Point mid = c.m->exp(x, TangentVector{x.coords, 0.5 * l.vec});
        worst = std::max(worst, f->value(mid) - 0.5 * (f->value(x) + f->value(y)));
        ++count;
      }
    }
  }
  return make_report(name, "objectives", count, worst, 1e-9,
                     "geodesic midpoints respect the convexity inequality on Hadamard spaces");
}

CheckReport check_strong_convexity(std::uint64_t seed, int samples) {
  const char* name = "strong-convexity-certificate";
  double worst = 0.0;
  std::uint64_t count = 0;
  for (const Ctx& c : all_ctxs()) {
    Rng rng(seed, name_stream(name) ^ name_stream(c.label));
    Point base = c.m->base_point();
    KarcherInstance inst = make_karcher(c, 4, rng, false);
    Objective sq = squared_distance(c.m, sample_near(*c.m, base, c.ball, rng), 1.4);
    Objective reg = regularize(inst.f, sample_near(*c.m, base, 0.5 * c.ball, rng), 0.3, 1.0);
    double r = c.ball;
    int n = n_samples(300, samples);
    for (const Objective* f : {&inst.f, &sq, &reg}) {
      double mu = f->strong_convexity_on(r);
      for (int i = 0; i < n; ++i) {
        Point x = sample_near(*c.m, f->reference, r, rng);
        Point y = sample_near(*c.m, f->reference, r, rng);
        TangentVector g = f->gradient(x);
        TangentVector l = c.m->log(x, y);
        double d = c.m->dist(x, y);
        double lhs = f->value(x) + c.m->inner(x, g.vec, l.vec) + 0.5 * mu * d * d;
        worst = std::max(worst, lhs - f->value(y));
        ++count;
      }
    }
  }
  return make_report(name, "objectives", count, worst, 1e-8,
                     "lower quadratic model with the quoted strong convexity holds on sampled pairs");
}

CheckReport check_optimizer_location(std::uint64_t seed, int samples) {
  const char* name = "karcher-optimizer-location";
  double worst = 0.0;
  std::uint64_t count = 0;
  for (const Ctx& c : all_ctxs()) {
    Rng rng(seed, name_stream(name) ^ name_stream(c.label));
    int n = n_samples(5, samples);
    for (int i = 0; i < n; ++i) {
      KarcherInstance inst = make_karcher(c, 5, rng);
      Point hull_c = geodesic_average(*c.m, inst.centers);
      double hull_r = 0.0;
      for (const Point& y : inst.centers) hull_r = std::max(hull_r, c.m->dist(hull_c, y));
      Point proj = project_ball(*c.m, hull_c, hull_r, inst.xstar);
      worst = std::max(worst, inst.f.value(inst.xstar) - inst.f.value(proj));
      ++count;
    }
  }
  return make_report(name, "objectives", count, worst, 1e-10,
                     "projecting the converged mean onto the hull ball of the centers never improves it");
}

// ------------------------------------------------------------------ solvers

double certificate_violation(const Manifold& m, const SolverTrace& t) {
  if (!t.certificate) return 0.0;
  double worst = -1e300;
  for (const Point& x : t.iterates)
    worst = std::max(worst, m.dist(x, t.certificate->center) - t.certificate->radius);
  return worst;
}

CheckReport check_iterate_certificates(std::uint64_t seed, int samples) {
  const char* name = "iterate-boundedness-certificates";
  double worst = 0.0;
  std::uint64_t count = 0;
  for (const Ctx& c : all_ctxs()) {
    Rng rng(seed, name_stream(name) ^ name_stream(c.label));
    int n = n_samples(20, samples);
    for (int i = 0; i < n; ++i) {
      KarcherInstance inst = make_karcher(c, 4, rng);
      if (inst.big_r < 1e-6) continue;
      double shift = c.m->dist(inst.f.reference, inst.xstar);

      SolverTrace a = rgd(inst.f, inst.x0, StepRule::inverse_l(inst.big_r), 40, inst.xstar);
      SolverTrace b = rgd(inst.f, inst.x0, StepRule::inverse_l_zeta(inst.big_r), 40, inst.xstar);
      SolverTrace s = subgradient_rgd(inst.f, inst.x0, inst.big_r, 40, inst.xstar);
      RippaOptions opt;
      opt.eta = 1.0 / inst.f.smoothness_on(shift + 3.0 * inst.big_r);
      opt.outer_iters = 8;
      opt.r_bound = inst.big_r;
      opt.inner = InnerSolver::PRGD;
      SolverTrace p = rippa(inst.f, inst.x0, opt, inst.xstar);

      for (const SolverTrace* t : {&a, &b, &s, &p})
        worst = std::max(worst, certificate_violation(*c.m, *t));
      count += 4;
    }
  }
  return make_report(name, "solvers", count, worst, 1e-8,
                     "every iterate stays inside the ball its step rule certifies");
}

CheckReport check_monotone_decrease(std::uint64_t seed, int samples) {
  const char* name = "rgd-monotone-decrease";
  double worst = 0.0;
  std::uint64_t count = 0;
  for (const Ctx& c : all_ctxs()) {
    Rng rng(seed, name_stream(name) ^ name_stream(c.label));
    int n = n_samples(5, samples);
    for (int i = 0; i < n; ++i) {
      KarcherInstance inst = make_karcher(c, 4, rng, false);
      double L = inst.f.smoothness_on(c.m->dist(inst.f.reference, inst.x0) + 2.0);
      for (double factor : {1.0, 1.5}) {
        SolverTrace t = rgd(inst.f, inst.x0, StepRule::fixed(factor / L), 60);
        for (std::size_t k = 1; k < t.f_values.size(); ++k) {
          double rel = (t.f_values[k] - t.f_values[k - 1]) / std::max(1.0, std::abs(t.f_values[k - 1]));
          worst = std::max(worst, rel);
        }
        ++count;
      }
    }
  }
  return make_report(name, "solvers", count, worst, 1e-12,
                     "objective values never increase for steps below twice the inverse smoothness");
}

CheckReport check_linear_rate(std::uint64_t seed, int samples) {
  const char* name = "rgd-strongly-convex-linear-rate";
  double worst = 0.0;
  std::uint64_t count = 0;
  for (const Ctx& c : all_ctxs()) {
    Rng rng(seed, name_stream(name) ^ name_stream(c.label));
    int n = n_samples(3, samples);
    for (int i = 0; i < n; ++i) {
      KarcherInstance inst = make_karcher(c, 4, rng);
      if (inst.big_r < 1e-3) continue;
      double shift = c.m->dist(inst.f.reference, inst.xstar);
      double L = inst.f.smoothness_on(shift + inst.big_r);
      double mu = inst.f.strong_convexity_on(shift + inst.big_r);
      double q = 1.0 - mu / L;
      SolverTrace t = rgd(inst.f, inst.x0, StepRule::fixed(1.0 / L), 40, inst.xstar);
      double r2 = inst.big_r * inst.big_r;
      double qt = 1.0;
      for (std::size_t k = 0; k < t.dist_to_ref_sq.size(); ++k) {
        if (t.dist_to_ref_sq[k] > 1e-20 * std::max(1.0, r2) && qt * r2 > 1e-290)
          worst = std::max(worst, t.dist_to_ref_sq[k] / (qt * r2));
        qt *= q;
      }
      ++count;
    }
  }
  return make_report(name, "solvers", count, worst, 4.0,
                     "squared distance to the minimizer decays geometrically with fitted constant <= 4");
}

CheckReport check_distance_observation(std::uint64_t seed, int samples) {
  const char* name = "distance-monotonicity-observation";
  double worst = -1e300;
  std::uint64_t count = 0;
  std::uint64_t increases = 0;
  for (const Ctx& c : all_ctxs()) {
    Rng rng(seed, name_stream(name) ^ name_stream(c.label));
    int n = n_samples(3, samples);
    for (int i = 0; i < n; ++i) {
      KarcherInstance inst = make_karcher(c, 4, rng);
      double L = inst.f.smoothness_on(c.m->dist(inst.f.reference, inst.xstar) + inst.big_r);
      SolverTrace t = rgd(inst.f, inst.x0, StepRule::fixed(1.0 / L), 60, inst.xstar);
      for (std::size_t k = 1; k < t.dist_to_ref_sq.size(); ++k) {
        double inc = std::sqrt(t.dist_to_ref_sq[k]) - std::sqrt(t.dist_to_ref_sq[k - 1]);
        worst = std::max(worst, inc);
        if (inc > 1e-12) ++increases;
      }
      ++count;
    }
  }
  return make_report(name, "solvers", count, std::max(0.0, worst), 1e300,
                     "observational only: largest per-step increase of d(x_t, x*); " +
                         std::to_string(increases) + " increase(s) above 1e-12 recorded");
}

// ----------------------------------------------------------------- proximal

CheckReport check_quasi_nonexpansive(std::uint64_t seed, int samples) {
  const char* name = "prox-quasi-nonexpansive";
  double worst = 0.0;
  std::uint64_t count = 0;
  InexactnessBudget budget;
  for (const Ctx& c : all_ctxs()) {
    Rng rng(seed, name_stream(name) ^ name_stream(c.label));
    Point base = c.m->base_point();
    Point p = sample_near(*c.m, base, 0.6 * c.ball, rng);
    Objective sq = squared_distance(c.m, p, 1.0);
    int n = n_samples(1000, samples);
    for (int i = 0; i < n; ++i) {
      Point xbar = sample_near(*c.m, base, c.ball, rng);
      double eta = rng.uniform(0.2, 2.0);
      ProxProblem pp{sq, xbar, eta, c.m->dist(xbar, p) + 0.1};
      Point prox = prox_solve(pp, InnerSolver::Exact, budget).z;
      worst = std::max(worst, c.m->dist(prox, p) - c.m->dist(xbar, p));
      ++count;
    }
    // the same property on a mean-of-squared-distances instance, solved iteratively
    KarcherInstance inst = make_karcher(c, 4, rng);
    int nk = std::max(5, n_samples(50, samples) / 20);
    for (int i = 0; i < nk; ++i) {
      Point xbar = sample_near(*c.m, base, c.ball, rng);
      ProxProblem pp{inst.f, xbar, 0.8, c.m->dist(xbar, inst.xstar) + 0.1};
      Point prox = prox_solve(pp, InnerSolver::Exact, budget).z;
      worst = std::max(worst, c.m->dist(prox, inst.xstar) - c.m->dist(xbar, inst.xstar));
      ++count;
    }
  }
  return make_report(name, "proximal", count, worst, 1e-9,
                     "the prox step never moves away from a minimizer, on all four manifolds");
}

CheckReport check_full_nonexpansive(std::uint64_t seed, int samples) {
  const char* name = "prox-full-nonexpansive-hadamard";
  double worst = 0.0;
  std::uint64_t count = 0;
  InexactnessBudget budget;
  for (const Ctx& c : hadamard_ctxs()) {
    Rng rng(seed, name_stream(name) ^ name_stream(c.label));
    Point base = c.m->base_point();
    Point p = sample_near(*c.m, base, 0.6 * c.ball, rng);
    Objective sq = squared_distance(c.m, p, 1.0);
    int n = n_samples(1000, samples);
    auto prox_of = [&](const Objective& f, const Point& xbar, double eta) {
      ProxProblem pp{f, xbar, eta, c.m->dist(xbar, base) + 2.0};
      return prox_solve(pp, InnerSolver::Exact, budget).z;
    };
    for (int i = 0; i < n; ++i) {
      Point x1 = sample_near(*c.m, base, c.ball, rng);
      Point x2 = sample_near(*c.m, base, c.ball, rng);
      double eta = rng.uniform(0.2, 2.0);
      worst = std::max(worst,
                       c.m->dist(prox_of(sq, x1, eta), prox_of(sq, x2, eta)) - c.m->dist(x1, x2));
      ++count;
    }
    KarcherInstance inst = make_karcher(c, 4, rng, false);
    int nk = std::max(5, n_samples(50, samples) / 20);
    for (int i = 0; i < nk; ++i) {
      Point x1 = sample_near(*c.m, base, c.ball, rng);
      Point x2 = sample_near(*c.m, base, c.ball, rng);
      worst = std::max(worst, c.m->dist(prox_of(inst.f, x1, 0.8), prox_of(inst.f, x2, 0.8)) -
                                  c.m->dist(x1, x2));
      ++count;
    }
  }
  return make_report(name, "proximal", count, worst, 1e-9,
                     "the prox map is 1-Lipschitz on the nonpositively curved manifolds");
}

CheckReport check_moreau_smoothness(std::uint64_t seed, int samples) {
  const char* name = "moreau-smoothness";
  double worst = 0.0;
  std::uint64_t count = 0;
  std::vector<double> dom_r = {1.0, 1.0, 0.8, 0.4};
  std::vector<double> sample_r = {1.5, 1.5, 1.1, 0.55};
  std::vector<Ctx> ctxs = all_ctxs();
  for (std::size_t ci = 0; ci < ctxs.size(); ++ci) {
    const Ctx& c = ctxs[ci];
    Rng rng(seed, name_stream(name) ^ name_stream(c.label));
    Point base = c.m->base_point();
    Objective f = squared_distance(c.m, sample_near(*c.m, base, 0.5 * dom_r[ci], rng), 1.0);
    Ball domain{base, dom_r[ci]};
    int n = n_samples(250, samples);
    for (int i = 0; i < n; ++i) {
      double eta = rng.uniform(0.3, 1.5);
      Point x = sample_near(*c.m, base, sample_r[ci], rng);
      Point y = sample_near(*c.m, base, sample_r[ci], rng);
      Point px = moreau_prox(f, domain, x, eta);
      Point py = moreau_prox(f, domain, y, eta);
      double dx = c.m->dist(x, px);
      double mx = f.value(px) + dx * dx / (2.0 * eta);
      double dy = c.m->dist(y, py);
      double my = f.value(py) + dy * dy / (2.0 * eta);
      TangentVector lx = c.m->log(x, px);
      TangentVector lxy = c.m->log(x, y);
      double ip = c.m->inner(x, Vec(-lx.vec / eta), lxy.vec);
      double zl = zeta(dx, c.m->kappa_min());
      double dxy = c.m->dist(x, y);
      worst = std::max(worst, my - (mx + ip + zl / (2.0 * eta) * dxy * dxy));
      ++count;
    }
  }
  return make_report(name, "proximal", count, worst, 1e-8,
                     "the envelope obeys the quadratic upper model with zeta at d(x, prox(x))");
}

CheckReport check_moreau_gradient_fd(std::uint64_t seed, int samples) {
  const char* name = "moreau-gradient-fd";
  double worst = 0.0;
  std::uint64_t count = 0;
  std::vector<double> dom_r = {1.0, 1.0, 0.8, 0.4};
  std::vector<double> sample_r = {1.5, 1.5, 1.1, 0.55};
  std::vector<Ctx> ctxs = all_ctxs();
  for (std::size_t ci = 0; ci < ctxs.size(); ++ci) {
    const Ctx& c = ctxs[ci];
    Rng rng(seed, name_stream(name) ^ name_stream(c.label));
    Point base = c.m->base_point();
    Objective f = squared_distance(c.m, sample_near(*c.m, base, 0.5 * dom_r[ci], rng), 1.0);
    Ball domain{base, dom_r[ci]};
    int n = n_samples(20, samples);
    for (int i = 0; i < n; ++i) {
      double eta = rng.uniform(0.3, 1.5);
      Point x = sample_near(*c.m, base, sample_r[ci], rng);
      TangentVector g = moreau_grad(f, domain, x, eta);
      TangentVector fd = fd_gradient(
          *c.m, [&](const Point& q) { return moreau_value(f, domain, q, eta); }, x, 1e-4);
      worst = std::max(worst, c.m->norm(x, Vec(fd.vec - g.vec)) / (1.0 + c.m->norm(g)));
      ++count;
    }
  }
  return make_report(name, "extras", count, worst, 1e-5,
                     "-log_x(prox(x))/eta matches the central-difference envelope gradient");
}

CheckReport check_rippa_ergodic_rate(std::uint64_t seed, int samples) {
  const char* name = "rippa-ergodic-rate";
  double worst = 0.0;
  std::uint64_t count = 0;
  for (const Ctx& c : all_ctxs()) {
    Rng rng(seed, name_stream(name) ^ name_stream(c.label));
    int n = n_samples(2, std::min(samples, 5));
    for (int i = 0; i < n; ++i) {
      KarcherInstance inst = make_karcher(c, 5, rng);
      if (inst.big_r < 1e-3) continue;
      double shift = c.m->dist(inst.f.reference, inst.xstar);
      RippaOptions opt;
      opt.eta = 1.0 / inst.f.smoothness_on(shift + 3.0 * inst.big_r);
      opt.outer_iters = 25;
      opt.r_bound = inst.big_r;
      opt.inner = InnerSolver::PRGD;
      SolverTrace t = rippa(inst.f, inst.x0, opt, inst.xstar);
      double fstar = inst.f.value(inst.xstar);
      double r2 = inst.big_r * inst.big_r;
      GeodesicAverager avg(*c.m);
      for (std::size_t k = 1; k < t.iterates.size(); ++k) {
        avg.add(t.iterates[k]);
        double gap = inst.f.value(avg.value()) - fstar;
        worst = std::max(worst, gap - 3.0 * r2 / (opt.eta * static_cast<double>(k)));
        ++count;
      }
    }
  }
  return make_report(name, "proximal", count, worst, 1e-8,
                     "the running average of inexact proximal iterates meets the 3R^2/(eta T) gap bound");
}

CheckReport check_inner_cost(std::uint64_t seed, int samples) {
  const char* name = "inner-loop-cost-accounting";
  double worst = 0.0;
  std::uint64_t count = 0;
  for (const Ctx& c : hadamard_ctxs()) {
    Rng rng(seed, name_stream(name) ^ name_stream(c.label));
    KarcherInstance inst = make_karcher(c, 5, rng);
    if (inst.big_r < 1e-3) continue;
    double shift = c.m->dist(inst.f.reference, inst.xstar);
    double zr = zeta(inst.big_r, c.m->kappa_min());
    double d4 = delta(4.0 * inst.big_r, c.m->kappa_max());
    double smooth_for_c = inst.f.smoothness_on(c.m->dist(inst.f.reference, inst.x0) + 5.0 * inst.big_r);
    for (InnerSolver inner : {InnerSolver::PRGD, InnerSolver::CRGD}) {
      RippaOptions opt;
      opt.eta = 1.0 / inst.f.smoothness_on(shift + 3.0 * inst.big_r);
      opt.outer_iters = n_samples(15, std::min(samples, 40));
      opt.r_bound = inst.big_r;
      opt.inner = inner;
      SolverTrace t = rippa(inst.f, inst.x0, opt, inst.xstar);
      for (std::size_t k = 0; k + 1 < t.oracle_calls.size(); ++k) {
        double calls = static_cast<double>(t.oracle_calls[k + 1] - t.oracle_calls[k]) - 1.0;
        double dl = budget_delta(InexactnessBudget::Mode::MuZero, static_cast<int>(k), opt.eta, 0.0);
        double ct = budget_c(*c.m, dl, opt.eta, smooth_for_c, inst.big_r);
        double scale = inner == InnerSolver::PRGD ? zr * zr : 1.0 / d4;
        worst = std::max(worst, calls / (scale * (1.0 + std::log(1.0 / ct))));
        ++count;
      }
    }
  }
  return make_report(name, "proximal", count, worst, 50.0,
                     "inner gradient calls per outer step stay within a fitted constant of the "
                     "predicted zeta^2 (projected) and 1/delta (composite) scalings");
}

// ------------------------------------------------------------------- minmax

CheckReport check_minmax(std::uint64_t seed, int samples) {
  const char* name = "minmax-rippa-rgda";
  double worst = 0.0;
  std::uint64_t count = 0;
  auto mx = make_hyperbolic(2);
  auto my = make_hyperbolic(2);
  Rng rng(seed, name_stream(name));
  Point a = mx->exp(mx->base_point(), mx->random_tangent_in_ball(mx->base_point(), 0.6, rng));
  Point b = my->exp(my->base_point(), my->random_tangent_in_ball(my->base_point(), 0.6, rng));
  SaddleObjective f = saddle_toy(mx, my, a, b, 0.0);
  const ProductManifold& pm = *f.product;
  Point z0 = pm.join(mx->exp(a, mx->random_tangent_in_ball(a, 0.7, rng)),
                     my->exp(b, my->random_tangent_in_ball(b, 0.7, rng)));
  Point saddle = pm.join(a, b);
  double big_r = pm.dist(z0, saddle);

  RippaOptions opt;
  opt.eta = 1.0 / f.smoothness_on(big_r + 0.5);
  opt.outer_iters = n_samples(40, std::min(samples, 200));
  opt.r_bound = big_r;
  opt.inner = InnerSolver::RGDA;
  SolverTrace t = rippa(f, z0, opt, saddle);

  GeodesicAverager avg(pm);
  for (std::size_t k = 1; k < t.iterates.size(); ++k) {
    avg.add(t.iterates[k]);
    double gap = f.gap(avg.value());
    worst = std::max(worst, gap - 3.0 * big_r * big_r / (opt.eta * static_cast<double>(k)));
    ++count;
  }

  // one inner subproblem, stepped by hand: the regularized field norm must
  // shrink every step
  {
    double lh = f.smoothness_on(big_r + 0.5) + zeta(2.0 * big_r, pm.kappa_min()) / opt.eta;
    Point z = z0;
    double prev = 1e300;
    for (int k = 0; k < 30; ++k) {
      TangentVector fv = f.field(z);
      TangentVector l = pm.log(z, z0);
      Vec fh = fv.vec - l.vec / opt.eta;
      double norm_fh = pm.norm(z, fh);
      if (norm_fh > prev + 1e-10) worst = std::max(worst, norm_fh - prev);
      prev = norm_fh;
      z = pm.exp(z, TangentVector{z.coords, -(1.0 / lh) * fh});
      ++count;
    }
  }
  return make_report(name, "proximal", count, worst, 1e-8,
                     "averaged saddle iterates meet the ergodic gap bound and the inner "
                     "descent-ascent field norm is monotone");
}

CheckReport check_minmax_coupled(std::uint64_t seed, int samples) {
  const char* name = "minmax-coupled-euclidean";
  double worst = 0.0;
  std::uint64_t count = 0;
  auto mx = make_euclidean(2);
  auto my = make_euclidean(2);
  Rng rng(seed, name_stream(name));
  Point a{Vec::NullaryExpr(2, [&](Eigen::Index) { return rng.uniform(-0.5, 0.5); })};
  Point b{Vec::NullaryExpr(2, [&](Eigen::Index) { return rng.uniform(-0.5, 0.5); })};
  SaddleObjective f = saddle_toy(mx, my, a, b, 0.5);
  const ProductManifold& pm = *f.product;
  Point saddle = pm.join(a, b);
  worst = std::max(worst, f.field_norm(saddle) / 1e-12);  // scaled into the shared tolerance

  Point z0 = pm.join(Point{Vec(a.coords + Vec::Constant(2, 0.8))},
                     Point{Vec(b.coords - Vec::Constant(2, 0.6))});
  double big_r = pm.dist(z0, saddle);
  RippaOptions opt;
  opt.eta = 1.0 / f.smoothness_on(big_r + 0.5);
  opt.outer_iters = n_samples(40, std::min(samples, 200));
  opt.r_bound = big_r;
  opt.inner = InnerSolver::RGDA;
  SolverTrace t = rippa(f, z0, opt, saddle);
  GeodesicAverager avg(pm);
  for (std::size_t k = 1; k < t.iterates.size(); ++k) {
    avg.add(t.iterates[k]);
    double gap = f.gap(avg.value());
    worst = std::max(worst, (gap - 3.0 * big_r * big_r / (opt.eta * static_cast<double>(k))) / 1e-8);
    ++count;
  }
  return make_report(name, "extras", count, worst, 1.0,
                     "with bilinear coupling the saddle stays at (a, b) and the averaged gap "
                     "still decays at the 1/T rate (violations scaled to unit tolerance)");
}

}  // namespace

// ------------------------------------------------------------------ drivers

Suite parse_suite(const std::string& name) {
  if (name == "geometry") return Suite::Geometry;
  if (name == "prox") return Suite::Prox;
  if (name == "solvers") return Suite::Solvers;
  if (name == "moreau") return Suite::Moreau;
  if (name == "minmax") return Suite::Minmax;
  throw Error(ErrorCode::ConfigInvalid, "unknown suite '" + name + "'");
}

const char* suite_name(Suite s) {
  switch (s) {
    case Suite::Geometry: return "geometry";
    case Suite::Prox: return "prox";
    case Suite::Solvers: return "solvers";
    case Suite::Moreau: return "moreau";
    case Suite::Minmax: return "minmax";
  }
  return "unknown";
}

TangentVector fd_gradient(const Manifold& m, const std::function<double(const Point&)>& f,
                          const Point& x, double h) {
  if (!(h >= 1e-6 && h <= 1e-2))
    throw Error(ErrorCode::ConfigInvalid, "finite-difference step must lie in [1e-6, 1e-2]");
  std::vector<Vec> basis = m.tangent_basis(x);
  Vec out = Vec::Zero(x.coords.size());
  for (const Vec& b : basis) {
    double fp = f(m.exp(x, TangentVector{x.coords, h * b}));
    double fm = f(m.exp(x, TangentVector{x.coords, -h * b}));
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw Error(ErrorCode::NonFinite, "objective returned a non-finite value");
    out += ((fp - fm) / (2.0 * h)) * b;
  }
  return TangentVector{x.coords, out};
}

TangentVector fd_gradient(const Objective& f, const Point& x, double h) {
  return fd_gradient(*f.manifold, f.value, x, h);
}

Point brute_prox(const Objective& f, const Point& anchor, double eta) {
  const Manifold& m = *f.manifold;
  if (f.exact_prox) return f.exact_prox(anchor, eta);
  double L = f.smoothness_on(m.dist(f.reference, anchor) + 2.0);
  double step = 1.0 / (L + zeta(2.0, m.kappa_min()) / eta);
  Point z = anchor;
  double rn = 1e300;
  for (int k = 0; k < 10000; ++k) {
    TangentVector g = f.gradient(z);
    TangentVector l = m.log(z, anchor);
    Vec r = eta * g.vec - l.vec;
    rn = m.norm(z, r);
    if (rn <= 1e-12) return z;
    z = m.exp(z, TangentVector{z.coords, -(step / eta) * r});
  }
  if (rn > 1e-11)
    throw Error(ErrorCode::Diverged, "prox oracle did not reach its residual tolerance");
  return z;
}

std::vector<CheckReport> run_suite(Suite suite, std::uint64_t seed, int samples) {
  using CheckFn = CheckReport (*)(std::uint64_t, int);
  std::vector<CheckFn> checks;
  switch (suite) {
    case Suite::Geometry:
      checks = {check_roundtrip, check_transport_isometry, check_vector_contraction,
                check_product_distance, check_zeta_delta_monotonicity, check_zeta_bracketing,
                check_cosine_slacks, check_average_convexity, check_hessian_sandwich};
      break;
    case Suite::Solvers:
      checks = {check_gradient_fd, check_midpoint_convexity, check_strong_convexity,
                check_optimizer_location, check_iterate_certificates, check_monotone_decrease,
                check_linear_rate, check_distance_observation};
      break;
    case Suite::Prox:
      checks = {check_quasi_nonexpansive, check_full_nonexpansive, check_rippa_ergodic_rate,
                check_inner_cost};
      break;
    case Suite::Moreau:
      checks = {check_moreau_smoothness, check_moreau_gradient_fd};
      break;
    case Suite::Minmax:
      checks = {check_minmax, check_minmax_coupled};
      break;
  }
  std::vector<CheckReport> out;
  for (CheckFn fn : checks) {
    try {
      out.push_back(fn(seed, samples));
    } catch (const Error& e) {
      CheckReport r;
      r.name = "aborted-check";
      r.module = "extras";
      r.samples = 0;
      r.max_violation = 9e99;
      r.tolerance = 0.0;
      r.passed = false;
      r.notes = std::string("check aborted: ") + e.what();
      out.push_back(r);
    }
  }
  return out;
}

const std::vector<RegistryEntry>& verification_registry() {
  static const std::vector<RegistryEntry> reg = {
      {"geometry", "zeta-delta-monotonicity", Suite::Geometry},
      {"geometry", "zeta-bracketing", Suite::Geometry},
      {"geometry", "cosine-slacks-nonnegative", Suite::Geometry},
      {"geometry", "geodesic-average-convexity", Suite::Geometry},
      {"geometry", "squared-distance-hessian-sandwich", Suite::Geometry},
      {"objectives", "gradient-finite-difference-agreement", Suite::Solvers},
      {"objectives", "midpoint-g-convexity", Suite::Solvers},
      {"objectives", "strong-convexity-certificate", Suite::Solvers},
      {"objectives", "karcher-optimizer-location", Suite::Solvers},
      {"solvers", "iterate-boundedness-certificates", Suite::Solvers},
      {"solvers", "rgd-monotone-decrease", Suite::Solvers},
      {"solvers", "rgd-strongly-convex-linear-rate", Suite::Solvers},
      {"solvers", "distance-monotonicity-observation", Suite::Solvers},
      {"proximal", "prox-quasi-nonexpansive", Suite::Prox},
      {"proximal", "prox-full-nonexpansive-hadamard", Suite::Prox},
      {"proximal", "moreau-smoothness", Suite::Moreau},
      {"proximal", "rippa-ergodic-rate", Suite::Prox},
      {"proximal", "inner-loop-cost-accounting", Suite::Prox},
      {"proximal", "minmax-rippa-rgda", Suite::Minmax},
  };
  return reg;
}

std::string to_json_line(const CheckReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["samples"] = r.samples;
  j["max_violation"] = r.max_violation;
  j["tolerance"] = r.tolerance;
  j["passed"] = r.passed;
  j["notes"] = r.notes;
  return j.dump();
}

}  // namespace gcvx
