#include "gcvx/objective.hpp"

#include <algorithm>
#include <cmath>

namespace gcvx {

TangentVector SaddleObjective::field(const Point& z) const {
  Point x = product->left_part(z);
  Point y = product->right_part(z);
  TangentVector gx = grad_x(x, y);
  TangentVector gy = grad_y(x, y);
  return TangentVector{z.coords, product->join(gx.vec, -gy.vec)};
}

double SaddleObjective::field_norm(const Point& z) const {
  TangentVector f = field(z);
  return product->norm(Point{z.coords}, f.vec);
}

double SaddleObjective::gap(const Point& z) const {
  if (!duality_gap) throw Error(ErrorCode::ConfigInvalid, "no closed-form duality gap available");
  return duality_gap(product->left_part(z), product->right_part(z));
}

Objective karcher(std::shared_ptr<const Manifold> m, const std::vector<Point>& centers,
                  std::optional<Point> reference) {
  if (centers.empty()) throw Error(ErrorCode::EmptyInput, "karcher mean needs at least one center");
  for (const Point& c : centers) m->check_point(c);
  Point ref = reference ? *reference : geodesic_average(*m, centers);
  double spread = 0.0;
  for (const Point& c : centers) spread = std::max(spread, m->dist(ref, c));

  double n = static_cast<double>(centers.size());
  double kmin = m->kappa_min(), kmax = m->kappa_max();

  Objective f;
  f.manifold = m;
  f.name = "karcher";
  f.reference = ref;
  f.smooth = true;
  f.value = [m, centers, n](const Point& x) {
    double acc = 0.0;
    for (const Point& c : centers) {
      double d = m->dist(x, c);
      acc += d * d;
    }
    return acc / (2.0 * n);
  };
  f.gradient = [m, centers, n](const Point& x) {
    Vec g = Vec::Zero(m->rep_size());
    for (const Point& c : centers) g -= m->log(x, c).vec;
    return TangentVector{x.coords, g / n};
  };
  // Diameter of the ball around `reference` that contains both B(reference, r)
  // and every center.
  auto diam = [spread](double r) { return 2.0 * std::max(r, spread); };
  f.smoothness_on = [diam, kmin](double r) { return zeta(diam(r), kmin); };
  f.strong_convexity_on = [diam, kmax](double r) { return delta(diam(r), kmax); };
  f.lipschitz_on = [spread](double r) { return r + spread; };
  return f;
}

Objective squared_distance(std::shared_ptr<const Manifold> m, const Point& p, double weight) {
  m->check_point(p);
  if (!(weight > 0.0)) throw Error(ErrorCode::ConfigInvalid, "weight must be positive");
  double kmin = m->kappa_min(), kmax = m->kappa_max();

  Objective f;
  f.manifold = m;
  f.name = "squared_distance";
  f.reference = p;
  f.smooth = true;
  f.value = [m, p, weight](const Point& x) {
    double d = m->dist(p, x);
    return 0.5 * weight * d * d;
  };
  f.gradient = [m, p, weight](const Point& x) {
    TangentVector l = m->log(x, p);
    return TangentVector{x.coords, -weight * l.vec};
  };
  // Hessian eigenvalues of (1/2) d(p,.)^2 at x lie in [delta_{d(p,x)}, zeta_{d(p,x)}].
  f.smoothness_on = [kmin, weight](double r) { return weight * zeta(r, kmin); };
  f.strong_convexity_on = [kmax, weight](double r) { return weight * delta(r, kmax); };
  f.lipschitz_on = [weight](double r) { return weight * r; };
  // prox_{eta f}(anchor) moves a fraction eta*w/(1 + eta*w) along the geodesic
  // toward p.
  f.exact_prox = [m, p, weight](const Point& anchor, double eta) {
    TangentVector dir = m->log(anchor, p);
    dir.vec *= eta * weight / (1.0 + eta * weight);
    return m->exp(anchor, dir);
  };
  return f;
}

Objective regularize(const Objective& f, const Point& x0, double eps, double R) {
  if (!(eps > 0.0) || !(R > 0.0))
    throw Error(ErrorCode::ConfigInvalid, "regularization needs eps > 0 and R > 0");
  auto m = f.manifold;
  m->check_point(x0);
  double lam = eps / (R * R);
  double shift = m->dist(f.reference, x0);
  double kmin = m->kappa_min(), kmax = m->kappa_max();

  Objective g;
  g.manifold = m;
  g.name = f.name + "+reg";
  g.reference = x0;
  g.smooth = f.smooth;
  g.value = [m, f, x0, lam](const Point& x) {
    double d = m->dist(x0, x);
    return f.value(x) + 0.5 * lam * d * d;
  };
  g.gradient = [m, f, x0, lam](const Point& x) {
    TangentVector gf = f.gradient(x);
    TangentVector l = m->log(x, x0);
    return TangentVector{x.coords, gf.vec - lam * l.vec};
  };
  g.smoothness_on = [f, lam, shift, kmin](double r) {
    return f.smoothness_on(r + shift) + lam * zeta(r, kmin);
  };
  g.strong_convexity_on = [f, lam, shift, kmax](double r) {
    return std::max(0.0, f.strong_convexity_on(r + shift)) + lam * delta(r, kmax);
  };
  g.lipschitz_on = [f, lam, shift](double r) { return f.lipschitz_on(r + shift) + lam * r; };
  return g;
}

SaddleObjective saddle_toy(std::shared_ptr<const Manifold> mx, std::shared_ptr<const Manifold> my,
                           const Point& a, const Point& b, double coupling) {
  mx->check_point(a);
  my->check_point(b);
  bool flat = mx->kind() == ManifoldKind::Euclidean && my->kind() == ManifoldKind::Euclidean;
  if (coupling != 0.0 && !flat)
    throw Error(ErrorCode::CouplingUnsupported,
                "bilinear coupling is only defined on Euclidean factors");

  auto prod = std::make_shared<ProductManifold>(mx, my);
  double kmin = std::min(mx->kappa_min(), my->kappa_min());
  double kmax = std::max(mx->kappa_max(), my->kappa_max());

  SaddleObjective s;
  s.product = prod;
  s.name = "saddle_toy";
  s.reference = prod->join(a, b);
  s.value = [mx, my, a, b, coupling](const Point& x, const Point& y) {
    double dx = mx->dist(x, a);
    double dy = my->dist(y, b);
    double v = 0.5 * dx * dx - 0.5 * dy * dy;
    if (coupling != 0.0) v += coupling * (x.coords - a.coords).dot(y.coords - b.coords);
    return v;
  };
  s.grad_x = [mx, a, b, coupling](const Point& x, const Point& y) {
    TangentVector l = mx->log(x, a);
    Vec g = -l.vec;
    if (coupling != 0.0) g += coupling * (y.coords - b.coords);
    return TangentVector{x.coords, g};
  };
  s.grad_y = [my, a, b, coupling](const Point& x, const Point& y) {
    TangentVector l = my->log(y, b);
    Vec g = l.vec;
    if (coupling != 0.0) g += coupling * (x.coords - a.coords);
    return TangentVector{y.coords, g};
  };
  if (coupling == 0.0) {
    s.smoothness_on = [kmin](double r) { return zeta(r, kmin); };
    s.strong_convexity_on = [kmax](double r) { return delta(r, kmax); };
    s.duality_gap = [mx, my, a, b](const Point& x, const Point& y) {
      double dx = mx->dist(x, a);
      double dy = my->dist(y, b);
      return 0.5 * dx * dx + 0.5 * dy * dy;
    };
  } else {
    double l = std::sqrt(1.0 + coupling * coupling);
    s.smoothness_on = [l](double) { return l; };
    s.strong_convexity_on = [](double) { return 1.0; };
    s.duality_gap = [a, b, coupling](const Point& x, const Point& y) {
      double nx = (x.coords - a.coords).squaredNorm();
      double ny = (y.coords - b.coords).squaredNorm();
      return 0.5 * (1.0 + coupling * coupling) * (nx + ny);
    };
  }
  return s;
}

Objective abs_value() {
  auto m = make_euclidean(1);
  Objective f;
  f.manifold = m;
  f.name = "abs";
  f.reference = m->base_point();
  f.smooth = false;
  f.value = [](const Point& x) { return std::abs(x.coords(0)); };
  f.gradient = [](const Point& x) {
    Vec g(1);
    g(0) = x.coords(0) > 0.0 ? 1.0 : (x.coords(0) < 0.0 ? -1.0 : 0.0);
    return TangentVector{x.coords, g};
  };
  f.smoothness_on = [](double) {
    throw Error(ErrorCode::ConfigInvalid, "abs is nonsmooth");
    return 0.0;
  };
  f.strong_convexity_on = [](double) { return 0.0; };
  f.lipschitz_on = [](double) { return 1.0; };
  return f;
}

Objective max_of_two_squared_distances(std::shared_ptr<const Manifold> m, const Point& p1,
                                       const Point& p2) {
  m->check_point(p1);
  m->check_point(p2);
  Point mid = geodesic_average(*m, {p1, p2});
  double spread = std::max(m->dist(mid, p1), m->dist(mid, p2));

  Objective f;
  f.manifold = m;
  f.name = "max_sqdist";
  f.reference = mid;
  f.smooth = false;
  f.value = [m, p1, p2](const Point& x) {
    double d1 = m->dist(p1, x);
    double d2 = m->dist(p2, x);
    return 0.5 * std::max(d1 * d1, d2 * d2);
  };
  // subgradient: gradient of the active branch, first branch on ties
  f.gradient = [m, p1, p2](const Point& x) {
    double d1 = m->dist(p1, x);
    double d2 = m->dist(p2, x);
    const Point& active = d1 >= d2 ? p1 : p2;
    TangentVector l = m->log(x, active);
    return TangentVector{x.coords, -l.vec};
  };
  f.smoothness_on = [](double) {
    throw Error(ErrorCode::ConfigInvalid, "max of squared distances is nonsmooth");
    return 0.0;
  };
  f.strong_convexity_on = [m, spread](double r) { return delta(r + spread, m->kappa_max()); };
  f.lipschitz_on = [spread](double r) { return r + spread; };
  return f;
}

}  // namespace gcvx
