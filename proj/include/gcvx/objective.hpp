#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gcvx/geometry.hpp"
#include "gcvx/manifold.hpp"

namespace gcvx {

// Geodesically convex objective on a manifold. The curvature-dependent
// constants are functions of a ball radius around `reference`; callers query
// them at whatever radius their own guarantees require. `gradient` returns a
// subgradient wherever the function is nonsmooth (`smooth` is false then).
struct Objective {
  std::shared_ptr<const Manifold> manifold;
  std::string name;
  std::function<double(const Point&)> value;
  std::function<TangentVector(const Point&)> gradient;
  std::function<double(double)> smoothness_on;         // L valid on B(reference, r)
  std::function<double(double)> strong_convexity_on;   // mu valid on B(reference, r)
  std::function<double(double)> lipschitz_on;          // subgradient norm bound on B(reference, r)
  Point reference;
  bool smooth = true;
  // Closed-form prox_{eta f}(anchor) where one exists (quadratics, squared
  // distances); null otherwise.
  std::function<Point(const Point& anchor, double eta)> exact_prox;
};

// Convex-concave saddle objective on a product of two manifolds. The field
// F(z) = (grad_x f, -grad_y f) drives descent-ascent and proximal methods and
// vanishes exactly at saddle points.
struct SaddleObjective {
  std::shared_ptr<const ProductManifold> product;
  std::string name;
  std::function<double(const Point& x, const Point& y)> value;
  std::function<TangentVector(const Point& x, const Point& y)> grad_x;
  std::function<TangentVector(const Point& x, const Point& y)> grad_y;
  std::function<double(double)> smoothness_on;
  std::function<double(double)> strong_convexity_on;
  Point reference;  // product point; defaults to the saddle for toy instances
  // Exact duality gap sup_y f(x,y) - inf_x f(x,y) where computable in closed
  // form; null otherwise.
  std::function<double(const Point& x, const Point& y)> duality_gap;

  TangentVector field(const Point& z) const;
  double field_norm(const Point& z) const;
  double gap(const Point& z) const;
};

// Mean of squared distances to the centers: F(x) = (1/2n) sum_i d(x, y_i)^2.
// Constants are quoted around `reference` (defaults to the running geodesic
// average of the centers) using the diameter of the ball that contains both
// the query ball and every center.
Objective karcher(std::shared_ptr<const Manifold> m, const std::vector<Point>& centers,
                  std::optional<Point> reference = {});

// f(x) = (weight/2) d(p, x)^2.
Objective squared_distance(std::shared_ptr<const Manifold> m, const Point& p, double weight = 1.0);

// F = f + (eps / (2 R^2)) d(x0, .)^2, the strong-convexity regularization used
// to reduce convex to strongly convex problems. Constants compose by shifting
// the query radius by d(f.reference, x0).
Objective regularize(const Objective& f, const Point& x0, double eps, double R);

// f(x,y) = 1/2 d(x,a)^2 - 1/2 d(y,b)^2 + coupling * <x - a, y - b>.
// The bilinear coupling term is only defined on flat factors; requesting a
// nonzero coupling on curved factors throws CouplingUnsupported.
SaddleObjective saddle_toy(std::shared_ptr<const Manifold> mx, std::shared_ptr<const Manifold> my,
                           const Point& a, const Point& b, double coupling = 0.0);

// Nonsmooth test instances.
Objective abs_value();  // f(x) = |x| on R^1
Objective max_of_two_squared_distances(std::shared_ptr<const Manifold> m, const Point& p1,
                                       const Point& p2);

}  // namespace gcvx
