#pragma once

#include <vector>

#include "gcvx/manifold.hpp"

namespace gcvx {

// Curvature-dependent distortion constants for a ball of the given radius:
// zeta >= 1 bounds smoothness inflation from below-bounded negative curvature,
// delta <= 1 bounds convexity deflation from above-bounded positive curvature.
struct CurvatureConstants {
  double zeta = 1.0;
  double delta = 1.0;
  double radius = 0.0;
};

// zeta_r = r*sqrt(|kappa_min|)*coth(r*sqrt(|kappa_min|)) for kappa_min < 0, else 1.
double zeta(double radius, double kappa_min);

// delta_r = r*sqrt(kappa_max)*cot(r*sqrt(kappa_max)) for kappa_max > 0, else 1.
// Throws PoleExceeded when r*sqrt(kappa_max) >= pi.
double delta(double radius, double kappa_max);

CurvatureConstants curvature_constants(double radius, double kappa_min, double kappa_max);

// Running geodesic average: a_1 = x_1, a_{k+1} = exp_{a_k}(w * log_{a_k}(x_{k+1}))
// with w = weight_{k+1} / sum_{j<=k+1} weight_j. Empty weights means uniform.
Point geodesic_average(const Manifold& m, const std::vector<Point>& points,
                       const std::vector<double>& weights = {});

// Streaming form of the same recursion.
class GeodesicAverager {
 public:
  explicit GeodesicAverager(const Manifold& m) : m_(m) {}
  void add(const Point& x, double weight = 1.0);
  bool empty() const { return weight_sum_ == 0.0; }
  const Point& value() const;

 private:
  const Manifold& m_;
  Point avg_;
  double weight_sum_ = 0.0;
};

// Metric projection onto the closed ball B(center, radius); identity inside.
Point project_ball(const Manifold& m, const Point& center, double radius, const Point& x);

// Slack of the two-sided law-of-cosines comparison for the triangle (x, y, p):
//   lower: <log_x y, log_x p> - [delta_D/2 d(x,y)^2 + 1/2 d(p,x)^2 - 1/2 d(p,y)^2]
//   upper: [zeta_D/2 d(x,y)^2 + 1/2 d(p,x)^2 - 1/2 d(p,y)^2] - <log_x y, log_x p>
// with D the diameter of the triangle itself. Both slacks are nonnegative up
// to tolerance. With tighter_zeta the upper constant is zeta at d(p,x) instead
// of at D.
struct CosineSlacks {
  double lower = 0.0;
  double upper = 0.0;
  double diameter = 0.0;
};

CosineSlacks cosine_slacks(const Manifold& m, const Point& x, const Point& y, const Point& p,
                           bool tighter_zeta = false);

}  // namespace gcvx
