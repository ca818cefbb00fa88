#include "gcvx/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace gcvx {

namespace {

void require_finite_scalar(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, std::string(what) + " is not finite");
}

}  // namespace

double zeta(double radius, double kappa_min) {
  require_finite_scalar(radius, "radius");
  require_finite_scalar(kappa_min, "kappa_min");
  if (radius < 0.0) throw Error(ErrorCode::ConfigInvalid, "radius must be nonnegative");
  if (kappa_min >= 0.0) return 1.0;
  double a = radius * std::sqrt(-kappa_min);
  if (a < 1e-4) return 1.0 + a * a / 3.0 - a * a * a * a / 45.0;
  return a / std::tanh(a);
}

double delta(double radius, double kappa_max) {
  require_finite_scalar(radius, "radius");
  require_finite_scalar(kappa_max, "kappa_max");
  if (radius < 0.0) throw Error(ErrorCode::ConfigInvalid, "radius must be nonnegative");
  if (kappa_max <= 0.0) return 1.0;
  double a = radius * std::sqrt(kappa_max);
  if (a >= 3.14159265358979323846)
    throw Error(ErrorCode::PoleExceeded, "r*sqrt(kappa_max) reaches the first pole of cot");
  if (a < 1e-4) return 1.0 - a * a / 3.0 - a * a * a * a / 45.0;
  return a / std::tan(a);
}

CurvatureConstants curvature_constants(double radius, double kappa_min, double kappa_max) {
  return CurvatureConstants{zeta(radius, kappa_min), delta(radius, kappa_max), radius};
}

void GeodesicAverager::add(const Point& x, double weight) {
  if (!(weight > 0.0)) throw Error(ErrorCode::ConfigInvalid, "weights must be positive");
  if (weight_sum_ == 0.0) {
    avg_ = x;
    weight_sum_ = weight;
    return;
  }
  weight_sum_ += weight;
  TangentVector step = m_.log(avg_, x);
  step.vec *= weight / weight_sum_;
  avg_ = m_.exp(avg_, step);
}

const Point& GeodesicAverager::value() const {
  if (weight_sum_ == 0.0) throw Error(ErrorCode::EmptyInput, "no points averaged yet");
  return avg_;
}

Point geodesic_average(const Manifold& m, const std::vector<Point>& points,
                       const std::vector<double>& weights) {
  if (points.empty()) throw Error(ErrorCode::EmptyInput, "cannot average zero points");
  if (!weights.empty() && weights.size() != points.size())
    throw Error(ErrorCode::LengthMismatch, "weights and points disagree in length");
  GeodesicAverager avg(m);
  for (std::size_t i = 0; i < points.size(); ++i)
    avg.add(points[i], weights.empty() ? 1.0 : weights[i]);
  return avg.value();
}

Point project_ball(const Manifold& m, const Point& center, double radius, const Point& x) {
  if (radius < 0.0) throw Error(ErrorCode::ConfigInvalid, "ball radius must be nonnegative");
  double d = m.dist(center, x);
  if (d <= radius) return x;
  TangentVector dir = m.log(center, x);
  dir.vec *= radius / d;
  return m.exp(center, dir);
}

CosineSlacks cosine_slacks(const Manifold& m, const Point& x, const Point& y, const Point& p,
                           bool tighter_zeta) {
  double dxy = m.dist(x, y);
  double dpx = m.dist(p, x);
  double dpy = m.dist(p, y);
  double diam = std::max({dxy, dpx, dpy});

  TangentVector ly = m.log(x, y);
  TangentVector lp = m.log(x, p);
  double ip = m.inner(x, ly.vec, lp.vec);

  double zeta_arg = tighter_zeta ? dpx : diam;
  double z = zeta(zeta_arg, m.kappa_min());
  double dl = delta(diam, m.kappa_max());

  CosineSlacks out;
  out.diameter = diam;
  out.lower = ip - (0.5 * dl * dxy * dxy + 0.5 * dpx * dpx - 0.5 * dpy * dpy);
  out.upper = (0.5 * z * dxy * dxy + 0.5 * dpx * dpx - 0.5 * dpy * dpy) - ip;
  return out;
}

}  // namespace gcvx
