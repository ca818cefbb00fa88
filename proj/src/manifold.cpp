#include "gcvx/manifold.hpp"

#include <algorithm>
#include <cmath>

namespace gcvx {

namespace {

constexpr double kDriftBudget = 1e-6;

void require_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) throw Error(ErrorCode::NonFinite, std::string(what) + " has non-finite entries");
}

// sinh(t)/t with the small-argument series
double sinhc(double t) {
  if (std::abs(t) < 1e-5) return 1.0 + t * t / 6.0;
  return std::sinh(t) / t;
}

// sin(t)/t with the small-argument series
double sinc(double t) {
  if (std::abs(t) < 1e-5) return 1.0 - t * t / 6.0;
  return std::sin(t) / t;
}

}  // namespace

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::PoleExceeded: return "PoleExceeded";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DriftExceeded: return "DriftExceeded";
    case ErrorCode::StepRuleUnresolvable: return "StepRuleUnresolvable";
    case ErrorCode::UnsupportedComposite: return "UnsupportedComposite";
    case ErrorCode::CouplingUnsupported: return "CouplingUnsupported";
    case ErrorCode::InnerBudgetExceeded: return "InnerBudgetExceeded";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

const char* manifold_kind_name(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::Euclidean: return "euclidean";
    case ManifoldKind::Hyperbolic: return "hyperbolic";
    case ManifoldKind::Spd: return "spd";
    case ManifoldKind::SphericalCap: return "cap";
    case ManifoldKind::Product: return "product";
  }
  return "unknown";
}

ManifoldDescriptor Manifold::descriptor() const {
  ManifoldDescriptor d;
  d.kind = kind();
  d.dim = dim();
  d.kappa_min = kappa_min();
  d.kappa_max = kappa_max();
  return d;
}

double Manifold::norm(const Point& x, const Vec& v) const {
  return std::sqrt(std::max(0.0, inner(x, v, v)));
}

double Manifold::norm(const TangentVector& v) const {
  Point base{v.base};
  return norm(base, v.vec);
}

void Manifold::require_point_size(const Point& x) const {
  if (x.coords.size() != rep_size())
    throw Error(ErrorCode::LengthMismatch, "point has representation size " +
                                               std::to_string(x.coords.size()) + ", expected " +
                                               std::to_string(rep_size()));
  require_finite(x.coords, "point");
}

void Manifold::require_tangent(const Point& x, const TangentVector& v) const {
  require_point_size(x);
  if (v.vec.size() != rep_size() || v.base.size() != rep_size())
    throw Error(ErrorCode::LengthMismatch, "tangent representation size mismatch");
  require_finite(v.vec, "tangent");
  if ((v.base - x.coords).norm() > 1e-8 * (1.0 + x.coords.norm()))
    throw Error(ErrorCode::ConfigInvalid, "tangent vector is attached to a different base point");
}

std::vector<Vec> Manifold::tangent_basis(const Point& x) const {
  // Gram-Schmidt on projected ambient axes, under the metric at x. Works for
  // every space here; SPD overrides it with a closed form.
  std::vector<Vec> basis;
  basis.reserve(dim());
  for (int k = 0; k < rep_size() && static_cast<int>(basis.size()) < dim(); ++k) {
    Vec cand = tangent_project(x, Vec::Unit(rep_size(), k));
    for (const Vec& b : basis) cand -= inner(x, b, cand) * b;
    double nrm = norm(x, cand);
    if (nrm > 1e-8) basis.push_back(cand / nrm);
  }
  if (static_cast<int>(basis.size()) != dim())
    throw Error(ErrorCode::ConfigInvalid, "tangent basis construction failed");
  return basis;
}

TangentVector Manifold::random_gaussian_tangent(const Point& x, Rng& rng) const {
  auto basis = tangent_basis(x);
  Vec v = Vec::Zero(rep_size());
  for (const Vec& b : basis) v += rng.normal() * b;
  return TangentVector{x.coords, v};
}

TangentVector Manifold::random_tangent_in_ball(const Point& x, double radius, Rng& rng) const {
  if (radius < 0.0) throw Error(ErrorCode::ConfigInvalid, "ball radius must be nonnegative");
  TangentVector g = random_gaussian_tangent(x, rng);
  double nrm = norm(g);
  double u = rng.uniform01();
  double scale = radius * std::pow(u, 1.0 / static_cast<double>(dim()));
  if (nrm < 1e-300) return TangentVector{x.coords, Vec::Zero(rep_size())};
  g.vec *= scale / nrm;
  return g;
}

// ---------------------------------------------------------------------------
// Euclidean

class EuclideanManifold final : public Manifold {
 public:
  explicit EuclideanManifold(int dim) : dim_(dim) {
    if (dim < 1) throw Error(ErrorCode::ConfigInvalid, "dimension must be positive");
  }

  ManifoldKind kind() const override { return ManifoldKind::Euclidean; }
  int dim() const override { return dim_; }
  int rep_size() const override { return dim_; }
  double kappa_min() const override { return 0.0; }
  double kappa_max() const override { return 0.0; }

  Point base_point() const override { return Point{Vec::Zero(dim_)}; }
  Point project(const Point& x) const override {
    require_point_size(x);
    return x;
  }
  void check_point(const Point& x) const override { require_point_size(x); }

  Point exp(const Point& x, const TangentVector& v) const override {
    require_tangent(x, v);
    return Point{x.coords + v.vec};
  }
  TangentVector log(const Point& x, const Point& y) const override {
    require_point_size(x);
    require_point_size(y);
    return TangentVector{x.coords, y.coords - x.coords};
  }
  double dist(const Point& x, const Point& y) const override {
    require_point_size(x);
    require_point_size(y);
    return (y.coords - x.coords).norm();
  }
  TangentVector transport(const Point& x, const Point& y, const TangentVector& v) const override {
    require_tangent(x, v);
    require_point_size(y);
    return TangentVector{y.coords, v.vec};
  }
  double inner(const Point& x, const Vec& u, const Vec& v) const override {
    (void)x;
    return u.dot(v);
  }
  Vec tangent_project(const Point&, const Vec& ambient) const override { return ambient; }
  std::vector<Vec> tangent_basis(const Point&) const override {
    std::vector<Vec> basis;
    basis.reserve(dim_);
    for (int k = 0; k < dim_; ++k) basis.push_back(Vec::Unit(dim_, k));
    return basis;
  }

 private:
  int dim_;
};

// ---------------------------------------------------------------------------
// Hyperboloid sheet {x : <x,x>_M = -1, x0 > 0} with the Lorentz form.
// Chosen over the Poincare ball for numerically robust log/exp at the scales
// used here; distances go through an acosh(1+s) rearrangement to keep
// precision for nearby points.

class HyperbolicManifold final : public Manifold {
 public:
  explicit HyperbolicManifold(int dim) : dim_(dim) {
    if (dim < 1) throw Error(ErrorCode::ConfigInvalid, "dimension must be positive");
  }

  ManifoldKind kind() const override { return ManifoldKind::Hyperbolic; }
  int dim() const override { return dim_; }
  int rep_size() const override { return dim_ + 1; }
  double kappa_min() const override { return -1.0; }
  double kappa_max() const override { return -1.0; }

  static double mink(const Vec& u, const Vec& v) {
    return -u(0) * v(0) + u.tail(u.size() - 1).dot(v.tail(v.size() - 1));
  }

  Point base_point() const override {
    Vec x = Vec::Zero(dim_ + 1);
    x(0) = 1.0;
    return Point{x};
  }

  Point project(const Point& x) const override {
    require_point_size(x);
    double q = mink(x.coords, x.coords);
    if (q >= -0.5 || x.coords(0) <= 0.0)
      throw Error(ErrorCode::DriftExceeded, "point is far from the hyperboloid sheet");
    if (std::abs(q + 1.0) > kDriftBudget)
      throw Error(ErrorCode::DriftExceeded, "hyperboloid drift exceeds internal budget");
    return Point{x.coords / std::sqrt(-q)};
  }

  void check_point(const Point& x) const override {
    require_point_size(x);
    double q = mink(x.coords, x.coords);
    if (std::abs(q + 1.0) > 1e-10 || x.coords(0) <= 0.0)
      throw Error(ErrorCode::DriftExceeded, "point not on the hyperboloid sheet");
  }

  Point exp(const Point& x, const TangentVector& v) const override {
    require_tangent(x, v);
    double n2 = mink(v.vec, v.vec);
    double n = std::sqrt(std::max(0.0, n2));
    if (n < 1e-300) return Point{x.coords};
    Vec y = std::cosh(n) * x.coords + sinhc(n) * v.vec;
    return project(Point{y});
  }

  TangentVector log(const Point& x, const Point& y) const override {
    require_point_size(x);
    require_point_size(y);
    double d = dist(x, y);
    if (d < 1e-300) return TangentVector{x.coords, Vec::Zero(dim_ + 1)};
    double alpha = std::max(1.0, -mink(x.coords, y.coords));
    // component of y orthogonal to x; its Minkowski norm equals sinh(d)
    Vec u = y.coords - alpha * x.coords;
    return TangentVector{x.coords, u / sinhc(d)};
  }

  double dist(const Point& x, const Point& y) const override {
    require_point_size(x);
    require_point_size(y);
    // s = -<x,y>_M - 1 >= 0; for nearby points compute it from the chord to
    // dodge the cancellation in the direct inner product.
    double s = -mink(x.coords, y.coords) - 1.0;
    if (s < 1e-4) {
      Vec delta = y.coords - x.coords;
      s = std::max(0.0, 0.5 * mink(delta, delta));
    }
    s = std::max(0.0, s);
    // acosh(1+s) written without the 1+s cancellation
    return std::log1p(s + std::sqrt(s * s + 2.0 * s));
  }

  TangentVector transport(const Point& x, const Point& y, const TangentVector& v) const override {
    require_tangent(x, v);
    require_point_size(y);
    double denom = 1.0 - mink(x.coords, y.coords);  // = 1 + alpha >= 2
    double w = mink(y.coords, v.vec) / denom;
    Vec out = v.vec + w * (x.coords + y.coords);
    return TangentVector{y.coords, out + mink(y.coords, out) * y.coords};
  }

  double inner(const Point& x, const Vec& u, const Vec& v) const override {
    (void)x;
    return mink(u, v);
  }

  Vec tangent_project(const Point& x, const Vec& ambient) const override {
    return ambient + mink(x.coords, ambient) * x.coords;
  }

 private:
  int dim_;
};

// ---------------------------------------------------------------------------
// SPD matrices with the affine-invariant metric <U,V>_P = tr(P^-1 U P^-1 V).
// Everything goes through eigendecompositions of symmetric matrices; results
// are re-symmetrized before being returned.

class SpdManifold final : public Manifold {
 public:
  explicit SpdManifold(int n) : n_(n) {
    if (n < 1) throw Error(ErrorCode::ConfigInvalid, "matrix size must be positive");
  }

  ManifoldKind kind() const override { return ManifoldKind::Spd; }
  int dim() const override { return n_ * (n_ + 1) / 2; }
  int rep_size() const override { return n_ * n_; }
  ManifoldDescriptor descriptor() const override {
    ManifoldDescriptor d = Manifold::descriptor();
    d.dim = n_;  // descriptor records the matrix side, not the intrinsic dim
    return d;
  }
  // Sectional curvature of the affine-invariant geometry lies in [-1/2, 0].
  double kappa_min() const override { return -0.5; }
  double kappa_max() const override { return 0.0; }

  Point base_point() const override { return Point{as_flat(Mat::Identity(n_, n_))}; }

  Point project(const Point& x) const override {
    require_point_size(x);
    Mat m = as_matrix(x.coords, n_);
    double asym = (m - m.transpose()).norm();
    if (asym > kDriftBudget * (1.0 + m.norm()))
      throw Error(ErrorCode::DriftExceeded, "SPD symmetry drift exceeds internal budget");
    Mat sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(sym);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw Error(ErrorCode::DriftExceeded, "matrix lost positive definiteness");
    return Point{as_flat(sym)};
  }

  void check_point(const Point& x) const override {
    require_point_size(x);
    Mat m = as_matrix(x.coords, n_);
    if ((m - m.transpose()).norm() > 1e-12 * (1.0 + m.norm()))
      throw Error(ErrorCode::DriftExceeded, "matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw Error(ErrorCode::DriftExceeded, "matrix is not positive definite");
  }

  Point exp(const Point& x, const TangentVector& v) const override {
    require_tangent(x, v);
    auto [rt, irt] = sqrt_and_inv_sqrt(as_matrix(x.coords, n_));
    Mat s = sym(irt * sym(as_matrix(v.vec, n_)) * irt);
    Eigen::SelfAdjointEigenSolver<Mat> es(s);
    Mat ex = es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
             es.eigenvectors().transpose();
    return Point{as_flat(sym(rt * ex * rt))};
  }

  TangentVector log(const Point& x, const Point& y) const override {
    require_point_size(x);
    require_point_size(y);
    auto [rt, irt] = sqrt_and_inv_sqrt(as_matrix(x.coords, n_));
    Mat s = sym(irt * sym(as_matrix(y.coords, n_)) * irt);
    Eigen::SelfAdjointEigenSolver<Mat> es(s);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw Error(ErrorCode::DriftExceeded, "log target is not positive definite");
    Mat lg = es.eigenvectors() * es.eigenvalues().array().log().matrix().asDiagonal() *
             es.eigenvectors().transpose();
    return TangentVector{x.coords, as_flat(sym(rt * lg * rt))};
  }

  double dist(const Point& x, const Point& y) const override {
    require_point_size(x);
    require_point_size(y);
    auto [rt, irt] = sqrt_and_inv_sqrt(as_matrix(x.coords, n_));
    (void)rt;
    Mat s = sym(irt * sym(as_matrix(y.coords, n_)) * irt);
    Eigen::SelfAdjointEigenSolver<Mat> es(s);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw Error(ErrorCode::DriftExceeded, "distance target is not positive definite");
    return es.eigenvalues().array().log().matrix().norm();
  }

  TangentVector transport(const Point& x, const Point& y, const TangentVector& v) const override {
    require_tangent(x, v);
    require_point_size(y);
    auto [rt, irt] = sqrt_and_inv_sqrt(as_matrix(x.coords, n_));
    Mat s = sym(irt * sym(as_matrix(y.coords, n_)) * irt);
    Eigen::SelfAdjointEigenSolver<Mat> es(s);
    Mat shalf = es.eigenvectors() * es.eigenvalues().array().sqrt().matrix().asDiagonal() *
                es.eigenvectors().transpose();
    Mat e = rt * shalf * irt;
    return TangentVector{y.coords, as_flat(sym(e * sym(as_matrix(v.vec, n_)) * e.transpose()))};
  }

  double inner(const Point& x, const Vec& u, const Vec& v) const override {
    auto [rt, irt] = sqrt_and_inv_sqrt(as_matrix(x.coords, n_));
    (void)rt;
    Mat a = irt * sym(as_matrix(u, n_)) * irt;
    Mat b = irt * sym(as_matrix(v, n_)) * irt;
    return a.cwiseProduct(b).sum();
  }

  Vec tangent_project(const Point&, const Vec& ambient) const override {
    return as_flat(sym(as_matrix(ambient, n_)));
  }

  std::vector<Vec> tangent_basis(const Point& x) const override {
    // B_ij = P^{1/2} S_ij P^{1/2} for the Frobenius-orthonormal symmetric S_ij
    // is orthonormal under the metric at P: <B,C>_P = tr(S T).
    auto [rt, irt] = sqrt_and_inv_sqrt(as_matrix(x.coords, n_));
    (void)irt;
    std::vector<Vec> basis;
    basis.reserve(dim());
    const double inv_sqrt2 = 0.7071067811865475244;
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j) {
        Mat s = Mat::Zero(n_, n_);
        if (i == j) {
          s(i, i) = 1.0;
        } else {
          s(i, j) = inv_sqrt2;
          s(j, i) = inv_sqrt2;
        }
        basis.push_back(as_flat(sym(rt * s * rt)));
      }
    return basis;
  }

 private:
  static Mat sym(const Mat& m) { return 0.5 * (m + m.transpose()); }

  static std::pair<Mat, Mat> sqrt_and_inv_sqrt(const Mat& p) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (p + p.transpose()));
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw Error(ErrorCode::DriftExceeded, "base matrix is not positive definite");
    Vec sq = es.eigenvalues().array().sqrt();
    Mat rt = es.eigenvectors() * sq.asDiagonal() * es.eigenvectors().transpose();
    Mat irt = es.eigenvectors() * sq.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    return {rt, irt};
  }

  int n_;
};

// ---------------------------------------------------------------------------
// Closed cap around the north pole of the unit sphere, strictly inside an open
// hemisphere so geodesics between cap points are unique and stay inside.
// Operations whose result would leave the cap throw CapExceeded.

class SphericalCapManifold final : public Manifold {
 public:
  SphericalCapManifold(int dim, double max_radius) : dim_(dim), max_radius_(max_radius) {
    if (dim < 1) throw Error(ErrorCode::ConfigInvalid, "dimension must be positive");
    if (!(max_radius > 0.0) || !(max_radius < 1.5707963267948966))
      throw Error(ErrorCode::ConfigInvalid, "cap radius must lie in (0, pi/2)");
  }

  ManifoldKind kind() const override { return ManifoldKind::SphericalCap; }
  int dim() const override { return dim_; }
  int rep_size() const override { return dim_ + 1; }
  double kappa_min() const override { return 1.0; }
  double kappa_max() const override { return 1.0; }
  double max_radius() const { return max_radius_; }
  ManifoldDescriptor descriptor() const override {
    ManifoldDescriptor d = Manifold::descriptor();
    d.max_radius = max_radius_;
    return d;
  }

  Point base_point() const override {
    Vec x = Vec::Zero(dim_ + 1);
    x(0) = 1.0;
    return Point{x};
  }

  Point project(const Point& x) const override {
    require_point_size(x);
    double n = x.coords.norm();
    if (std::abs(n - 1.0) > kDriftBudget)
      throw Error(ErrorCode::DriftExceeded, "sphere norm drift exceeds internal budget");
    Point y{x.coords / n};
    require_in_cap(y);
    return y;
  }

  void check_point(const Point& x) const override {
    require_point_size(x);
    if (std::abs(x.coords.norm() - 1.0) > 1e-12)
      throw Error(ErrorCode::DriftExceeded, "point is not on the unit sphere");
    require_in_cap(x);
  }

  Point exp(const Point& x, const TangentVector& v) const override {
    require_tangent(x, v);
    double n = v.vec.norm();
    if (n < 1e-300) return Point{x.coords};
    Vec y = std::cos(n) * x.coords + sinc(n) * v.vec;
    return project(Point{y});
  }

  TangentVector log(const Point& x, const Point& y) const override {
    require_point_size(x);
    require_point_size(y);
    double d = dist(x, y);
    if (d < 1e-300) return TangentVector{x.coords, Vec::Zero(dim_ + 1)};
    // component of y orthogonal to x has norm sin(d)
    Vec u = y.coords - x.coords.dot(y.coords) * x.coords;
    return TangentVector{x.coords, u / sinc(d)};
  }

  double dist(const Point& x, const Point& y) const override {
    require_point_size(x);
    require_point_size(y);
    // chord-based arc length, stable at both ends of [0, pi]
    if (x.coords.dot(y.coords) >= 0.0) {
      double c = std::min(2.0, (y.coords - x.coords).norm());
      return 2.0 * std::asin(0.5 * c);
    }
    double c = std::min(2.0, (y.coords + x.coords).norm());
    return 3.14159265358979323846 - 2.0 * std::asin(0.5 * c);
  }

  TangentVector transport(const Point& x, const Point& y, const TangentVector& v) const override {
    require_tangent(x, v);
    require_point_size(y);
    double d = dist(x, y);
    if (d < 1e-14) return TangentVector{y.coords, v.vec - y.coords.dot(v.vec) * y.coords};
    Vec u = log(x, y).vec / d;
    Vec w = log(y, x).vec / d;
    Vec out = v.vec - v.vec.dot(u) * (u + w);
    return TangentVector{y.coords, out - y.coords.dot(out) * y.coords};
  }

  double inner(const Point& x, const Vec& u, const Vec& v) const override {
    (void)x;
    return u.dot(v);
  }

  Vec tangent_project(const Point& x, const Vec& ambient) const override {
    return ambient - x.coords.dot(ambient) * x.coords;
  }

 private:
  void require_in_cap(const Point& x) const {
    double polar = dist_to_pole(x);
    if (polar > max_radius_ + 1e-12)
      throw Error(ErrorCode::CapExceeded, "geodesic leaves the cap (polar angle " +
                                              std::to_string(polar) + " > " +
                                              std::to_string(max_radius_) + ")");
  }

  double dist_to_pole(const Point& x) const {
    Vec delta = x.coords;
    delta(0) -= 1.0;
    double c = std::min(2.0, delta.norm());
    return 2.0 * std::asin(0.5 * c);
  }

  int dim_;
  double max_radius_;
};

// ---------------------------------------------------------------------------
// Product

ProductManifold::ProductManifold(std::shared_ptr<const Manifold> left,
                                 std::shared_ptr<const Manifold> right)
    : left_(std::move(left)), right_(std::move(right)) {
  if (!left_ || !right_) throw Error(ErrorCode::ConfigInvalid, "product factors must be non-null");
  if (left_->kind() == ManifoldKind::Product || right_->kind() == ManifoldKind::Product)
    throw Error(ErrorCode::ConfigInvalid, "nested products are not supported");
}

double ProductManifold::kappa_min() const { return std::min(left_->kappa_min(), right_->kappa_min()); }
// Flat planes through mixed directions exist, so the upper bound is >= 0.
double ProductManifold::kappa_max() const { return std::max({left_->kappa_max(), right_->kappa_max(), 0.0}); }

Point ProductManifold::left_part(const Point& z) const { return Point{z.coords.head(left_->rep_size())}; }
Point ProductManifold::right_part(const Point& z) const { return Point{z.coords.tail(right_->rep_size())}; }
Vec ProductManifold::left_part(const Vec& z) const { return z.head(left_->rep_size()); }
Vec ProductManifold::right_part(const Vec& z) const { return z.tail(right_->rep_size()); }

Point ProductManifold::join(const Point& x, const Point& y) const { return Point{join(x.coords, y.coords)}; }

Vec ProductManifold::join(const Vec& x, const Vec& y) const {
  Vec z(x.size() + y.size());
  z << x, y;
  return z;
}

Point ProductManifold::base_point() const {
  return join(left_->base_point(), right_->base_point());
}

Point ProductManifold::project(const Point& x) const {
  require_point_size(x);
  return join(left_->project(left_part(x)), right_->project(right_part(x)));
}

void ProductManifold::check_point(const Point& x) const {
  require_point_size(x);
  left_->check_point(left_part(x));
  right_->check_point(right_part(x));
}

Point ProductManifold::exp(const Point& x, const TangentVector& v) const {
  require_tangent(x, v);
  Point xl = left_part(x), xr = right_part(x);
  return join(left_->exp(xl, TangentVector{xl.coords, left_part(v.vec)}),
              right_->exp(xr, TangentVector{xr.coords, right_part(v.vec)}));
}

TangentVector ProductManifold::log(const Point& x, const Point& y) const {
  require_point_size(x);
  require_point_size(y);
  return TangentVector{x.coords, join(left_->log(left_part(x), left_part(y)).vec,
                                      right_->log(right_part(x), right_part(y)).vec)};
}

double ProductManifold::dist(const Point& x, const Point& y) const {
  require_point_size(x);
  require_point_size(y);
  double dl = left_->dist(left_part(x), left_part(y));
  double dr = right_->dist(right_part(x), right_part(y));
  return std::sqrt(dl * dl + dr * dr);
}

TangentVector ProductManifold::transport(const Point& x, const Point& y, const TangentVector& v) const {
  require_tangent(x, v);
  require_point_size(y);
  Point xl = left_part(x), xr = right_part(x);
  return TangentVector{y.coords,
                       join(left_->transport(xl, left_part(y), TangentVector{xl.coords, left_part(v.vec)}).vec,
                            right_->transport(xr, right_part(y), TangentVector{xr.coords, right_part(v.vec)}).vec)};
}

double ProductManifold::inner(const Point& x, const Vec& u, const Vec& v) const {
  return left_->inner(left_part(x), left_part(u), left_part(v)) +
         right_->inner(right_part(x), right_part(u), right_part(v));
}

Vec ProductManifold::tangent_project(const Point& x, const Vec& ambient) const {
  return join(left_->tangent_project(left_part(x), left_part(ambient)),
              right_->tangent_project(right_part(x), right_part(ambient)));
}

std::vector<Vec> ProductManifold::tangent_basis(const Point& x) const {
  std::vector<Vec> basis;
  basis.reserve(dim());
  Vec zl = Vec::Zero(left_->rep_size());
  Vec zr = Vec::Zero(right_->rep_size());
  for (const Vec& b : left_->tangent_basis(left_part(x))) basis.push_back(join(b, zr));
  for (const Vec& b : right_->tangent_basis(right_part(x))) basis.push_back(join(zl, b));
  return basis;
}

// ---------------------------------------------------------------------------

Mat as_matrix(const Vec& flat, int n) {
  if (flat.size() != n * n) throw Error(ErrorCode::LengthMismatch, "flattened matrix has wrong size");
  return Eigen::Map<const Mat>(flat.data(), n, n);
}

Vec as_flat(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }

std::shared_ptr<const Manifold> make_euclidean(int dim) {
  return std::make_shared<EuclideanManifold>(dim);
}
std::shared_ptr<const Manifold> make_hyperbolic(int dim) {
  return std::make_shared<HyperbolicManifold>(dim);
}
std::shared_ptr<const Manifold> make_spd(int n) { return std::make_shared<SpdManifold>(n); }
std::shared_ptr<const Manifold> make_spherical_cap(int dim, double max_radius) {
  return std::make_shared<SphericalCapManifold>(dim, max_radius);
}
std::shared_ptr<const Manifold> make_product(std::shared_ptr<const Manifold> left,
                                             std::shared_ptr<const Manifold> right) {
  return std::make_shared<ProductManifold>(std::move(left), std::move(right));
}

std::shared_ptr<const Manifold> make_manifold(const ManifoldDescriptor& desc) {
  switch (desc.kind) {
    case ManifoldKind::Euclidean: return make_euclidean(desc.dim);
    case ManifoldKind::Hyperbolic: return make_hyperbolic(desc.dim);
    case ManifoldKind::Spd: return make_spd(desc.dim);
    case ManifoldKind::SphericalCap: return make_spherical_cap(desc.dim, desc.max_radius);
    case ManifoldKind::Product:
      throw Error(ErrorCode::ConfigInvalid, "product manifolds are built from explicit factors");
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown manifold kind");
}

}  // namespace gcvx
