#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "gcvx/error.hpp"
#include "gcvx/rng.hpp"

namespace gcvx {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class ManifoldKind { Euclidean, Hyperbolic, Spd, SphericalCap, Product };

const char* manifold_kind_name(ManifoldKind kind);

// A point in the ambient representation of its manifold. Euclidean and sphere
// points are plain vectors, hyperboloid points live in R^{d+1}, SPD matrices
// are stored flattened column-major.
struct Point {
  Vec coords;
};

// Tangent vector together with the base point it is attached to. Operations
// that consume a TangentVector check the base matches their point argument.
struct TangentVector {
  Vec base;
  Vec vec;
};

struct ManifoldDescriptor {
  ManifoldKind kind = ManifoldKind::Euclidean;
  int dim = 1;               // intrinsic dimension (matrix side length for SPD)
  double max_radius = 1.5;   // SphericalCap only, must be < pi/2
  double kappa_min = 0.0;
  double kappa_max = 0.0;
};

// Geodesic operations for one of the supported spaces. All member functions
// are const and pure: points/tangents are value types and nothing is cached
// between calls, so a Manifold can be shared freely across threads.
class Manifold {
 public:
  virtual ~Manifold() = default;

  virtual ManifoldKind kind() const = 0;
  virtual int dim() const = 0;       // intrinsic dimension
  virtual int rep_size() const = 0;  // length of the coordinate representation
  virtual double kappa_min() const = 0;
  virtual double kappa_max() const = 0;
  bool is_hadamard() const { return kappa_max() <= 0.0; }

  virtual ManifoldDescriptor descriptor() const;

  // Canonical anchor: origin, (1,0,...,0), identity matrix, or cap pole.
  virtual Point base_point() const = 0;

  // Renormalizes onto the constraint set; throws DriftExceeded when the input
  // violates the set by more than the internal drift budget.
  virtual Point project(const Point& x) const = 0;

  // Validates the point invariant at its representation tolerance.
  virtual void check_point(const Point& x) const = 0;

  virtual Point exp(const Point& x, const TangentVector& v) const = 0;
  virtual TangentVector log(const Point& x, const Point& y) const = 0;
  virtual double dist(const Point& x, const Point& y) const = 0;
  virtual TangentVector transport(const Point& x, const Point& y, const TangentVector& v) const = 0;
  virtual double inner(const Point& x, const Vec& u, const Vec& v) const = 0;

  double norm(const Point& x, const Vec& v) const;
  double norm(const TangentVector& v) const;

  // Orthogonal projection of an ambient coordinate vector onto T_x M.
  virtual Vec tangent_project(const Point& x, const Vec& ambient) const = 0;

  // Orthonormal basis of T_x M under the Riemannian inner product at x.
  virtual std::vector<Vec> tangent_basis(const Point& x) const;

  // Isotropic samples w.r.t. the metric at x (built on tangent_basis).
  TangentVector random_gaussian_tangent(const Point& x, Rng& rng) const;
  TangentVector random_tangent_in_ball(const Point& x, double radius, Rng& rng) const;

 protected:
  void require_point_size(const Point& x) const;
  void require_tangent(const Point& x, const TangentVector& v) const;
};

std::shared_ptr<const Manifold> make_manifold(const ManifoldDescriptor& desc);

std::shared_ptr<const Manifold> make_euclidean(int dim);
std::shared_ptr<const Manifold> make_hyperbolic(int dim);
std::shared_ptr<const Manifold> make_spd(int n);
std::shared_ptr<const Manifold> make_spherical_cap(int dim, double max_radius = 1.5);
std::shared_ptr<const Manifold> make_product(std::shared_ptr<const Manifold> left,
                                             std::shared_ptr<const Manifold> right);

// Product of two factors with the l2-combined metric; exp/log/transport act
// componentwise and dist obeys the exact Pythagorean identity.
class ProductManifold : public Manifold {
 public:
  ProductManifold(std::shared_ptr<const Manifold> left, std::shared_ptr<const Manifold> right);

  ManifoldKind kind() const override { return ManifoldKind::Product; }
  int dim() const override { return left_->dim() + right_->dim(); }
  int rep_size() const override { return left_->rep_size() + right_->rep_size(); }
  double kappa_min() const override;
  double kappa_max() const override;

  Point base_point() const override;
  Point project(const Point& x) const override;
  void check_point(const Point& x) const override;
  Point exp(const Point& x, const TangentVector& v) const override;
  TangentVector log(const Point& x, const Point& y) const override;
  double dist(const Point& x, const Point& y) const override;
  TangentVector transport(const Point& x, const Point& y, const TangentVector& v) const override;
  double inner(const Point& x, const Vec& u, const Vec& v) const override;
  Vec tangent_project(const Point& x, const Vec& ambient) const override;
  std::vector<Vec> tangent_basis(const Point& x) const override;

  const Manifold& left() const { return *left_; }
  const Manifold& right() const { return *right_; }
  std::shared_ptr<const Manifold> left_ptr() const { return left_; }
  std::shared_ptr<const Manifold> right_ptr() const { return right_; }

  Point left_part(const Point& z) const;
  Point right_part(const Point& z) const;
  Vec left_part(const Vec& z) const;
  Vec right_part(const Vec& z) const;
  Point join(const Point& x, const Point& y) const;
  Vec join(const Vec& x, const Vec& y) const;

 private:
  std::shared_ptr<const Manifold> left_;
  std::shared_ptr<const Manifold> right_;
};

// SPD helpers shared with tests (flattened column-major <-> matrix views).
Mat as_matrix(const Vec& flat, int n);
Vec as_flat(const Mat& m);

}  // namespace gcvx
