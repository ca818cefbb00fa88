#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "gcvx/objective.hpp"

namespace gcvx {

inline constexpr double kGoldenRatio = 1.6180339887498948482;  // (1 + sqrt(5)) / 2

// Step-size policy. inverse_l and inverse_l_zeta certify an iterate ball from
// a known bound R >= d(x0, x*) and query smoothness over a region covering it;
// the subgradient rule additionally needs the horizon T.
struct StepRule {
  enum class Kind { InverseL, InverseLZeta, Subgradient, Fixed };
  Kind kind = Kind::Fixed;
  std::optional<double> r_bound;
  std::optional<int> horizon;
  std::optional<double> eta;

  static StepRule inverse_l(std::optional<double> r_bound = {});
  static StepRule inverse_l_zeta(double r_bound);
  static StepRule subgradient(double r_bound, int horizon);
  static StepRule fixed(double eta);
};

struct ResolvedStep {
  double eta = 0.0;
  double smoothness = std::numeric_limits<double>::quiet_NaN();
  double lipschitz = std::numeric_limits<double>::quiet_NaN();
  double cert_radius = std::numeric_limits<double>::quiet_NaN();  // around x*, needs r_bound
  std::string source;
};

ResolvedStep resolve_step(const Objective& f, const Point& x0, const StepRule& rule, int iters);

// Ball the iterates are guaranteed to stay inside, centered at the reference
// minimizer. radius is phi*R*zeta_R for the 1/L step (phi*R when zeta_R = 1
// and on the hyperboloid), sqrt(3/2)*R for the 1/(zeta*L) step, sqrt(2)*R for
// the subgradient and inexact proximal methods, and R for exact proximal.
struct IterateBoundCertificate {
  Point center;
  double radius = 0.0;
  std::string source;
};

struct SolverTrace {
  std::vector<Point> iterates;           // x_0 .. x_T
  std::vector<double> f_values;          // aligned with iterates
  std::vector<double> dist_to_ref_sq;    // empty when no reference was given
  std::vector<double> grad_norms;        // (sub)gradient or saddle field norms
  std::vector<std::uint64_t> oracle_calls;  // cumulative gradient/field evaluations
  std::vector<std::uint64_t> wall_ns;    // monotonic timestamps; subtract entry 0 for elapsed
  std::vector<double> residual_norms;    // proximal runs only
  std::optional<Point> averaged_output;
  std::optional<IterateBoundCertificate> certificate;
  double resolved_eta = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;                // stopped early on a vanishing gradient
  std::vector<std::string> violations;   // recorded monotonicity/certificate breaches
};

// Divergence carries the partial trace so callers can inspect the blow-up.
class DivergedError : public Error {
 public:
  DivergedError(const std::string& what, SolverTrace partial)
      : Error(ErrorCode::Diverged, what), partial_(std::move(partial)) {}
  const SolverTrace& partial_trace() const { return partial_; }

 private:
  SolverTrace partial_;
};

struct Ball {
  Point center;
  double radius = 0.0;
};

// Composite term g for the composite update rule: either (weight/2) d(center,.)^2
// or the indicator of a closed ball.
struct CompositePart {
  enum class Kind { SquaredDistance, BallIndicator };
  Kind kind = Kind::SquaredDistance;
  Point center;
  double weight = 0.0;
  double radius = 0.0;

  static CompositePart squared_distance(Point center, double weight);
  static CompositePart ball_indicator(Point center, double radius);
  double value(const Manifold& m, const Point& x) const;
};

// x_{t+1} = Exp_{x_t}(-eta grad f(x_t)); stops early when the gradient norm
// falls below 1e-14, throws DivergedError past a 1e6 blow-up of f.
SolverTrace rgd(const Objective& f, const Point& x0, const StepRule& rule, int iters,
                std::optional<Point> ref = {});

// Subgradient steps with eta = R / (M sqrt(zeta_{sqrt(2) R} T)) and uniform
// geodesic averaging of x_0 .. x_{T-1} as the output.
SolverTrace subgradient_rgd(const Objective& f, const Point& x0, double r_bound, int iters,
                            std::optional<Point> ref = {});

// Projected variant: every step is metrically projected onto `ball`.
SolverTrace prgd(const Objective& f, const Point& x0, const StepRule& rule, const Ball& ball,
                 int iters, std::optional<Point> ref = {});

// Composite update: x_{t+1} = argmin_y <grad f(x_t), Exp^-1_{x_t}(y)>
//                                + (L/2) d(x_t, y)^2 + g(y),
// solved in the tangent space at x_t (closed form when g is centered there).
SolverTrace crgd(const Objective& f, const CompositePart& g, const Point& x0, double smoothness,
                 int iters, std::optional<Point> ref = {}, std::optional<Ball> trust = {});

// One composite subproblem solve, exposed for reuse and testing.
Point composite_step(const Manifold& m, const Point& x, const Vec& grad, double smoothness,
                     const CompositePart& g, const std::optional<Ball>& trust = {});

// Simultaneous descent-ascent on a saddle objective with a fixed step.
SolverTrace rgda(const SaddleObjective& f, const Point& z0, double eta, int iters,
                 std::optional<Point> ref = {});

}  // namespace gcvx
