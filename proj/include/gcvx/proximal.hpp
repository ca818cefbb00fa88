#pragma once

#include "gcvx/solver.hpp"

namespace gcvx {

// One proximal subproblem: min_z f(z) + 1/(2 eta) d(z, anchor)^2, solved
// inside the ball B(anchor, 2 r_bound).
struct ProxProblem {
  Objective objective;
  Point anchor;
  double eta = 1.0;
  double r_bound = 1.0;
};

struct SaddleProxProblem {
  SaddleObjective objective;
  Point anchor;
  double eta = 1.0;
  double r_bound = 1.0;
};

// Acceptance budget for one inexact prox solve. delta_t scales the checkable
// residual criterion |r|^2 <= delta_t * delta_{5R} * d(z+, z)^2; c_t is the
// tangent-space contraction tolerance that enforces the uncheckable
// first-line criterion a fortiori on positively curved spaces.
struct InexactnessBudget {
  enum class Mode { MuZero, MuPositive };
  Mode mode = Mode::MuZero;
  double delta_t = 1.0;
  double c_t = 0.25;
};

// Delta_{t+1} for the criterion at outer step t: (t+2)^-2 when mu = 0,
// otherwise eta*mu/2.
double budget_delta(InexactnessBudget::Mode mode, int outer_t, double eta, double mu);

// C_t = min{ 1/4, delta * delta_{3R} / (2 (eta L + zeta_{3R})^2 + 2 delta * delta_{3R}) }.
double budget_c(const Manifold& m, double delta_tp1, double eta, double smoothness, double r_bound);

// Product over t = 0..T of 1 / (1 - (t+c)^-2) in closed form: c(c+T) / ((c-1)(c+T+1)).
double inexactness_product(double c, int T);

enum class InnerSolver { Exact, CRGD, PRGD, RGDA };

const char* inner_solver_name(InnerSolver s);

struct ProxResult {
  Point z;
  TangentVector residual;   // r = eta*v - Exp^-1_z(anchor), attached at z
  TangentVector v;          // (sub)gradient or saddle field at z
  double residual_norm = 0.0;
  std::uint64_t inner_calls = 0;
  int inner_iters = 0;
  bool criterion_met = false;
};

// Runs the inner solver from the anchor until the residual criterion holds
// (fixed_inner_iters = 0) or for exactly fixed_inner_iters steps with the
// residual logged but not enforced. Exact mode ignores the budget and solves
// to residual 1e-12 (closed form where the objective provides one).
ProxResult prox_solve(const ProxProblem& p, InnerSolver inner, const InexactnessBudget& budget,
                      int fixed_inner_iters = 0);
ProxResult prox_solve(const SaddleProxProblem& p, InnerSolver inner, const InexactnessBudget& budget,
                      int fixed_inner_iters = 0);

// Exact proximal point iteration z_{t+1} = prox_{eta f}(z_t).
SolverTrace rppa(const Objective& f, const Point& z0, double eta, int iters,
                 std::optional<Point> ref = {});

struct RippaOptions {
  double eta = 1.0;
  int outer_iters = 10;
  double mu = 0.0;      // 0 selects the (t+1)^-2 schedule and averaged output
  double r_bound = 1.0;
  InnerSolver inner = InnerSolver::PRGD;
  int inner_iters = 0;  // 0 = criterion-driven; > 0 = fixed per-step budget
};

// Inexact proximal point: each outer step solves the prox subproblem to its
// budget. Output is the last iterate when mu > 0 and the uniform geodesic
// average of z_1..z_T when mu = 0.
SolverTrace rippa(const Objective& f, const Point& z0, const RippaOptions& opt,
                  std::optional<Point> ref = {});
SolverTrace rippa(const SaddleObjective& f, const Point& z0, const RippaOptions& opt,
                  std::optional<Point> ref = {});

// Moreau envelope of f + indicator(domain):
//   M(x) = min_{z in domain} f(z) + 1/(2 eta) d(x, z)^2.
Point moreau_prox(const Objective& f, const Ball& domain, const Point& x, double eta);
double moreau_value(const Objective& f, const Ball& domain, const Point& x, double eta);
// grad M(x) = -(1/eta) Exp^-1_x(prox(x)).
TangentVector moreau_grad(const Objective& f, const Ball& domain, const Point& x, double eta);

}  // namespace gcvx
