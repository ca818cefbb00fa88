#include <cmath>

#include "doctest.h"

#include "gcvx/solver.hpp"
#include "gcvx/rng.hpp"

using namespace gcvx;

namespace {

Point pt(std::initializer_list<double> vals) {
  Vec v(static_cast<int>(vals.size()));
  int i = 0;
  for (double x : vals) v[i++] = x;
  return Point{v};
}

Objective hyperbolic_karcher_instance(std::uint64_t seed, int n, double radius,
                                      std::shared_ptr<const Manifold>* out_m, Point* out_x0) {
  auto m = make_hyperbolic(5);
  Rng rng(seed);
  Point base = m->base_point();
  std::vector<Point> centers;
  for (int i = 0; i < n; ++i)
    centers.push_back(m->exp(base, m->random_tangent_in_ball(base, radius, rng)));
  *out_m = m;
  *out_x0 = m->exp(base, m->random_tangent_in_ball(base, radius, rng));
  return karcher(m, centers);
}

}  // namespace

TEST_SUITE("solvers") {

TEST_CASE("one unit step solves the isotropic euclidean quadratic") {
  auto m = make_euclidean(3);
  Objective f = squared_distance(m, pt({0.0, 0.0, 0.0}), 1.0);
  SolverTrace tr = rgd(f, pt({2.0, -1.0, 0.5}), StepRule::fixed(1.0), 10);
  REQUIRE(tr.iterates.size() >= 2);
  CHECK(tr.iterates[1].coords.norm() == 0.0);
  CHECK(tr.converged);                       // gradient hits zero, loop stops early
  CHECK(tr.iterates.size() == 2);            // x0 and the solution, nothing after
  CHECK(tr.f_values.size() == tr.iterates.size());
  CHECK(tr.oracle_calls.size() == tr.iterates.size());
  CHECK(tr.wall_ns.size() == tr.iterates.size());
}

TEST_CASE("inverse_l rule resolves 1/L and certifies the phi-scaled ball") {
  std::shared_ptr<const Manifold> m;
  Point x0;
  Objective f = hyperbolic_karcher_instance(3, 8, 0.8, &m, &x0);
  double big_r = 1.7;  // any upper bound on d(x0, x*) works for the step
  SolverTrace tr = rgd(f, x0, StepRule::inverse_l(big_r), 60, f.reference);
  REQUIRE(tr.certificate.has_value());
  // certificate quotes the true starting distance; the hyperboloid admits phi R
  double r_true = m->dist(x0, f.reference);
  CHECK(tr.certificate->radius == doctest::Approx(kGoldenRatio * r_true).epsilon(1e-12));
  double ref_shift = m->dist(f.reference, x0);
  double cover = ref_shift + big_r + kGoldenRatio * big_r;
  CHECK(tr.resolved_eta == doctest::Approx(1.0 / f.smoothness_on(cover)).epsilon(1e-12));
  for (const Point& x : tr.iterates)
    CHECK(m->dist(tr.certificate->center, x) <= tr.certificate->radius + 1e-9);
}

TEST_CASE("inverse_l_zeta certifies the sqrt(3/2) R ball") {
  std::shared_ptr<const Manifold> m;
  Point x0;
  Objective f = hyperbolic_karcher_instance(5, 8, 0.8, &m, &x0);
  double big_r = 1.7;
  SolverTrace tr = rgd(f, x0, StepRule::inverse_l_zeta(big_r), 60, f.reference);
  REQUIRE(tr.certificate.has_value());
  CHECK(tr.certificate->radius ==
        doctest::Approx(std::sqrt(1.5) * m->dist(x0, f.reference)).epsilon(1e-12));
  for (const Point& x : tr.iterates)
    CHECK(m->dist(tr.certificate->center, x) <= tr.certificate->radius + 1e-9);
}

TEST_CASE("subgradient method on |x| stays inside sqrt(2) and averages") {
  Objective f = abs_value();
  int horizon = 64;
  SolverTrace tr = subgradient_rgd(f, pt({1.0}), 1.0, horizon, pt({0.0}));
  // step = R / (M sqrt(zeta T)) with zeta = 1 on the line
  CHECK(tr.resolved_eta == doctest::Approx(1.0 / std::sqrt(64.0)).epsilon(1e-14));
  for (const Point& x : tr.iterates) CHECK(std::abs(x.coords[0]) <= std::sqrt(2.0) + 1e-12);
  REQUIRE(tr.averaged_output.has_value());
  // uniform average of the iterates beats the worst single iterate
  CHECK(f.value(*tr.averaged_output) <= 1.0 / std::sqrt(2.0));
  REQUIRE(tr.certificate.has_value());
  CHECK(tr.certificate->radius == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("projected step lands on the unit ball fixed point") {
  auto m = make_euclidean(2);
  Objective f = squared_distance(m, pt({2.0, 0.0}), 1.0);
  Ball ball{pt({0.0, 0.0}), 1.0};
  SolverTrace tr = prgd(f, pt({0.0, 0.0}), StepRule::fixed(1.0), ball, 5);
  REQUIRE(tr.iterates.size() >= 2);
  CHECK((tr.iterates[1].coords - pt({1.0, 0.0}).coords).norm() < 1e-14);
  // e_1 is the constrained minimizer, so the iteration parks there
  CHECK((tr.iterates.back().coords - pt({1.0, 0.0}).coords).norm() < 1e-14);
}

TEST_CASE("composite step against a squared-distance term has the known closed form") {
  auto m = make_euclidean(2);
  Point p = pt({3.0, -1.0});
  Objective f = squared_distance(m, p, 1.0);  // L = 1
  double lam = 0.6;
  Point c = pt({-0.5, 0.25});
  CompositePart g = CompositePart::squared_distance(c, lam);
  Point x0 = pt({1.0, 1.0});
  SolverTrace tr = crgd(f, g, x0, 1.0, 1);
  REQUIRE(tr.iterates.size() == 2);
  Vec grad = x0.coords - p.coords;
  Vec expect = (1.0 * x0.coords - grad + lam * c.coords) / (1.0 + lam);
  CHECK((tr.iterates[1].coords - expect).norm() < 1e-12);
}

TEST_CASE("composite step with a ball indicator reduces to projected gradient") {
  auto m = make_euclidean(2);
  Objective f = squared_distance(m, pt({2.0, 2.0}), 1.0);
  Point x0 = pt({0.0, 0.0});
  CompositePart g = CompositePart::ball_indicator(pt({0.0, 0.0}), 1.0);
  SolverTrace a = crgd(f, g, x0, 1.0, 4);
  SolverTrace b = prgd(f, x0, StepRule::fixed(1.0), Ball{pt({0.0, 0.0}), 1.0}, 4);
  REQUIRE(a.iterates.size() == b.iterates.size());
  for (std::size_t i = 0; i < a.iterates.size(); ++i)
    CHECK((a.iterates[i].coords - b.iterates[i].coords).norm() < 1e-13);
}

TEST_CASE("descent-ascent shrinks the field on the coupled euclidean saddle") {
  auto me = make_euclidean(2);
  Point a = pt({0.4, 0.0});
  Point b = pt({0.0, -0.3});
  double c = 0.5;
  SaddleObjective f = saddle_toy(me, me, a, b, c);
  Point z0 = f.product->join(pt({1.0, 0.7}), pt({-0.8, 0.2}));
  double eta = 1.0 / f.smoothness_on(2.0);
  SolverTrace tr = rgda(f, z0, eta, 50, f.product->join(a, b));
  REQUIRE(tr.grad_norms.size() > 10);
  for (std::size_t t = 1; t < tr.grad_norms.size(); ++t)
    CHECK(tr.grad_norms[t] <= tr.grad_norms[t - 1] + 1e-12);
  CHECK(tr.grad_norms.back() < 1e-3);
}

TEST_CASE("gradient blow-up raises a divergence error carrying the partial trace") {
  auto m = make_euclidean(1);
  Objective f = squared_distance(m, pt({0.0}), 1.0);
  // |1 - eta| = 2 doubles the distance every step until the value guard trips
  CHECK_THROWS_AS(rgd(f, pt({1.0}), StepRule::fixed(3.0), 200), DivergedError);
  try {
    rgd(f, pt({1.0}), StepRule::fixed(3.0), 200);
  } catch (const DivergedError& e) {
    CHECK(e.code() == ErrorCode::Diverged);
    CHECK(e.partial_trace().iterates.size() > 1);
    CHECK(e.partial_trace().f_values.back() > 1e5);
  }
}

TEST_CASE("the boundless 1/L rule works only when smoothness is region-free") {
  // flat quadratic: L is a constant, so the rule resolves without a bound
  auto me = make_euclidean(2);
  Objective fq = squared_distance(me, pt({1.0, 1.0}), 1.0);
  SolverTrace tr = rgd(fq, pt({0.0, 0.0}), StepRule::inverse_l(), 20, pt({1.0, 1.0}));
  CHECK(tr.resolved_eta == doctest::Approx(1.0).epsilon(1e-12));

  // curved instance: smoothness depends on the region, so it must refuse
  std::shared_ptr<const Manifold> m;
  Point x0;
  Objective f = hyperbolic_karcher_instance(9, 5, 0.5, &m, &x0);
  CHECK_THROWS_AS(rgd(f, x0, StepRule::inverse_l(), 20, f.reference), Error);
}

TEST_CASE("oracle call accounting is cumulative and one per step") {
  std::shared_ptr<const Manifold> m;
  Point x0;
  Objective f = hyperbolic_karcher_instance(13, 5, 0.5, &m, &x0);
  SolverTrace tr = rgd(f, x0, StepRule::fixed(0.5), 15, f.reference);
  REQUIRE(tr.oracle_calls.size() == tr.iterates.size());
  for (std::size_t t = 1; t < tr.oracle_calls.size(); ++t)
    CHECK(tr.oracle_calls[t] == tr.oracle_calls[t - 1] + 1);
  CHECK(tr.dist_to_ref_sq.size() == tr.iterates.size());
}

}  // TEST_SUITE
