#include <cmath>

#include "doctest.h"

#include "gcvx/objective.hpp"
#include "gcvx/rng.hpp"

using namespace gcvx;

namespace {

Point euclidean_point(std::initializer_list<double> vals) {
  Vec v(static_cast<int>(vals.size()));
  int i = 0;
  for (double x : vals) v[i++] = x;
  return Point{v};
}

}  // namespace

TEST_SUITE("objectives") {

TEST_CASE("euclidean karcher value, gradient and minimizer") {
  auto m = make_euclidean(2);
  std::vector<Point> centers = {euclidean_point({2.0, 0.0}), euclidean_point({0.0, 2.0}),
                                euclidean_point({-2.0, -2.0})};
  Objective f = karcher(m, centers);
  Vec mean = (centers[0].coords + centers[1].coords + centers[2].coords) / 3.0;
  CHECK((f.reference.coords - mean).norm() < 1e-14);
  CHECK(m->norm(f.gradient(Point{mean})) < 1e-14);

  Point x = euclidean_point({1.0, -1.0});
  double direct = 0.0;
  for (const Point& c : centers) direct += 0.5 * (x.coords - c.coords).squaredNorm();
  direct /= 3.0;
  CHECK(f.value(x) == doctest::Approx(direct).epsilon(1e-15));
  CHECK((f.gradient(x).vec - (x.coords - mean)).norm() < 1e-13);

  // flat space: unit smoothness and strong convexity at any radius
  CHECK(f.smoothness_on(5.0) == doctest::Approx(1.0));
  CHECK(f.strong_convexity_on(5.0) == doctest::Approx(1.0));
}

TEST_CASE("karcher gradient is the negative mean of log maps on curved space") {
  auto m = make_hyperbolic(4);
  Rng rng(31);
  Point base = m->base_point();
  std::vector<Point> centers;
  for (int i = 0; i < 6; ++i)
    centers.push_back(m->exp(base, m->random_tangent_in_ball(base, 1.0, rng)));
  Objective f = karcher(m, centers);
  Point x = m->exp(base, m->random_tangent_in_ball(base, 1.0, rng));
  Vec expect = Vec::Zero(5);
  for (const Point& c : centers) expect -= m->log(x, c).vec;
  expect /= 6.0;
  CHECK((f.gradient(x).vec - expect).norm() < 1e-12);
}

TEST_CASE("squared distance: value, gradient and closed-form prox") {
  auto m = make_euclidean(3);
  Point p = euclidean_point({1.0, 2.0, 3.0});
  Objective f = squared_distance(m, p, 1.0);
  Point x = euclidean_point({0.0, 0.0, 0.0});
  CHECK(f.value(x) == doctest::Approx(0.5 * p.coords.squaredNorm()).epsilon(1e-15));
  CHECK((f.gradient(x).vec - (x.coords - p.coords)).norm() < 1e-15);

  REQUIRE(f.exact_prox);
  double eta = 0.7;
  Point prox = f.exact_prox(x, eta);
  Vec expect = (x.coords + eta * p.coords) / (1.0 + eta);
  CHECK((prox.coords - expect).norm() < 1e-14);
}

TEST_CASE("squared distance prox on spd contracts toward the target") {
  auto m = make_spd(2);
  Rng rng(41);
  Point eye = m->base_point();
  Point p = m->exp(eye, m->random_tangent_in_ball(eye, 0.8, rng));
  Objective f = squared_distance(m, p, 1.0);
  REQUIRE(f.exact_prox);
  Point anchor = m->exp(eye, m->random_tangent_in_ball(eye, 0.8, rng));
  double eta = 1.3;
  Point prox = f.exact_prox(anchor, eta);
  // geodesic interpolation: moves a fraction eta/(1+eta) of the way to p
  double expect = m->dist(anchor, p) * eta / (1.0 + eta);
  CHECK(m->dist(anchor, prox) == doctest::Approx(expect).epsilon(1e-11));
  CHECK(m->dist(anchor, prox) + m->dist(prox, p) ==
        doctest::Approx(m->dist(anchor, p)).epsilon(1e-11));
}

TEST_CASE("regularization solves the euclidean closed form") {
  auto m = make_euclidean(1);
  Point p = euclidean_point({4.0});
  Objective f = squared_distance(m, p, 1.0);
  Point x0 = euclidean_point({0.0});
  double eps = 0.5, big_r = 4.0;  // R must cover d(x0, argmin f) = 4
  Objective freg = regularize(f, x0, eps, big_r);
  // optimality of F = f + eps/(2R^2) d(x0,.)^2: (x - 4) + (eps/R^2) x = 0
  double xstar = 4.0 / (1.0 + eps / (big_r * big_r));
  CHECK(std::abs(freg.gradient(euclidean_point({xstar})).vec[0]) < 1e-10);
  // an eps/2-minimizer of the regularized problem is an eps-minimizer of f
  double fstar_reg = freg.value(euclidean_point({xstar}));
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    double cand = rng.uniform(-1.0, 6.0);
    if (freg.value(euclidean_point({cand})) <= fstar_reg + eps / 2.0)
      CHECK(f.value(euclidean_point({cand})) <= eps + 1e-12);
  }
}

TEST_CASE("regularized constants shift by the anchor offset") {
  auto m = make_hyperbolic(3);
  Rng rng(7);
  Point base = m->base_point();
  std::vector<Point> centers;
  for (int i = 0; i < 4; ++i)
    centers.push_back(m->exp(base, m->random_tangent_in_ball(base, 0.8, rng)));
  Objective f = karcher(m, centers);
  Point x0 = m->exp(base, m->random_tangent_in_ball(base, 0.8, rng));
  Objective freg = regularize(f, x0, 0.1, 1.0);
  // strictly more curvature in the model: mu grows, L grows
  CHECK(freg.strong_convexity_on(1.0) > f.strong_convexity_on(1.0));
  CHECK(freg.smoothness_on(1.0) > f.smoothness_on(1.0));
}

TEST_CASE("saddle toy vanishes at its saddle and reports nonnegative gaps") {
  auto mx = make_hyperbolic(2);
  auto my = make_hyperbolic(2);
  Rng rng(11);
  Point bx = mx->base_point();
  Point a = mx->exp(bx, mx->random_tangent_in_ball(bx, 0.6, rng));
  Point b = my->exp(bx, my->random_tangent_in_ball(bx, 0.6, rng));
  SaddleObjective f = saddle_toy(mx, my, a, b, 0.0);
  Point saddle = f.product->join(a, b);
  CHECK(f.value(a, b) == doctest::Approx(0.0));
  CHECK(f.field_norm(saddle) < 1e-13);
  CHECK(f.gap(saddle) < 1e-13);
  Point z = f.product->join(mx->exp(bx, mx->random_tangent_in_ball(bx, 0.6, rng)),
                            my->exp(bx, my->random_tangent_in_ball(bx, 0.6, rng)));
  CHECK(f.gap(z) >= 0.0);
  // decoupled case: gap is exactly half the squared product distance to the saddle
  double d = f.product->dist(z, saddle);
  CHECK(f.gap(z) == doctest::Approx(0.5 * d * d).epsilon(1e-12));
}

TEST_CASE("euclidean coupling keeps the saddle at (a, b)") {
  auto me = make_euclidean(2);
  Point a = euclidean_point({0.3, -0.1});
  Point b = euclidean_point({-0.2, 0.5});
  SaddleObjective f = saddle_toy(me, me, a, b, 0.7);
  CHECK(f.field_norm(f.product->join(a, b)) < 1e-14);
}

TEST_CASE("coupling on curved factors is rejected") {
  auto mh = make_hyperbolic(2);
  Point base = mh->base_point();
  CHECK_THROWS_AS(saddle_toy(mh, mh, base, base, 0.5), Error);
  try {
    saddle_toy(mh, mh, base, base, 0.5);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CouplingUnsupported);
  }
}

TEST_CASE("absolute value is a nonsmooth objective with unit subgradients") {
  Objective f = abs_value();
  CHECK_FALSE(f.smooth);
  CHECK(f.value(euclidean_point({-2.5})) == doctest::Approx(2.5));
  CHECK(f.gradient(euclidean_point({3.0})).vec[0] == doctest::Approx(1.0));
  CHECK(f.gradient(euclidean_point({-3.0})).vec[0] == doctest::Approx(-1.0));
  CHECK(f.lipschitz_on(10.0) == doctest::Approx(1.0));
}

TEST_CASE("max of two squared distances tracks the active branch") {
  auto m = make_euclidean(2);
  Point p1 = euclidean_point({1.0, 0.0});
  Point p2 = euclidean_point({-1.0, 0.0});
  Objective f = max_of_two_squared_distances(m, p1, p2);
  CHECK_FALSE(f.smooth);
  Point x = euclidean_point({0.5, 0.0});  // closer to p1, so the p2 branch is active
  CHECK(f.value(x) == doctest::Approx(0.5 * 1.5 * 1.5).epsilon(1e-15));
  CHECK((f.gradient(x).vec - (x.coords - p2.coords)).norm() < 1e-14);
}

}  // TEST_SUITE
