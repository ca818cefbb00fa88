#include <cmath>

#include "doctest.h"

#include "gcvx/manifold.hpp"
#include "gcvx/rng.hpp"

using namespace gcvx;

namespace {

Vec unit_tangent_hyperbolic(int ambient, int axis, double scale) {
  Vec v = Vec::Zero(ambient);
  v[axis] = scale;
  return v;
}

}  // namespace

TEST_SUITE("manifolds") {

TEST_CASE("euclidean exp, log and dist are affine") {
  auto m = make_euclidean(4);
  Point x{Vec::Zero(4)};
  Vec v(4);
  v << 1.0, -2.0, 0.5, 0.0;
  Point y = m->exp(x, TangentVector{x.coords, v});
  CHECK((y.coords - v).norm() == 0.0);
  CHECK(m->dist(x, y) == doctest::Approx(v.norm()).epsilon(1e-15));
  CHECK((m->log(x, y).vec - v).norm() == 0.0);
}

TEST_CASE("hyperbolic exp along a coordinate axis hits (cosh, sinh)") {
  auto m = make_hyperbolic(5);
  Point x = m->base_point();
  double s = 0.73;
  Point y = m->exp(x, TangentVector{x.coords, unit_tangent_hyperbolic(6, 1, s)});
  CHECK(y.coords[0] == doctest::Approx(std::cosh(s)).epsilon(1e-15));
  CHECK(y.coords[1] == doctest::Approx(std::sinh(s)).epsilon(1e-15));
  CHECK(m->dist(x, y) == doctest::Approx(s).epsilon(1e-14));
}

TEST_CASE("hyperbolic antipodal tangents give distance two") {
  auto m = make_hyperbolic(3);
  Point x = m->base_point();
  Vec v = unit_tangent_hyperbolic(4, 2, 1.0);
  Point a = m->exp(x, TangentVector{x.coords, v});
  Point b = m->exp(x, TangentVector{x.coords, Vec(-v)});
  CHECK(m->dist(a, b) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("hyperbolic roundtrip and transport isometry on random samples") {
  auto m = make_hyperbolic(6);
  Rng rng(42);
  Point base = m->base_point();
  for (int i = 0; i < 50; ++i) {
    // test away from the basepoint, but within the representation's comfort zone
    Point x = m->exp(base, m->random_tangent_in_ball(base, 2.0, rng));
    TangentVector v = m->random_tangent_in_ball(x, 1.5, rng);
    Point y = m->exp(x, v);
    TangentVector back = m->log(x, y);
    CHECK((back.vec - v.vec).norm() < 1e-10);

    TangentVector u = m->random_gaussian_tangent(x, rng);
    TangentVector w = m->random_gaussian_tangent(x, rng);
    double before = m->inner(x, u.vec, w.vec);
    double after = m->inner(y, m->transport(x, y, u).vec, m->transport(x, y, w).vec);
    CHECK(before == doctest::Approx(after).epsilon(1e-11));
  }
}

TEST_CASE("spd exponential at the identity is the matrix exponential") {
  auto m = make_spd(3);
  Point eye = m->base_point();
  // v = I as a tangent matrix: exp_I(I) = e * I
  Vec v = eye.coords;
  Point y = m->exp(eye, TangentVector{eye.coords, v});
  for (int i = 0; i < 9; ++i) {
    double expect = (i % 4 == 0) ? std::exp(1.0) : 0.0;  // diagonal of a row-major 3x3
    CHECK(y.coords[i] == doctest::Approx(expect).epsilon(1e-13));
  }
  CHECK(m->dist(eye, y) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-13));
}

TEST_CASE("spd 2x2 distance from identity to e*I is sqrt(2)") {
  auto m = make_spd(2);
  Point eye = m->base_point();
  Point scaled{Vec(eye.coords * std::exp(1.0))};
  CHECK(m->dist(eye, scaled) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
}

TEST_CASE("spd distance is affine invariant under congruence by a diagonal") {
  auto m = make_spd(2);
  Rng rng(7);
  Point eye = m->base_point();
  Point a = m->exp(eye, m->random_tangent_in_ball(eye, 0.8, rng));
  Point b = m->exp(eye, m->random_tangent_in_ball(eye, 0.8, rng));
  double base = m->dist(a, b);
  // congruence X -> G X G^T with G = diag(2, 1/3)
  auto congr = [](const Vec& x) {
    Vec y(4);
    double g0 = 2.0, g1 = 1.0 / 3.0;
    y[0] = g0 * g0 * x[0];
    y[1] = g0 * g1 * x[1];
    y[2] = g1 * g0 * x[2];
    y[3] = g1 * g1 * x[3];
    return y;
  };
  CHECK(m->dist(Point{congr(a.coords)}, Point{congr(b.coords)}) ==
        doctest::Approx(base).epsilon(1e-11));
}

TEST_CASE("spd log/exp roundtrip away from the identity") {
  auto m = make_spd(3);
  Rng rng(3);
  Point eye = m->base_point();
  Point x = m->exp(eye, m->random_tangent_in_ball(eye, 1.0, rng));
  Point y = m->exp(eye, m->random_tangent_in_ball(eye, 1.0, rng));
  TangentVector v = m->log(x, y);
  Point back = m->exp(x, v);
  CHECK((back.coords - y.coords).norm() < 1e-11);
  CHECK(m->dist(x, y) == doctest::Approx(m->norm(v)).epsilon(1e-12));
}

TEST_CASE("cap exp respects the angular radius and rejects leaving it") {
  auto m = make_spherical_cap(3, 0.8);
  Point north = m->base_point();  // pole at e_0, tangents live in the remaining coords
  Vec v = Vec::Zero(4);
  v[1] = 0.5;
  Point y = m->exp(north, TangentVector{north.coords, v});
  CHECK(m->dist(north, y) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(y.coords.norm() == doctest::Approx(1.0).epsilon(1e-14));

  Vec big = Vec::Zero(4);
  big[1] = 1.2;  // beyond max_radius 0.8 from the pole
  CHECK_THROWS_AS(m->exp(north, TangentVector{north.coords, big}), Error);
  try {
    m->exp(north, TangentVector{north.coords, big});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CapExceeded);
  }
}

TEST_CASE("cap roundtrip inside the cap") {
  auto m = make_spherical_cap(4, 1.4);
  Rng rng(11);
  Point north = m->base_point();
  for (int i = 0; i < 30; ++i) {
    TangentVector v = m->random_tangent_in_ball(north, 0.6, rng);
    Point y = m->exp(north, v);
    CHECK((m->log(north, y).vec - v.vec).norm() < 1e-11);
  }
}

TEST_CASE("product distance follows the pythagorean rule") {
  auto mh = make_hyperbolic(3);
  auto me = make_euclidean(2);
  auto pm = std::make_shared<ProductManifold>(mh, me);
  Rng rng(5);
  Point bh = mh->base_point();
  Point be = me->base_point();
  Point x = pm->join(mh->exp(bh, mh->random_tangent_in_ball(bh, 0.9, rng)),
                     me->exp(be, me->random_tangent_in_ball(be, 0.9, rng)));
  Point y = pm->join(mh->exp(bh, mh->random_tangent_in_ball(bh, 0.9, rng)),
                     me->exp(be, me->random_tangent_in_ball(be, 0.9, rng)));
  double dl = mh->dist(pm->left_part(x), pm->left_part(y));
  double dr = me->dist(pm->right_part(x), pm->right_part(y));
  CHECK(pm->dist(x, y) == doctest::Approx(std::hypot(dl, dr)).epsilon(1e-14));
  CHECK(pm->kappa_min() == -1.0);
  CHECK(pm->kappa_max() == 0.0);
}

TEST_CASE("product join and split are inverses") {
  auto pm = std::make_shared<ProductManifold>(make_spd(2), make_spherical_cap(3, 1.4));
  Point l = pm->left().base_point();
  Point r = pm->right().base_point();
  Point z = pm->join(l, r);
  CHECK((pm->left_part(z).coords - l.coords).norm() == 0.0);
  CHECK((pm->right_part(z).coords - r.coords).norm() == 0.0);
}

TEST_CASE("descriptor roundtrips through make_manifold") {
  auto cap = make_spherical_cap(4, 1.1);
  auto again = make_manifold(cap->descriptor());
  CHECK(again->kind() == ManifoldKind::SphericalCap);
  CHECK(again->dim() == cap->dim());
  CHECK(again->kappa_max() == 1.0);

  auto spd = make_spd(3);
  CHECK(make_manifold(spd->descriptor())->dim() == spd->dim());
  CHECK(spd->kappa_min() == -0.5);
  CHECK(spd->kappa_max() == 0.0);
}

TEST_CASE("tangent sampling stays in the requested ball and is deterministic") {
  auto m = make_hyperbolic(8);
  Point x = m->base_point();
  Rng a(99), b(99);
  for (int i = 0; i < 40; ++i) {
    TangentVector va = m->random_tangent_in_ball(x, 0.7, a);
    TangentVector vb = m->random_tangent_in_ball(x, 0.7, b);
    CHECK(m->norm(va) <= 0.7 + 1e-15);
    CHECK((va.vec - vb.vec).norm() == 0.0);
  }
  Rng c(99, 1);  // different stream, different draw
  CHECK((m->random_tangent_in_ball(x, 0.7, c).vec -
         m->random_tangent_in_ball(x, 0.7, a).vec)
            .norm() > 0.0);
}

TEST_CASE("hadamard flag matches curvature bounds") {
  CHECK(make_euclidean(3)->is_hadamard());
  CHECK(make_hyperbolic(3)->is_hadamard());
  CHECK(make_spd(3)->is_hadamard());
  CHECK_FALSE(make_spherical_cap(3, 1.0)->is_hadamard());
  CHECK_FALSE(make_product(make_euclidean(2), make_spherical_cap(3, 1.0))->is_hadamard());
}

}  // TEST_SUITE
