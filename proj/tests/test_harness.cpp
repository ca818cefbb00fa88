#include <cmath>

#include "doctest.h"
#include "json.hpp"

#include "gcvx/harness.hpp"

using namespace gcvx;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.manifold = ManifoldDescriptor{ManifoldKind::Hyperbolic, 6, 1.5, -1.0, -1.0};
  c.n_centers = 10;
  c.radius = 0.8;
  c.seed = 5;
  c.max_iters = 400;
  return c;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("instance generation is deterministic and shrinks all but the first center") {
  ExperimentConfig c;
  c.manifold = ManifoldDescriptor{ManifoldKind::Hyperbolic, 50, 1.5, -1.0, -1.0};
  c.n_centers = 100;
  c.radius = 1.0;
  c.seed = 0;
  KarcherProblem a = generate_karcher(c);
  KarcherProblem b = generate_karcher(c);
  REQUIRE(a.centers.size() == 100);
  for (std::size_t i = 0; i < a.centers.size(); ++i)
    CHECK((a.centers[i].coords - b.centers[i].coords).norm() == 0.0);
  CHECK((a.x0.coords - b.x0.coords).norm() == 0.0);
  CHECK(a.r_upper == b.r_upper);

  Point anchor = a.m->base_point();
  double first = a.m->dist(a.centers[0], anchor);
  CHECK(first <= 1.0 + 1e-12);
  double rest_max = 0.0;
  for (std::size_t i = 1; i < a.centers.size(); ++i)
    rest_max = std::max(rest_max, a.m->dist(a.centers[i], anchor));
  CHECK(rest_max <= 0.1 + 1e-12);
  CHECK(first > rest_max);  // the unshrunk draw dominates at this seed
  CHECK(a.r_upper == doctest::Approx(2.0 * std::max(first, rest_max)).epsilon(1e-14));
  CHECK(a.m->dist(a.x0, anchor) <= 1.0 + 1e-12);
}

TEST_CASE("different seeds move the instance") {
  ExperimentConfig c = small_config();
  KarcherProblem a = generate_karcher(c);
  c.seed = 6;
  KarcherProblem b = generate_karcher(c);
  CHECK((a.x0.coords - b.x0.coords).norm() > 0.0);
}

TEST_CASE("cap sampling radius must leave projection room") {
  ExperimentConfig c;
  c.manifold = ManifoldDescriptor{ManifoldKind::SphericalCap, 4, 1.5, 1.0, 1.0};
  c.radius = 0.9;  // >= pi/4
  CHECK_THROWS_AS(generate_karcher(c), Error);
  c.radius = 0.5;
  CHECK(generate_karcher(c).centers.size() == 100);
}

TEST_CASE("reference solve lands on the euclidean mean") {
  auto m = make_euclidean(3);
  std::vector<Point> centers;
  Vec sum = Vec::Zero(3);
  Rng rng(2);
  for (int i = 0; i < 7; ++i) {
    Vec v(3);
    v << rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1);
    centers.push_back(Point{v});
    sum += v;
  }
  ReferenceResult ref = compute_reference(m, centers);
  CHECK((ref.xstar.coords - Vec(sum / 7.0)).norm() < 1e-12);
  CHECK(ref.grad_norm <= 1e-13);
  CHECK_FALSE(ref.low_precision);
}

TEST_CASE("reference solve finds the hyperbolic midpoint of two points") {
  auto m = make_hyperbolic(3);
  Point base = m->base_point();
  Vec v = Vec::Zero(4);
  v[1] = 0.9;
  std::vector<Point> centers = {m->exp(base, TangentVector{base.coords, v}),
                                m->exp(base, TangentVector{base.coords, Vec(-v)})};
  ReferenceResult ref = compute_reference(m, centers);
  CHECK(std::abs(m->dist(ref.xstar, centers[0]) - m->dist(ref.xstar, centers[1])) < 1e-9);
  CHECK(m->dist(ref.xstar, base) < 1e-9);
}

TEST_CASE("experiment rows stop at the tolerance and metadata echoes the setup") {
  ExperimentConfig c = small_config();
  ExperimentResult res = run_karcher_experiment(c);
  REQUIRE_FALSE(res.rows.empty());
  CHECK(res.reached_tol);
  CHECK(res.rows.back().f_gap <= c.tol_fgap);
  // inclusive truncation: everything before the last row is above tolerance
  for (std::size_t i = 0; i + 1 < res.rows.size(); ++i)
    CHECK(res.rows[i].f_gap > c.tol_fgap);

  const nlohmann::json& meta = res.metadata;
  CHECK(meta["config"]["algo"] == "rgd-l");
  CHECK(meta["config"]["seed"] == 5);
  CHECK(meta["phi_formula"] == "(1+sqrt(5))/2");
  CHECK(meta["phi"] == doctest::Approx(1.6180339887498949));
  CHECK(meta["eta"].get<double>() > 0.0);
  CHECK(meta["r_upper"].get<double>() > 0.0);
  CHECK(meta["zeta_r_upper"].get<double>() >= 1.0);
  CHECK(meta["reference"]["iters"].get<int>() >= 0);
  CHECK_FALSE(meta["diverged"].get<bool>());
  CHECK(meta["dist_sq_increase_steps"].get<int>() == 0);
  // wall clock stays zeroed unless timing was requested
  for (const TraceRow& row : res.rows) CHECK(row.wall_ns == 0);
}

TEST_CASE("timing flag fills nonzero elapsed times") {
  ExperimentConfig c = small_config();
  c.timing = true;
  c.max_iters = 50;
  c.tol_fgap = 1e-300;  // keep every row
  ExperimentResult res = run_karcher_experiment(c);
  REQUIRE(res.rows.size() > 2);
  CHECK(res.rows.front().wall_ns == 0);
  CHECK(res.rows.back().wall_ns > 0);
  for (std::size_t i = 1; i < res.rows.size(); ++i)
    CHECK(res.rows[i].wall_ns >= res.rows[i - 1].wall_ns);
}

TEST_CASE("csv serialization is byte-stable and shortest-roundtrip") {
  ExperimentConfig c = small_config();
  std::string a = format_rows_csv(run_karcher_experiment(c).rows);
  std::string b = format_rows_csv(run_karcher_experiment(c).rows);
  CHECK(a == b);
  CHECK(a.substr(0, a.find('\n')) == "iter,f_gap,dist_sq,grad_norm,oracle_calls,wall_ns");
  CHECK(a.find("\r") == std::string::npos);

  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-8) == "1e-08");
  CHECK(format_double(0.0) == "0");
  // shortest representation still parses back to the exact double
  double v = 2.0 / 3.0;
  CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("json rows carry the same columns") {
  ExperimentConfig c = small_config();
  c.max_iters = 30;
  c.tol_fgap = 1e-300;
  ExperimentResult res = run_karcher_experiment(c);
  nlohmann::json rows = nlohmann::json::parse(format_rows_json(res.rows));
  REQUIRE(rows.is_array());
  REQUIRE(rows.size() == res.rows.size());
  CHECK(rows[0]["iter"] == 0);
  CHECK(rows[0].contains("f_gap"));
  CHECK(rows[0].contains("dist_sq"));
  CHECK(rows[0].contains("grad_norm"));
  CHECK(rows[0].contains("oracle_calls"));
  CHECK(rows[0].contains("wall_ns"));
}

TEST_CASE("step override lands in the metadata and subgradient refuses it") {
  ExperimentConfig c = small_config();
  c.eta_override = 0.05;
  ExperimentResult res = run_karcher_experiment(c);
  CHECK(res.metadata["eta"] == doctest::Approx(0.05));

  c.algo = "subgrad";
  CHECK_THROWS_AS(run_karcher_experiment(c), Error);
}

TEST_CASE("unknown algorithms and bad formats are config errors") {
  ExperimentConfig c = small_config();
  c.algo = "bfgs";
  CHECK_THROWS_AS(run_karcher_experiment(c), Error);
  c = small_config();
  c.format = "yaml";
  CHECK_THROWS_AS(run_karcher_experiment(c), Error);
  c = small_config();
  c.n_centers = 0;
  CHECK_THROWS_AS(generate_karcher(c), Error);
}

TEST_CASE("every algorithm converges on the shared small instance") {
  for (const std::string& algo : known_algorithms()) {
    if (algo == "rippa-rgda") continue;  // saddle-only
    ExperimentConfig c = small_config();
    c.algo = algo;
    c.max_iters = algo == "subgrad" ? 20000 : 2000;
    c.tol_fgap = algo == "subgrad" ? 1e-4 : 1e-8;
    ExperimentResult res = run_karcher_experiment(c);
    INFO("algorithm: ", algo);
    CHECK(res.reached_tol);
  }
}

TEST_CASE("minmax experiment accepts only its own algorithm and truncates on the gap") {
  ExperimentConfig c;
  c.manifold = ManifoldDescriptor{ManifoldKind::Hyperbolic, 2, 1.5, -1.0, -1.0};
  c.radius = 0.6;
  c.seed = 3;
  c.algo = "rippa-rgda";
  c.max_iters = 200;
  c.tol_fgap = 1e-7;
  ExperimentResult res = run_minmax_experiment(c);
  CHECK(res.reached_tol);
  CHECK(res.rows.back().f_gap <= 1e-7);
  CHECK(res.metadata["coupling"] == doctest::Approx(0.0));

  c.algo = "rgd-l";
  CHECK_THROWS_AS(run_minmax_experiment(c), Error);

  c.algo = "rippa-rgda";
  c.coupling = 0.5;  // curved factors cannot couple
  CHECK_THROWS_AS(run_minmax_experiment(c), Error);
}

TEST_CASE("karcher experiment rejects the saddle algorithm") {
  ExperimentConfig c = small_config();
  c.algo = "rippa-rgda";
  CHECK_THROWS_AS(run_karcher_experiment(c), Error);
}

}  // TEST_SUITE
