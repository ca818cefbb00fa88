#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gcvx/harness.hpp"

namespace py = pybind11;
using namespace gcvx;

namespace {

// Thin ownership wrapper so python holds manifolds by value and talks in raw
// coordinate arrays instead of Point/TangentVector pairs.
struct PyManifold {
  std::shared_ptr<const Manifold> m;

  Vec exp(const Vec& x, const Vec& v) const { return m->exp(Point{x}, TangentVector{x, v}).coords; }
  Vec log(const Vec& x, const Vec& y) const { return m->log(Point{x}, Point{y}).vec; }
  double dist(const Vec& x, const Vec& y) const { return m->dist(Point{x}, Point{y}); }
  Vec transport(const Vec& x, const Vec& y, const Vec& v) const {
    return m->transport(Point{x}, Point{y}, TangentVector{x, v}).vec;
  }
  double inner(const Vec& x, const Vec& u, const Vec& v) const { return m->inner(Point{x}, u, v); }
  double norm(const Vec& x, const Vec& v) const { return m->norm(Point{x}, v); }
  Vec base_point() const { return m->base_point().coords; }
  Vec project(const Vec& center, double radius, const Vec& x) const {
    return project_ball(*m, Point{center}, radius, Point{x}).coords;
  }
  double kappa_min() const { return m->kappa_min(); }
  double kappa_max() const { return m->kappa_max(); }
  std::string kind() const { return manifold_kind_name(m->kind()); }
};

PyManifold make_py_manifold(const std::string& kind, int dim, double max_radius) {
  ManifoldDescriptor d;
  if (kind == "euclidean")
    d.kind = ManifoldKind::Euclidean;
  else if (kind == "hyperbolic")
    d.kind = ManifoldKind::Hyperbolic;
  else if (kind == "spd")
    d.kind = ManifoldKind::Spd;
  else if (kind == "cap")
    d.kind = ManifoldKind::SphericalCap;
  else
    throw Error(ErrorCode::ConfigInvalid, "manifold must be euclidean|hyperbolic|spd|cap");
  d.dim = dim;
  d.max_radius = max_radius;
  return PyManifold{make_manifold(d)};
}

Vec py_average(const PyManifold& pm, const std::vector<Vec>& coords,
               const std::vector<double>& weights) {
  std::vector<Point> pts;
  for (const Vec& c : coords) pts.push_back(Point{c});
  return geodesic_average(*pm.m, pts, weights).coords;
}

ExperimentConfig config_from_kwargs(const std::string& manifold, int dim, double max_radius,
                                    int centers, double radius, std::uint64_t seed,
                                    const std::string& algo, std::optional<double> eta,
                                    int max_iters, int inner_iters, double tol, bool timing,
                                    double coupling) {
  ExperimentConfig c;
  c.manifold = make_py_manifold(manifold, dim, max_radius).m->descriptor();
  c.n_centers = centers;
  c.radius = radius;
  c.seed = seed;
  c.algo = algo;
  c.eta_override = eta;
  c.max_iters = max_iters;
  c.inner_iters = inner_iters;
  c.tol_fgap = tol;
  c.timing = timing;
  c.coupling = coupling;
  return c;
}

py::dict result_to_dict(const ExperimentResult& res) {
  py::dict out;
  std::size_t n = res.rows.size();
  Eigen::VectorXd f_gap(n), dist_sq(n), grad_norm(n);
  std::vector<std::int64_t> iter(n);
  std::vector<std::uint64_t> calls(n), wall(n);
  for (std::size_t i = 0; i < n; ++i) {
    iter[i] = res.rows[i].iter;
    f_gap[static_cast<Eigen::Index>(i)] = res.rows[i].f_gap;
    dist_sq[static_cast<Eigen::Index>(i)] = res.rows[i].dist_sq;
    grad_norm[static_cast<Eigen::Index>(i)] = res.rows[i].grad_norm;
    calls[i] = res.rows[i].oracle_calls;
    wall[i] = res.rows[i].wall_ns;
  }
  out["iter"] = iter;
  out["f_gap"] = f_gap;
  out["dist_sq"] = dist_sq;
  out["grad_norm"] = grad_norm;
  out["oracle_calls"] = calls;
  out["wall_ns"] = wall;
  out["reached_tol"] = res.reached_tol;
  out["metadata_json"] = res.metadata.dump();
  return out;
}

py::dict report_to_dict(const CheckReport& r) {
  py::dict d;
  d["name"] = r.name;
  d["module"] = r.module;
  d["samples"] = r.samples;
  d["max_violation"] = r.max_violation;
  d["tolerance"] = r.tolerance;
  d["passed"] = r.passed;
  d["notes"] = r.notes;
  return d;
}

}  // namespace

PYBIND11_MODULE(_gcvx, mod) {
  mod.doc() = "geodesically convex optimization: manifolds, solvers, benchmark harness";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      // what() already carries the "CodeName: " prefix
      PyErr_SetString(PyExc_RuntimeError, e.what());
    }
  });

  py::class_<PyManifold>(mod, "Manifold")
      .def("exp", &PyManifold::exp, py::arg("x"), py::arg("v"))
      .def("log", &PyManifold::log, py::arg("x"), py::arg("y"))
      .def("dist", &PyManifold::dist, py::arg("x"), py::arg("y"))
      .def("transport", &PyManifold::transport, py::arg("x"), py::arg("y"), py::arg("v"))
      .def("inner", &PyManifold::inner, py::arg("x"), py::arg("u"), py::arg("v"))
      .def("norm", &PyManifold::norm, py::arg("x"), py::arg("v"))
      .def("base_point", &PyManifold::base_point)
      .def("project", &PyManifold::project, py::arg("center"), py::arg("radius"), py::arg("x"))
      .def("kappa_min", &PyManifold::kappa_min)
      .def("kappa_max", &PyManifold::kappa_max)
      .def("kind", &PyManifold::kind);

  mod.def("manifold", &make_py_manifold, py::arg("kind"), py::arg("dim"),
          py::arg("max_radius") = 1.5);
  mod.def("zeta", &zeta, py::arg("r"), py::arg("kappa_min"),
          "distortion factor for the smoothness side of the comparison inequalities");
  mod.def("delta", &delta, py::arg("r"), py::arg("kappa_max"),
          "distortion factor for the strong convexity side");
  mod.def("geodesic_average", &py_average, py::arg("manifold"), py::arg("points"),
          py::arg("weights") = std::vector<double>{});
  mod.def("known_algorithms", [] { return known_algorithms(); });

  mod.def(
      "run_karcher",
      [](const std::string& manifold, int dim, double max_radius, int centers, double radius,
         std::uint64_t seed, const std::string& algo, std::optional<double> eta, int max_iters,
         int inner_iters, double tol, bool timing) {
        ExperimentConfig c = config_from_kwargs(manifold, dim, max_radius, centers, radius, seed,
                                                algo, eta, max_iters, inner_iters, tol, timing,
                                                0.0);
        return result_to_dict(run_karcher_experiment(c));
      },
      py::arg("manifold") = "hyperbolic", py::arg("dim") = 50, py::arg("max_radius") = 1.5,
      py::arg("centers") = 100, py::arg("radius") = 1.0, py::arg("seed") = 0,
      py::arg("algo") = "rgd-l", py::arg("eta") = std::nullopt, py::arg("max_iters") = 1000,
      py::arg("inner_iters") = 3, py::arg("tol") = 1e-8, py::arg("timing") = false,
      "sample a mean-of-squared-distances instance and run one solver; returns the trace "
      "columns plus the metadata blob as a json string");

  mod.def(
      "run_minmax",
      [](const std::string& manifold, int dim, double max_radius, double radius,
         std::uint64_t seed, std::optional<double> eta, int max_iters, int inner_iters,
         double tol, bool timing, double coupling) {
        ExperimentConfig c = config_from_kwargs(manifold, dim, max_radius, 1, radius, seed,
                                                "rippa-rgda", eta, max_iters, inner_iters, tol,
                                                timing, coupling);
        return result_to_dict(run_minmax_experiment(c));
      },
      py::arg("manifold") = "hyperbolic", py::arg("dim") = 2, py::arg("max_radius") = 1.5,
      py::arg("radius") = 0.6, py::arg("seed") = 0, py::arg("eta") = std::nullopt,
      py::arg("max_iters") = 100, py::arg("inner_iters") = 3, py::arg("tol") = 1e-8,
      py::arg("timing") = false, py::arg("coupling") = 0.0);

  mod.def(
      "run_suite",
      [](const std::string& suite, std::uint64_t seed, int samples) {
        std::vector<CheckReport> reports = run_suite(parse_suite(suite), seed, samples);
        py::list out;
        for (const CheckReport& r : reports) out.append(report_to_dict(r));
        return out;
      },
      py::arg("suite"), py::arg("seed") = 0, py::arg("samples") = 0,
      "run one verification suite and return the reports as dicts");

  mod.def("format_rows_csv", [](const std::string& manifold, int dim, double max_radius,
                                int centers, double radius, std::uint64_t seed,
                                const std::string& algo, int max_iters, double tol) {
    ExperimentConfig c = config_from_kwargs(manifold, dim, max_radius, centers, radius, seed,
                                            algo, std::nullopt, max_iters, 3, tol, false, 0.0);
    return format_rows_csv(run_karcher_experiment(c).rows);
  });
}
