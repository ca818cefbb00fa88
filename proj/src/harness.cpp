#include "gcvx/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>

namespace gcvx {

namespace {

int log_level() {
  static int level = [] {
    const char* env = std::getenv("GCVX_LOG");
    if (!env) return 1;
    std::string s(env);
    if (s == "off") return 0;
    if (s == "error") return 1;
    if (s == "warn") return 2;
    if (s == "info") return 3;
    if (s == "debug") return 4;
    return 1;
  }();
  return level;
}

void log_msg(int level, const std::string& msg) {
  if (level <= log_level()) std::cerr << "[gcvx] " << msg << "\n";
}

std::uint64_t wall_now_ns() {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::steady_clock::now().time_since_epoch())
          .count());
}

constexpr double kPi = 3.14159265358979323846;

void validate_common(const ExperimentConfig& c) {
  if (c.n_centers < 1) throw Error(ErrorCode::ConfigInvalid, "need at least one center");
  if (!(c.radius > 0.0)) throw Error(ErrorCode::ConfigInvalid, "sampling radius must be positive");
  if (c.manifold.kind == ManifoldKind::SphericalCap && !(c.radius < kPi / 4.0))
    throw Error(ErrorCode::ConfigInvalid, "sampling radius must stay below pi/4 on the cap");
  if (c.max_iters < 1) throw Error(ErrorCode::ConfigInvalid, "max_iters must be >= 1");
  if (c.inner_iters < 0) throw Error(ErrorCode::ConfigInvalid, "inner_iters must be >= 0");
  if (!(c.tol_fgap > 0.0)) throw Error(ErrorCode::ConfigInvalid, "tol_fgap must be positive");
  if (c.format != "csv" && c.format != "json")
    throw Error(ErrorCode::ConfigInvalid, "format must be csv or json");
  const auto& algos = known_algorithms();
  if (std::find(algos.begin(), algos.end(), c.algo) == algos.end())
    throw Error(ErrorCode::ConfigInvalid, "unknown algorithm '" + c.algo + "'");
}

nlohmann::json config_echo(const ExperimentConfig& c) {
  nlohmann::json j;
  j["manifold"] = manifold_kind_name(c.manifold.kind);
  j["dim"] = c.manifold.dim;
  if (c.manifold.kind == ManifoldKind::SphericalCap) j["max_radius"] = c.manifold.max_radius;
  j["n_centers"] = c.n_centers;
  j["radius"] = c.radius;
  j["seed"] = c.seed;
  j["algo"] = c.algo;
  if (c.eta_override) j["eta_override"] = *c.eta_override;
  j["max_iters"] = c.max_iters;
  j["inner_iters"] = c.inner_iters;
  j["tol_fgap"] = c.tol_fgap;
  j["format"] = c.format;
  j["timing"] = c.timing;
  return j;
}

std::vector<TraceRow> build_rows(const Objective& f, const SolverTrace& trace, double f_star,
                                 bool timing, double tol, bool* reached,
                                 const std::function<double(const Point&)>& gap_fn = {}) {
  std::vector<TraceRow> rows;
  *reached = false;
  std::uint64_t w0 = trace.wall_ns.empty() ? 0 : trace.wall_ns.front();
  for (std::size_t t = 0; t < trace.iterates.size(); ++t) {
    TraceRow r;
    r.iter = static_cast<std::int64_t>(t);
    r.f_gap = gap_fn ? gap_fn(trace.iterates[t]) : f.value(trace.iterates[t]) - f_star;
    r.dist_sq = t < trace.dist_to_ref_sq.size()
                    ? trace.dist_to_ref_sq[t]
                    : std::numeric_limits<double>::quiet_NaN();
    r.grad_norm = trace.grad_norms[t];
    r.oracle_calls = trace.oracle_calls[t];
    r.wall_ns = timing && t < trace.wall_ns.size() ? trace.wall_ns[t] - w0 : 0;
    rows.push_back(r);
    if (r.f_gap <= tol) {
      *reached = true;
      break;
    }
  }
  return rows;
}

int count_dist_increases(const std::vector<TraceRow>& rows) {
  int n = 0;
  for (std::size_t t = 1; t < rows.size(); ++t)
    if (rows[t].dist_sq > rows[t - 1].dist_sq + 1e-12) ++n;
  return n;
}

void put_optional(nlohmann::json& j, const char* key, double v) {
  if (std::isfinite(v))
    j[key] = v;
  else
    j[key] = nullptr;
}

}  // namespace

const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> algos = {"rgd-l",      "rgd-zeta",   "rgd-reduced",
                                                 "subgrad",    "prgd",       "crgd",
                                                 "rippa-prgd", "rippa-crgd", "rppa-exact",
                                                 "rippa-rgda"};
  return algos;
}

KarcherProblem generate_karcher(const ExperimentConfig& config) {
  validate_common(config);
  KarcherProblem out;
  out.m = make_manifold(config.manifold);
  Point anchor = out.m->base_point();
  Rng rng(config.seed);
  double max_d = 0.0;
  for (int i = 0; i < config.n_centers; ++i) {
    TangentVector v = out.m->random_tangent_in_ball(anchor, config.radius, rng);
    if (i > 0) v.vec /= 10.0;
    out.centers.push_back(out.m->exp(anchor, v));
    max_d = std::max(max_d, out.m->dist(out.centers.back(), anchor));
  }
  out.x0 = out.m->exp(anchor, out.m->random_tangent_in_ball(anchor, config.radius, rng));
  out.r_upper = 2.0 * max_d;
  return out;
}

ReferenceResult compute_reference(const std::shared_ptr<const Manifold>& m,
                                  const std::vector<Point>& centers) {
  Objective f = karcher(m, centers);
  double spread = 0.0;
  for (const Point& y : centers) spread = std::max(spread, m->dist(f.reference, y));
  double big_l = f.smoothness_on(2.0 * spread + 1e-12);

  ReferenceResult res;
  Point x = f.reference;
  double gnorm = m->norm(f.gradient(x));
  int it = 0;
  for (; it < 100000 && gnorm > 1e-13; ++it) {
    TangentVector g = f.gradient(x);
    x = m->exp(x, TangentVector{x.coords, -(1.0 / big_l) * g.vec});
    gnorm = m->norm(f.gradient(x));
  }
  res.xstar = x;
  res.f_star = f.value(x);
  res.grad_norm = gnorm;
  res.iters = it;
  res.low_precision = gnorm > 1e-12;
  if (res.low_precision)
    log_msg(2, "reference solve stalled at gradient norm " + std::to_string(gnorm));
  return res;
}

ExperimentResult run_karcher_experiment(const ExperimentConfig& config) {
  std::uint64_t t_begin = wall_now_ns();
  validate_common(config);
  if (config.algo == "rippa-rgda")
    throw Error(ErrorCode::ConfigInvalid, "rippa-rgda solves saddle problems; use the minmax command");

  KarcherProblem kp = generate_karcher(config);
  const Manifold& m = *kp.m;
  Point anchor = m.base_point();
  Objective f = karcher(kp.m, kp.centers);
  log_msg(3, "instance ready: " + std::string(manifold_kind_name(m.kind())) + " n=" +
                 std::to_string(config.n_centers) + " R_upper=" + std::to_string(kp.r_upper));
  ReferenceResult ref = compute_reference(kp.m, kp.centers);
  log_msg(3, "reference solved in " + std::to_string(ref.iters) + " iterations");

  const double big_r = kp.r_upper;
  const double kmin = m.kappa_min();
  const double kmax = m.kappa_max();
  // the 1/L certificate ball; the hyperboloid admits the tighter radius
  const double cert_l =
      m.kind() == ManifoldKind::Hyperbolic ? kGoldenRatio * big_r : kGoldenRatio * big_r * zeta(big_r, kmin);

  double eta = std::numeric_limits<double>::quiet_NaN();
  double quoted_l = std::numeric_limits<double>::quiet_NaN();
  double ball_radius = std::numeric_limits<double>::quiet_NaN();
  double quoted_lip = std::numeric_limits<double>::quiet_NaN();
  std::string source;
  SolverTrace trace;
  bool diverged = false;
  std::string diverged_what;

  auto ov = [&](double v) { return config.eta_override ? *config.eta_override : v; };

  try {
    if (config.algo == "rgd-l") {
      quoted_l = zeta(2.0 * cert_l, kmin);
      eta = ov(1.0 / quoted_l);
      ball_radius = cert_l;
      source = "gradient descent, step 1/zeta at the certificate-ball diameter";
      trace = rgd(f, kp.x0, StepRule::fixed(eta), config.max_iters, ref.xstar);
    } else if (config.algo == "rgd-zeta") {
      double rho = std::sqrt(1.5) * big_r;
      quoted_l = zeta(2.0 * rho, kmin);
      eta = ov(1.0 / (zeta(rho, kmin) * quoted_l));
      ball_radius = rho;
      source = "gradient descent, step 1/(zeta_rho * zeta at the ball diameter)";
      trace = rgd(f, kp.x0, StepRule::fixed(eta), config.max_iters, ref.xstar);
    } else if (config.algo == "rgd-reduced") {
      Objective freg = regularize(f, kp.x0, config.tol_fgap, big_r);
      quoted_l = freg.smoothness_on(2.0 * big_r);
      eta = ov(1.0 / quoted_l);
      ball_radius = big_r;
      source = "gradient descent on the strong-convexity-regularized objective";
      trace = rgd(freg, kp.x0, StepRule::fixed(eta), config.max_iters, ref.xstar);
    } else if (config.algo == "subgrad") {
      if (config.eta_override)
        throw Error(ErrorCode::ConfigInvalid,
                    "the subgradient step follows its horizon schedule; eta cannot be overridden");
      ball_radius = std::sqrt(2.0) * big_r;
      quoted_lip = f.lipschitz_on(ball_radius);
      source = "subgradient method with horizon step and averaged output";
      trace = subgradient_rgd(f, kp.x0, big_r, config.max_iters, ref.xstar);
      eta = trace.resolved_eta;
    } else if (config.algo == "prgd") {
      quoted_l = zeta(2.0 * cert_l, kmin);
      eta = ov(1.0 / quoted_l);
      ball_radius = big_r;
      source = "projected gradient descent on the anchor ball";
      Point x0 = project_ball(m, anchor, big_r, kp.x0);
      trace = prgd(f, x0, StepRule::fixed(eta), Ball{anchor, big_r}, config.max_iters, ref.xstar);
    } else if (config.algo == "crgd") {
      quoted_l = zeta(2.0 * cert_l, kmin);
      eta = ov(1.0 / quoted_l);
      ball_radius = big_r;
      source = "composite gradient descent against the anchor-ball indicator";
      CompositePart g = CompositePart::ball_indicator(anchor, big_r);
      trace = crgd(f, g, kp.x0, quoted_l, config.max_iters, ref.xstar);
    } else if (config.algo == "rppa-exact") {
      eta = ov(1.0);
      ball_radius = m.dist(kp.x0, ref.xstar);
      source = "proximal point with exact subproblem solves";
      trace = rppa(f, kp.x0, eta, config.max_iters, ref.xstar);
    } else if (config.algo == "rippa-prgd" || config.algo == "rippa-crgd") {
      quoted_l = zeta(2.0 * std::sqrt(2.0) * big_r, kmin);
      eta = ov(1.0 / quoted_l);
      ball_radius = std::sqrt(2.0) * big_r;
      source = "inexact proximal point, " + std::string(config.algo == "rippa-prgd"
                                                            ? "projected gradient inner solver"
                                                            : "composite gradient inner solver");
      RippaOptions opt;
      opt.eta = eta;
      opt.outer_iters = config.max_iters;
      opt.mu = 0.0;
      opt.r_bound = big_r;
      opt.inner = config.algo == "rippa-prgd" ? InnerSolver::PRGD : InnerSolver::CRGD;
      opt.inner_iters = config.inner_iters;
      trace = rippa(f, kp.x0, opt, ref.xstar);
    } else {
      throw Error(ErrorCode::ConfigInvalid, "unhandled algorithm '" + config.algo + "'");
    }
  } catch (const DivergedError& e) {
    trace = e.partial_trace();
    diverged = true;
    diverged_what = e.what();
    log_msg(1, std::string("solver diverged: ") + e.what());
  }

  ExperimentResult res;
  res.rows = build_rows(f, trace, ref.f_star, config.timing, config.tol_fgap, &res.reached_tol);
  res.trace = std::move(trace);

  nlohmann::json meta;
  meta["config"] = config_echo(config);
  meta["eta"] = eta;
  put_optional(meta, "L", quoted_l);
  meta["mu"] = f.strong_convexity_on(big_r);
  put_optional(meta, "lipschitz", quoted_lip);
  meta["zeta_r_upper"] = zeta(big_r, kmin);
  meta["delta_r_upper"] = delta(big_r, kmax);
  meta["r_upper"] = big_r;
  put_optional(meta, "ball_radius", ball_radius);
  meta["phi"] = kGoldenRatio;
  meta["phi_formula"] = "(1+sqrt(5))/2";
  meta["f_star"] = ref.f_star;
  meta["reference"] = {{"grad_norm", ref.grad_norm},
                       {"iters", ref.iters},
                       {"low_precision", ref.low_precision}};
  meta["step_source"] = source;
  meta["reached_tol"] = res.reached_tol;
  meta["rows"] = res.rows.size();
  meta["dist_sq_increase_steps"] = count_dist_increases(res.rows);
  meta["diverged"] = diverged;
  if (diverged) meta["diverged_what"] = diverged_what;
  if (res.trace.averaged_output)
    meta["averaged_f_gap"] = f.value(*res.trace.averaged_output) - ref.f_star;
  if (!res.trace.violations.empty()) meta["solver_flags"] = res.trace.violations;
  meta["wall_ns_total"] = wall_now_ns() - t_begin;
  res.metadata = std::move(meta);
  return res;
}

ExperimentResult run_minmax_experiment(const ExperimentConfig& config) {
  std::uint64_t t_begin = wall_now_ns();
  validate_common(config);
  if (config.algo != "rippa-rgda")
    throw Error(ErrorCode::ConfigInvalid, "the minmax command supports only rippa-rgda");

  auto mx = make_manifold(config.manifold);
  auto my = make_manifold(config.manifold);
  Point base = mx->base_point();
  Rng rng(config.seed);
  Point a = mx->exp(base, mx->random_tangent_in_ball(base, config.radius, rng));
  Point b = my->exp(base, my->random_tangent_in_ball(base, config.radius, rng));
  SaddleObjective f = saddle_toy(mx, my, a, b, config.coupling);
  const ProductManifold& pm = *f.product;
  Point z0 = pm.join(mx->exp(base, mx->random_tangent_in_ball(base, config.radius, rng)),
                     my->exp(base, my->random_tangent_in_ball(base, config.radius, rng)));
  Point saddle = pm.join(a, b);
  double big_r = std::max(pm.dist(z0, saddle), 1e-9);

  double quoted_l = f.smoothness_on(2.0 * big_r);
  double eta = config.eta_override ? *config.eta_override : 1.0 / quoted_l;

  RippaOptions opt;
  opt.eta = eta;
  opt.outer_iters = config.max_iters;
  opt.mu = 0.0;
  opt.r_bound = big_r;
  opt.inner = InnerSolver::RGDA;
  opt.inner_iters = config.inner_iters;

  SolverTrace trace;
  bool diverged = false;
  std::string diverged_what;
  try {
    trace = rippa(f, z0, opt, saddle);
  } catch (const DivergedError& e) {
    trace = e.partial_trace();
    diverged = true;
    diverged_what = e.what();
  }

  ExperimentResult res;
  Objective unused;  // gap_fn path ignores it
  std::function<double(const Point&)> gap_fn = [&f](const Point& z) { return f.gap(z); };
  res.rows = build_rows(unused, trace, 0.0, config.timing, config.tol_fgap, &res.reached_tol, gap_fn);
  res.trace = std::move(trace);

  nlohmann::json meta;
  meta["config"] = config_echo(config);
  meta["coupling"] = config.coupling;
  meta["eta"] = eta;
  meta["L"] = quoted_l;
  meta["mu"] = f.strong_convexity_on(big_r);
  meta["zeta_r_upper"] = zeta(big_r, pm.kappa_min());
  meta["delta_r_upper"] = delta(big_r, pm.kappa_max());
  meta["r_upper"] = big_r;
  meta["ball_radius"] = std::sqrt(2.0) * big_r;
  meta["phi"] = kGoldenRatio;
  meta["phi_formula"] = "(1+sqrt(5))/2";
  meta["f_star"] = f.value(a, b);
  meta["saddle_field_norm"] = f.field_norm(saddle);
  meta["step_source"] = "inexact proximal point with descent-ascent inner steps";
  meta["reached_tol"] = res.reached_tol;
  meta["rows"] = res.rows.size();
  meta["dist_sq_increase_steps"] = count_dist_increases(res.rows);
  meta["diverged"] = diverged;
  if (diverged) meta["diverged_what"] = diverged_what;
  if (res.trace.averaged_output) meta["averaged_gap"] = f.gap(*res.trace.averaged_output);
  meta["wall_ns_total"] = wall_now_ns() - t_begin;
  res.metadata = std::move(meta);
  return res;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

std::string format_rows_csv(const std::vector<TraceRow>& rows) {
  std::string out = "iter,f_gap,dist_sq,grad_norm,oracle_calls,wall_ns\n";
  for (const TraceRow& r : rows) {
    out += std::to_string(r.iter);
    out += ',';
    out += format_double(r.f_gap);
    out += ',';
    out += format_double(r.dist_sq);
    out += ',';
    out += format_double(r.grad_norm);
    out += ',';
    out += std::to_string(r.oracle_calls);
    out += ',';
    out += std::to_string(r.wall_ns);
    out += '\n';
  }
  return out;
}

std::string format_rows_json(const std::vector<TraceRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const TraceRow& r : rows) {
    nlohmann::json j;
    j["iter"] = r.iter;
    j["f_gap"] = r.f_gap;
    j["dist_sq"] = r.dist_sq;
    j["grad_norm"] = r.grad_norm;
    j["oracle_calls"] = r.oracle_calls;
    j["wall_ns"] = r.wall_ns;
    arr.push_back(j);
  }
  return arr.dump(2) + "\n";
}

int experiment_command(const ExperimentConfig& config, bool minmax) {
  try {
    ExperimentResult res =
        minmax ? run_minmax_experiment(config) : run_karcher_experiment(config);
    std::string payload =
        config.format == "json" ? format_rows_json(res.rows) : format_rows_csv(res.rows);
    if (config.out.empty()) {
      std::cout << payload;
      std::cerr << res.metadata.dump(2) << "\n";
    } else {
      std::ofstream f(config.out, std::ios::binary);
      if (!f) {
        log_msg(1, "cannot open output file " + config.out);
        return 2;
      }
      f << payload;
      std::ofstream mf(config.out + ".meta.json", std::ios::binary);
      mf << res.metadata.dump(2) << "\n";
    }
    return res.metadata.value("diverged", false) ? 3 : 0;
  } catch (const DivergedError&) {
    return 3;
  } catch (const Error& e) {
    log_msg(1, std::string("error: ") + e.what());
    return e.code() == ErrorCode::Diverged ? 3 : 2;
  }
}

int verify_command(const std::string& suite, std::uint64_t seed, int samples,
                   const std::string& out) {
  try {
    std::vector<CheckReport> reports = run_suite(parse_suite(suite), seed, samples);
    std::string payload;
    bool all = true;
    for (const CheckReport& r : reports) {
      payload += to_json_line(r);
      payload += '\n';
      all = all && r.passed;
    }
    if (out.empty()) {
      std::cout << payload;
    } else {
      std::ofstream f(out, std::ios::binary);
      if (!f) {
        log_msg(1, "cannot open output file " + out);
        return 2;
      }
      f << payload;
    }
    return all ? 0 : 1;
  } catch (const Error& e) {
    log_msg(1, std::string("error: ") + e.what());
    return 2;
  }
}

}  // namespace gcvx
