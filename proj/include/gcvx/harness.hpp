#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gcvx/proximal.hpp"
#include "gcvx/verify.hpp"

namespace gcvx {

// One benchmark run, fully determined by these fields (all randomness flows
// from `seed` through counter-based streams; see generate_karcher).
struct ExperimentConfig {
  ManifoldDescriptor manifold{ManifoldKind::Hyperbolic, 50, 1.5, -1.0, -1.0};
  int n_centers = 100;
  double radius = 1.0;  // tangent sampling radius; must stay below pi/4 on the cap
  std::uint64_t seed = 0;
  std::string algo = "rgd-l";
  std::optional<double> eta_override;
  int max_iters = 1000;
  int inner_iters = 3;  // fixed inner steps for the rippa-* variants
  double tol_fgap = 1e-8;
  std::string out;           // empty writes to stdout
  std::string format = "csv";  // csv | json
  bool timing = false;       // real wall_ns column (breaks byte-stability on purpose)
  double coupling = 0.0;     // minmax only; nonzero needs flat factors
};

const std::vector<std::string>& known_algorithms();

struct TraceRow {
  std::int64_t iter = 0;
  double f_gap = 0.0;
  double dist_sq = 0.0;
  double grad_norm = 0.0;
  std::uint64_t oracle_calls = 0;
  std::uint64_t wall_ns = 0;
};

struct KarcherProblem {
  std::shared_ptr<const Manifold> m;
  std::vector<Point> centers;
  Point x0;
  double r_upper = 0.0;  // 2 * max_i d(y_i, anchor)
};

// Samples the benchmark instance: anchor at the manifold basepoint, center
// tangents uniform in B(0, r) with all but the first shrunk by 10x, x0 drawn
// the same way at full scale. Stream order: centers 1..n, then x0.
KarcherProblem generate_karcher(const ExperimentConfig& config);

struct ReferenceResult {
  Point xstar;
  double f_star = 0.0;
  double grad_norm = 0.0;
  bool low_precision = false;  // gradient norm stalled above 1e-12
  int iters = 0;
};

// Gradient descent at 1/L from the running average of the centers down to
// gradient norm 1e-13 (capped at 1e5 iterations).
ReferenceResult compute_reference(const std::shared_ptr<const Manifold>& m,
                                  const std::vector<Point>& centers);

struct ExperimentResult {
  std::vector<TraceRow> rows;
  nlohmann::json metadata;
  SolverTrace trace;
  bool reached_tol = false;
};

// Solves the generated instance with the configured algorithm and builds the
// trace rows (truncated at the first row under tol_fgap) plus the metadata
// blob. Does not touch the filesystem.
ExperimentResult run_karcher_experiment(const ExperimentConfig& config);

// Saddle benchmark: 1/2 d(x,a)^2 - 1/2 d(y,b)^2 (+ coupling on flat factors),
// solved by the inexact proximal method with descent-ascent inner steps.
// f_gap column holds the exact duality gap.
ExperimentResult run_minmax_experiment(const ExperimentConfig& config);

// Serialization helpers shared by the CLI and the tests. Floats are printed
// in shortest round-trip decimal form; lines end with \n.
std::string format_rows_csv(const std::vector<TraceRow>& rows);
std::string format_rows_json(const std::vector<TraceRow>& rows);
std::string format_double(double v);

// Full CLI-level run: executes the experiment and writes the trace file plus
// a sibling <out>.meta.json. Empty `out` prints the trace to stdout and the
// metadata to stderr. Returns the process exit code.
int experiment_command(const ExperimentConfig& config, bool minmax);

// Runs one verification suite and streams JSON-lines reports. Exit 0 iff all
// checks passed.
int verify_command(const std::string& suite, std::uint64_t seed, int samples,
                   const std::string& out);

}  // namespace gcvx
