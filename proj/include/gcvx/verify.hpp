#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gcvx/proximal.hpp"

namespace gcvx {

// One property check, aggregated worst-case over its samples. `module` ties
// the report back to the registry entry it discharges and is not serialized.
struct CheckReport {
  std::string name;
  std::string module;
  std::uint64_t samples = 0;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool passed = false;  // max_violation <= tolerance
  std::string notes;
};

enum class Suite { Geometry, Prox, Solvers, Moreau, Minmax };

Suite parse_suite(const std::string& name);  // throws ConfigInvalid on anything else
const char* suite_name(Suite s);

// Geodesic central differences over an orthonormal tangent basis,
// h restricted to [1e-6, 1e-2].
TangentVector fd_gradient(const Manifold& m, const std::function<double(const Point&)>& f,
                          const Point& x, double h);
TangentVector fd_gradient(const Objective& f, const Point& x, double h);

// Independent prox oracle: closed form on flat instances where available,
// otherwise plain inner descent run to residual 1e-11 (capped at 10^4 steps).
Point brute_prox(const Objective& f, const Point& anchor, double eta);

// Runs every check of one suite. Deterministic given the seed; samples = 0
// keeps each check's own default count, anything positive overrides it.
std::vector<CheckReport> run_suite(Suite suite, std::uint64_t seed, int samples = 0);

// Canonical claim list: one entry per tested property of the geometry,
// objectives, solvers, and proximal modules, each mapped to the suite that
// produces its report. Suites may emit additional reports under other module
// labels; the registry itself is exhaustive for those four.
struct RegistryEntry {
  std::string module;
  std::string name;
  Suite suite;
};

const std::vector<RegistryEntry>& verification_registry();

std::string to_json_line(const CheckReport& r);

}  // namespace gcvx
