#include <atomic>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"

#include "gcvx/harness.hpp"

namespace {

gcvx::ManifoldKind parse_kind(const std::string& s) {
  if (s == "euclidean") return gcvx::ManifoldKind::Euclidean;
  if (s == "hyperbolic") return gcvx::ManifoldKind::Hyperbolic;
  if (s == "spd") return gcvx::ManifoldKind::Spd;
  if (s == "cap") return gcvx::ManifoldKind::SphericalCap;
  throw gcvx::Error(gcvx::ErrorCode::ConfigInvalid,
                    "manifold must be one of euclidean|hyperbolic|spd|cap");
}

struct CliState {
  gcvx::ExperimentConfig cfg;
  std::string manifold_name = "hyperbolic";
  double max_radius = 1.5;
  std::string batch_file;
  int jobs = 0;  // 0 = hardware concurrency
};

void add_experiment_flags(CLI::App* cmd, CliState& st, bool minmax) {
  cmd->add_option("--manifold", st.manifold_name, "euclidean|hyperbolic|spd|cap")
      ->default_str(st.manifold_name);
  cmd->add_option("--dim", st.cfg.manifold.dim, "dimension (matrix size for spd)")
      ->default_str(std::to_string(st.cfg.manifold.dim));
  cmd->add_option("--max-radius", st.max_radius, "cap half-angle, cap manifold only");
  cmd->add_option("--centers", st.cfg.n_centers, "number of sampled centers")
      ->default_str(std::to_string(st.cfg.n_centers));
  cmd->add_option("--radius", st.cfg.radius, "tangent sampling radius")
      ->default_str("1.0");
  cmd->add_option("--seed", st.cfg.seed, "rng seed")->default_str("0");
  cmd->add_option("--algo", st.cfg.algo, "algorithm name (see README)")
      ->default_str(st.cfg.algo);
  cmd->add_option("--eta", st.cfg.eta_override, "override the derived step size");
  cmd->add_option("--max-iters", st.cfg.max_iters, "outer iteration budget")
      ->default_str(std::to_string(st.cfg.max_iters));
  cmd->add_option("--inner-iters", st.cfg.inner_iters,
                  "fixed inner steps for rippa variants; 0 = criterion-driven")
      ->default_str(std::to_string(st.cfg.inner_iters));
  cmd->add_option("--tol", st.cfg.tol_fgap, "stop once f_gap falls below this")
      ->default_str("1e-8");
  cmd->add_option("--out", st.cfg.out, "trace file; metadata goes to <out>.meta.json");
  cmd->add_option("--format", st.cfg.format, "csv|json")->default_str("csv");
  cmd->add_flag("--timing", st.cfg.timing, "fill wall_ns with measured times");
  if (minmax)
    cmd->add_option("--coupling", st.cfg.coupling,
                    "bilinear coupling strength (euclidean factors only)");
  cmd->add_option("--batch", st.batch_file,
                  "json array of config overrides, run in parallel; each entry needs \"out\"");
  cmd->add_option("--jobs", st.jobs, "parallel workers for --batch (default: all cores)");
}

gcvx::ExperimentConfig apply_overrides(const gcvx::ExperimentConfig& base,
                                       const nlohmann::json& j) {
  gcvx::ExperimentConfig c = base;
  if (j.contains("manifold")) c.manifold.kind = parse_kind(j["manifold"].get<std::string>());
  if (j.contains("dim")) c.manifold.dim = j["dim"].get<int>();
  if (j.contains("max_radius")) c.manifold.max_radius = j["max_radius"].get<double>();
  if (j.contains("centers")) c.n_centers = j["centers"].get<int>();
  if (j.contains("radius")) c.radius = j["radius"].get<double>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("algo")) c.algo = j["algo"].get<std::string>();
  if (j.contains("eta")) c.eta_override = j["eta"].get<double>();
  if (j.contains("max_iters")) c.max_iters = j["max_iters"].get<int>();
  if (j.contains("inner_iters")) c.inner_iters = j["inner_iters"].get<int>();
  if (j.contains("tol")) c.tol_fgap = j["tol"].get<double>();
  if (j.contains("format")) c.format = j["format"].get<std::string>();
  if (j.contains("timing")) c.timing = j["timing"].get<bool>();
  if (j.contains("coupling")) c.coupling = j["coupling"].get<double>();
  if (j.contains("out"))
    c.out = j["out"].get<std::string>();
  else
    throw gcvx::Error(gcvx::ErrorCode::ConfigInvalid, "batch entries must set \"out\"");
  return c;
}

int run_batch(const gcvx::ExperimentConfig& base, const std::string& path, int jobs,
              bool minmax) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot read batch file " << path << "\n";
    return 2;
  }
  nlohmann::json arr;
  try {
    in >> arr;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "batch file is not valid json: " << e.what() << "\n";
    return 2;
  }
  if (!arr.is_array() || arr.empty()) {
    std::cerr << "batch file must hold a nonempty json array\n";
    return 2;
  }

  std::vector<gcvx::ExperimentConfig> configs;
  for (const auto& entry : arr) {
    try {
      configs.push_back(apply_overrides(base, entry));
    } catch (const gcvx::Error& e) {
      std::cerr << "bad batch entry: " << e.what() << "\n";
      return 2;
    }
  }

  unsigned workers = jobs > 0 ? static_cast<unsigned>(jobs)
                              : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, configs.size());
  std::vector<int> codes(configs.size(), 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < configs.size(); i = next.fetch_add(1))
      codes[i] = gcvx::experiment_command(configs[i], minmax);
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  int rc = 0;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    std::cerr << "[batch] " << configs[i].out << " exit " << codes[i] << "\n";
    rc = std::max(rc, codes[i]);
  }
  return rc;
}

int run_experiment_cmd(CliState& st, bool minmax) {
  try {
    st.cfg.manifold.kind = parse_kind(st.manifold_name);
    st.cfg.manifold.max_radius = st.max_radius;
    if (!st.batch_file.empty()) {
      if (st.cfg.out.empty() == false)
        std::cerr << "note: --out is ignored in batch mode; entries name their own files\n";
      return run_batch(st.cfg, st.batch_file, st.jobs, minmax);
    }
    return gcvx::experiment_command(st.cfg, minmax);
  } catch (const gcvx::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"benchmarks and verification for geodesically convex optimization"};
  app.require_subcommand(1);

  CliState kar_state;
  CLI::App* kar = app.add_subcommand("karcher", "mean of squared distances benchmark");
  add_experiment_flags(kar, kar_state, false);

  CliState mm_state;
  CLI::App* mm = app.add_subcommand("minmax", "decoupled saddle benchmark (rippa-rgda)");
  mm_state.cfg.algo = "rippa-rgda";
  add_experiment_flags(mm, mm_state, true);

  std::string suite = "geometry";
  std::uint64_t vseed = 0;
  int vsamples = 0;
  std::string vout;
  CLI::App* ver = app.add_subcommand("verify", "run a verification suite, json-lines reports");
  ver->add_option("--suite", suite, "geometry|prox|solvers|moreau|minmax")
      ->default_str(suite);
  ver->add_option("--seed", vseed, "rng seed")->default_str("0");
  ver->add_option("--samples", vsamples, "per-check sample override; 0 keeps defaults")
      ->default_str("0");
  ver->add_option("--out", vout, "report file; stdout when omitted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (kar->parsed()) return run_experiment_cmd(kar_state, false);
  if (mm->parsed()) return run_experiment_cmd(mm_state, true);
  if (ver->parsed()) return gcvx::verify_command(suite, vseed, vsamples, vout);
  return 2;
}
