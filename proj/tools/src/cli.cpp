#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <bellmix/error.hpp>
#include <bellmix/harness.hpp>
#include <bellmix/measurement.hpp>
#include <bellmix/metrics.hpp>
#include <bellmix/optics.hpp>
#include <bellmix/states.hpp>
#include <bellmix/tomography.hpp>

namespace bellmix::cli {

namespace {

namespace fs = std::filesystem;

// A failure with its exit code already decided.
struct Failure {
  int code;
  std::string message;
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig:
    case ErrorKind::OutOfRange:
    case ErrorKind::NotNormalized:
      return kConfigError;
    default:
      return kDataError;
  }
}

std::string read_file(const fs::path& path, int code) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{code, "cannot read " + path.string()};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const fs::path& path, int code) {
  const std::string text = read_file(path, code);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Failure{code, path.string() + ": " + e.what()};
  }
}

// Runs `f`, turning library errors into a Failure with `code`.
template <typename F>
auto with_code(int code, const std::string& context, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Failure{code, context + ": " + e.what()};
  }
}

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream file(p, std::ios::binary | std::ios::trunc);
  file << text;
  if (!file) throw Failure{kConfigError, "cannot write " + path};
}

bool is_json_path(const std::string& path) { return fs::path(path).extension() == ".json"; }

std::uint64_t parse_seed(const std::string& text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Failure{kConfigError, "BELLMIX_SEED must be an unsigned 64-bit integer, got '" + text + "'"};
  }
  return v;
}

// --seed beats BELLMIX_SEED, which beats the configured value.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, const Environment& env,
                           std::uint64_t configured) {
  if (flag) return *flag;
  if (env.seed) return parse_seed(*env.seed);
  return configured;
}

unsigned resolve_threads(unsigned parallel) {
  if (parallel != 0) return parallel;
  return std::max(1u, std::thread::hardware_concurrency());
}

DensityMatrix load_state(const std::string& path, int code) {
  const nlohmann::json j = read_json(path, code);
  return with_code(code, path, [&] { return DensityMatrix::from_matrix(matrix_from_json(j)); });
}

SourceConfig load_source_config(const std::string& path) {
  if (path.empty()) return {};
  const nlohmann::json j = read_json(path, kConfigError);
  return with_code(kConfigError, path, [&] { return source_config_from_json(j); });
}

ProjectorSet load_projectors(const std::string& path) {
  if (path.empty()) return standard_projector_set();
  const nlohmann::json j = read_json(path, kDataError);
  return with_code(kDataError, path, [&] { return projector_set_from_json(j); });
}

CountRecords load_counts(const std::string& path, const ProjectorSet& set) {
  if (is_json_path(path)) {
    const nlohmann::json j = read_json(path, kDataError);
    return with_code(kDataError, path, [&] { return counts_from_json(j, set); });
  }
  const std::string text = read_file(path, kDataError);
  return with_code(kDataError, path, [&] { return counts_from_csv(text, set); });
}

// Target for fidelity: an explicit state file, a duty-cycle value, or 1/4.
ReconstructionTarget resolve_target(const std::string& target_path, const std::optional<double>& alpha) {
  if (!target_path.empty() && alpha) {
    throw Failure{kConfigError, "--target and --target-alpha are mutually exclusive"};
  }
  if (!target_path.empty()) return {load_state(target_path, kConfigError), target_path};
  if (alpha) {
    return with_code(kConfigError, "--target-alpha", [&] {
      return ReconstructionTarget{mix_duty_cycle(*alpha), "mix_duty_cycle(" + format_double(*alpha) + ")"};
    });
  }
  return {};
}

struct Options {
  std::string config;
  std::string state;
  std::string counts;
  std::string projectors;
  std::string target;
  std::optional<double> target_alpha;
  std::optional<std::uint64_t> seed;
  std::optional<double> pairs;
  std::optional<int> resamples;
  double accidentals = 0.0;
  std::string tag = "sim";
  std::string out;
  unsigned parallel = 1;
  int max_iterations = MleOptions{}.max_iterations;
  double tolerance = MleOptions{}.tolerance;
};

int cmd_generate(const Options& o, std::ostream& out) {
  const SourceConfig config = load_source_config(o.config);
  const DensityMatrix rho = with_code(kConfigError, "generate", [&] { return generate(config); });
  write_output(matrix_to_json(rho.matrix()).dump(2) + "\n", o.out, out);
  return kOk;
}

int cmd_simulate(const Options& o, const Environment& env, std::ostream& out) {
  if (!o.config.empty() && !o.state.empty()) {
    throw Failure{kConfigError, "--config and --state are mutually exclusive"};
  }
  const DensityMatrix rho = o.state.empty()
                                ? with_code(kConfigError, "generate", [&] { return generate(load_source_config(o.config)); })
                                : load_state(o.state, kDataError);
  AcquisitionConfig acq;
  acq.pairs_per_setting = o.pairs.value_or(acq.pairs_per_setting);
  acq.accidental_rate = o.accidentals;
  acq.duration_tag = o.tag;
  acq.seed = resolve_seed(o.seed, env, 0);
  const ProjectorSet& set = standard_projector_set();
  const CountRecords counts = with_code(kConfigError, "simulate", [&] { return simulate_counts(rho, set, acq); });
  write_output(is_json_path(o.out) ? counts_to_json(counts, set).dump(2) + "\n" : counts_to_csv(counts, set), o.out,
               out);
  return kOk;
}

int cmd_reconstruct(const Options& o, const Environment& env, std::ostream& out) {
  const ProjectorSet set = load_projectors(o.projectors);
  const CountRecords counts = load_counts(o.counts, set);
  const ReconstructionTarget target = resolve_target(o.target, o.target_alpha);
  MleOptions mle;
  mle.max_iterations = o.max_iterations;
  mle.tolerance = o.tolerance;

  ReconstructionResult result = with_code(kDataError, o.counts, [&] { return mle_reconstruct(counts, set, mle, target); });
  const int resamples = o.resamples.value_or(0);
  if (resamples >= 2) {
    // Resimulate at the observed mean number of pairs per setting.
    double total = 0.0;
    for (const CountRecord& r : counts) total += static_cast<double>(r.total());
    AcquisitionConfig acq;
    acq.pairs_per_setting = total / static_cast<double>(counts.size());
    acq.seed = resolve_seed(o.seed, env, 0);
    result.metric_errors = with_code(kDataError, "bootstrap", [&] {
      return bootstrap_errors(result, set, acq, resamples, mle, target, resolve_threads(o.parallel));
    });
  }
  write_output(reconstruction_to_json(result).dump(2) + "\n", o.out, out);
  return result.converged ? kOk : kNotConverged;
}

int cmd_metrics(const Options& o, std::ostream& out) {
  const DensityMatrix rho = load_state(o.state, kDataError);
  const ReconstructionTarget target = resolve_target(o.target, o.target_alpha);
  const MetricsReport report =
      with_code(kDataError, o.state, [&] { return compute_metrics(rho, target.state, target.description); });
  write_output(metrics_to_json(report).dump(2) + "\n", o.out, out);
  return kOk;
}

int cmd_sweep(const Options& o, const Environment& env, std::ostream& out) {
  const nlohmann::json j = read_json(o.config, kConfigError);
  SweepSpec spec = with_code(kConfigError, o.config, [&] { return sweep_spec_from_json(j); });
  spec.acquisition.seed = resolve_seed(o.seed, env, spec.acquisition.seed);
  if (o.pairs) spec.acquisition.pairs_per_setting = *o.pairs;
  if (o.resamples) spec.resamples = *o.resamples;
  if (!o.out.empty()) spec.outputs = o.out;
  with_code(kConfigError, o.config, [&] {
    spec.validate();
    return 0;
  });
  const SweepResult result = run_sweep(spec, resolve_threads(o.parallel));
  out << result.csv;
  const bool all_converged =
      std::all_of(result.rows.begin(), result.rows.end(), [](const SweepRow& r) { return r.converged; });
  return all_converged ? kOk : kNotConverged;
}

int cmd_reference_fixtures(const Options& o, const Environment& env, std::ostream& out) {
  bool all = true;
  for (const FixtureCheck& c : reference_fixtures(resolve_seed(o.seed, env, 2014))) {
    all = all && c.pass();
    out << (c.pass() ? "PASS  " : "FAIL  ") << c.name << ": " << format_double(c.value) << " in ["
        << format_double(c.lower) << ", " << format_double(c.upper) << "]\n";
  }
  return all ? kOk : kFailure;
}

int cmd_projectors(const Options& o, std::ostream& out) {
  write_output(projector_set_to_json(standard_projector_set()).dump(2) + "\n", o.out, out);
  return kOk;
}

}  // namespace

Environment process_environment() {
  Environment env;
  if (const char* s = std::getenv("BELLMIX_SEED")) env.seed = s;
  return env;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Environment& env) {
  CLI::App app{"Mixed two-photon polarization states: generation, tomography simulation and metrics", "bellmix"};
  app.require_subcommand(1);
  Options o;

  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", o.out, "Output file (directory for sweep)"); };
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Master seed; overrides BELLMIX_SEED and the config");
  };
  auto add_target = [&](CLI::App* sub) {
    sub->add_option("--target", o.target, "Target state JSON for fidelity");
    sub->add_option("--target-alpha", o.target_alpha, "Use mix_duty_cycle(alpha) as fidelity target");
  };
  auto add_parallel = [&](CLI::App* sub) {
    sub->add_option("--parallel", o.parallel, "Worker threads; 0 uses all cores")->default_val(1);
  };

  auto* gen = app.add_subcommand("generate", "Write the density matrix of a source configuration");
  gen->add_option("--config", o.config, "Source config JSON (defaults when omitted)");
  add_out(gen);

  auto* sim = app.add_subcommand("simulate", "Simulate 36-outcome coincidence counts");
  sim->add_option("--config", o.config, "Source config JSON");
  sim->add_option("--state", o.state, "Density matrix JSON instead of a source config");
  sim->add_option("--pairs", o.pairs, "Mean detected pairs per setting");
  sim->add_option("--accidentals", o.accidentals, "Flat background mean per outcome");
  sim->add_option("--tag", o.tag, "Duration tag recorded with the counts");
  add_seed(sim);
  add_out(sim);

  auto* rec = app.add_subcommand("reconstruct", "Maximum-likelihood reconstruction from counts");
  rec->add_option("--counts", o.counts, "Counts CSV or JSON")->required();
  rec->add_option("--projectors", o.projectors, "Projector set JSON (standard set when omitted)");
  add_target(rec);
  rec->add_option("--resamples", o.resamples, "Bootstrap resamples (>= 2 enables error bars)");
  rec->add_option("--max-iterations", o.max_iterations, "MLE iteration cap");
  rec->add_option("--tolerance", o.tolerance, "Relative log-likelihood gain for convergence");
  add_seed(rec);
  add_parallel(rec);
  add_out(rec);

  auto* met = app.add_subcommand("metrics", "Purity, tangle, visibility and fidelity of a state");
  met->add_option("--state", o.state, "Density matrix JSON")->required();
  add_target(met);
  add_out(met);

  auto* swp = app.add_subcommand("sweep", "Duty-cycle sweep: generate, simulate, reconstruct, metrics");
  swp->add_option("--config", o.config, "Sweep spec JSON")->required();
  swp->add_option("--pairs", o.pairs, "Override pairs per setting");
  swp->add_option("--resamples", o.resamples, "Override bootstrap resamples");
  add_seed(swp);
  add_parallel(swp);
  add_out(swp);

  auto* fix = app.add_subcommand("paper-fixtures", "Check the reference fixtures");
  add_seed(fix);

  auto* prj = app.add_subcommand("projectors", "Export the standard 36-outcome projector set");
  add_out(prj);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*gen) return cmd_generate(o, out);
    if (*sim) return cmd_simulate(o, env, out);
    if (*rec) return cmd_reconstruct(o, env, out);
    if (*met) return cmd_metrics(o, out);
    if (*swp) return cmd_sweep(o, env, out);
    if (*fix) return cmd_reference_fixtures(o, env, out);
    if (*prj) return cmd_projectors(o, out);
  } catch (const Failure& f) {
    err << "bellmix: " << f.message << '\n';
    return f.code;
  } catch (const Error& e) {
    err << "bellmix: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "bellmix: " << e.what() << '\n';
    return kDataError;
  }
  return kConfigError;
}

}  // namespace bellmix::cli
