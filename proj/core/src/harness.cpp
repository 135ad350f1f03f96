#include "bellmix/harness.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "bellmix/error.hpp"
#include "parallel.hpp"

namespace bellmix {

namespace {

constexpr std::uint64_t kSweepDomain = 4;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorKind::InvalidConfig, "cannot write " + path.string());
}

void check_keys(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorKind::ParseError, where + " must be a JSON object");
  for (const auto& item : j.items()) {
    if (!known.contains(item.key())) {
      throw Error(ErrorKind::InvalidConfig, "unknown field '" + where + "." + item.key() + "'");
    }
  }
}

struct PointJob {
  std::string source;
  double alpha;
  SourceConfig config;
  DensityMatrix target;
  std::string target_description;
  std::string directory;
  double v_theory, t_theory, p_theory;
};

SweepRow run_point(const PointJob& job, std::size_t index, const SweepSpec& spec) {
  AcquisitionConfig acq = spec.acquisition;
  acq.seed = derive_seed(spec.acquisition.seed, kSweepDomain, index);

  const DensityMatrix truth = generate(job.config);
  const ProjectorSet& set = standard_projector_set();
  const CountRecords counts = simulate_counts(truth, set, acq);
  const ReconstructionTarget target{job.target, job.target_description};
  ReconstructionResult result = mle_reconstruct(counts, set, spec.mle, target);

  SweepRow row;
  row.source = job.source;
  row.alpha = job.alpha;
  row.converged = result.converged;
  row.metrics = result.metrics;
  row.visibility_theory = job.v_theory;
  row.tangle_theory = job.t_theory;
  row.purity_theory = job.p_theory;
  if (spec.resamples >= 2) {
    row.errors = bootstrap_errors(result, set, acq, spec.resamples, spec.mle, target, 1);
    result.metric_errors = row.errors;
  }

  if (!spec.outputs.empty()) {
    const auto dir = spec.outputs / job.directory;
    std::filesystem::create_directories(dir);
    write_text(dir / "state.json", matrix_to_json(truth.matrix()).dump(2) + "\n");
    write_text(dir / "counts.csv", counts_to_csv(counts, set));
    write_text(dir / "recon.json", reconstruction_to_json(result).dump(2) + "\n");
  }
  return row;
}

}  // namespace

void SweepSpec::validate() const {
  if (alphas.empty()) throw Error(ErrorKind::InvalidConfig, "alphas must be nonempty");
  if (std::set<double>(alphas.begin(), alphas.end()).size() != alphas.size()) {
    throw Error(ErrorKind::InvalidConfig, "alphas must be distinct");
  }
  for (double a : alphas) {
    if (!std::isfinite(a) || a < 0.0 || a > 1.0) {
      throw Error(ErrorKind::InvalidConfig, "alpha " + format_double(a) + " is outside [0, 1]");
    }
  }
  acquisition.validate();
  SourceConfig probe;
  probe.noise = noise;
  probe.validate();
}

SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
  check_keys(j, {"alphas", "acquisition", "noise", "outputs", "include_completely_mixed", "resamples", "mle"},
             "sweep");
  try {
    SweepSpec s;
    s.alphas = j.at("alphas").get<std::vector<double>>();
    if (j.contains("acquisition")) {
      const auto& a = j.at("acquisition");
      check_keys(a, {"pairs_per_setting", "accidental_rate", "seed", "duration_tag"}, "acquisition");
      s.acquisition.pairs_per_setting = a.value("pairs_per_setting", s.acquisition.pairs_per_setting);
      s.acquisition.accidental_rate = a.value("accidental_rate", s.acquisition.accidental_rate);
      s.acquisition.seed = a.value("seed", s.acquisition.seed);
      s.acquisition.duration_tag = a.value("duration_tag", s.acquisition.duration_tag);
    }
    if (j.contains("noise")) {
      const auto& n = j.at("noise");
      check_keys(n, {"dephasing", "depolarizing"}, "noise");
      s.noise.dephasing = n.value("dephasing", 0.0);
      s.noise.depolarizing = n.value("depolarizing", 0.0);
    }
    if (j.contains("mle")) {
      const auto& m = j.at("mle");
      check_keys(m, {"max_iterations", "tolerance", "dilution"}, "mle");
      s.mle.max_iterations = m.value("max_iterations", s.mle.max_iterations);
      s.mle.tolerance = m.value("tolerance", s.mle.tolerance);
      s.mle.dilution = m.value("dilution", s.mle.dilution);
    }
    s.outputs = j.value("outputs", std::string{});
    s.include_completely_mixed = j.value("include_completely_mixed", false);
    s.resamples = j.value("resamples", s.resamples);
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("sweep spec: ") + e.what());
  }
}

nlohmann::json sweep_spec_to_json(const SweepSpec& s) {
  return {{"alphas", s.alphas},
          {"acquisition",
           {{"pairs_per_setting", s.acquisition.pairs_per_setting},
            {"accidental_rate", s.acquisition.accidental_rate},
            {"seed", s.acquisition.seed},
            {"duration_tag", s.acquisition.duration_tag}}},
          {"noise", {{"dephasing", s.noise.dephasing}, {"depolarizing", s.noise.depolarizing}}},
          {"outputs", s.outputs.string()},
          {"include_completely_mixed", s.include_completely_mixed},
          {"resamples", s.resamples},
          {"mle",
           {{"max_iterations", s.mle.max_iterations},
            {"tolerance", s.mle.tolerance},
            {"dilution", s.mle.dilution}}}};
}

std::string sweep_csv_header() {
  return "alpha,visibility,tangle,purity,fidelity,visibility_err,tangle_err,purity_err,fidelity_err,"
         "visibility_theory,tangle_theory,purity_theory,source,converged";
}

std::string sweep_csv_row(const SweepRow& r) {
  std::string out;
  for (double v : {r.alpha, r.metrics.visibility, r.metrics.tangle, r.metrics.purity,
                   r.metrics.fidelity_to_target, r.errors.visibility, r.errors.tangle, r.errors.purity,
                   r.errors.fidelity, r.visibility_theory, r.tangle_theory, r.purity_theory}) {
    out += format_double(v);
    out += ',';
  }
  out += r.source;
  out += r.converged ? ",1" : ",0";
  return out;
}

SweepResult run_sweep(const SweepSpec& spec, unsigned threads) {
  spec.validate();
  std::vector<PointJob> jobs;
  for (double a : spec.alphas) {
    SourceConfig c;
    c.alpha = a;
    c.noise = spec.noise;
    jobs.push_back({"pump_vpr", a, c, mix_duty_cycle(a), "mix_duty_cycle(" + format_double(a) + ")",
                    "alpha_" + format_double(a), visibility_theory(a), tangle_theory(a),
                    purity_theory(a)});
  }
  if (spec.include_completely_mixed) {
    SourceConfig c;
    c.alpha = 0.5;
    c.signal_dc = 0.5;
    c.noise = spec.noise;
    jobs.push_back({"two_vpr", 0.5, c, DensityMatrix::maximally_mixed(), "1/4", "completely_mixed",
                    0.0, 0.0, 0.25});
  }

  std::vector<SweepRow> rows(jobs.size());
  detail::parallel_for(jobs.size(), threads, [&](std::size_t k) {
    try {
      rows[k] = run_point(jobs[k], k, spec);
    } catch (const Error& e) {
      throw Error(e.kind(), "alpha=" + format_double(jobs[k].alpha) + " (" + jobs[k].source +
                                "): " + e.what());
    }
  });

  SweepResult result;
  std::ostringstream csv;
  csv << sweep_csv_header() << '\n';
  for (const SweepRow& r : rows) csv << sweep_csv_row(r) << '\n';
  result.rows = std::move(rows);
  result.csv = csv.str();
  if (!spec.outputs.empty()) {
    std::filesystem::create_directories(spec.outputs);
    write_text(spec.outputs / "sweep.csv", result.csv);
  }
  return result;
}

ComplexMatrix printed_rho_quarter() {
  using C = Complex;
  ComplexMatrix m(4, 4);
  m << C(0.545, 0.0), C(0.049, 0.012), C(-0.013, 0.038), C(-0.232, 0.110),
       C(0.049, -0.012), C(0.008, 0.0), C(-0.005, 0.008), C(0.015, 0.004),
       C(-0.013, -0.038), C(-0.005, -0.008), C(0.013, 0.0), C(-0.039, 0.006),
       C(-0.232, -0.110), C(0.015, -0.004), C(-0.039, -0.006), C(0.434, 0.0);
  return m;
}

std::vector<FixtureCheck> reference_fixtures(std::uint64_t seed) {
  std::vector<FixtureCheck> out;
  const ComplexMatrix printed = printed_rho_quarter();
  const DensityMatrix rho = nearest_physical(printed);
  const DensityMatrix target = mix_duty_cycle(0.25);

  out.push_back({"printed rho(0.25): max change from physical projection",
                 max_abs_diff(rho.matrix(), printed), 0.0, 0.01});
  out.push_back({"printed rho(0.25): purity", purity(rho), 0.6295 - 0.005, 0.6295 + 0.005});
  out.push_back({"printed rho(0.25): tangle", tangle(rho), 0.2476 - 0.01, 0.2476 + 0.01});
  out.push_back({"printed rho(0.25): fidelity to mix_duty_cycle(0.25)", fidelity(rho, target),
                 0.9814 - 0.02, 1.0});

  const DensityMatrix quarter = DensityMatrix::maximally_mixed();
  out.push_back({"1/4: fidelity with itself", fidelity(quarter, quarter), 1.0 - 1e-12, 1.0});

  SourceConfig two_vpr;
  two_vpr.alpha = 0.5;
  two_vpr.signal_dc = 0.5;
  const DensityMatrix mixed = generate(two_vpr);
  out.push_back({"generate(alpha=0.5, signal_dc=0.5): max deviation from 1/4",
                 max_abs_diff(mixed.matrix(), quarter.matrix()), 0.0, 1e-12});
  out.push_back({"generate(alpha=0.5, signal_dc=0.5): purity", purity(mixed), 0.25 - 1e-10, 0.25 + 1e-10});
  out.push_back({"generate(alpha=0.5, signal_dc=0.5): tangle", tangle(mixed), 0.0, 1e-10});

  // Two-rotator run through the noise-matched pipeline.
  two_vpr.noise.dephasing = dephasing_for_visibility(0.973);
  AcquisitionConfig acq;
  acq.seed = seed;
  const ProjectorSet& set = standard_projector_set();
  const auto counts = simulate_counts(generate(two_vpr), set, acq);
  const auto recon = mle_reconstruct(counts, set, {}, {quarter, "1/4"});
  out.push_back({"noise-matched two-rotator tomography: purity", recon.metrics.purity, 0.25, 0.27});
  out.push_back({"noise-matched two-rotator tomography: tangle", recon.metrics.tangle, 0.0, 0.01});
  out.push_back({"noise-matched two-rotator tomography: fidelity to 1/4",
                 recon.metrics.fidelity_to_target, 0.99, 1.0});
  return out;
}

}  // namespace bellmix
