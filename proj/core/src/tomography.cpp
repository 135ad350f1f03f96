#include "bellmix/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bellmix/error.hpp"
#include "parallel.hpp"

namespace bellmix {

namespace {

constexpr std::uint64_t kBootstrapDomain = 3;
constexpr double kMinDilution = 1e-12;

struct Observation {
  const Matrix4c* projector;
  double count;
};

// tr(rho * p) for Hermitian operands.
double born(const Matrix4c& rho, const Matrix4c& p) {
  return (rho.array() * p.transpose().array()).sum().real();
}

std::vector<Observation> observations(const CountRecords& counts, const ProjectorSet& set) {
  std::vector<Observation> obs;
  for (const CountRecord& r : counts) {
    for (int o = 0; o < ProjectorSet::kOutcomesPerSetting; ++o) {
      const auto n = r.outcome_counts[static_cast<std::size_t>(o)];
      if (n > 0) obs.push_back({&set.projector(r.setting_index, o), static_cast<double>(n)});
    }
  }
  return obs;
}

double log_likelihood_of(const Matrix4c& rho, const std::vector<Observation>& obs, int* floored) {
  double sum = 0.0;
  for (const Observation& o : obs) {
    const double p = born(rho, o.projector[0]);
    if (p < kProbabilityFloor && floored != nullptr) ++*floored;
    sum += o.count * std::log(std::max(p, kProbabilityFloor));
  }
  return sum;
}

double sample_stddev(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (n - 1.0));
}

}  // namespace

double log_likelihood(const DensityMatrix& rho, const CountRecords& counts, const ProjectorSet& set) {
  validate_counts(counts, set);
  return log_likelihood_of(rho.matrix(), observations(counts, set), nullptr);
}

ReconstructionResult mle_reconstruct(const CountRecords& counts, const ProjectorSet& set,
                                     const MleOptions& options, const ReconstructionTarget& target) {
  validate_counts(counts, set);
  if (static_cast<int>(counts.size()) != set.num_settings()) {
    throw Error(ErrorKind::MismatchedData, "counts cover " + std::to_string(counts.size()) + " of " +
                                               std::to_string(set.num_settings()) + " settings");
  }
  if (options.max_iterations < 0 || !(options.tolerance >= 0.0) || !(options.dilution > 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "invalid MLE options");
  }
  const std::vector<Observation> obs = observations(counts, set);
  const double total = std::accumulate(obs.begin(), obs.end(), 0.0,
                                       [](double acc, const Observation& o) { return acc + o.count; });
  if (total <= 0.0) throw Error(ErrorKind::NoCounts, "all coincidence counts are zero");

  ReconstructionResult result;
  Matrix4c rho = Matrix4c::Identity() * 0.25;
  double ll = log_likelihood_of(rho, obs, nullptr);
  double eps = options.dilution;
  if (options.record_trace) result.log_likelihood_trace.push_back(ll);

  int it = 0;
  while (it < options.max_iterations) {
    ++it;
    Matrix4c r = Matrix4c::Zero();
    for (const Observation& o : obs) {
      const double p = std::max(born(rho, o.projector[0]), kProbabilityFloor);
      r += (o.count / (total * p)) * o.projector[0];
    }
    const Matrix4c step = Matrix4c::Identity() + eps * r;
    Matrix4c next = step * rho * step;
    next = 0.5 * (next + next.adjoint()).eval();
    next /= next.trace().real();

    const double next_ll = log_likelihood_of(next, obs, nullptr);
    const double gain = next_ll - ll;
    const double scale = std::max(std::abs(ll), 1.0);
    if (gain < 0.0) {
      // A loss inside the convergence band is roundoff at the optimum.
      if (-gain <= options.tolerance * scale) {
        result.converged = true;
        break;
      }
      eps *= 0.5;
      if (eps < kMinDilution) {
        result.converged = true;
        break;
      }
      continue;
    }
    rho = next;
    ll = next_ll;
    if (options.record_trace) result.log_likelihood_trace.push_back(ll);
    if (gain <= options.tolerance * scale) {
      result.converged = true;
      break;
    }
  }

  result.rho_hat = DensityMatrix::from_matrix(rho);
  result.log_likelihood = log_likelihood_of(result.rho_hat.matrix(), obs, &result.floored_outcomes);
  result.iterations = it;
  result.final_dilution = eps;
  result.metrics = compute_metrics(result.rho_hat, target.state, target.description);
  return result;
}

MetricErrors bootstrap_errors(const ReconstructionResult& result, const ProjectorSet& set,
                              const AcquisitionConfig& acq, int resamples, const MleOptions& options,
                              const ReconstructionTarget& target, unsigned threads) {
  if (resamples < 2) throw Error(ErrorKind::InvalidConfig, "bootstrap needs at least 2 resamples");
  acq.validate();
  MleOptions inner = options;
  inner.record_trace = false;

  const auto n = static_cast<std::size_t>(resamples);
  std::vector<MetricsReport> reports(n);
  detail::parallel_for(n, threads, [&](std::size_t k) {
    AcquisitionConfig a = acq;
    a.seed = derive_seed(acq.seed, kBootstrapDomain, k);
    const CountRecords counts = simulate_counts(result.rho_hat, set, a);
    reports[k] = mle_reconstruct(counts, set, inner, target).metrics;
  });

  auto column = [&](auto member) {
    std::vector<double> xs;
    xs.reserve(n);
    for (const MetricsReport& r : reports) xs.push_back(r.*member);
    return sample_stddev(xs);
  };
  return {column(&MetricsReport::purity), column(&MetricsReport::tangle),
          column(&MetricsReport::visibility), column(&MetricsReport::fidelity_to_target)};
}

nlohmann::json reconstruction_to_json(const ReconstructionResult& r) {
  nlohmann::json j = {{"rho_hat", matrix_to_json(r.rho_hat.matrix())},
                      {"log_likelihood", r.log_likelihood},
                      {"iterations", r.iterations},
                      {"converged", r.converged},
                      {"floored_outcomes", r.floored_outcomes},
                      {"final_dilution", r.final_dilution},
                      {"metrics", metrics_to_json(r.metrics)},
                      {"log_likelihood_trace", r.log_likelihood_trace}};
  if (r.metric_errors) {
    j["metric_errors"] = {{"purity", r.metric_errors->purity},
                          {"tangle", r.metric_errors->tangle},
                          {"visibility", r.metric_errors->visibility},
                          {"fidelity", r.metric_errors->fidelity}};
  } else {
    j["metric_errors"] = nullptr;
  }
  return j;
}

ReconstructionResult reconstruction_from_json(const nlohmann::json& j) {
  try {
    ReconstructionResult r;
    r.rho_hat = DensityMatrix::from_matrix(matrix_from_json(j.at("rho_hat")));
    r.log_likelihood = j.at("log_likelihood").get<double>();
    r.iterations = j.at("iterations").get<int>();
    r.converged = j.at("converged").get<bool>();
    r.floored_outcomes = j.value("floored_outcomes", 0);
    r.final_dilution = j.value("final_dilution", 1.0);
    r.metrics = metrics_from_json(j.at("metrics"));
    r.log_likelihood_trace = j.value("log_likelihood_trace", std::vector<double>{});
    if (j.contains("metric_errors") && !j.at("metric_errors").is_null()) {
      const auto& e = j.at("metric_errors");
      r.metric_errors = MetricErrors{e.at("purity").get<double>(), e.at("tangle").get<double>(),
                                     e.at("visibility").get<double>(), e.at("fidelity").get<double>()};
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("reconstruction JSON: ") + e.what());
  }
}

}  // namespace bellmix
