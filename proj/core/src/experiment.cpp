#include "tpshift/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tpshift/errors.hpp"
#include "tpshift/parallel.hpp"

namespace tpshift {
namespace {

void config_error(const std::string& what) { throw Error(Errc::kConfig, "experiment config: " + what); }

TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t di, std::size_t ti) {
  TrialRecord rec;
  rec.density = cfg.densities[di];
  rec.trial = static_cast<int>(ti);

  auto rng = trial_stream(cfg.seed, di, ti);
  const PointSet lambda = jittered_lattice(rec.density, cfg.window, cfg.jitter, cfg.paired, rng);
  rec.samples = lambda.size();

  CoeffSeq c{cfg.support[0], {}};
  for (long k = cfg.support[0]; k <= cfg.support[1]; ++k) c.coeffs.push_back(2.0 * uniform01(rng) - 1.0);
  const SISFunction f(cfg.generator, c);

  MagnitudeSample sample = sample_magnitudes(f, lambda);
  if (cfg.noise > 0.0) {
    double scale = 0.0;
    for (double m : sample.magnitudes) scale = std::max(scale, m);
    for (double& m : sample.magnitudes) m = std::abs(m + cfg.noise * scale * (2.0 * uniform01(rng) - 1.0));
  }

  RetrievalResult result;
  try {
    result = solve_signs(cfg.generator, sample, cfg.support, cfg.effective_max_changes());
  } catch (const Error& e) {
    if (e.code() == Errc::kRankDeficient) {
      rec.outcome = TrialOutcome::kRankDeficient;
    } else if (e.code() == Errc::kBudgetExhausted) {
      rec.outcome = TrialOutcome::kBudgetExhausted;
    } else {
      rec.outcome = TrialOutcome::kOtherError;
    }
    return rec;
  }
  rec.residual = result.residual;
  rec.sign_changes = result.sign_changes;
  rec.nodes = result.nodes;

  const SISFunction fhat(result.coeffs, f.shared());
  const auto steps = static_cast<long>(std::ceil((cfg.window[1] - cfg.window[0]) / cfg.check_step));
  double fmax = 0.0;
  double diff = 0.0;
  double sum = 0.0;
  for (long i = 0; i <= steps; ++i) {
    const double x = std::min(cfg.window[1], cfg.window[0] + static_cast<double>(i) * cfg.check_step);
    const double fv = eval_f(f, x);
    const double hv = eval_f(fhat, x);
    fmax = std::max(fmax, std::abs(fv));
    diff = std::max(diff, std::abs(hv - fv));
    sum = std::max(sum, std::abs(hv + fv));
  }
  rec.error = fmax > 0.0 ? std::min(diff, sum) / fmax : std::min(diff, sum);
  rec.outcome = rec.error <= cfg.success_rel ? TrialOutcome::kSuccess : TrialOutcome::kMismatch;
  return rec;
}

}  // namespace

void ExperimentConfig::validate() const {
  generator.validate();
  for (double d : densities) {
    if (!(d > 0.0) || !std::isfinite(d)) config_error("densities must be positive");
  }
  if (trials < 0) config_error("trials must be nonnegative");
  if (support[1] < support[0]) config_error("support range is inverted");
  if (!(window[0] < window[1]) || !std::isfinite(window[0]) || !std::isfinite(window[1])) {
    config_error("window must be a finite interval with lo < hi");
  }
  if (!(noise >= 0.0)) config_error("noise must be nonnegative");
  if (!(jitter >= 0.0 && jitter < 0.5)) config_error("jitter must lie in [0, 0.5)");
  if (!(success_rel > 0.0)) config_error("success tolerance must be positive");
  if (!(check_step > 0.0)) config_error("check step must be positive");
}

int ExperimentConfig::effective_max_changes() const {
  if (max_changes >= 0) return max_changes;
  return static_cast<int>(std::ceil(window[1] - window[0])) + 2;
}

std::string to_string(TrialOutcome outcome) {
  switch (outcome) {
    case TrialOutcome::kSuccess:
      return "success";
    case TrialOutcome::kMismatch:
      return "mismatch";
    case TrialOutcome::kRankDeficient:
      return "rank_deficient";
    case TrialOutcome::kBudgetExhausted:
      return "budget_exhausted";
    case TrialOutcome::kOtherError:
      return "error";
  }
  return "error";
}

std::mt19937_64 trial_stream(std::uint64_t seed, std::size_t density_index, std::size_t trial_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(density_index), static_cast<std::uint32_t>(trial_index)};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

PointSet jittered_lattice(double density, std::array<double, 2> window, double jitter,
                          bool paired, std::mt19937_64& rng) {
  const double h = 1.0 / density;
  std::vector<double> pts;
  for (long j = 0;; ++j) {
    const double base = window[0] + (static_cast<double>(j) + 0.5) * h;
    if (base > window[1]) break;
    const double x = base + jitter * h * (2.0 * uniform01(rng) - 1.0);
    if (x < window[0] || x > window[1]) continue;
    pts.push_back(x);
    if (paired) {
      const double y = x + 0.01 * h * (0.5 + 0.5 * uniform01(rng));
      if (y <= window[1]) pts.push_back(y);
    }
  }
  return PointSet::from_points(std::move(pts), window);
}

ExperimentReport run_threshold_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentReport report;
  const std::size_t nd = config.densities.size();
  const auto nt = static_cast<std::size_t>(config.trials);
  report.trials.resize(nd * nt);
  parallel_for(nd * nt, [&](std::size_t job) {
    report.trials[job] = run_trial(config, job / nt, job % nt);
  });

  for (std::size_t di = 0; di < nd; ++di) {
    DensitySummary s;
    s.density = config.densities[di];
    s.trials = config.trials;
    double residual_sum = 0.0;
    int returned = 0;
    for (std::size_t ti = 0; ti < nt; ++ti) {
      const TrialRecord& t = report.trials[di * nt + ti];
      if (t.outcome == TrialOutcome::kSuccess) ++s.successes;
      if (t.outcome == TrialOutcome::kRankDeficient) ++s.rank_deficient;
      if (t.outcome == TrialOutcome::kBudgetExhausted) ++s.budget_exhausted;
      if (t.outcome == TrialOutcome::kSuccess || t.outcome == TrialOutcome::kMismatch) {
        residual_sum += t.residual;
        ++returned;
      }
    }
    s.mean_residual = returned > 0 ? residual_sum / returned : 0.0;
    report.summaries.push_back(s);
  }
  return report;
}

}  // namespace tpshift
