#include "tpshift/sigret.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "tpshift/errors.hpp"

namespace tpshift {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxCondition = 1e12;
constexpr double kBruteForceCap = 1e6;
constexpr std::size_t kMaxCandidates = 4096;

long support_size(Support support) {
  if (support[1] < support[0]) throw Error(Errc::kBadArgument, "support range is inverted");
  return support[1] - support[0] + 1;
}

void check_sizes(const PointSet& lambda, std::size_t values, Support support) {
  if (values != lambda.size()) {
    throw Error(Errc::kBadArgument, "value count does not match the sample count");
  }
  const long k = support_size(support);
  if (static_cast<long>(lambda.size()) < k) {
    std::ostringstream msg;
    msg << lambda.size() << " samples cannot determine " << k << " coefficients";
    throw Error(Errc::kRankDeficient, msg.str());
  }
}

Eigen::MatrixXd design_matrix(const TimeDomainTable& table, const PointSet& lambda,
                              Support support) {
  const long k = support_size(support);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(lambda.size()), k);
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    for (long j = 0; j < k; ++j) {
      a(static_cast<Eigen::Index>(i), j) =
          table.value(lambda.points[i] - static_cast<double>(support[0] + j));
    }
  }
  return a;
}

std::vector<double> apply_signs(const std::vector<double>& magnitudes, const std::vector<int>& signs) {
  std::vector<double> out(magnitudes.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = signs[i] * magnitudes[i];
  return out;
}

struct Ranked {
  double ssr;
  SignPattern pattern;
  FitResult fit;
};

// Strict weak order: residual, then fewer changes, then lexicographic.
bool better(double ssr_a, const SignPattern& a, double ssr_b, const SignPattern& b) {
  if (ssr_a != ssr_b) return ssr_a < ssr_b;
  if (a.change_points.size() != b.change_points.size()) {
    return a.change_points.size() < b.change_points.size();
  }
  return a.change_points < b.change_points;
}

RetrievalResult finish(Ranked best, const MagnitudeSample& sample, double accept_rel, long nodes) {
  std::size_t first = 0;
  while (first < sample.magnitudes.size() && !(sample.magnitudes[first] > 0.0)) ++first;
  if (first < sample.magnitudes.size() && best.pattern.signs[first] < 0) {
    for (int& s : best.pattern.signs) s = -s;
    best.fit.coeffs = -1.0 * best.fit.coeffs;
  }
  double max_mag = 0.0;
  for (double m : sample.magnitudes) max_mag = std::max(max_mag, m);
  RetrievalResult out;
  out.coeffs = std::move(best.fit.coeffs);
  out.residual = best.fit.residual;
  out.sign_changes = static_cast<long>(best.pattern.change_points.size());
  out.signs = std::move(best.pattern);
  out.accepted = out.residual <= accept_rel * max_mag;
  out.nodes = nodes;
  return out;
}

double max_magnitude(const MagnitudeSample& sample) {
  double m = 0.0;
  for (double v : sample.magnitudes) m = std::max(m, v);
  return m;
}

// Upper-triangular least-squares state updated one row at a time by Givens
// rotations; ssr is the residual of the rows absorbed so far.
class GivensState {
 public:
  explicit GivensState(long k) : k_(k), r_(static_cast<std::size_t>(k * k), 0.0), z_(static_cast<std::size_t>(k), 0.0) {}

  void absorb(std::vector<double>& row, long first, double b) {
    for (long j = first; j < k_; ++j) {
      const double aj = row[static_cast<std::size_t>(j)];
      if (aj == 0.0) continue;
      double* rj = &r_[static_cast<std::size_t>(j * k_)];
      const double h = std::hypot(rj[j], aj);
      const double c = rj[j] / h;
      const double s = aj / h;
      rj[j] = h;
      for (long l = j + 1; l < k_; ++l) {
        const double rl = rj[l];
        const double al = row[static_cast<std::size_t>(l)];
        rj[l] = c * rl + s * al;
        row[static_cast<std::size_t>(l)] = -s * rl + c * al;
      }
      const double zj = z_[static_cast<std::size_t>(j)];
      z_[static_cast<std::size_t>(j)] = c * zj + s * b;
      b = -s * zj + c * b;
    }
    ssr_ += b * b;
  }

  double ssr() const { return ssr_; }

 private:
  long k_;
  std::vector<double> r_;
  std::vector<double> z_;
  double ssr_ = 0.0;
};

class SignSearch {
 public:
  SignSearch(const GeneratorParams& params, const MagnitudeSample& sample, Support support,
             int max_changes, const SolveOptions& opts)
      : sample_(sample), max_changes_(max_changes), budget_(opts.node_budget) {
    const auto table = shared_table(params);
    const long k = support_size(support);
    const std::size_t n = sample.magnitudes.size();
    double gmax = 0.0;
    for (const auto& node : table->nodes()) gmax = std::max(gmax, std::abs(node[0]));
    const double cutoff = opts.band_threshold * gmax;
    rows_.assign(n, std::vector<double>(static_cast<std::size_t>(k), 0.0));
    first_.assign(n, k);
    for (std::size_t i = 0; i < n; ++i) {
      for (long j = 0; j < k; ++j) {
        const double v = table->value(sample.lambda.points[i] - static_cast<double>(support[0] + j));
        if (std::abs(v) < cutoff) continue;
        rows_[i][static_cast<std::size_t>(j)] = v;
        first_[i] = std::min(first_[i], j);
      }
    }
    states_.assign(n + 1, GivensState(k));
    scratch_.assign(static_cast<std::size_t>(k), 0.0);
    signs_.assign(n, 1);
    const double m = max_magnitude(sample);
    abs_slack_ = static_cast<double>(n) * (1e-9 * m) * (1e-9 * m);
  }

  // Returns false when the node budget ran out.
  bool run(double cap) {
    best_ = cap;
    exhausted_ = false;
    visit(0, 1, 0);
    return !exhausted_;
  }

  long nodes() const { return nodes_; }
  std::vector<Ranked>& candidates() { return candidates_; }
  double best() const { return best_; }
  double slack(double ssr) const { return 1e-6 * ssr + abs_slack_; }

 private:
  void visit(std::size_t i, int sign, int changes) {
    if (exhausted_) return;
    if (++nodes_ > budget_) {
      exhausted_ = true;
      return;
    }
    states_[i + 1] = states_[i];
    std::copy(rows_[i].begin(), rows_[i].end(), scratch_.begin());
    states_[i + 1].absorb(scratch_, first_[i], sign * sample_.magnitudes[i]);
    const double ssr = states_[i + 1].ssr();
    if (ssr > best_ + slack(best_)) return;
    signs_[i] = sign;
    if (i + 1 == signs_.size()) {
      record(ssr);
      return;
    }
    visit(i + 1, sign, changes);
    if (changes < max_changes_) visit(i + 1, -sign, changes + 1);
  }

  void record(double ssr) {
    if (ssr < best_) best_ = ssr;
    const double limit = best_ + slack(best_);
    candidates_.erase(std::remove_if(candidates_.begin(), candidates_.end(),
                                     [limit](const Ranked& c) { return c.ssr > limit; }),
                      candidates_.end());
    if (candidates_.size() < kMaxCandidates) {
      candidates_.push_back({ssr, SignPattern::from_signs(signs_), {}});
    }
  }

  const MagnitudeSample& sample_;
  int max_changes_;
  long budget_;
  std::vector<std::vector<double>> rows_;
  std::vector<long> first_;
  std::vector<GivensState> states_;
  std::vector<double> scratch_;
  std::vector<int> signs_;
  std::vector<Ranked> candidates_;
  double abs_slack_ = 0.0;
  double best_ = kInf;
  long nodes_ = 0;
  bool exhausted_ = false;
};

void check_sample(const MagnitudeSample& sample, Support support, int max_changes) {
  sample.validate();
  if (max_changes < 0) throw Error(Errc::kBadArgument, "max_changes must be nonnegative");
  check_sizes(sample.lambda, sample.magnitudes.size(), support);
  if (max_magnitude(sample) < 1e-10) {
    throw Error(Errc::kBadArgument, "all magnitudes are below 1e-10; the sign pattern is undefined");
  }
}

}  // namespace

void MagnitudeSample::validate() const {
  if (magnitudes.size() != lambda.size()) {
    throw Error(Errc::kBadArgument, "magnitude count does not match the sample count");
  }
  for (double m : magnitudes) {
    if (!std::isfinite(m) || m < 0.0) {
      throw Error(Errc::kBadArgument, "magnitudes must be finite and nonnegative");
    }
  }
}

SignPattern SignPattern::from_signs(std::vector<int> signs) {
  SignPattern p;
  for (std::size_t i = 0; i + 1 < signs.size(); ++i) {
    if (signs[i + 1] != signs[i]) p.change_points.push_back(i);
  }
  p.signs = std::move(signs);
  return p;
}

MagnitudeSample sample_magnitudes(const SISFunction& f, const PointSet& lambda) {
  MagnitudeSample out{lambda, {}};
  out.magnitudes.reserve(lambda.size());
  for (double x : lambda.points) out.magnitudes.push_back(std::abs(eval_f(f, x)));
  return out;
}

FitResult fit_coeffs(const GeneratorParams& params, const PointSet& lambda,
                     const std::vector<double>& signed_values, Support support) {
  check_sizes(lambda, signed_values.size(), support);
  const auto table = shared_table(params);
  const Eigen::MatrixXd a = design_matrix(*table, lambda, support);
  const Eigen::Map<const Eigen::VectorXd> b(signed_values.data(),
                                            static_cast<Eigen::Index>(signed_values.size()));

  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double smin = sv.size() > 0 ? sv(sv.size() - 1) : 0.0;
  if (!(smin > 0.0) || smax / smin > kMaxCondition) {
    std::ostringstream msg;
    msg << "design matrix condition number " << (smin > 0.0 ? smax / smin : kInf) << " exceeds "
        << kMaxCondition;
    throw Error(Errc::kRankDeficient, msg.str());
  }

  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  const Eigen::VectorXd r = a * c - b;
  FitResult out;
  out.coeffs.offset = support[0];
  out.coeffs.coeffs.assign(c.data(), c.data() + c.size());
  out.ssr = r.squaredNorm();
  out.residual = std::sqrt(out.ssr / static_cast<double>(r.size()));
  return out;
}

RetrievalResult solve_signs(const GeneratorParams& params, const MagnitudeSample& sample,
                            Support support, int max_changes, const SolveOptions& opts) {
  check_sample(sample, support, max_changes);
  const double tol_accept = opts.accept_rel * max_magnitude(sample);
  const double cap = static_cast<double>(sample.magnitudes.size()) * tol_accept * tol_accept;

  SignSearch search(params, sample, support, max_changes, opts);
  const bool complete = search.run(cap);
  if (search.candidates().empty()) {
    if (!complete || !search.run(kInf)) {
      std::ostringstream msg;
      msg << "sign search visited " << search.nodes() << " nodes without an acceptable pattern";
      throw Error(Errc::kBudgetExhausted, msg.str());
    }
  }

  auto& candidates = search.candidates();
  const double limit = search.best() + search.slack(search.best());
  std::optional<Ranked> best;
  for (auto& cand : candidates) {
    if (cand.ssr > limit) continue;
    cand.fit = fit_coeffs(params, sample.lambda, apply_signs(sample.magnitudes, cand.pattern.signs),
                          support);
    if (!best || better(cand.fit.ssr, cand.pattern, best->fit.ssr, best->pattern)) best = cand;
  }
  return finish(std::move(*best), sample, opts.accept_rel, search.nodes());
}

RetrievalResult brute_force_signs(const GeneratorParams& params, const MagnitudeSample& sample,
                                  Support support, int max_changes) {
  check_sample(sample, support, max_changes);
  const std::size_t n = sample.magnitudes.size();
  const std::size_t slots = n - 1;
  const std::size_t max_k = std::min<std::size_t>(static_cast<std::size_t>(max_changes), slots);

  double total = 0.0;
  double binom = 1.0;
  for (std::size_t k = 0; k <= max_k; ++k) {
    if (k > 0) binom = binom * static_cast<double>(slots - k + 1) / static_cast<double>(k);
    total += binom;
  }
  if (total > kBruteForceCap) {
    std::ostringstream msg;
    msg << "brute force would enumerate " << total << " patterns (cap " << kBruteForceCap << ")";
    throw Error(Errc::kCombinatorialBlowup, msg.str());
  }

  std::optional<Ranked> best;
  std::vector<int> signs(n);
  for (std::size_t k = 0; k <= max_k; ++k) {
    std::vector<std::size_t> pick(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    for (;;) {
      int s = 1;
      std::size_t next = 0;
      for (std::size_t i = 0; i < n; ++i) {
        signs[i] = s;
        if (next < k && pick[next] == i) {
          s = -s;
          ++next;
        }
      }
      SignPattern pattern = SignPattern::from_signs(signs);
      FitResult fit = fit_coeffs(params, sample.lambda, apply_signs(sample.magnitudes, signs), support);
      if (!best || better(fit.ssr, pattern, best->fit.ssr, best->pattern)) {
        best = Ranked{fit.ssr, std::move(pattern), std::move(fit)};
      }
      // Next k-subset of [0, slots) in lexicographic order.
      std::size_t i = k;
      while (i > 0 && pick[i - 1] == slots - k + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return finish(std::move(*best), sample, SolveOptions{}.accept_rel, 0);
}

}  // namespace tpshift
