#include "tpshift/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tpshift/errors.hpp"

namespace tpshift {
namespace {

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void check_radii(const std::vector<double>& radii) {
  for (double r : radii) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw Error(Errc::kBadArgument, "density radii must be positive and finite");
    }
  }
}

DensityProfile finish(DensityKind kind, const std::vector<double>& radii,
                      std::vector<double> values, double alpha = 0.0) {
  DensityProfile p;
  p.kind = kind;
  p.radii = radii;
  p.values = std::move(values);
  p.alpha = alpha;
  if (!p.radii.empty()) {
    const auto last = std::max_element(p.radii.begin(), p.radii.end()) - p.radii.begin();
    p.extrapolated = p.values[static_cast<std::size_t>(last)];
  }
  return p;
}

// Points with |lambda| <= r as an iterator range of the sorted set.
std::pair<std::vector<double>::const_iterator, std::vector<double>::const_iterator> within(
    const std::vector<double>& pts, double r) {
  return {std::lower_bound(pts.begin(), pts.end(), -r), std::upper_bound(pts.begin(), pts.end(), r)};
}

}  // namespace

std::string to_string(DensityKind kind) {
  switch (kind) {
    case DensityKind::kBeurlingLower:
      return "beurling_lower";
    case DensityKind::kCircDirect:
      return "circ_direct";
    case DensityKind::kCircLattice:
      return "circ_lattice";
  }
  return "unknown";
}

DensityKind density_kind_from_string(const std::string& name) {
  if (name == "beurling_lower") return DensityKind::kBeurlingLower;
  if (name == "circ_direct") return DensityKind::kCircDirect;
  if (name == "circ_lattice") return DensityKind::kCircLattice;
  throw Error(Errc::kBadArgument, "unknown density kind '" + name + "'");
}

DensityProfile beurling_lower_profile(const PointSet& lambda, const std::vector<double>& radii) {
  check_radii(radii);
  const auto& pts = lambda.points;
  std::vector<double> values;
  values.reserve(radii.size());
  for (double r : radii) {
    const double x_lo = lambda.window[0] + r;
    const double x_hi = lambda.window[1] - r;
    if (x_lo > x_hi) {
      std::ostringstream msg;
      msg << "radius " << r << " exceeds half the window length " << 0.5 * lambda.window_length();
      throw Error(Errc::kWindowTooSmall, msg.str());
    }
    // The count is piecewise constant in x and drops only when a point
    // leaves through the left end, so the infimum is the count at x_lo or
    // just after some x = lambda_i + r.
    auto count_closed = [&pts](double a, double b) {
      return std::upper_bound(pts.begin(), pts.end(), b) - std::lower_bound(pts.begin(), pts.end(), a);
    };
    auto best = count_closed(x_lo - r, x_lo + r);
    auto right = pts.begin();
    for (auto it = pts.begin(); it != pts.end(); ++it) {
      const double x = *it + r;
      if (x < x_lo) continue;
      if (x >= x_hi) break;
      // Points in (lambda_i, lambda_i + 2r].
      right = std::upper_bound(std::max(right, it), pts.end(), *it + 2.0 * r);
      best = std::min(best, right - std::next(it));
    }
    values.push_back(static_cast<double>(best) / (2.0 * r));
  }
  return finish(DensityKind::kBeurlingLower, radii, std::move(values));
}

double circ_inner_integral(double lambda_abs, double r) {
  const double l = std::abs(lambda_abs);
  if (l >= r) return 0.0;
  if (l == 0.0) return r;
  return std::sqrt((r - l) * (r + l)) - l * std::acos(l / r);
}

DensityProfile circ_density_direct(const PointSet& lambda, const std::vector<double>& radii) {
  check_radii(radii);
  std::vector<double> values;
  values.reserve(radii.size());
  for (double r : radii) {
    CompensatedSum sum;
    auto [first, last] = within(lambda.points, r);
    for (auto it = first; it != last; ++it) sum.add(circ_inner_integral(std::abs(*it), r));
    values.push_back(4.0 / (kPi * r * r) * sum.value());
  }
  return finish(DensityKind::kCircDirect, radii, std::move(values));
}

DensityProfile circ_density_lattice(const PointSet& lambda, double alpha,
                                    const std::vector<double>& radii) {
  check_radii(radii);
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(Errc::kBadArgument, "lattice spacing alpha must be positive");
  }
  std::vector<double> values;
  values.reserve(radii.size());
  for (double r : radii) {
    const double r2 = r * r;
    CompensatedSum sum;
    auto [first, last] = within(lambda.points, r);
    for (auto it = first; it != last; ++it) {
      const double l2 = (*it) * (*it);
      if (l2 == 0.0 || l2 >= r2) continue;
      // Point (lambda, alpha k) enters B_t for t > rho; contributes ln(r/rho).
      sum.add(0.5 * std::log(r2 / l2));
      for (long k = 1;; ++k) {
        const double rho2 = l2 + alpha * alpha * static_cast<double>(k * k);
        if (rho2 >= r2) break;
        sum.add(std::log(r2 / rho2));  // +k and -k, each 0.5 ln(r^2/rho^2)
      }
    }
    values.push_back(2.0 * alpha / (kPi * r2) * sum.value());
  }
  return finish(DensityKind::kCircLattice, radii, std::move(values), alpha);
}

double lattice_equivalence_bound(const PointSet& lambda, double alpha, double r) {
  CompensatedSum sum;
  bool has_origin = false;
  auto [first, last] = within(lambda.points, r);
  for (auto it = first; it != last; ++it) {
    const double l = std::abs(*it);
    if (l == 0.0) {
      has_origin = true;
    } else if (l < r) {
      sum.add(std::log(r / l));
    }
  }
  double bound = 2.0 * alpha / (kPi * r * r) * sum.value();
  if (has_origin) bound += 4.0 / (kPi * r);
  return bound * (1.0 + 1e-12) + 1e-12;
}

Lemma1Report check_lemma1(const PointSet& lambda, const std::vector<double>& alphas,
                          const std::vector<double>& radii) {
  check_radii(radii);
  const auto direct = circ_density_direct(lambda, radii);
  const auto beurling = beurling_lower_profile(lambda, radii);
  std::vector<DensityProfile> lattices;
  lattices.reserve(alphas.size());
  double max_alpha = 0.0;
  for (double alpha : alphas) {
    lattices.push_back(circ_density_lattice(lambda, alpha, radii));
    max_alpha = std::max(max_alpha, alpha);
  }

  Lemma1Report report;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    Lemma1Record rec;
    rec.r = radii[i];
    rec.direct = direct.values[i];
    rec.beurling = beurling.values[i];
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      LatticeComparison cmp;
      cmp.alpha = alphas[a];
      cmp.value = lattices[a].values[i];
      cmp.difference = std::abs(rec.direct - cmp.value);
      cmp.bound = lattice_equivalence_bound(lambda, alphas[a], rec.r);
      cmp.within_bound = cmp.difference <= cmp.bound;
      report.equivalence_holds = report.equivalence_holds && cmp.within_bound;
      rec.lattice.push_back(cmp);
    }
    rec.domination_gap = rec.direct - rec.beurling;
    rec.domination_slack = 2.0 / rec.r * (1.0 + max_alpha);
    rec.domination_holds = rec.domination_gap >= -rec.domination_slack;
    report.domination_holds = report.domination_holds && rec.domination_holds;
    report.records.push_back(std::move(rec));
  }
  return report;
}

SubadditivityReport circ_subadditivity(const PointSet& l1, const PointSet& l2,
                                       const std::vector<double>& radii) {
  const PointSet joined = set_union(l1, l2);
  const auto u = circ_density_direct(joined, radii);
  const auto p1 = circ_density_direct(l1, radii);
  const auto p2 = circ_density_direct(l2, radii);

  SubadditivityReport report;
  report.radii = radii;
  report.disjoint = joined.size() == l1.size() + l2.size();
  report.max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double sum = p1.values[i] + p2.values[i];
    report.union_values.push_back(u.values[i]);
    report.sum_values.push_back(sum);
    report.max_excess = std::max(report.max_excess, u.values[i] - sum);
    report.max_abs_difference = std::max(report.max_abs_difference, std::abs(u.values[i] - sum));
    if (u.values[i] > sum + 1e-12) report.holds = false;
  }
  if (radii.empty()) report.max_excess = 0.0;
  return report;
}

}  // namespace tpshift
