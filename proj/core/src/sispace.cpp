#include "tpshift/sispace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "tpshift/errors.hpp"

namespace tpshift {
namespace {

constexpr double kGolden = 0.6180339887498949;

double sign_of(double v) { return v < 0 ? -1.0 : 1.0; }

// Bisection on a bracket with f(lo) and f(hi) of opposite signs.
double bisect(const SISFunction& f, double lo, double hi, double flo, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Golden-section minimum of s*f on [lo, hi].
std::pair<double, double> minimize(const SISFunction& f, double s, double lo, double hi,
                                   double tol) {
  double x1 = hi - kGolden * (hi - lo);
  double x2 = lo + kGolden * (hi - lo);
  double f1 = s * f(x1);
  double f2 = s * f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = s * f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = s * f(x2);
    }
  }
  return f1 < f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace

double CoeffSeq::at(long k) const {
  if (k < first_index() || k > last_index()) return 0.0;
  return coeffs[static_cast<std::size_t>(k - offset)];
}

double CoeffSeq::max_abs() const {
  double m = 0.0;
  for (double c : coeffs) m = std::max(m, std::abs(c));
  return m;
}

bool CoeffSeq::all_zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return c == 0.0; });
}

void CoeffSeq::validate() const {
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (!std::isfinite(coeffs[i])) {
      throw Error(Errc::kBadArgument, "coefficient " + std::to_string(offset + static_cast<long>(i)) +
                                          " is not finite");
    }
  }
}

CoeffSeq operator+(const CoeffSeq& lhs, const CoeffSeq& rhs) {
  if (lhs.empty()) return rhs;
  if (rhs.empty()) return lhs;
  const long lo = std::min(lhs.first_index(), rhs.first_index());
  const long hi = std::max(lhs.last_index(), rhs.last_index());
  CoeffSeq out{lo, std::vector<double>(static_cast<std::size_t>(hi - lo + 1))};
  for (long k = lo; k <= hi; ++k) out.coeffs[static_cast<std::size_t>(k - lo)] = lhs.at(k) + rhs.at(k);
  return out;
}

CoeffSeq operator*(double scale, const CoeffSeq& seq) {
  CoeffSeq out = seq;
  for (double& c : out.coeffs) c *= scale;
  return out;
}

PointSet PointSet::from_points(std::vector<double> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::array<double, 2> window{0.0, 0.0};
  if (!points.empty()) window = {points.front(), points.back()};
  return PointSet{std::move(points), window};
}

PointSet PointSet::from_points(std::vector<double> points, std::array<double, 2> window) {
  PointSet set = from_points(std::move(points));
  set.window = window;
  set.validate();
  return set;
}

void PointSet::validate() const {
  if (!(window[0] <= window[1])) {
    throw Error(Errc::kBadArgument, "point set window is inverted");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i])) throw Error(Errc::kBadArgument, "point set has a non-finite point");
    if (i > 0 && !(points[i - 1] < points[i])) {
      throw Error(Errc::kBadArgument, "point set is not strictly increasing at index " +
                                          std::to_string(i));
    }
    if (points[i] < window[0] || points[i] > window[1]) {
      std::ostringstream msg;
      msg << "point " << points[i] << " lies outside window [" << window[0] << ", "
          << window[1] << "]";
      throw Error(Errc::kBadArgument, msg.str());
    }
  }
}

PointSet set_union(const PointSet& a, const PointSet& b) {
  std::vector<double> merged;
  merged.reserve(a.size() + b.size());
  std::set_union(a.points.begin(), a.points.end(), b.points.begin(), b.points.end(),
                 std::back_inserter(merged));
  std::array<double, 2> window = a.window;
  if (a.empty() && a.window[0] == a.window[1]) {
    window = b.window;
  } else if (!(b.empty() && b.window[0] == b.window[1])) {
    window = {std::min(a.window[0], b.window[0]), std::max(a.window[1], b.window[1])};
  }
  return PointSet{std::move(merged), window};
}

SISFunction::SISFunction(GeneratorParams params, CoeffSeq coeffs)
    : coeffs_(std::move(coeffs)), table_(shared_table(params)) {
  coeffs_.validate();
}

SISFunction::SISFunction(CoeffSeq coeffs, std::shared_ptr<const TimeDomainTable> table)
    : coeffs_(std::move(coeffs)), table_(std::move(table)) {
  coeffs_.validate();
}

double SISFunction::operator()(double x) const { return eval_f(*this, x); }

double eval_f(const SISFunction& f, double x) {
  const auto& c = f.coeffs();
  if (c.empty()) return 0.0;
  const auto& table = f.table();
  const double hw = table.half_width();
  const long lo = std::max(c.first_index(), static_cast<long>(std::ceil(x - hw)));
  const long hi = std::min(c.last_index(), static_cast<long>(std::floor(x + hw)));
  double sum = 0.0;
  for (long k = lo; k <= hi; ++k) {
    const double ck = c.coeffs[static_cast<std::size_t>(k - c.offset)];
    if (ck != 0.0) sum += ck * table.value(x - static_cast<double>(k));
  }
  return sum;
}

double eval_deriv(const SISFunction& f, double x) {
  const auto& c = f.coeffs();
  if (c.empty()) return 0.0;
  const auto& table = f.table();
  const double hw = table.half_width();
  const long lo = std::max(c.first_index(), static_cast<long>(std::ceil(x - hw)));
  const long hi = std::min(c.last_index(), static_cast<long>(std::floor(x + hw)));
  double sum = 0.0;
  for (long k = lo; k <= hi; ++k) {
    const double ck = c.coeffs[static_cast<std::size_t>(k - c.offset)];
    if (ck != 0.0) sum += ck * table.derivative(x - static_cast<double>(k));
  }
  return sum;
}

SISFunction apply_rolle_op(const SISFunction& f, double delta) {
  const auto& deltas = f.params().deltas;
  if (deltas.empty()) {
    throw Error(Errc::kEmptyDeltas, "Rolle operator needs a generator with m >= 1");
  }
  const double last = deltas.back();
  if (std::abs(delta - last) > 1e-12 * std::abs(last)) {
    std::ostringstream msg;
    msg << "Rolle operator delta " << delta << " does not match last generator delta " << last;
    throw Error(Errc::kDeltaMismatch, msg.str());
  }
  return SISFunction(reduce(f.params()), f.coeffs());
}

ZeroSet find_zeros(const SISFunction& f, std::array<double, 2> interval,
                   const ZeroSearchOptions& opts) {
  const double lo = interval[0];
  const double hi = interval[1];
  if (!(std::isfinite(lo) && std::isfinite(hi) && hi > lo)) {
    throw Error(Errc::kDegenerateInterval, "zero search interval is degenerate");
  }
  const auto steps = static_cast<std::size_t>(std::ceil((hi - lo) / opts.scan_step));
  const double h = (hi - lo) / static_cast<double>(steps);
  std::vector<double> xs(steps + 1);
  std::vector<double> vs(steps + 1);
  std::size_t tiny = 0;
  double peak = 0.0;
  for (std::size_t i = 0; i <= steps; ++i) {
    xs[i] = (i == steps) ? hi : lo + static_cast<double>(i) * h;
    vs[i] = f(xs[i]);
    if (std::abs(vs[i]) < opts.zero_floor) ++tiny;
    peak = std::max(peak, std::abs(vs[i]));
  }
  if (static_cast<double>(tiny) >= 0.99 * static_cast<double>(xs.size())) {
    throw Error(Errc::kIdenticallyZero, "function is numerically zero on the search interval");
  }

  const double floor = opts.relative_floor * peak;
  auto above = [&](std::size_t j) { return j <= steps && std::abs(vs[j]) > floor; };

  ZeroSet out;
  std::vector<double> found;
  for (std::size_t i = 0; i <= steps; ++i) {
    if (vs[i] == 0.0) {
      // Runs of exact zeros are underflow beyond the table, not roots.
      const bool isolated = (i == 0 || vs[i - 1] != 0.0) && (i == steps || vs[i + 1] != 0.0);
      const bool resolved = (i > 0 && above(i - 1)) || above(i + 1);
      if (isolated && resolved) found.push_back(xs[i]);
      continue;
    }
    if (i < steps && vs[i + 1] != 0.0 && (vs[i] < 0) != (vs[i + 1] < 0)) {
      if (!above(i) && !above(i + 1)) continue;
      found.push_back(bisect(f, xs[i], xs[i + 1], vs[i], opts.tolerance));
      continue;
    }
    // Interior local minimum of |f| with no crossing on either side.
    if (i == 0 || i == steps) continue;
    const double a = std::abs(vs[i - 1]);
    const double b = std::abs(vs[i]);
    const double c = std::abs(vs[i + 1]);
    if (!(b <= a && b <= c)) continue;
    if ((vs[i - 1] < 0) != (vs[i] < 0) || (vs[i + 1] < 0) != (vs[i] < 0)) continue;
    if (vs[i - 1] == 0.0 || vs[i + 1] == 0.0) continue;
    if (!above(i - 1) && !above(i + 1)) continue;
    const double s = sign_of(vs[i]);
    const auto [xm, fm] = minimize(f, s, xs[i - 1], xs[i + 1], opts.tolerance);
    if (fm < 0.0) {
      found.push_back(bisect(f, xs[i - 1], xm, vs[i - 1], opts.tolerance));
      found.push_back(bisect(f, xm, xs[i + 1], s * fm, opts.tolerance));
    } else if (fm <= opts.touch_threshold) {
      found.push_back(xm);
      out.touch_zeros.push_back(xm);
    }
  }
  std::sort(found.begin(), found.end());
  std::vector<double> merged;
  for (double z : found) {
    if (merged.empty() || z - merged.back() > 10.0 * opts.tolerance) merged.push_back(z);
  }
  out.zeros = PointSet{std::move(merged), interval};
  return out;
}

InterlaceReport check_interlacing(const PointSet& zf, const PointSet& zf1) {
  InterlaceReport report;
  const auto& pts = zf.points;
  const auto& gam = zf1.points;
  auto has_point_between = [&gam](double a, double b) {
    auto it = std::upper_bound(gam.begin(), gam.end(), a);
    return it != gam.end() && *it < b;
  };

  auto first_nonneg = std::lower_bound(pts.begin(), pts.end(), 0.0);
  for (auto it = first_nonneg; it != pts.end() && std::next(it) != pts.end(); ++it) {
    ++report.nonnegative_gaps;
    if (!has_point_between(*it, *std::next(it))) {
      report.nonnegative_holds = false;
      report.empty_gaps.emplace_back(*it, *std::next(it));
    }
  }
  auto past_nonpos = std::upper_bound(pts.begin(), pts.end(), 0.0);
  for (auto it = pts.begin(); it != past_nonpos && std::next(it) != past_nonpos; ++it) {
    ++report.nonpositive_gaps;
    if (!has_point_between(*it, *std::next(it))) {
      report.nonpositive_holds = false;
      report.empty_gaps.emplace_back(*it, *std::next(it));
    }
  }
  report.holds = report.nonnegative_holds && report.nonpositive_holds;
  return report;
}

SegmentReport segment_inequality(const PointSet& zf, const PointSet& zf1, double t) {
  auto chord_sum = [t](const std::vector<double>& pts) {
    double sum = 0.0;
    for (double p : pts) {
      if (std::abs(p) <= t) sum += std::sqrt((t - p) * (t + p));
    }
    return sum;
  };
  SegmentReport report;
  report.t = t;
  report.lhs = chord_sum(zf.points);
  report.rhs = 2.0 * t + chord_sum(zf1.points);
  report.holds = report.lhs <= report.rhs + 1e-12;
  return report;
}

}  // namespace tpshift
