#include "tpshift/jensen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tpshift/density.hpp"
#include "tpshift/errors.hpp"

namespace tpshift {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * kPi;
// exp() of anything below this is zero in double precision.
constexpr double kUnderflow = -745.0;
constexpr long kPhaseBudget = 1L << 23;

void require_gaussian(const SISFunction& f) {
  if (!f.params().deltas.empty()) {
    throw Error(Errc::kNotGaussian,
                "entire extension is only implemented for Gaussian generators (m = 0)");
  }
}

struct TermSum {
  double max_re = kNegInf;
  double max_im = 0.0;
  std::complex<double> sum{0.0, 0.0};
  double abs_sum = 0.0;
};

// Sum of c_k C' exp(-a (z - k)^2) factored by its largest term.
TermSum term_sum(const SISFunction& f, std::complex<double> z) {
  require_gaussian(f);
  const auto& c = f.coeffs();
  const double a = f.params().gaussian_rate();
  const double log_amp = std::log(f.params().gaussian_amplitude());
  const double x = z.real();
  const double y = z.imag();
  TermSum out;
  std::size_t best = c.size();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.coeffs[i] == 0.0) continue;
    const double dx = x - static_cast<double>(c.offset + static_cast<long>(i));
    const double re = log_amp + std::log(std::abs(c.coeffs[i])) - a * (dx * dx - y * y);
    if (re > out.max_re) {
      out.max_re = re;
      best = i;
    }
  }
  if (best == c.size()) return out;
  auto imag_of = [&](std::size_t i) {
    const double dx = x - static_cast<double>(c.offset + static_cast<long>(i));
    return -2.0 * a * dx * y + (c.coeffs[i] < 0.0 ? kPi : 0.0);
  };
  out.max_im = imag_of(best);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.coeffs[i] == 0.0) continue;
    const double dx = x - static_cast<double>(c.offset + static_cast<long>(i));
    const double re =
        log_amp + std::log(std::abs(c.coeffs[i])) - a * (dx * dx - y * y) - out.max_re;
    if (re < kUnderflow) continue;
    const double mag = std::exp(re);
    out.abs_sum += mag;
    out.sum += std::polar(mag, imag_of(i) - out.max_im);
  }
  return out;
}

// j-th derivatives of f at 0 for j = 0..6, from Hermite polynomials:
// d^j/dz^j exp(-a (z-k)^2) = (-sqrt a)^j H_j(sqrt a (z-k)) exp(-a (z-k)^2).
std::array<double, 7> derivatives_at_origin(const SISFunction& f) {
  const auto& c = f.coeffs();
  const double a = f.params().gaussian_rate();
  const double root_a = std::sqrt(a);
  const double amp = f.params().gaussian_amplitude();
  std::array<double, 7> out{};
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.coeffs[i] == 0.0) continue;
    const double k = static_cast<double>(c.offset + static_cast<long>(i));
    const double weight = c.coeffs[i] * amp * std::exp(-a * k * k);
    if (weight == 0.0) continue;
    const double u = -root_a * k;
    double h_prev = 1.0;
    double h = 2.0 * u;
    double scale = 1.0;
    out[0] += weight;
    for (std::size_t j = 1; j < out.size(); ++j) {
      scale *= -root_a;
      out[j] += weight * scale * h;
      const double next = 2.0 * u * h - 2.0 * static_cast<double>(j) * h_prev;
      h_prev = h;
      h = next;
    }
  }
  return out;
}

std::array<double, 2> search_interval(const CoeffSeq& c) {
  return {static_cast<double>(c.first_index()) - 1.0, static_cast<double>(c.last_index()) + 1.0};
}

bool contains_close(const std::vector<double>& sorted, double x, double tol) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), x - tol);
  return it != sorted.end() && *it <= x + tol;
}

long catalog_count(const std::vector<ZeroModulus>& catalog, double t) {
  long count = 0;
  for (const auto& z : catalog) {
    if (z.modulus > t) break;
    count += z.multiplicity;
  }
  return count;
}

// Zeros lambda + i step (k + shift) with modulus <= t.
void add_vertical_family(std::vector<ZeroModulus>& out, double lambda, double shift,
                         double step, double t, int multiplicity) {
  if (std::abs(lambda) > t) return;
  const double reach = std::sqrt(t * t - lambda * lambda) / step;
  const long k_lo = static_cast<long>(std::ceil(-reach - shift)) - 1;
  const long k_hi = static_cast<long>(std::floor(reach - shift)) + 1;
  for (long k = k_lo; k <= k_hi; ++k) {
    const double y = step * (static_cast<double>(k) + shift);
    const double modulus = std::hypot(lambda, y);
    if (modulus <= t) out.push_back({modulus, multiplicity});
  }
}

long lattice_count(const JensenContext& ctx, double t) {
  std::vector<ZeroModulus> family;
  for (double lambda : ctx.real_zeros.points) {
    const int mult = contains_close(ctx.touch_zeros, lambda, 1e-12) ? 2 : 1;
    add_vertical_family(family, lambda, 0.0, ctx.lattice_step(), t, mult);
  }
  long count = 0;
  for (const auto& z : family) count += z.multiplicity;
  return count;
}

}  // namespace

double JensenContext::lattice_step() const { return kPi / a; }

ScaledLog log_abs_f_scaled(const SISFunction& f, std::complex<double> z) {
  const TermSum s = term_sum(f, z);
  ScaledLog out;
  if (s.max_re == kNegInf) {
    out.log_abs = kNegInf;
    out.log_scale = kNegInf;
    return out;
  }
  const double mag = std::abs(s.sum);
  out.log_abs = mag > 0.0 ? s.max_re + std::log(mag) : kNegInf;
  out.log_scale = s.max_re + std::log(s.abs_sum);
  return out;
}

double log_abs_f_complex(const SISFunction& f, std::complex<double> z) {
  return log_abs_f_scaled(f, z).log_abs;
}

std::complex<double> log_f_complex(const SISFunction& f, std::complex<double> z) {
  const TermSum s = term_sum(f, z);
  if (s.max_re == kNegInf || std::abs(s.sum) == 0.0) return {kNegInf, 0.0};
  return {s.max_re + std::log(std::abs(s.sum)), s.max_im + std::arg(s.sum)};
}

JensenContext build_context(const SISFunction& f) {
  require_gaussian(f);
  if (f.coeffs().empty() || f.coeffs().all_zero()) {
    throw Error(Errc::kZeroFunction, "Jensen context needs a nonzero function");
  }
  JensenContext ctx{f, f.params().gaussian_rate(), 0, 0.0, {}, {}, {}};

  const auto d = derivatives_at_origin(f);
  int order = -1;
  for (int j = 0; j < static_cast<int>(d.size()); ++j) {
    const double mag = std::abs(d[static_cast<std::size_t>(j)]);
    if (mag > 1e-8) {
      order = j;
      break;
    }
    if (mag > 1e-12) {
      std::ostringstream msg;
      msg << "derivative of order " << j << " at 0 has ambiguous magnitude " << mag;
      throw Error(Errc::kOrderAmbiguous, msg.str());
    }
  }
  if (order < 0) {
    throw Error(Errc::kOrderAmbiguous, "no derivative of order <= 6 at 0 exceeds 1e-8");
  }
  ctx.n = order;
  ctx.log_c1 = std::lgamma(static_cast<double>(order) + 1.0) -
               std::log(std::abs(d[static_cast<std::size_t>(order)]));

  const auto interval = search_interval(f.coeffs());
  ZeroSet zs = find_zeros(f, interval);
  std::vector<double> nonzero;
  for (double z : zs.zeros.points) {
    if (ctx.n >= 1 && std::abs(z) <= 1e-8) continue;
    nonzero.push_back(z);
  }
  for (double z : zs.touch_zeros) {
    if (!(ctx.n >= 1 && std::abs(z) <= 1e-8)) ctx.touch_zeros.push_back(z);
  }
  ctx.real_zeros = PointSet{std::move(nonzero), interval};

  CoeffSeq alternating = f.coeffs();
  for (std::size_t i = 0; i < alternating.size(); ++i) {
    if ((alternating.offset + static_cast<long>(i)) % 2 != 0) alternating.coeffs[i] = -alternating.coeffs[i];
  }
  SISFunction alt(std::move(alternating), f.shared());
  ZeroSet half = find_zeros(alt, interval);
  ctx.half_line_zeros = half.zeros;
  // Double zeros on either line share one list; catalog_zeros reads it for both.
  for (double z : half.touch_zeros) ctx.touch_zeros.push_back(z);
  std::sort(ctx.touch_zeros.begin(), ctx.touch_zeros.end());
  return ctx;
}

double log_abs_F(const JensenContext& ctx, std::complex<double> z) {
  const double lf = log_abs_f_complex(ctx.f, z);
  return ctx.log_c1 - ctx.n * std::log(std::abs(z)) + lf +
         0.5 * ctx.a * (z.real() * z.real() - z.imag() * z.imag());
}

long winding_number(const JensenContext& ctx, double t) {
  if (!(t > 0.0)) throw Error(Errc::kBadArgument, "winding radius must be positive");
  auto phase = [&](double theta) {
    const std::complex<double> lf = log_f_complex(ctx.f, std::polar(t, theta));
    if (lf.real() == kNegInf) {
      throw Error(Errc::kPhaseTracking, "zero of f on the contour |z| = " + std::to_string(t));
    }
    return lf.imag();
  };
  const long initial = std::max(512L, static_cast<long>(std::ceil(24.0 * ctx.a * t * t)));
  long evaluations = initial;
  double total = 0.0;

  struct Segment {
    double t0, p0, t1, p1;
    int depth;
  };
  std::vector<Segment> stack;
  double theta_prev = 0.0;
  double phase_prev = phase(0.0);
  const double phase_start = phase_prev;
  for (long j = 1; j <= initial; ++j) {
    const double theta = kTwoPi * static_cast<double>(j) / static_cast<double>(initial);
    const double p = (j == initial) ? phase_start : phase(theta);
    stack.push_back({theta_prev, phase_prev, theta, p, 0});
    while (!stack.empty()) {
      const Segment s = stack.back();
      stack.pop_back();
      const double delta = std::remainder(s.p1 - s.p0, kTwoPi);
      if (std::abs(delta) < 0.5 * kPi) {
        total += delta;
        continue;
      }
      if (s.depth > 60 || evaluations > kPhaseBudget) {
        std::ostringstream msg;
        msg << "phase tracking on |z| = " << t << " did not resolve near theta = " << s.t0;
        throw Error(Errc::kPhaseTracking, msg.str());
      }
      const double mid = 0.5 * (s.t0 + s.t1);
      const double pm = phase(mid);
      ++evaluations;
      // Right half first on the stack so the left half is summed first.
      stack.push_back({mid, pm, s.t1, s.p1, s.depth + 1});
      stack.push_back({s.t0, s.p0, mid, pm, s.depth + 1});
    }
    theta_prev = theta;
    phase_prev = p;
  }
  const double turns = total / kTwoPi;
  const long winding = std::lround(turns);
  if (std::abs(turns - static_cast<double>(winding)) > 1e-6) {
    throw Error(Errc::kPhaseTracking, "phase increments do not close to a whole turn");
  }
  // z^-n contributes -n turns; exp(a z^2 / 2) has no zeros.
  return winding - ctx.n;
}

std::vector<ZeroModulus> catalog_zeros(const JensenContext& ctx, double t) {
  std::vector<ZeroModulus> out;
  const double step = ctx.lattice_step();
  for (double lambda : ctx.real_zeros.points) {
    const int mult = contains_close(ctx.touch_zeros, lambda, 1e-12) ? 2 : 1;
    add_vertical_family(out, lambda, 0.0, step, t, mult);
  }
  for (double mu : ctx.half_line_zeros.points) {
    const int mult = contains_close(ctx.touch_zeros, mu, 1e-12) ? 2 : 1;
    add_vertical_family(out, mu, 0.5, step, t, mult);
  }
  if (ctx.n >= 1) {
    for (long k = 1; static_cast<double>(k) * step <= t; ++k) {
      out.push_back({static_cast<double>(k) * step, ctx.n});
      out.push_back({static_cast<double>(k) * step, ctx.n});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const ZeroModulus& l, const ZeroModulus& r) { return l.modulus < r.modulus; });
  return out;
}

DiskCount count_zeros_disk(const JensenContext& ctx, double t) {
  DiskCount out;
  out.total = winding_number(ctx, t);
  out.lattice = lattice_count(ctx, t);
  out.extra = out.total - out.lattice;
  if (out.extra < 0) {
    std::ostringstream msg;
    msg << "argument principle counted " << out.total << " zeros in |z| <= " << t
        << " but the real-zero lattice alone has " << out.lattice;
    throw Error(Errc::kPhaseTracking, msg.str());
  }
  out.unexplained = out.total - catalog_count(catalog_zeros(ctx, t), t);
  return out;
}

std::vector<ZeroModulus> zero_moduli(const JensenContext& ctx, double r) {
  auto catalog = catalog_zeros(ctx, r);
  auto unexplained = [&](double t) { return winding_number(ctx, t) - catalog_count(catalog, t); };
  const long at_r = unexplained(r);
  if (at_r == 0) return catalog;
  if (at_r < 0) {
    std::ostringstream msg;
    msg << "catalogued zeros exceed the argument-principle count at r = " << r;
    throw Error(Errc::kPhaseTracking, msg.str());
  }

  std::vector<double> moduli;
  moduli.reserve(catalog.size());
  for (const auto& z : catalog) moduli.push_back(z.modulus);
  const double width_tol = 1e-9 * std::max(1.0, r);
  std::vector<ZeroModulus> located;

  struct Bracket {
    double lo;
    long u_lo;
    double hi;
    long u_hi;
  };
  double t0 = std::min(0.05, 0.5 * r);
  if (!moduli.empty()) t0 = std::min(t0, 0.5 * moduli.front());
  std::vector<Bracket> work{{t0, unexplained(t0), r, at_r}};
  while (!work.empty()) {
    const Bracket b = work.back();
    work.pop_back();
    if (b.u_hi == b.u_lo) continue;
    if (b.u_hi < b.u_lo) {
      throw Error(Errc::kPhaseTracking, "unexplained zero count decreased with radius");
    }
    if (b.hi - b.lo < width_tol) {
      located.push_back({0.5 * (b.lo + b.hi), static_cast<int>(b.u_hi - b.u_lo)});
      continue;
    }
    double mid = 0.5 * (b.lo + b.hi);
    if (contains_close(moduli, mid, 1e-8) && b.hi - b.lo > 1e-7) mid += 3e-8;
    const long u_mid = unexplained(mid);
    work.push_back({mid, u_mid, b.hi, b.u_hi});
    work.push_back({b.lo, b.u_lo, mid, u_mid});
  }
  catalog.insert(catalog.end(), located.begin(), located.end());
  std::sort(catalog.begin(), catalog.end(),
            [](const ZeroModulus& l, const ZeroModulus& r) { return l.modulus < r.modulus; });
  return catalog;
}

double perturb_radius(const JensenContext& ctx, double r, double clearance) {
  const auto catalog = catalog_zeros(ctx, r + 1.0);
  std::vector<double> moduli;
  for (const auto& z : catalog) moduli.push_back(z.modulus);
  double out = r;
  for (int i = 0; i < 100000 && contains_close(moduli, out, clearance); ++i) out += 1e-4;
  return out;
}

double jensen_lhs(const JensenContext& ctx, double r) {
  if (!(r > 0.0)) throw Error(Errc::kBadArgument, "Jensen radius must be positive");
  double sum = 0.0;
  for (const auto& z : zero_moduli(ctx, r)) {
    if (z.modulus < r) sum += z.multiplicity * std::log(r / z.modulus);
  }
  return sum / (r * r);
}

double jensen_rhs(const JensenContext& ctx, double r, int n_theta, double tol) {
  if (!(r > 0.0)) throw Error(Errc::kBadArgument, "Jensen radius must be positive");
  if (n_theta < 64) throw Error(Errc::kBadArgument, "n_theta must be at least 64");
  const long min_samples = std::max<long>(n_theta, static_cast<long>(std::ceil(4.0 * ctx.a * r * r)));
  const long max_samples = 1L << 24;

  auto sample = [&](double theta) {
    const std::complex<double> z = std::polar(r, theta);
    const double lf = log_abs_f_complex(ctx.f, z);
    if (lf == kNegInf) {
      throw Error(Errc::kNonconvergence, "zero of f on the Jensen contour r = " + std::to_string(r));
    }
    return lf + 0.5 * ctx.a * r * r * std::cos(2.0 * theta);
  };
  const double constant = ctx.log_c1 - ctx.n * std::log(r);

  long count = n_theta;
  double sum = 0.0;
  for (long j = 0; j < count; ++j) sum += sample(kTwoPi * static_cast<double>(j) / static_cast<double>(count));
  double value = (constant + sum / static_cast<double>(count)) / (r * r);
  for (;;) {
    if (count * 2 > max_samples) {
      throw Error(Errc::kNonconvergence,
                  "trapezoidal Jensen average did not settle at r = " + std::to_string(r));
    }
    const long next = count * 2;
    for (long j = 1; j < next; j += 2) {
      sum += sample(kTwoPi * static_cast<double>(j) / static_cast<double>(next));
    }
    count = next;
    const double refined = (constant + sum / static_cast<double>(count)) / (r * r);
    const bool settled = std::abs(refined - value) < tol;
    value = refined;
    if (settled && count >= min_samples) return value;
  }
}

double fit_growth_constant(const JensenContext& ctx, double r_max,
                           const std::vector<double>& extra_radii) {
  constexpr int kRings = 64;
  constexpr int kAngles = 1024;
  std::vector<double> rings;
  for (int i = 1; i <= kRings; ++i) rings.push_back(r_max * i / kRings);
  rings.insert(rings.end(), extra_radii.begin(), extra_radii.end());
  double best = kNegInf;
  for (double rho : rings) {
    for (int j = 0; j < kAngles; ++j) {
      const std::complex<double> z = std::polar(rho, kTwoPi * j / kAngles);
      const double v = log_abs_F(ctx, z) - 0.5 * ctx.a * rho * rho;
      best = std::max(best, v);
    }
  }
  return best;
}

BaseCaseReport evaluate_base_case(const JensenContext& ctx, const std::vector<double>& radii) {
  BaseCaseReport report;
  if (radii.empty()) return report;
  std::vector<double> perturbed;
  for (double r : radii) perturbed.push_back(perturb_radius(ctx, r, 1e-3));
  const double r_max = *std::max_element(perturbed.begin(), perturbed.end());
  report.log_c_fit = fit_growth_constant(ctx, r_max, perturbed);

  PointSet full = ctx.real_zeros;
  if (ctx.n >= 1) full = set_union(full, PointSet{{0.0}, {0.0, 0.0}});

  for (double r : perturbed) {
    BaseCaseRecord rec;
    rec.r = r;
    rec.lhs = jensen_lhs(ctx, r);
    rec.rhs = jensen_rhs(ctx, r, 64, 1e-8);
    rec.circ_scaled = 0.5 * ctx.a * circ_density_direct(ctx.real_zeros, {r}).values[0];
    rec.circ_density = circ_density_direct(full, {r}).values[0];
    rec.bound = report.log_c_fit / (r * r) + 0.5 * ctx.a;
    const DiskCount counts = count_zeros_disk(ctx, r);
    rec.lattice_zeros = counts.lattice;
    rec.extra_zeros = counts.extra;
    rec.jensen_identity = std::abs(rec.lhs - rec.rhs) <= 2e-6;
    rec.growth_bound = rec.rhs <= rec.bound + 1e-6 && rec.lhs <= rec.bound + 1e-6;
    rec.lattice_lower_bound = rec.circ_scaled <= rec.lhs + 20.0 / r;
    report.holds = report.holds && rec.jensen_identity && rec.growth_bound && rec.lattice_lower_bound;
    report.records.push_back(rec);
  }
  const auto last = std::max_element(report.records.begin(), report.records.end(),
                                     [](const auto& l, const auto& r) { return l.r < r.r; });
  report.final_density = last->circ_density;
  report.final_density_limit = 1.0 + 40.0 / last->r;
  report.holds = report.holds && report.final_density <= report.final_density_limit;
  return report;
}

BaseCaseReport verify_base_case(const JensenContext& ctx, const std::vector<double>& radii) {
  BaseCaseReport report = evaluate_base_case(ctx, radii);
  if (report.holds) return report;
  std::ostringstream msg;
  msg << "base-case chain violated:";
  for (const auto& rec : report.records) {
    if (rec.jensen_identity && rec.growth_bound && rec.lattice_lower_bound) continue;
    msg << " [r=" << rec.r << " lhs=" << rec.lhs << " rhs=" << rec.rhs
        << " circ_scaled=" << rec.circ_scaled << " bound=" << rec.bound << "]";
  }
  if (report.final_density > report.final_density_limit) {
    msg << " [density " << report.final_density << " > " << report.final_density_limit << "]";
  }
  throw Error(Errc::kChainViolation, msg.str());
}

double lattice_invariance_residual(const JensenContext& ctx, int max_shift) {
  double worst = kNegInf;
  const double step = ctx.lattice_step();
  for (double lambda : ctx.real_zeros.points) {
    for (int k = -max_shift; k <= max_shift; ++k) {
      const ScaledLog s = log_abs_f_scaled(ctx.f, {lambda, step * k});
      const double rel = (s.log_abs - s.log_scale) / std::log(10.0);
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

}  // namespace tpshift
