#pragma once

// Zero counting for the entire extension of f in the Gaussian case (m = 0).
//
// With f(z) = sum_k c_k C' exp(-a (z - k)^2) the normalized function
//
//   F(z) = C1 z^-n f(z) exp(a z^2 / 2),   F(0) = 1,
//
// has every real zero lambda != 0 of f repeated along lambda + i (pi/a) Z.
// Writing f(z) = exp(-a z^2) P(exp(2 a z)) for a Laurent polynomial P, the
// zeros in one period strip 0 <= Im z < pi/a correspond to roots of P: real
// zeros (positive roots), zeros on Im z = pi/(2a) (negative roots, equal to
// the real zeros of the function with coefficients (-1)^k c_k) and the rest.
// The catalog below holds the first two families and the copies of the zero
// at the origin; anything else the argument principle finds is located by
// bisection in the radius.
//
// All magnitudes are handled in log space.

#include <complex>
#include <vector>

#include "tpshift/sispace.hpp"

namespace tpshift {

struct ScaledLog {
  double log_abs = 0.0;    // log|f(z)|, -inf on total cancellation
  double log_scale = 0.0;  // log sum_k |c_k C' exp(-a (z - k)^2)|
};

// Throws Errc::kNotGaussian for generators with m >= 1.
double log_abs_f_complex(const SISFunction& f, std::complex<double> z);
ScaledLog log_abs_f_scaled(const SISFunction& f, std::complex<double> z);
// Complex logarithm of f(z); the imaginary part is determined mod 2 pi.
std::complex<double> log_f_complex(const SISFunction& f, std::complex<double> z);

struct JensenContext {
  SISFunction f;
  double a = 0.0;
  int n = 0;            // order of the zero of f at 0
  double log_c1 = 0.0;  // log|C1|
  PointSet real_zeros;  // nonzero real zeros (Lambda')
  std::vector<double> touch_zeros;
  PointSet half_line_zeros;  // real parts of zeros on Im z = pi/(2a)

  double lattice_step() const;  // pi / a
};

// Requires a nonzero f over a Gaussian generator. The order n is the first
// j <= 6 with |f^(j)(0)| > 1e-8; a lower order falling in (1e-12, 1e-8], or no
// order above the threshold, raises Errc::kOrderAmbiguous.
JensenContext build_context(const SISFunction& f);

// log|F(z)| for z != 0.
double log_abs_F(const JensenContext& ctx, std::complex<double> z);

// Winding number of F around |z| = t by phase tracking: samples refine until
// each principal phase increment is below pi/2. Throws Errc::kPhaseTracking
// when the sample budget runs out.
long winding_number(const JensenContext& ctx, double t);

struct ZeroModulus {
  double modulus;
  int multiplicity;
};

// Catalogued zeros of F with modulus <= t, sorted by modulus.
std::vector<ZeroModulus> catalog_zeros(const JensenContext& ctx, double t);

struct DiskCount {
  long total = 0;        // argument principle
  long lattice = 0;      // Lambda' + i (pi/a) Z inside the disk
  long extra = 0;        // total - lattice, never negative
  long unexplained = 0;  // total minus every catalogued zero
};

DiskCount count_zeros_disk(const JensenContext& ctx, double t);

// Moduli of all zeros of F in the closed disk of radius r: the catalog plus
// bisection-located zeros the catalog misses.
std::vector<ZeroModulus> zero_moduli(const JensenContext& ctx, double r);

// Moves r by +1e-4 steps until no catalogued zero lies within clearance of
// the circle.
double perturb_radius(const JensenContext& ctx, double r, double clearance = 1e-6);

// (1/r^2) int_0^r n_F(t)/t dt = (1/r^2) sum_{|z_j| < r} ln(r/|z_j|).
double jensen_lhs(const JensenContext& ctx, double r);

// (1/(2 pi r^2)) int_0^{2pi} log|F(r e^{i theta})| d theta by the trapezoidal
// rule, doubling n_theta until successive values differ by less than tol.
double jensen_rhs(const JensenContext& ctx, double r, int n_theta = 64, double tol = 1e-6);

// max over a polar grid of |z| <= r_max (plus the listed extra radii) of
// log|F(z)| - (a/2)|z|^2.
double fit_growth_constant(const JensenContext& ctx, double r_max,
                           const std::vector<double>& extra_radii = {});

struct BaseCaseRecord {
  double r = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double circ_scaled = 0.0;  // (a/2) circ_direct(Lambda', r)
  double circ_density = 0.0; // circ_direct(Lambda, r)
  double bound = 0.0;        // log(C_fit)/r^2 + a/2
  long lattice_zeros = 0;
  long extra_zeros = 0;
  bool jensen_identity = true;
  bool growth_bound = true;
  bool lattice_lower_bound = true;
};

struct BaseCaseReport {
  double log_c_fit = 0.0;
  std::vector<BaseCaseRecord> records;
  double final_density = 0.0;
  double final_density_limit = 0.0;  // 1 + 40/r at the largest radius
  bool holds = true;
};

// Evaluates the chain lhs ~ rhs <= bound and (a/2) circ <= lhs + 20/r at each
// (perturbed) radius, and the final profile value against 1 + 40/r.
BaseCaseReport evaluate_base_case(const JensenContext& ctx, const std::vector<double>& radii);

// As evaluate_base_case, but throws Errc::kChainViolation on any failure.
BaseCaseReport verify_base_case(const JensenContext& ctx, const std::vector<double>& radii);

// max over real zeros lambda and 0 < |k| <= max_shift of
// log10 |f(lambda + i k pi/a)| relative to the local term scale.
double lattice_invariance_residual(const JensenContext& ctx, int max_shift = 3);

}  // namespace tpshift
