#pragma once

// Finite-radius density profiles of point sets on the line:
//
//   beurling_lower   inf_x #[L cap [x-r, x+r]] / 2r
//   circ_direct      (4/pi r^2) int_0^r sum_{|l|<=t} sqrt(t^2-l^2) dt/t
//   circ_lattice     (2 alpha/pi r^2) int_0^r #[(L\{0} x alpha Z) cap B_t] dt/t
//
// Limits in r are never claimed; profiles report values per radius and the
// value at the largest radius as the finite-scale estimate.

#include <string>
#include <vector>

#include "tpshift/sispace.hpp"

namespace tpshift {

enum class DensityKind { kBeurlingLower, kCircDirect, kCircLattice };

std::string to_string(DensityKind kind);
DensityKind density_kind_from_string(const std::string& name);

struct DensityProfile {
  DensityKind kind = DensityKind::kCircDirect;
  std::vector<double> radii;
  std::vector<double> values;
  double extrapolated = 0.0;
  double alpha = 0.0;  // lattice spacing, kCircLattice only
};

// Window positions are restricted to x in [lo + r, hi - r]; throws
// Errc::kWindowTooSmall when that range is empty.
DensityProfile beurling_lower_profile(const PointSet& lambda, const std::vector<double>& radii);

// int_{lambda}^{r} sqrt(t^2 - lambda^2) dt / t for lambda >= 0.
double circ_inner_integral(double lambda_abs, double r);

DensityProfile circ_density_direct(const PointSet& lambda, const std::vector<double>& radii);

// Exact: the integral of the piecewise-constant count N(t)/t equals the sum
// of ln(r/rho) over lattice points of modulus rho < r.
DensityProfile circ_density_lattice(const PointSet& lambda, double alpha,
                                    const std::vector<double>& radii);

// Upper bound on |circ_direct - circ_lattice(alpha)| at radius r. Each
// lambda contributes an integer count within 1 of (2/alpha) sqrt(t^2 -
// lambda^2), plus 4/(pi r) when 0 is in the set.
double lattice_equivalence_bound(const PointSet& lambda, double alpha, double r);

struct LatticeComparison {
  double alpha = 0.0;
  double value = 0.0;
  double difference = 0.0;  // |direct - lattice|
  double bound = 0.0;       // lattice_equivalence_bound
  bool within_bound = true;
};

struct Lemma1Record {
  double r = 0.0;
  double direct = 0.0;
  double beurling = 0.0;
  std::vector<LatticeComparison> lattice;
  double domination_gap = 0.0;    // direct - beurling
  double domination_slack = 0.0;  // 2/r (1 + max alpha)
  bool domination_holds = true;
};

struct Lemma1Report {
  std::vector<Lemma1Record> records;
  bool equivalence_holds = true;
  bool domination_holds = true;
  bool holds() const { return equivalence_holds && domination_holds; }
};

Lemma1Report check_lemma1(const PointSet& lambda, const std::vector<double>& alphas,
                          const std::vector<double>& radii);

struct SubadditivityReport {
  std::vector<double> radii;
  std::vector<double> union_values;
  std::vector<double> sum_values;
  bool disjoint = true;
  bool holds = true;              // union <= sum + 1e-12 at every radius
  double max_excess = 0.0;        // max(union - sum)
  double max_abs_difference = 0.0;
};

SubadditivityReport circ_subadditivity(const PointSet& l1, const PointSet& l2,
                                       const std::vector<double>& radii);

}  // namespace tpshift
