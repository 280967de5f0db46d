#pragma once

// Totally positive generators of Gaussian type.
//
// A generator is fixed by its Fourier transform
//
//   ghat(xi) = c0 * exp(-gamma xi^2) * prod_v (1 + 2 pi i delta_v xi)^-1
//
// with c0, gamma > 0 and nonzero real deltas. For m = 0 the generator is the
// Gaussian c0 sqrt(pi/gamma) exp(-a x^2), a = pi^2/gamma. Each factor with
// delta_v is a one-sided exponential kernel in time, so for m >= 1 the tails
// of g decay like exp(-|x|/|delta|) on the side of that delta.

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace tpshift {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

struct GeneratorParams {
  double c0 = 1.0;
  double gamma = 1.0;
  std::vector<double> deltas;

  // Number of reciprocal linear factors (m).
  std::size_t order() const { return deltas.size(); }
  // Rate a of the time-domain Gaussian exp(-a x^2).
  double gaussian_rate() const { return kPi * kPi / gamma; }
  // Amplitude c0 sqrt(pi/gamma) of the time-domain Gaussian.
  double gaussian_amplitude() const;

  // Throws Errc::kInvalidParams on c0 <= 0, gamma <= 0, a zero delta or
  // non-finite fields.
  void validate() const;

  bool operator==(const GeneratorParams&) const = default;
};

GeneratorParams make_params(double c0, double gamma, std::vector<double> deltas = {});

// ghat(xi), straight from the product formula.
std::complex<double> ft_eval(const GeneratorParams& params, double xi);

// g(x). Closed form for m = 0, adaptive inverse-Fourier quadrature otherwise.
double time_eval(const GeneratorParams& params, double x);

// (g, g', g'', g''') at x. For m >= 1 all four come out of one quadrature
// pass, the j-th derivative being the inverse transform of (2 pi i xi)^j ghat.
std::array<double, 4> time_derivatives(const GeneratorParams& params, double x);

// Drops the last factor: g -> g1 with f + delta_m f' in V(g1) for f in V(g).
GeneratorParams reduce(const GeneratorParams& params);

// Half-width beyond which |g| is below ~1e-16 of its peak.
double decay_radius(const GeneratorParams& params);

// Heuristic envelope for |g| outside a table's range.
struct TailEnvelope {
  double half_width = 0.0;
  double gaussian_rate = 0.0;
  std::array<double, 2> edge_value{};    // left, right
  std::array<double, 2> decay_length{};  // 0 for a Gaussian side
  std::array<int, 2> power{};

  // Bound on |g(x)| for |x| >= half_width, given signed x.
  double bound(double x) const;
};

// Tabulated g on a uniform grid with quintic Hermite interpolation. Nodes
// carry g..g''' so both g and g' interpolate from value plus two
// derivatives at each end of a cell.
class TimeDomainTable {
 public:
  TimeDomainTable() = default;
  TimeDomainTable(GeneratorParams params, double half_width, double grid_step,
                  std::vector<std::array<double, 4>> nodes);

  const GeneratorParams& params() const { return params_; }
  double grid_step() const { return step_; }
  double origin() const { return -half_width_; }
  double half_width() const { return half_width_; }
  std::size_t size() const { return nodes_.size(); }
  std::span<const std::array<double, 4>> nodes() const { return nodes_; }
  const TailEnvelope& tail() const { return tail_; }

  // Interpolated g(x); zero outside [-half_width, half_width].
  double value(double x) const;
  // Interpolated g'(x); zero outside the table.
  double derivative(double x) const;
  // Envelope bound on |g(x)| for points outside the table.
  double tail_bound(double x) const { return tail_.bound(x); }

 private:
  double interpolate(double x, std::size_t order) const;

  GeneratorParams params_;
  double half_width_ = 0.0;
  double step_ = 0.0;
  std::vector<std::array<double, 4>> nodes_;
  TailEnvelope tail_;
};

// Requires grid_step > 0 and half_width >= 1 (Errc::kBadGrid otherwise).
TimeDomainTable build_table(const GeneratorParams& params, double half_width,
                            double grid_step);

inline constexpr double kDefaultGridStep = 0.01;

// Process-wide cache of tables at kDefaultGridStep covering decay_radius().
// Thread safe; tables are immutable once published.
std::shared_ptr<const TimeDomainTable> shared_table(const GeneratorParams& params);

}  // namespace tpshift
