#pragma once

// Functions f = sum_k c_k g(. - k) in the shift-invariant space of a
// generator g, with finitely supported real coefficients.

#include <array>
#include <memory>
#include <utility>
#include <vector>

#include "tpshift/generator.hpp"

namespace tpshift {

struct CoeffSeq {
  long offset = 0;
  std::vector<double> coeffs;

  bool empty() const { return coeffs.empty(); }
  std::size_t size() const { return coeffs.size(); }
  long first_index() const { return offset; }
  long last_index() const { return offset + static_cast<long>(coeffs.size()) - 1; }
  // c_k, zero outside the support.
  double at(long k) const;
  double max_abs() const;
  bool all_zero() const;
  // Throws Errc::kBadArgument on non-finite entries.
  void validate() const;

  bool operator==(const CoeffSeq&) const = default;
};

// Sum of two sequences over the union of their supports.
CoeffSeq operator+(const CoeffSeq& lhs, const CoeffSeq& rhs);
CoeffSeq operator*(double scale, const CoeffSeq& seq);

// Finite sorted set of distinct reals inside an observation window.
struct PointSet {
  std::vector<double> points;
  std::array<double, 2> window{0.0, 0.0};

  // Sorts and deduplicates; the window defaults to the hull of the points.
  static PointSet from_points(std::vector<double> points);
  static PointSet from_points(std::vector<double> points, std::array<double, 2> window);

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  double window_length() const { return window[1] - window[0]; }
  // Throws Errc::kBadArgument unless strictly increasing and inside window.
  void validate() const;
};

// Set union (duplicates merged), window is the hull of both windows.
PointSet set_union(const PointSet& a, const PointSet& b);

class SISFunction {
 public:
  // Uses the process-wide cached table for params.
  SISFunction(GeneratorParams params, CoeffSeq coeffs);
  SISFunction(CoeffSeq coeffs, std::shared_ptr<const TimeDomainTable> table);

  const GeneratorParams& params() const { return table_->params(); }
  const CoeffSeq& coeffs() const { return coeffs_; }
  const TimeDomainTable& table() const { return *table_; }
  std::shared_ptr<const TimeDomainTable> shared() const { return table_; }

  double operator()(double x) const;

 private:
  CoeffSeq coeffs_;
  std::shared_ptr<const TimeDomainTable> table_;
};

double eval_f(const SISFunction& f, double x);
double eval_deriv(const SISFunction& f, double x);

// f1 = f + delta f'. Requires delta to be the last generator delta; the result
// lives over reduce(params) with the same coefficients.
SISFunction apply_rolle_op(const SISFunction& f, double delta);

struct ZeroSearchOptions {
  double scan_step = 0.02;
  double tolerance = 1e-10;
  double touch_threshold = 1e-9;
  double zero_floor = 1e-12;
  // Crossings and minima where |f| stays below this fraction of max|f| on the
  // scan are table noise, not zeros.
  double relative_floor = 1e-13;
};

struct ZeroSet {
  PointSet zeros;
  // Even-order zeros found at local minima of |f| (also present in zeros).
  std::vector<double> touch_zeros;
};

// Sign-change zeros by scanning then bisection, plus refined local minima of
// |f| that either hide a close pair of crossings or touch zero.
ZeroSet find_zeros(const SISFunction& f, std::array<double, 2> interval,
                   const ZeroSearchOptions& opts = {});

struct InterlaceReport {
  bool holds = true;
  bool nonnegative_holds = true;
  bool nonpositive_holds = true;
  std::size_t nonnegative_gaps = 0;
  std::size_t nonpositive_gaps = 0;
  // Consecutive zeros of f with no zero of f1 strictly between them.
  std::vector<std::pair<double, double>> empty_gaps;
};

// For lambda_0 < ... < lambda_N the nonnegative zeros of f, checks that each
// (lambda_{k-1}, lambda_k) holds a zero of f1; mirrored on the nonpositive
// side. The intervals are disjoint, so one point per gap is a valid
// interlacing certificate.
InterlaceReport check_interlacing(const PointSet& zf, const PointSet& zf1);

struct SegmentReport {
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

// sum_{lambda in zf, |lambda|<=t} sqrt(t^2 - lambda^2)
//   <= 2t + sum_{gamma in zf1, |gamma|<=t} sqrt(t^2 - gamma^2)
SegmentReport segment_inequality(const PointSet& zf, const PointSet& zf1, double t);

}  // namespace tpshift
