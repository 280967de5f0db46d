#pragma once

// Sign retrieval: recover a real f in V(g), up to a global sign, from |f| on a
// finite sample set.

#include <array>
#include <cstddef>
#include <vector>

#include "tpshift/sispace.hpp"

namespace tpshift {

struct MagnitudeSample {
  PointSet lambda;
  std::vector<double> magnitudes;  // |f(lambda_i)|, aligned with lambda.points

  // Throws Errc::kBadArgument on length mismatch or negative/non-finite values.
  void validate() const;
};

struct SignPattern {
  std::vector<int> signs;                  // +1 or -1 per sample
  std::vector<std::size_t> change_points;  // i with signs[i + 1] != signs[i]

  static SignPattern from_signs(std::vector<int> signs);
  bool operator==(const SignPattern&) const = default;
};

struct RetrievalResult {
  CoeffSeq coeffs;
  SignPattern signs;
  double residual = 0.0;  // RMS of sum_k c_k g(lambda - k) - sign * magnitude
  long sign_changes = 0;
  bool accepted = false;  // residual <= 1e-5 max magnitude
  long nodes = 0;         // search nodes visited (0 for brute force)
};

// Inclusive integer range [lo, hi] of coefficient indices.
using Support = std::array<long, 2>;

MagnitudeSample sample_magnitudes(const SISFunction& f, const PointSet& lambda);

struct FitResult {
  CoeffSeq coeffs;
  double residual = 0.0;  // RMS
  double ssr = 0.0;       // sum of squared residuals
};

// Least squares by column-pivoted QR. Throws Errc::kRankDeficient when there
// are fewer samples than coefficients or the design matrix has condition
// number above 1e12.
FitResult fit_coeffs(const GeneratorParams& params, const PointSet& lambda,
                     const std::vector<double>& signed_values, Support support);

struct SolveOptions {
  long node_budget = 100000;
  double accept_rel = 1e-5;
  // Design entries below this fraction of max|g| are dropped when bounding
  // partial residuals; final fits use the full matrix.
  double band_threshold = 1e-12;
};

// Depth-first branch and bound over per-sample signs, left to right, with the
// first sign fixed to +1 and at most max_changes flips. The residual of the
// rows placed so far bounds every completion from below. A first pass only
// admits patterns within the acceptance tolerance; if none exists a second
// pass searches without that cap. Ties within rounding are resolved by
// (refit residual, number of changes, lexicographic change points), and the
// result is flipped so the first sample with nonzero magnitude has sign +1.
//
// Throws Errc::kBudgetExhausted when the node budget runs out before an
// acceptable pattern is found, Errc::kRankDeficient when undersampled and
// Errc::kBadArgument when every magnitude is below 1e-10.
RetrievalResult solve_signs(const GeneratorParams& params, const MagnitudeSample& sample,
                            Support support, int max_changes, const SolveOptions& opts = {});

// Exhaustive search over change-point subsets with the same tie-break and
// canonicalization. Throws Errc::kCombinatorialBlowup above 1e6 subsets.
RetrievalResult brute_force_signs(const GeneratorParams& params, const MagnitudeSample& sample,
                                  Support support, int max_changes);

}  // namespace tpshift
