#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature for vector-valued complex
// integrands. All components share the panel subdivision; the error of a
// panel is the weighted max over components of |K15 - G7|.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <string>
#include <vector>

#include "tpshift/errors.hpp"

namespace tpshift::quad {

template <std::size_t N>
using ComplexVec = std::array<std::complex<double>, N>;

// Kronrod abscissae on [0, 1] (symmetric), Kronrod and Gauss weights.
extern const std::array<double, 8> kKronrodNodes;
extern const std::array<double, 8> kKronrodWeights;
extern const std::array<double, 4> kGaussWeights;  // for nodes 1, 3, 5, 7

struct Options {
  double abs_tol = 1e-12;
  int initial_panels = 1;
  int max_panels = 50000;
};

template <std::size_t N>
struct Result {
  ComplexVec<N> value{};
  double error = 0.0;
  long evaluations = 0;
  int panels = 0;
};

namespace detail {

template <std::size_t N>
struct Panel {
  double lo;
  double hi;
  ComplexVec<N> value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <std::size_t N, class F>
Panel<N> gk15_panel(F& f, double lo, double hi,
                    const std::array<double, N>& weights, long& evals) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  ComplexVec<N> kronrod{};
  ComplexVec<N> gauss{};
  const ComplexVec<N> fc = f(center);
  ++evals;
  for (std::size_t c = 0; c < N; ++c) {
    kronrod[c] = kKronrodWeights[7] * fc[c];
    gauss[c] = kGaussWeights[3] * fc[c];
  }
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const ComplexVec<N> left = f(center - dx);
    const ComplexVec<N> right = f(center + dx);
    evals += 2;
    for (std::size_t c = 0; c < N; ++c) {
      const std::complex<double> pair = left[c] + right[c];
      kronrod[c] += kKronrodWeights[j] * pair;
      if (j % 2 == 1) gauss[c] += kGaussWeights[j / 2] * pair;
    }
  }
  Panel<N> panel{lo, hi, {}, 0.0};
  for (std::size_t c = 0; c < N; ++c) {
    panel.value[c] = kronrod[c] * half;
    const double err = std::abs((kronrod[c] - gauss[c]) * half) * weights[c];
    panel.error = std::max(panel.error, err);
  }
  return panel;
}

}  // namespace detail

// Integrates f over [lo, hi]. f maps double -> ComplexVec<N>. Throws
// Errc::kQuadratureNonconvergence when the panel budget runs out before the
// summed error estimate drops below opts.abs_tol.
template <std::size_t N, class F>
Result<N> integrate(F&& f, double lo, double hi, const Options& opts,
                    const std::array<double, N>& weights) {
  Result<N> result;
  std::vector<detail::Panel<N>> heap;
  const int initial = std::max(1, opts.initial_panels);
  heap.reserve(static_cast<std::size_t>(initial) * 2);
  const double width = (hi - lo) / initial;
  double total_error = 0.0;
  for (int p = 0; p < initial; ++p) {
    const double a = lo + p * width;
    const double b = (p + 1 == initial) ? hi : a + width;
    heap.push_back(detail::gk15_panel<N>(f, a, b, weights, result.evaluations));
    total_error += heap.back().error;
  }
  std::make_heap(heap.begin(), heap.end());
  while (total_error > opts.abs_tol) {
    if (static_cast<int>(heap.size()) >= opts.max_panels) {
      throw Error(Errc::kQuadratureNonconvergence,
                  "adaptive quadrature did not reach tolerance " +
                      std::to_string(opts.abs_tol) + " (error estimate " +
                      std::to_string(total_error) + ") within " +
                      std::to_string(opts.max_panels) + " panels");
    }
    std::pop_heap(heap.begin(), heap.end());
    const detail::Panel<N> worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.lo + worst.hi);
    auto left = detail::gk15_panel<N>(f, worst.lo, mid, weights, result.evaluations);
    auto right = detail::gk15_panel<N>(f, mid, worst.hi, weights, result.evaluations);
    total_error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end());
  }
  // Recompute the error sum from scratch; the running total drifts.
  result.error = 0.0;
  for (const auto& panel : heap) {
    for (std::size_t c = 0; c < N; ++c) result.value[c] += panel.value[c];
    result.error += panel.error;
  }
  result.panels = static_cast<int>(heap.size());
  return result;
}

// Scalar real convenience wrapper.
template <class F>
double integrate_real(F&& f, double lo, double hi, const Options& opts) {
  auto wrapped = [&f](double x) {
    return ComplexVec<1>{std::complex<double>(f(x), 0.0)};
  };
  return integrate<1>(wrapped, lo, hi, opts, {1.0}).value[0].real();
}

}  // namespace tpshift::quad
