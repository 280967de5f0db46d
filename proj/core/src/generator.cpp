#include "tpshift/generator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <utility>

#include "tpshift/errors.hpp"
#include "tpshift/parallel.hpp"
#include "tpshift/quadrature.hpp"

namespace tpshift {
namespace {

constexpr double kQuadTol = 1e-12;
constexpr double kImagTol = 1e-9;

// Frequency cutoff W with c0 exp(-gamma W^2) = tol, plus one unit of slack.
double frequency_window(const GeneratorParams& params) {
  const double ratio = std::max(params.c0 / kQuadTol, 1.0 + 1e-9);
  return std::sqrt(std::log(ratio) / params.gamma) + 1.0;
}

// Physicists' Hermite polynomials H_0..H_3 at u.
std::array<double, 4> hermite(double u) {
  return {1.0, 2.0 * u, 4.0 * u * u - 2.0, 8.0 * u * u * u - 12.0 * u};
}

std::array<double, 4> gaussian_derivatives(const GeneratorParams& params, double x) {
  const double a = params.gaussian_rate();
  const double root_a = std::sqrt(a);
  const double base = params.gaussian_amplitude() * std::exp(-a * x * x);
  const auto h = hermite(root_a * x);
  std::array<double, 4> out{};
  double scale = 1.0;
  for (std::size_t j = 0; j < 4; ++j) {
    out[j] = scale * h[j] * base;
    scale *= -root_a;
  }
  return out;
}

template <std::size_t N>
std::array<double, N> inverse_ft(const GeneratorParams& params, double x) {
  const double window = frequency_window(params);
  // Roughly one panel per oscillation of exp(2 pi i x xi).
  const int panels = static_cast<int>(std::ceil(2.0 * window * (std::abs(x) + 1.0)));
  quad::Options opts;
  opts.abs_tol = kQuadTol;
  opts.initial_panels = panels;
  opts.max_panels = 64 * panels + 4096;

  std::array<double, N> weights{};
  double w = 1.0;
  for (std::size_t j = 0; j < N; ++j) {
    weights[j] = w;
    w /= 2.0 * kPi;
  }

  const double two_pi_x = 2.0 * kPi * x;
  auto integrand = [&](double xi) {
    const std::complex<double> base =
        ft_eval(params, xi) * std::polar(1.0, two_pi_x * xi);
    const std::complex<double> diff(0.0, 2.0 * kPi * xi);
    quad::ComplexVec<N> out;
    std::complex<double> factor = 1.0;
    for (std::size_t j = 0; j < N; ++j) {
      out[j] = factor * base;
      factor *= diff;
    }
    return out;
  };
  const auto res = quad::integrate<N>(integrand, -window, window, opts, weights);

  std::array<double, N> out{};
  for (std::size_t j = 0; j < N; ++j) {
    if (std::abs(res.value[j].imag()) > kImagTol * (1.0 + std::abs(res.value[j].real()))) {
      std::ostringstream msg;
      msg << "inverse transform of derivative order " << j << " at x=" << x
          << " left imaginary part " << res.value[j].imag();
      throw Error(Errc::kQuadratureNonconvergence, msg.str());
    }
    out[j] = res.value[j].real();
  }
  return out;
}

TailEnvelope make_envelope(const GeneratorParams& params, double half_width,
                           const std::vector<std::array<double, 4>>& nodes) {
  TailEnvelope env;
  env.half_width = half_width;
  env.gaussian_rate = params.gaussian_rate();
  const std::size_t probe = std::min<std::size_t>(nodes.size(), 8);
  for (std::size_t k = 0; k < probe; ++k) {
    env.edge_value[0] = std::max(env.edge_value[0], std::abs(nodes[k][0]));
    env.edge_value[1] =
        std::max(env.edge_value[1], std::abs(nodes[nodes.size() - 1 - k][0]));
  }
  for (double d : params.deltas) {
    // delta > 0 is a kernel supported on x > 0: it feeds the right tail.
    const std::size_t side = d > 0 ? 1 : 0;
    env.decay_length[side] = std::max(env.decay_length[side], std::abs(d));
    ++env.power[side];
  }
  for (auto& p : env.power) p = std::max(0, p - 1);
  return env;
}

}  // namespace

double GeneratorParams::gaussian_amplitude() const {
  return c0 * std::sqrt(kPi / gamma);
}

void GeneratorParams::validate() const {
  if (!(std::isfinite(c0) && c0 > 0.0)) {
    throw Error(Errc::kInvalidParams, "generator c0 must be positive, got " + std::to_string(c0));
  }
  if (!(std::isfinite(gamma) && gamma > 0.0)) {
    throw Error(Errc::kInvalidParams,
                "generator gamma must be positive, got " + std::to_string(gamma));
  }
  for (std::size_t v = 0; v < deltas.size(); ++v) {
    if (!std::isfinite(deltas[v]) || deltas[v] == 0.0) {
      throw Error(Errc::kInvalidParams, "generator delta[" + std::to_string(v) +
                                            "] must be finite and nonzero");
    }
  }
}

GeneratorParams make_params(double c0, double gamma, std::vector<double> deltas) {
  GeneratorParams params{c0, gamma, std::move(deltas)};
  params.validate();
  return params;
}

std::complex<double> ft_eval(const GeneratorParams& params, double xi) {
  std::complex<double> value = params.c0 * std::exp(-params.gamma * xi * xi);
  for (double d : params.deltas) {
    value /= std::complex<double>(1.0, 2.0 * kPi * d * xi);
  }
  return value;
}

double time_eval(const GeneratorParams& params, double x) {
  if (params.deltas.empty()) {
    const double a = params.gaussian_rate();
    return params.gaussian_amplitude() * std::exp(-a * x * x);
  }
  return inverse_ft<1>(params, x)[0];
}

std::array<double, 4> time_derivatives(const GeneratorParams& params, double x) {
  if (params.deltas.empty()) return gaussian_derivatives(params, x);
  return inverse_ft<4>(params, x);
}

GeneratorParams reduce(const GeneratorParams& params) {
  if (params.deltas.empty()) {
    throw Error(Errc::kEmptyDeltas, "cannot reduce a Gaussian generator (m = 0)");
  }
  GeneratorParams out = params;
  out.deltas.pop_back();
  return out;
}

double decay_radius(const GeneratorParams& params) {
  // Per side, the tail is a convolution of one-sided exponentials:
  // |g| ~ x^(p-1) exp(-x/l_max) with p factors on that side.
  std::array<double, 2> length{};
  std::array<int, 2> count{};
  for (double d : params.deltas) {
    const std::size_t side = d > 0 ? 1 : 0;
    length[side] = std::max(length[side], std::abs(d));
    ++count[side];
  }
  double reach = 0.0;
  for (std::size_t side = 0; side < 2; ++side) {
    if (count[side] == 0) continue;
    reach = std::max(reach, length[side] * (40.0 + 10.0 * (count[side] - 1)));
  }
  const double gaussian = std::sqrt(37.0 / params.gaussian_rate());
  return std::ceil(gaussian + reach + 1.0);
}

double TailEnvelope::bound(double x) const {
  const double ax = std::abs(x);
  if (ax <= half_width) return edge_value[x < 0 ? 0 : 1];
  const std::size_t side = x < 0 ? 0 : 1;
  const double excess = ax - half_width;
  if (decay_length[side] == 0.0) {
    return edge_value[side] * std::exp(-gaussian_rate * (ax * ax - half_width * half_width));
  }
  const double u = excess / decay_length[side];
  return edge_value[side] * std::pow(1.0 + u, power[side]) * std::exp(-u);
}

TimeDomainTable::TimeDomainTable(GeneratorParams params, double half_width,
                                 double grid_step,
                                 std::vector<std::array<double, 4>> nodes)
    : params_(std::move(params)),
      half_width_(half_width),
      step_(grid_step),
      nodes_(std::move(nodes)) {
  tail_ = make_envelope(params_, half_width_, nodes_);
}

double TimeDomainTable::interpolate(double x, std::size_t order) const {
  const double pos = (x + half_width_) / step_;
  if (!(pos >= 0.0) || pos > static_cast<double>(nodes_.size() - 1)) return 0.0;
  std::size_t cell = static_cast<std::size_t>(pos);
  if (cell + 1 >= nodes_.size()) cell = nodes_.size() - 2;
  const double t = pos - static_cast<double>(cell);
  const auto& p = nodes_[cell];
  const auto& q = nodes_[cell + 1];
  const double h = step_;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double t4 = t3 * t;
  const double t5 = t4 * t;
  const double h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
  const double h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
  const double h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
  const double h3 = 0.5 * (t3 - 2.0 * t4 + t5);
  const double h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
  const double h5 = 1.0 - h0;
  const std::size_t o = order;
  return p[o] * h0 + h * p[o + 1] * h1 + h * h * p[o + 2] * h2 +
         h * h * q[o + 2] * h3 + h * q[o + 1] * h4 + q[o] * h5;
}

double TimeDomainTable::value(double x) const { return interpolate(x, 0); }

double TimeDomainTable::derivative(double x) const { return interpolate(x, 1); }

TimeDomainTable build_table(const GeneratorParams& params, double half_width,
                            double grid_step) {
  params.validate();
  if (!(grid_step > 0.0) || !std::isfinite(grid_step)) {
    throw Error(Errc::kBadGrid, "table grid_step must be positive");
  }
  if (!(half_width >= 1.0) || !std::isfinite(half_width)) {
    throw Error(Errc::kBadGrid, "table half_width must be at least 1");
  }
  const auto cells = static_cast<std::size_t>(std::ceil(2.0 * half_width / grid_step));
  const double snapped = 0.5 * static_cast<double>(cells) * grid_step;
  std::vector<std::array<double, 4>> nodes(cells + 1);
  parallel_for(nodes.size(), [&](std::size_t i) {
    const double x = -snapped + static_cast<double>(i) * grid_step;
    nodes[i] = time_derivatives(params, x);
  });
  return TimeDomainTable(params, snapped, grid_step, std::move(nodes));
}

std::shared_ptr<const TimeDomainTable> shared_table(const GeneratorParams& params) {
  params.validate();
  using Key = std::vector<double>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const TimeDomainTable>> cache;

  Key key{params.c0, params.gamma};
  key.insert(key.end(), params.deltas.begin(), params.deltas.end());
  std::lock_guard<std::mutex> lock(mutex);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  double half_width = decay_radius(params);
  auto table = std::make_shared<TimeDomainTable>(
      build_table(params, half_width, kDefaultGridStep));
  cache.emplace(std::move(key), table);
  return table;
}

}  // namespace tpshift
