#include <doctest.h>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "random.hpp"
#include "expect_error.hpp"
#include "tpshift/errors.hpp"
#include "tpshift/generator.hpp"
#include "tpshift/quadrature.hpp"

using namespace tpshift;
using testing::code_of;

namespace {

// mpmath values at 30 digits, see tests/oracles/reference_values.py.
struct Frozen {
  std::size_t m;
  double x;
  double g;
  double dg;
};

const Frozen kFrozen[] = {
    {1, -1.0, 1.1187717944505807e-5, 0.00022996926463869821},
    {1, -0.3, 0.1993652282506347, 1.5136215149044144},
    {1, 0.0, 0.91379743115281481, 2.4533040564362892},
    {1, 0.37, 1.0272945180894854, -1.6238019998216893},
    {1, 1.2, 0.11395259445588892, -0.32557543554535991},
    {1, 2.5, 0.0027773526405712043, -0.0079352932587748695},
    {2, -1.0, 0.045778294589331213, 0.18306842748554683},
    {2, -0.3, 0.61869454900078684, 1.6773172830006086},
    {2, 0.0, 0.99290547365492575, 0.31643217000844376},
    {2, 0.37, 0.65939122678459444, -1.4716131652195638},
    {2, 1.2, 0.066472416800573532, -0.18992071062126155},
    {2, 2.5, 0.0016201223736665359, -0.0046289210676186739},
    {3, -1.0, 0.02080914113697262, 0.083230511507861977},
    {3, -0.3, 0.31081296689340688, 1.0262719403579332},
    {3, 0.0, 0.66560180437633345, 1.091012230928641},
    {3, 0.37, 0.79334923270085392, -0.44652668638753161},
    {3, 1.2, 0.2005534978974167, -0.44693693698947724},
    {3, 2.5, 0.0078663025374317968, -0.020820600545884203},
};

}  // namespace

TEST_CASE("ft_eval at the origin is c0") {
  for (std::size_t m = 0; m < 4; ++m) {
    auto p = testing::preset(m);
    p.c0 = 2.5;
    CHECK(ft_eval(p, 0.0) == std::complex<double>(2.5, 0.0));
  }
}

TEST_CASE("ft_eval examples") {
  CHECK(std::abs(ft_eval(make_params(1, 1), 1.0) - std::exp(-1.0)) < 1e-15);
  const auto v = ft_eval(make_params(1, 1, {1.0 / (2.0 * kPi)}), 1.0);
  const std::complex<double> expected = std::exp(-1.0) * std::complex<double>(0.5, -0.5);
  CHECK(std::abs(v - expected) < 1e-15);
}

TEST_CASE("ft_eval agrees with the factor-by-factor oracle and is Hermitian") {
  testing::Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> deltas;
    const auto m = rng.integer(0, 4);
    for (long v = 0; v < m; ++v) deltas.push_back(rng.uniform(0.05, 1.0) * (rng.coin() ? 1 : -1));
    const auto p = make_params(rng.uniform(0.1, 3), rng.uniform(0.2, 5), deltas);
    const double xi = rng.uniform(-3, 3);
    const auto v = ft_eval(p, xi);
    CHECK(std::abs(v - oracle::ghat(p, xi)) <= 1e-14 * p.c0);
    CHECK(std::abs(ft_eval(p, -xi) - std::conj(v)) <= 1e-15 * p.c0);
    CHECK(std::abs(v) <= p.c0 * std::exp(-p.gamma * xi * xi) * (1 + 1e-14));
  }
}

TEST_CASE("validate rejects bad parameters") {
  CHECK(code_of([] { make_params(0, 1); }) == Errc::kInvalidParams);
  CHECK(code_of([] { make_params(1, -1); }) == Errc::kInvalidParams);
  CHECK(code_of([] { make_params(1, 1, {0.0}); }) == Errc::kInvalidParams);
  CHECK(code_of([] { make_params(1, 1, {NAN}); }) == Errc::kInvalidParams);
  CHECK(code_of([] { make_params(INFINITY, 1); }) == Errc::kInvalidParams);
}

TEST_CASE("reduce drops the last factor") {
  CHECK(reduce(make_params(1, 1, {0.5, -0.3})) == make_params(1, 1, {0.5}));
  CHECK(reduce(make_params(2, 3, {1.0})) == make_params(2, 3));
  CHECK(code_of([] { reduce(make_params(1, 1)); }) == Errc::kEmptyDeltas);
}

TEST_CASE("time_eval closed form for m = 0") {
  CHECK(time_eval(make_params(1, kPi * kPi), 0.0) == doctest::Approx(1.0 / std::sqrt(kPi)).epsilon(1e-15));
  CHECK(time_eval(make_params(1, 1), 0.0) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-15));
  const auto p = make_params(1.3, 0.7);
  for (double x : {-1.1, -0.2, 0.0, 0.45, 2.0}) {
    CHECK(std::abs(time_eval(p, x) - oracle::g(p, x)) < 1e-12);
  }
}

TEST_CASE("time_eval matches frozen high-precision values for m >= 1") {
  for (const auto& fz : kFrozen) {
    const auto p = testing::preset(fz.m);
    CAPTURE(fz.m);
    CAPTURE(fz.x);
    CHECK(std::abs(time_eval(p, fz.x) - fz.g) < 1e-9);
    CHECK(std::abs(time_derivatives(p, fz.x)[1] - fz.dg) < 1e-9);
    CHECK(std::abs(oracle::g(p, fz.x) - fz.g) < 1e-9);
  }
}

TEST_CASE("time_eval matches the trapezoid oracle on random generators") {
  testing::Rng rng(12);
  for (int i = 0; i < 25; ++i) {
    std::vector<double> deltas;
    const auto m = rng.integer(1, 3);
    for (long v = 0; v < m; ++v) deltas.push_back(rng.uniform(0.1, 0.6) * (rng.coin() ? 1 : -1));
    const auto p = make_params(rng.uniform(0.5, 2), rng.uniform(0.5, 2), deltas);
    const double x = rng.uniform(-3, 3);
    CAPTURE(x);
    const auto d = time_derivatives(p, x);
    for (int j = 0; j < 4; ++j) {
      CHECK(std::abs(d[static_cast<std::size_t>(j)] - oracle::g(p, x, j)) < 1e-9 * std::pow(10.0, j));
    }
    CHECK(time_eval(p, x) == doctest::Approx(d[0]).epsilon(1e-12));
  }
}

TEST_CASE("derivatives agree with central differences") {
  for (std::size_t m = 0; m < 4; ++m) {
    const auto p = testing::preset(m);
    for (double x : {-0.8, 0.1, 0.9}) {
      const double h = 1e-4;
      const auto d = time_derivatives(p, x);
      const double fd = (time_eval(p, x + h) - time_eval(p, x - h)) / (2 * h);
      CHECK(d[1] == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("time_eval is finite on a wide grid") {
  for (std::size_t m = 0; m < 4; ++m) {
    const auto p = testing::preset(m);
    for (int i = 0; i < 1000; ++i) {
      const double x = -25.0 + 0.05 * i;
      CHECK(std::isfinite(time_eval(p, x)));
    }
  }
}

TEST_CASE("generators are positive and integrate to c0") {
  for (std::size_t m = 0; m < 4; ++m) {
    const auto p = testing::preset(m);
    const auto table = shared_table(p);
    double sum = 0.0;
    for (const auto& node : table->nodes()) {
      CHECK(node[0] > -1e-14);
      sum += node[0];
    }
    CHECK(sum * table->grid_step() == doctest::Approx(p.c0).epsilon(1e-9));
  }
}

TEST_CASE("table interpolants match time_eval between nodes") {
  for (std::size_t m : {0u, 1u}) {
    const auto p = testing::preset(m);
    const auto t = build_table(p, 10.0, 0.01);
    double worst = 0.0;
    double worst_d = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); i += 7) {
      const double x = t.origin() + (static_cast<double>(i) + 0.5) * t.grid_step();
      worst = std::max(worst, std::abs(t.value(x) - time_eval(p, x)));
      worst_d = std::max(worst_d, std::abs(t.derivative(x) - time_derivatives(p, x)[1]));
    }
    CAPTURE(m);
    CHECK(worst < 1e-8);
    CHECK(worst_d < 1e-6);
  }
}

TEST_CASE("table reproduces node values and vanishes outside") {
  const auto p = testing::preset(2);
  const auto t = build_table(p, 4.0, 0.05);
  const auto nodes = t.nodes();
  for (std::size_t i = 0; i < nodes.size(); i += 13) {
    const double x = t.origin() + static_cast<double>(i) * t.grid_step();
    CHECK(t.value(x) == doctest::Approx(nodes[i][0]).epsilon(1e-12));
  }
  CHECK(t.value(t.half_width() + 0.1) == 0.0);
  CHECK(t.derivative(-t.half_width() - 0.1) == 0.0);
}

TEST_CASE("build_table rejects bad grids") {
  const auto p = testing::preset(0);
  CHECK(code_of([&] { build_table(p, 10, 0); }) == Errc::kBadGrid);
  CHECK(code_of([&] { build_table(p, 10, -0.1); }) == Errc::kBadGrid);
  CHECK(code_of([&] { build_table(p, 0.5, 0.01); }) == Errc::kBadGrid);
}

TEST_CASE("decay_radius bounds the generator") {
  for (std::size_t m = 0; m < 4; ++m) {
    const auto p = testing::preset(m);
    const double r = decay_radius(p);
    const double peak = time_eval(p, 0.0);
    CAPTURE(m);
    CHECK(std::abs(time_eval(p, r)) < 1e-15 * std::max(1.0, peak));
    CHECK(std::abs(time_eval(p, -r)) < 1e-15 * std::max(1.0, peak));
  }
}

TEST_CASE("tail envelope dominates beyond the table") {
  for (std::size_t m = 0; m < 4; ++m) {
    const auto p = testing::preset(m);
    const auto t = build_table(p, 2.0, 0.01);
    for (double x : {-4.0, -3.0, -2.5, 2.5, 3.0, 4.0}) {
      CAPTURE(m);
      CAPTURE(x);
      // Quadrature noise floor is ~1e-16.
      CHECK(std::abs(time_eval(p, x)) <= t.tail_bound(x) * 1.000001 + 1e-14);
    }
  }
}

TEST_CASE("shared_table caches per parameter set") {
  const auto a = shared_table(testing::preset(1));
  const auto b = shared_table(testing::preset(1));
  const auto c = shared_table(testing::preset(2));
  CHECK(a.get() == b.get());
  CHECK(a.get() != c.get());
  CHECK(a->grid_step() == kDefaultGridStep);
  CHECK(a->half_width() >= decay_radius(testing::preset(1)));
}

TEST_CASE("quadrature integrates smooth functions and reports failure") {
  quad::Options opts;
  opts.abs_tol = 1e-13;
  CHECK(quad::integrate_real([](double x) { return std::sin(x); }, 0.0, kPi, opts) ==
        doctest::Approx(2.0).epsilon(1e-13));
  CHECK(quad::integrate_real([](double x) { return std::exp(-x * x); }, -8.0, 8.0, opts) ==
        doctest::Approx(std::sqrt(kPi)).epsilon(1e-13));
  quad::Options tight;
  tight.abs_tol = 1e-13;
  tight.max_panels = 4;
  CHECK(code_of([&] {
          quad::integrate_real([](double x) { return std::sqrt(std::abs(x)); }, -1.0, 1.0, tight);
        }) == Errc::kQuadratureNonconvergence);
}
