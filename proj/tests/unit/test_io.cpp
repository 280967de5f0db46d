#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "expect_error.hpp"
#include "random.hpp"
#include "tpshift/io.hpp"

using namespace tpshift;
using testing::code_of;

TEST_CASE("FNV-1a reference vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(config_hash(Json::parse(R"({"a":1})")) == config_hash(Json::parse(R"({ "a" : 1 })")));
  CHECK(config_hash(Json::parse(R"({"a":1})")).size() == 16);
  CHECK(config_hash(Json::parse(R"({"a":1})")) != config_hash(Json::parse(R"({"a":2})")));
}

TEST_CASE("format_double round trips") {
  testing::Rng rng(61);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(-1e6, 1e6) * std::pow(10.0, static_cast<double>(rng.integer(-20, 20)));
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(3.0) == "3");
}

TEST_CASE("generator parameters") {
  const auto p = params_from_json(Json::parse(R"({"gamma": 2, "deltas": [0.3, -0.2]})"));
  CHECK(p == make_params(1, 2, {0.3, -0.2}));
  CHECK(params_from_json(to_json(p)) == p);
  CHECK(params_from_json(Json::parse("{}")) == make_params(1, 1));
  CHECK(code_of([] { params_from_json(Json::parse(R"({"gamma": -1})")); }) == Errc::kConfig);
  CHECK(code_of([] { params_from_json(Json::parse(R"({"deltas": [0]})")); }) == Errc::kConfig);
  CHECK(code_of([] { params_from_json(Json::parse(R"({"c0": "one"})")); }) == Errc::kConfig);
  CHECK(code_of([] { params_from_json(Json::parse("[1]")); }) == Errc::kConfig);
}

TEST_CASE("coefficients and point sets") {
  const CoeffSeq c{-3, {1.5, -2.0}};
  CHECK(coeffs_from_json(to_json(c)) == c);
  CHECK(coeffs_from_json(Json::parse(R"({"coeffs": [1]})")).offset == 0);
  CHECK(code_of([] { coeffs_from_json(Json::parse(R"({"offset": 0.5, "coeffs": [1]})")); }) == Errc::kConfig);
  CHECK(code_of([] { coeffs_from_json(Json::parse(R"({"offset": 0})")); }) == Errc::kConfig);

  const auto pts = PointSet::from_points({0.25, -1.0, 3.0}, {-2, 4});
  const auto back = point_set_from_json(to_json(pts));
  CHECK(back.points == pts.points);
  CHECK(back.window == pts.window);
  CHECK(point_set_from_json(Json::parse(R"({"points": [2, 1]})")).window == std::array<double, 2>{1, 2});
  CHECK(code_of([] { point_set_from_json(Json::parse(R"({"points": [5], "window": [0, 1]})")); }) == Errc::kConfig);
  CHECK(code_of([] { point_set_from_json(Json::parse(R"({"points": [0], "window": [0]})")); }) == Errc::kConfig);
}

TEST_CASE("experiment configuration") {
  const auto j = Json::parse(R"({
    "generator": {"deltas": [0.35]}, "densities": [2.5, 3], "trials": 5, "seed": 99,
    "support": [0, 9], "window": [-1, 10], "paired": true, "jitter": 0.1})");
  const auto c = experiment_config_from_json(j);
  CHECK(c.generator == make_params(1, 1, {0.35}));
  CHECK(c.densities == std::vector<double>{2.5, 3.0});
  CHECK(c.trials == 5);
  CHECK(c.seed == 99);
  CHECK(c.support == Support{0, 9});
  CHECK(c.paired);
  CHECK(c.jitter == 0.1);
  const auto again = experiment_config_from_json(to_json(c));
  CHECK(to_json(again) == to_json(c));

  CHECK(code_of([] { experiment_config_from_json(Json::parse(R"({"densities": [1], "trials": 1})")); }) ==
        Errc::kConfig);
  CHECK(code_of([] {
          experiment_config_from_json(Json::parse(R"({"generator": {}, "densities": [1], "trials": 1, "seed": -4})"));
        }) == Errc::kConfig);
  CHECK(code_of([] {
          experiment_config_from_json(Json::parse(R"({"generator": {}, "densities": [-1], "trials": 1})"));
        }) == Errc::kConfig);
  CHECK(code_of([] {
          experiment_config_from_json(Json::parse(R"({"generator": {}, "densities": [1], "trials": 1, "paired": 1})"));
        }) == Errc::kConfig);
}

TEST_CASE("malformed JSON names the position") {
  try {
    parse_json("{\"a\": [1, 2,, 3]}");
    FAIL("no exception");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kConfig);
    CHECK(std::string(e.what()).find("column") != std::string::npos);
  }
  CHECK(code_of([] { read_json_file("/nonexistent/config.json"); }) == Errc::kConfig);

  const std::string path = "tpshift_io_test.json";
  {
    std::ofstream out(path);
    out << "{\n  \"x\": \n}";
  }
  try {
    read_json_file(path);
    FAIL("no exception");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("CSV forms") {
  DensityProfile p;
  p.kind = DensityKind::kCircDirect;
  p.radii = {1, 2.5};
  p.values = {0.5, 0.25};
  CHECK(density_csv(p) == "kind,r,value\ncirc_direct,1,0.5\ncirc_direct,2.5,0.25\n");

  ExperimentReport r;
  DensitySummary s;
  s.density = 2.5;
  s.trials = 10;
  s.successes = 9;
  s.mean_residual = 1e-9;
  r.summaries.push_back(s);
  CHECK(experiment_csv(r) == "density,trials,successes,mean_residual\n2.5,10,9,1e-09\n");
}

TEST_CASE("report serialization") {
  DensityProfile p;
  p.kind = DensityKind::kCircLattice;
  p.alpha = 0.5;
  p.radii = {1};
  p.values = {2};
  p.extrapolated = 2;
  const auto j = to_json(p);
  CHECK(j["kind"] == "circ_lattice");
  CHECK(j["alpha"] == 0.5);
  p.extrapolated = std::nan("");
  CHECK(to_json(p)["extrapolated"].is_null());

  RetrievalResult rr;
  rr.coeffs = CoeffSeq{0, {1.0}};
  rr.signs = SignPattern::from_signs({1, -1});
  rr.accepted = true;
  const auto jr = to_json(rr);
  CHECK(jr["change_points"] == Json::array({0}));
  CHECK(jr["coeffs"]["coeffs"] == Json::array({1.0}));
  CHECK(jr["accepted"] == true);
}
