#include "tpshift/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tpshift/errors.hpp"

namespace tpshift {
namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw Error(Errc::kConfig, "field '" + field + "': " + what);
}

const Json& member(const Json& j, const std::string& key, const std::string& context) {
  if (!j.is_object()) bad(context, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(context + "." + key, "missing");
  return *it;
}

double number(const Json& j, const std::string& field) {
  if (!j.is_number()) bad(field, "expected a number");
  return j.get<double>();
}

long integer(const Json& j, const std::string& field) {
  if (!j.is_number_integer()) bad(field, "expected an integer");
  return j.get<long>();
}

std::vector<double> numbers(const Json& j, const std::string& field) {
  if (!j.is_array()) bad(field, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

template <typename T, typename F>
T rethrow_as_config(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == Errc::kConfig) throw;
    throw Error(Errc::kConfig, e.what());
  }
}

// JSON has no representation for non-finite values.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

GeneratorParams params_from_json(const Json& j) {
  if (!j.is_object()) bad("generator", "expected an object");
  GeneratorParams p;
  if (j.contains("c0")) p.c0 = number(j["c0"], "generator.c0");
  if (j.contains("gamma")) p.gamma = number(j["gamma"], "generator.gamma");
  if (j.contains("deltas")) p.deltas = numbers(j["deltas"], "generator.deltas");
  rethrow_as_config<int>([&] {
    p.validate();
    return 0;
  });
  return p;
}

Json to_json(const GeneratorParams& p) {
  return Json{{"c0", p.c0}, {"gamma", p.gamma}, {"deltas", p.deltas}};
}

CoeffSeq coeffs_from_json(const Json& j) {
  CoeffSeq c;
  c.offset = j.is_object() && j.contains("offset") ? integer(j["offset"], "coeffs.offset") : 0;
  c.coeffs = numbers(member(j, "coeffs", "coeffs"), "coeffs.coeffs");
  rethrow_as_config<int>([&] {
    c.validate();
    return 0;
  });
  return c;
}

Json to_json(const CoeffSeq& c) { return Json{{"offset", c.offset}, {"coeffs", c.coeffs}}; }

PointSet point_set_from_json(const Json& j) {
  std::vector<double> pts = numbers(member(j, "points", "points"), "points.points");
  if (!j.contains("window")) {
    return rethrow_as_config<PointSet>([&] { return PointSet::from_points(std::move(pts)); });
  }
  const std::vector<double> w = numbers(j["window"], "points.window");
  if (w.size() != 2) bad("points.window", "expected [lo, hi]");
  return rethrow_as_config<PointSet>([&] { return PointSet::from_points(std::move(pts), {w[0], w[1]}); });
}

Json to_json(const PointSet& p) {
  return Json{{"points", p.points}, {"window", {p.window[0], p.window[1]}}};
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  if (!j.is_object()) bad("experiment", "expected an object");
  ExperimentConfig c;
  c.generator = params_from_json(member(j, "generator", "experiment"));
  c.densities = numbers(member(j, "densities", "experiment"), "densities");
  c.trials = static_cast<int>(integer(member(j, "trials", "experiment"), "trials"));
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long>() >= 0)) {
      bad("seed", "expected a nonnegative integer");
    }
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("support")) {
    const Json& s = j["support"];
    if (!s.is_array() || s.size() != 2) bad("support", "expected [lo, hi]");
    c.support = {integer(s[0], "support[0]"), integer(s[1], "support[1]")};
  }
  if (j.contains("window")) {
    const auto w = numbers(j["window"], "window");
    if (w.size() != 2) bad("window", "expected [lo, hi]");
    c.window = {w[0], w[1]};
  }
  if (j.contains("max_changes")) c.max_changes = static_cast<int>(integer(j["max_changes"], "max_changes"));
  if (j.contains("noise")) c.noise = number(j["noise"], "noise");
  if (j.contains("paired")) {
    if (!j["paired"].is_boolean()) bad("paired", "expected a boolean");
    c.paired = j["paired"].get<bool>();
  }
  if (j.contains("jitter")) c.jitter = number(j["jitter"], "jitter");
  c.validate();
  return c;
}

Json to_json(const ExperimentConfig& c) {
  return Json{{"generator", to_json(c.generator)},
              {"densities", c.densities},
              {"trials", c.trials},
              {"seed", c.seed},
              {"support", {c.support[0], c.support[1]}},
              {"window", {c.window[0], c.window[1]}},
              {"max_changes", c.effective_max_changes()},
              {"noise", c.noise},
              {"paired", c.paired},
              {"jitter", c.jitter}};
}

Json to_json(const DensityProfile& p) {
  Json j{{"kind", to_string(p.kind)}, {"radii", p.radii}, {"values", p.values},
         {"extrapolated", num(p.extrapolated)}};
  if (p.kind == DensityKind::kCircLattice) j["alpha"] = p.alpha;
  return j;
}

Json to_json(const Lemma1Report& r) {
  Json records = Json::array();
  for (const auto& rec : r.records) {
    Json lattice = Json::array();
    for (const auto& l : rec.lattice) {
      lattice.push_back({{"alpha", l.alpha},
                         {"value", l.value},
                         {"difference", l.difference},
                         {"bound", l.bound},
                         {"within_bound", l.within_bound}});
    }
    records.push_back({{"r", rec.r},
                       {"direct", rec.direct},
                       {"beurling", rec.beurling},
                       {"lattice", lattice},
                       {"domination_gap", rec.domination_gap},
                       {"domination_slack", rec.domination_slack},
                       {"domination_holds", rec.domination_holds}});
  }
  return Json{{"records", records},
              {"equivalence_holds", r.equivalence_holds},
              {"domination_holds", r.domination_holds},
              {"holds", r.holds()}};
}

Json to_json(const SubadditivityReport& r) {
  return Json{{"radii", r.radii},
              {"union", r.union_values},
              {"sum", r.sum_values},
              {"disjoint", r.disjoint},
              {"holds", r.holds},
              {"max_excess", r.max_excess},
              {"max_abs_difference", r.max_abs_difference}};
}

Json to_json(const ZeroSet& z) {
  return Json{{"zeros", to_json(z.zeros)}, {"touch_zeros", z.touch_zeros}};
}

Json to_json(const InterlaceReport& r) {
  Json gaps = Json::array();
  for (const auto& [a, b] : r.empty_gaps) gaps.push_back({a, b});
  return Json{{"holds", r.holds},
              {"nonnegative_holds", r.nonnegative_holds},
              {"nonpositive_holds", r.nonpositive_holds},
              {"nonnegative_gaps", r.nonnegative_gaps},
              {"nonpositive_gaps", r.nonpositive_gaps},
              {"empty_gaps", gaps}};
}

Json to_json(const SegmentReport& r) {
  return Json{{"t", r.t}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"holds", r.holds}};
}

Json to_json(const BaseCaseReport& r) {
  Json records = Json::array();
  for (const auto& rec : r.records) {
    records.push_back({{"r", rec.r},
                       {"lhs", rec.lhs},
                       {"rhs", rec.rhs},
                       {"circ_scaled", rec.circ_scaled},
                       {"bound", rec.bound},
                       {"extra_zeros", rec.extra_zeros},
                       {"lattice_zeros", rec.lattice_zeros},
                       {"circ_density", rec.circ_density},
                       {"jensen_identity", rec.jensen_identity},
                       {"growth_bound", rec.growth_bound},
                       {"lattice_lower_bound", rec.lattice_lower_bound}});
  }
  return Json{{"log_c_fit", r.log_c_fit},
              {"records", records},
              {"final_density", r.final_density},
              {"final_density_limit", r.final_density_limit},
              {"holds", r.holds}};
}

Json to_json(const RetrievalResult& r) {
  return Json{{"coeffs", to_json(r.coeffs)},
              {"signs", r.signs.signs},
              {"change_points", r.signs.change_points},
              {"residual", r.residual},
              {"sign_changes", r.sign_changes},
              {"accepted", r.accepted},
              {"nodes", r.nodes}};
}

Json to_json(const ExperimentReport& r) {
  Json summaries = Json::array();
  for (const auto& s : r.summaries) {
    summaries.push_back({{"density", s.density},
                         {"trials", s.trials},
                         {"successes", s.successes},
                         {"success_rate", s.success_rate()},
                         {"mean_residual", s.mean_residual},
                         {"rank_deficient", s.rank_deficient},
                         {"budget_exhausted", s.budget_exhausted}});
  }
  Json trials = Json::array();
  for (const auto& t : r.trials) {
    trials.push_back({{"density", t.density},
                      {"trial", t.trial},
                      {"samples", t.samples},
                      {"outcome", to_string(t.outcome)},
                      {"residual", t.residual},
                      {"error", t.error},
                      {"sign_changes", t.sign_changes},
                      {"nodes", t.nodes}});
  }
  return Json{{"summaries", summaries}, {"trials", trials}};
}

std::string density_csv(const DensityProfile& p) {
  std::string out = "kind,r,value\n";
  const std::string kind = to_string(p.kind);
  for (std::size_t i = 0; i < p.radii.size(); ++i) {
    out += kind + "," + format_double(p.radii[i]) + "," + format_double(p.values[i]) + "\n";
  }
  return out;
}

std::string experiment_csv(const ExperimentReport& r) {
  std::string out = "density,trials,successes,mean_residual\n";
  for (const auto& s : r.summaries) {
    out += format_double(s.density) + "," + std::to_string(s.trials) + "," +
           std::to_string(s.successes) + "," + format_double(s.mean_residual) + "\n";
  }
  return out;
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::kConfig, std::string("malformed JSON: ") + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kConfig, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw Error(Errc::kConfig, "malformed JSON in '" + path + "': " + e.what());
  }
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_hash(const Json& j) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::uint64_t h = fnv1a64(j.dump());
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
    h >>= 4;
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace tpshift
