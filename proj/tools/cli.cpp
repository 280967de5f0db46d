#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "tpshift/density.hpp"
#include "tpshift/errors.hpp"
#include "tpshift/experiment.hpp"
#include "tpshift/generator.hpp"
#include "tpshift/io.hpp"
#include "tpshift/jensen.hpp"
#include "tpshift/sigret.hpp"
#include "tpshift/sispace.hpp"
#include "tpshift/version.hpp"

namespace tpshift::cli {
namespace {

struct Options {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::string format = "json";
  bool quiet = false;
};

struct Output {
  Json result;
  std::string csv;         // empty when the command has no CSV form
  bool relation_ok = true;
  std::string relation_message;
};

using Handler = std::function<Output(const Json& cfg, const Options& opts)>;

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::kConfig, what); }

GeneratorParams generator_of(const Json& cfg) {
  return cfg.contains("generator") ? params_from_json(cfg["generator"]) : GeneratorParams{};
}

CoeffSeq coeffs_of(const Json& cfg) {
  if (!cfg.contains("coeffs")) invalid("field 'coeffs': missing");
  return coeffs_from_json(cfg["coeffs"]);
}

std::vector<double> numbers_of(const Json& cfg, const std::string& key, std::vector<double> fallback) {
  if (!cfg.contains(key)) return fallback;
  const Json& j = cfg[key];
  if (!j.is_array()) invalid("field '" + key + "': expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) invalid("field '" + key + "': expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::array<double, 2> interval_of(const Json& cfg, const std::string& key, std::array<double, 2> fallback) {
  const auto v = numbers_of(cfg, key, {fallback[0], fallback[1]});
  if (v.size() != 2) invalid("field '" + key + "': expected [lo, hi]");
  return {v[0], v[1]};
}

// {"points": [...], "window": [...]} or {"lattice": {"step": b, "window": [lo, hi]}}.
PointSet points_of(const Json& cfg, const std::string& key) {
  if (!cfg.contains(key)) invalid("field '" + key + "': missing");
  const Json& j = cfg[key];
  if (j.is_object() && j.contains("lattice")) {
    const Json& l = j["lattice"];
    if (!l.is_object() || !l.contains("step") || !l["step"].is_number()) {
      invalid("field '" + key + ".lattice.step': expected a number");
    }
    const double step = l["step"].get<double>();
    const auto w = interval_of(l, "window", {0.0, 0.0});
    if (!(step > 0.0) || !(w[0] <= w[1])) invalid("field '" + key + ".lattice': need step > 0 and lo <= hi");
    std::vector<double> pts;
    for (long k = static_cast<long>(std::ceil(w[0] / step)); static_cast<double>(k) * step <= w[1]; ++k) {
      pts.push_back(static_cast<double>(k) * step);
    }
    return PointSet::from_points(std::move(pts), w);
  }
  return point_set_from_json(j);
}

std::vector<double> grid_of(const Json& cfg, double lo, double hi, double step) {
  if (cfg.contains("points")) return numbers_of(cfg, "points", {});
  if (cfg.contains("grid")) {
    const Json& g = cfg["grid"];
    if (!g.is_object()) invalid("field 'grid': expected {\"lo\", \"hi\", \"step\"}");
    auto get = [&g](const char* k, double d) {
      if (!g.contains(k)) return d;
      if (!g[k].is_number()) invalid(std::string("field 'grid.") + k + "': expected a number");
      return g[k].get<double>();
    };
    lo = get("lo", lo);
    hi = get("hi", hi);
    step = get("step", step);
  }
  if (!(step > 0.0) || !(lo <= hi)) invalid("field 'grid': need step > 0 and lo <= hi");
  std::vector<double> xs;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) xs.push_back(lo + static_cast<double>(i) * step);
  return xs;
}

std::string csv_rows(const std::string& header, const std::vector<std::vector<double>>& rows) {
  std::string out = header + "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ",";
      out += format_double(row[i]);
    }
    out += "\n";
  }
  return out;
}

Output cmd_gen(const Json& cfg, const Options&) {
  const GeneratorParams p = generator_of(cfg);
  const auto table = shared_table(p);
  Output o;
  Json samples = Json::array();
  std::vector<std::vector<double>> rows;
  for (double x : grid_of(cfg, -3.0, 3.0, 0.25)) {
    const double g = table->value(x);
    samples.push_back({{"x", x}, {"g", g}});
    rows.push_back({x, g});
  }
  o.result = {{"generator", to_json(p)},
              {"order", p.order()},
              {"gaussian_rate", p.gaussian_rate()},
              {"gaussian_amplitude", p.gaussian_amplitude()},
              {"decay_radius", decay_radius(p)},
              {"table_half_width", table->half_width()},
              {"samples", samples}};
  if (p.order() > 0) o.result["reduced"] = to_json(reduce(p));
  o.csv = csv_rows("x,g", rows);
  return o;
}

Output cmd_eval(const Json& cfg, const Options&) {
  const SISFunction f(generator_of(cfg), coeffs_of(cfg));
  const double lo = static_cast<double>(f.coeffs().first_index()) - 2.0;
  const double hi = static_cast<double>(f.coeffs().last_index()) + 2.0;
  Output o;
  Json values = Json::array();
  std::vector<std::vector<double>> rows;
  for (double x : grid_of(cfg, lo, hi, 0.1)) {
    const double v = eval_f(f, x);
    const double d = eval_deriv(f, x);
    values.push_back({{"x", x}, {"f", v}, {"df", d}});
    rows.push_back({x, v, d});
  }
  o.result = {{"generator", to_json(f.params())}, {"coeffs", to_json(f.coeffs())}, {"values", values}};
  o.csv = csv_rows("x,f,df", rows);
  return o;
}

std::array<double, 2> default_interval(const SISFunction& f) {
  return {static_cast<double>(f.coeffs().first_index()) - 3.0,
          static_cast<double>(f.coeffs().last_index()) + 3.0};
}

Output cmd_zeros(const Json& cfg, const Options&) {
  const SISFunction f(generator_of(cfg), coeffs_of(cfg));
  const ZeroSet zs = find_zeros(f, interval_of(cfg, "interval", default_interval(f)));
  Output o;
  o.result = to_json(zs);
  std::string csv = "zero,touch\n";
  for (double z : zs.zeros.points) {
    const bool touch = std::find(zs.touch_zeros.begin(), zs.touch_zeros.end(), z) != zs.touch_zeros.end();
    csv += format_double(z) + "," + (touch ? "1" : "0") + "\n";
  }
  o.csv = csv;
  return o;
}

Output cmd_density(const Json& cfg, const Options&) {
  const PointSet lambda = points_of(cfg, "points");
  const auto radii = numbers_of(cfg, "radii", {});
  if (radii.empty()) invalid("field 'radii': expected a nonempty array");
  const std::string kind_name =
      cfg.contains("kind") && cfg["kind"].is_string() ? cfg["kind"].get<std::string>() : "circ_direct";
  DensityProfile p;
  switch (density_kind_from_string(kind_name)) {
    case DensityKind::kBeurlingLower:
      p = beurling_lower_profile(lambda, radii);
      break;
    case DensityKind::kCircDirect:
      p = circ_density_direct(lambda, radii);
      break;
    case DensityKind::kCircLattice: {
      const auto alpha = numbers_of(cfg, "alpha", {1.0});
      if (alpha.size() != 1) invalid("field 'alpha': expected one number");
      p = circ_density_lattice(lambda, alpha[0], radii);
      break;
    }
  }
  Output o;
  o.result = to_json(p);
  o.csv = density_csv(p);
  return o;
}

Output cmd_lemma1(const Json& cfg, const Options&) {
  const PointSet lambda = points_of(cfg, "points");
  const auto radii = numbers_of(cfg, "radii", {});
  if (radii.empty()) invalid("field 'radii': expected a nonempty array");
  const auto alphas = numbers_of(cfg, "alphas", {0.5, 1.0, kPi / 3.0});
  const Lemma1Report r = check_lemma1(lambda, alphas, radii);
  Output o;
  o.result = to_json(r);
  o.relation_ok = r.holds();
  if (!r.holds()) {
    std::ostringstream msg;
    for (const auto& rec : r.records) {
      if (!rec.domination_holds) {
        msg << "domination violated at r=" << rec.r << ": direct=" << rec.direct
            << " beurling=" << rec.beurling << " slack=" << rec.domination_slack << "; ";
      }
      for (const auto& l : rec.lattice) {
        if (!l.within_bound) {
          msg << "lattice form alpha=" << l.alpha << " differs by " << l.difference << " > bound "
              << l.bound << " at r=" << rec.r << "; ";
        }
      }
    }
    o.relation_message = msg.str();
  }
  return o;
}

Output cmd_jensen(const Json& cfg, const Options&) {
  const SISFunction f(generator_of(cfg), coeffs_of(cfg));
  const auto radii = numbers_of(cfg, "radii", {2.0, 4.0, 8.0});
  const JensenContext ctx = build_context(f);
  const BaseCaseReport r = evaluate_base_case(ctx, radii);
  Output o;
  o.result = {{"a", ctx.a},
              {"n", ctx.n},
              {"log_c1", ctx.log_c1},
              {"real_zeros", ctx.real_zeros.points},
              {"half_line_zeros", ctx.half_line_zeros.points},
              {"lattice_invariance_log10", ctx.real_zeros.empty() ? Json(nullptr)
                                                                   : Json(lattice_invariance_residual(ctx))},
              {"report", to_json(r)}};
  o.relation_ok = r.holds;
  if (!r.holds) {
    std::ostringstream msg;
    for (const auto& rec : r.records) {
      if (!(rec.jensen_identity && rec.growth_bound && rec.lattice_lower_bound)) {
        msg << "chain violated at r=" << rec.r << ": lhs=" << rec.lhs << " rhs=" << rec.rhs
            << " bound=" << rec.bound << " circ_scaled=" << rec.circ_scaled << "; ";
      }
    }
    if (r.final_density > r.final_density_limit) {
      msg << "density " << r.final_density << " exceeds " << r.final_density_limit;
    }
    o.relation_message = msg.str();
  }
  return o;
}

Output cmd_interlace(const Json& cfg, const Options&) {
  const SISFunction f(generator_of(cfg), coeffs_of(cfg));
  if (f.params().deltas.empty()) invalid("interlace needs a generator with at least one delta");
  const SISFunction f1 = apply_rolle_op(f, f.params().deltas.back());
  const auto interval = interval_of(cfg, "interval", default_interval(f));
  const ZeroSet zf = find_zeros(f, interval);
  const ZeroSet zf1 = find_zeros(f1, interval);
  const InterlaceReport inter = check_interlacing(zf.zeros, zf1.zeros);
  Json segments = Json::array();
  bool segments_hold = true;
  std::ostringstream msg;
  for (double t : numbers_of(cfg, "t", {5.0, 10.0, 20.0})) {
    const SegmentReport s = segment_inequality(zf.zeros, zf1.zeros, t);
    segments.push_back(to_json(s));
    if (!s.holds) {
      segments_hold = false;
      msg << "segment inequality fails at t=" << t << ": " << s.lhs << " > " << s.rhs << "; ";
    }
  }
  for (const auto& [a, b] : inter.empty_gaps) msg << "no zero of f1 in (" << a << ", " << b << "); ";
  Output o;
  o.result = {{"zeros_f", to_json(zf)},
              {"zeros_f1", to_json(zf1)},
              {"interlace", to_json(inter)},
              {"segments", segments}};
  o.relation_ok = inter.holds && segments_hold;
  o.relation_message = msg.str();
  return o;
}

Output cmd_retrieve(const Json& cfg, const Options&) {
  const GeneratorParams p = generator_of(cfg);
  if (!cfg.contains("support") || !cfg["support"].is_array() || cfg["support"].size() != 2 ||
      !cfg["support"][0].is_number_integer() || !cfg["support"][1].is_number_integer()) {
    invalid("field 'support': expected [lo, hi] integers");
  }
  const Support support{cfg["support"][0].get<long>(), cfg["support"][1].get<long>()};
  MagnitudeSample sample;
  if (cfg.contains("sample")) {
    sample.lambda = points_of(cfg["sample"], "points");
    sample.magnitudes = numbers_of(cfg["sample"], "magnitudes", {});
  } else {
    sample = sample_magnitudes(SISFunction(p, coeffs_of(cfg)), points_of(cfg, "points"));
  }
  int max_changes = static_cast<int>(std::ceil(sample.lambda.window_length())) + 2;
  if (cfg.contains("max_changes")) {
    if (!cfg["max_changes"].is_number_integer()) invalid("field 'max_changes': expected an integer");
    max_changes = cfg["max_changes"].get<int>();
  }
  Output o;
  o.result = to_json(solve_signs(p, sample, support, max_changes));
  return o;
}

Output cmd_experiment(const Json& cfg, const Options& opts) {
  ExperimentConfig c = experiment_config_from_json(cfg);
  if (opts.seed) c.seed = *opts.seed;
  const ExperimentReport r = run_threshold_experiment(c);
  Output o;
  o.result = {{"config", to_json(c)}, {"report", to_json(r)}};
  o.csv = experiment_csv(r);
  return o;
}

int exit_code_for(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kValidation:
      return kValidation;
    case ErrorCategory::kNumerical:
      return kNumerical;
    case ErrorCategory::kRelation:
      return kRelation;
  }
  return kNumerical;
}

void write_output(const Options& opts, const std::string& text, std::ostream& out) {
  if (opts.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(opts.out_path, std::ios::binary);
  if (!file) throw Error(Errc::kConfig, "cannot open '" + opts.out_path + "' for writing");
  file << text;
  if (!file) throw Error(Errc::kConfig, "failed writing '" + opts.out_path + "'");
}

int dispatch(const std::string& command, const Handler& handler, const Options& opts,
             std::ostream& out, std::ostream& err) {
  const Json cfg = opts.config_path.empty() ? Json::object() : read_json_file(opts.config_path);
  if (!cfg.is_object()) invalid("config root must be a JSON object");
  Json keyed{{"command", command}, {"config", cfg}};
  if (opts.seed) keyed["seed"] = *opts.seed;
  const std::string hash = config_hash(keyed);

  Output o = handler(cfg, opts);
  std::string text;
  if (opts.format == "csv") {
    if (o.csv.empty()) invalid("command '" + command + "' has no CSV report; use --format json");
    text = "# tpshift " + std::string(kVersion) + " " + command + " config_hash=" + hash + "\n" + o.csv;
  } else {
    Json report{{"tool", "tpshift"},
                {"version", kVersion},
                {"command", command},
                {"config_hash", hash},
                {"relation_holds", o.relation_ok},
                {"result", o.result}};
    if (opts.seed) report["seed"] = *opts.seed;
    text = report.dump(2) + "\n";
  }
  write_output(opts, text, out);
  if (!o.relation_ok) {
    err << "tpshift " << command << ": relation violated: " << o.relation_message << "\n";
    return kRelation;
  }
  if (!opts.quiet && !opts.out_path.empty()) err << "tpshift " << command << ": wrote " << opts.out_path << "\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shift-invariant spaces with totally positive generators: sampling, densities, zero "
               "counting and sign retrieval."};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::pair<std::string, Handler>>> commands = {
      {"gen", {"inspect a generator and tabulate g", cmd_gen}},
      {"eval", {"evaluate f and f' on points or a grid", cmd_eval}},
      {"zeros", {"real zeros of f on an interval", cmd_zeros}},
      {"density", {"density profile of a point set", cmd_density}},
      {"lemma1", {"circular-density equivalence and domination suite", cmd_lemma1}},
      {"jensen", {"zero counting and Jensen chain for Gaussian generators", cmd_jensen}},
      {"interlace", {"Rolle interlacing and segment inequality", cmd_interlace}},
      {"retrieve", {"recover signs and coefficients from magnitudes", cmd_retrieve}},
      {"experiment", {"sign-retrieval success rate across densities", cmd_experiment}},
  };

  Options opts;
  std::uint64_t seed = 0;
  std::map<std::string, CLI::App*> subs;
  std::map<std::string, CLI::Option*> seed_opts;
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", opts.config_path, "input JSON")->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out_path, "report path (default stdout)");
    seed_opts[name] = sub->add_option("--seed", seed, "master seed");
    sub->add_option("--format", opts.format, "report format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--quiet", opts.quiet, "suppress status messages");
    subs[name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  for (const auto& [name, entry] : commands) {
    if (!subs[name]->parsed()) continue;
    if (seed_opts[name]->count() > 0) opts.seed = seed;
    try {
      return dispatch(name, entry.second, opts, out, err);
    } catch (const Error& e) {
      err << "tpshift " << name << ": " << e.what() << "\n";
      return exit_code_for(e.category());
    } catch (const Json::exception& e) {
      err << "tpshift " << name << ": invalid input: " << e.what() << "\n";
      return kValidation;
    } catch (const std::exception& e) {
      err << "tpshift " << name << ": " << e.what() << "\n";
      return kNumerical;
    }
  }
  return kValidation;
}

}  // namespace tpshift::cli
