#include "cli/commands.hpp"

#include "cli/io.hpp"
#include "cli/suites.hpp"

#include "freespec/convolution.hpp"
#include "freespec/deteq.hpp"
#include "freespec/error.hpp"
#include "freespec/moments.hpp"
#include "freespec/parallel.hpp"
#include "freespec/partitions.hpp"
#include "freespec/rmt.hpp"
#include "freespec/transforms.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

namespace freespec::cli {

namespace {

// Every bound flag of every subcommand. A fresh instance backs each parse.
struct Opts {
  std::string input;
  unsigned workers = 0;
  std::string format = "json";
  std::string diagnostics;

  // partitions
  int n = 0;
  std::string cls = "all";
  bool count_only = false;

  // cumulants
  std::string kind;
  std::string direction;
  std::string values;
  std::string path = "inductive";

  // transform / convolve
  std::string measure;
  std::string op;
  std::vector<std::string> z;
  std::string grid = "auto";
  double tau = 1e-3;
  double noise = 1.0;
  double omega_max = 0.0;
  std::string x, y;
  double sub_tol = 1e-9;
  int sub_max_iter = 2000;

  // detequiv / capacity
  std::string profile;
  std::string mean;
  std::string mode = "hermitian";
  double tol = 1e-10;
  int max_iter = 20000;
  double alpha = 0.7;
  double eps1 = 1e-3;
  double eps2 = 1e-4;
  std::vector<std::uint64_t> mc_validate;
  double rel_tol = 0.02;

  // mc
  std::string ensemble;
  int trials = 10;
  std::uint64_t seed = 7;
  int max_k = 6;
  bool gram = false;
  std::string bins = "-2.5,2.5,0.05";
  std::string word;
  int max_order = 4;
  double threshold = 0.0;

  // validate
  std::string suite;
  int suite_n = 0;
  int suite_trials = 0;
};

struct Parser {
  std::unique_ptr<Opts> o = std::make_unique<Opts>();
  std::unique_ptr<CLI::App> app = std::make_unique<CLI::App>("Free probability numerical toolkit", "freespec");
};

void common(CLI::App* s, Opts& o) {
  s->add_option("--input", o.input, "Re-run from the config echoed in an earlier output");
  s->add_option("--workers", o.workers, "Worker threads (0: FREESPEC_WORKERS or hardware)");
}

void add_format(CLI::App* s, Opts& o) {
  s->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  s->add_option("--diagnostics", o.diagnostics, "With --format csv, write the JSON report here");
}

Parser build() {
  Parser p;
  Opts& o = *p.o;
  CLI::App& app = *p.app;
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  auto* s = app.add_subcommand("partitions", "Enumerate or count set partitions");
  common(s, o);
  s->add_option("--n", o.n, "Ground set size")->required();
  s->add_option("--class", o.cls, "all | pair | nc | ncpair")
      ->check(CLI::IsMember({"all", "pair", "nc", "ncpair"}));
  s->add_flag("--count-only", o.count_only, "Print the count only");

  s = app.add_subcommand("cumulants", "Moment-cumulant conversion");
  common(s, o);
  s->add_option("--kind", o.kind, "classical | free")
      ->required()
      ->check(CLI::IsMember({"classical", "free"}));
  s->add_option("--direction", o.direction, "m2k | k2m")
      ->required()
      ->check(CLI::IsMember({"m2k", "k2m"}));
  s->add_option("--values", o.values, "Comma-separated m_1.. or k_1..")->required();
  s->add_option("--path", o.path, "Free m2k route: inductive | mobius")
      ->check(CLI::IsMember({"inductive", "mobius"}));

  s = app.add_subcommand("transform", "Cauchy transform, Stieltjes inversion, mutual information");
  common(s, o);
  add_format(s, o);
  s->add_option("--measure", o.measure, "Measure JSON file")->required();
  s->add_option("--op", o.op, "cauchy | invert | capacity")
      ->required()
      ->check(CLI::IsMember({"cauchy", "invert", "capacity"}));
  s->add_option("--z", o.z, "Evaluation points re,im (repeatable)");
  s->add_option("--grid", o.grid, "a,b,step or auto");
  s->add_option("--tau", o.tau, "Inversion height");
  s->add_option("--noise", o.noise, "Noise level sigma");
  s->add_option("--omega-max", o.omega_max, "Upper integration limit (0: 1e4 (1 + m_1))");

  s = app.add_subcommand("convolve", "Free additive convolution by subordination");
  common(s, o);
  add_format(s, o);
  s->add_option("--x", o.x, "Measure JSON file")->required();
  s->add_option("--y", o.y, "Measure JSON file")->required();
  s->add_option("--grid", o.grid, "a,b,step or auto");
  s->add_option("--tau", o.tau, "Inversion height");
  s->add_option("--tol", o.sub_tol, "Subordination residual tolerance");
  s->add_option("--max-iter", o.sub_max_iter, "Subordination iteration cap");

  s = app.add_subcommand("detequiv", "Deterministic equivalents for variance profiles");
  common(s, o);
  s->add_option("--profile", o.profile, "Variance profile JSON file")->required();
  s->add_option("--mean", o.mean, "Deterministic matrix JSON file");
  s->add_option("--mode", o.mode, "hermitian | gram")->check(CLI::IsMember({"hermitian", "gram"}));
  s->add_option("--z", o.z, "Spectral parameters re,im (repeatable)")->required();
  s->add_option("--tol", o.tol, "Fixed-point tolerance");
  s->add_option("--max-iter", o.max_iter, "Iteration cap");
  s->add_option("--alpha", o.alpha, "Initial damping");

  s = app.add_subcommand("capacity", "Channel mutual information from the deterministic equivalent");
  common(s, o);
  s->add_option("--profile", o.profile, "Variance profile JSON file")->required();
  s->add_option("--mean", o.mean, "Deterministic matrix JSON file");
  s->add_option("--noise", o.noise, "Noise level sigma");
  s->add_option("--eps1", o.eps1, "First extrapolation height");
  s->add_option("--eps2", o.eps2, "Second extrapolation height");
  s->add_option("--omega-max", o.omega_max, "Upper integration limit (0: default)");
  s->add_option("--mc-validate", o.mc_validate, "Monte Carlo check: N trials seed")
      ->expected(3)
      ->delimiter(',');
  s->add_option("--rel-tol", o.rel_tol, "Relative tolerance for --mc-validate");

  s = app.add_subcommand("mc", "Monte Carlo random matrix experiments");
  common(s, o);
  add_format(s, o);
  s->add_option("--ensemble", o.ensemble, "Ensemble JSON file")->required();
  s->add_option("--op", o.op, "moments | spectrum | mixed | freeness")
      ->required()
      ->check(CLI::IsMember({"moments", "spectrum", "mixed", "freeness"}));
  s->add_option("--trials", o.trials, "Trials")->check(CLI::PositiveNumber);
  s->add_option("--seed", o.seed, "Seed for sources without their own");
  s->add_option("--max-k", o.max_k, "Highest moment")->check(CLI::PositiveNumber);
  s->add_flag("--gram", o.gram, "Use XX* instead of X");
  s->add_option("--bins", o.bins, "Histogram lo,hi,width");
  s->add_option("--word", o.word, "Letters i[^p][*], comma separated");
  s->add_option("--max-order", o.max_order, "Longest word for the freeness scan");
  s->add_option("--threshold", o.threshold, "Freeness threshold (0: 50 / N)");

  s = app.add_subcommand("validate", "Run a validation suite");
  common(s, o);
  std::vector<std::string> names = suite_names();
  names.emplace_back("all");
  s->add_option("--suite", o.suite, "Suite name or all")->required()->check(CLI::IsMember(names));
  s->add_option("--n", o.suite_n, "Matrix size (0: suite default)");
  s->add_option("--trials", o.suite_trials, "Trials (0: suite default)");
  s->add_option("--seed", o.seed, "Seed");
  return p;
}

void parse(CLI::App& app, std::vector<std::string> args) {
  std::reverse(args.begin(), args.end());
  app.parse(args);
}

CLI::App* active(CLI::App& app) {
  auto subs = app.get_subcommands();
  return subs.empty() ? nullptr : subs.front();
}

json scalar(const std::string& s) {
  const char* b = s.data();
  const char* e = b + s.size();
  long long i = 0;
  if (auto [p, ec] = std::from_chars(b, e, i); ec == std::errc() && p == e) return i;
  std::uint64_t u = 0;
  if (auto [p, ec] = std::from_chars(b, e, u); ec == std::errc() && p == e) return u;
  double d = 0.0;
  if (auto [p, ec] = std::from_chars(b, e, d); ec == std::errc() && p == e && std::isfinite(d))
    return d;
  return s;
}

json echo_config(const CLI::App& sub) {
  json c = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "input") continue;
    if (opt->get_expected_max() == 0) {
      c[name] = opt->count() > 0;
      continue;
    }
    std::vector<std::string> vals = opt->count() > 0 ? opt->results() : std::vector<std::string>{};
    const bool multi = opt->get_expected_max() > 1;
    if (vals.empty()) {
      const std::string d = opt->get_default_str();
      if (d.empty() || d == "[]" || multi) continue;
      vals = {d};
    }
    if (multi) {
      json a = json::array();
      for (const auto& v : vals) a.push_back(scalar(v));
      c[name] = std::move(a);
    } else {
      c[name] = scalar(vals.front());
    }
  }
  return c;
}

std::string as_arg(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

// Turns a config object into extra arguments for the options the command
// line left unset.
bool given(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

std::optional<std::string> input_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--input" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--input=", 0) == 0) return args[i].substr(8);
  }
  return std::nullopt;
}

std::vector<std::string> config_args(CLI::App& sub, const json& cfg,
                                     const std::vector<std::string>& args) {
  if (!cfg.is_object()) throw UsageError("--input: \"config\" must be an object");
  std::vector<std::string> extra;
  for (const auto& [key, v] : cfg.items()) {
    CLI::Option* opt = key == "help" || key == "input" ? nullptr : sub.get_option_no_throw("--" + key);
    if (opt == nullptr) throw UsageError("--input: unknown config key \"" + key + "\"");
    if (given(args, "--" + key)) continue;
    if (v.is_boolean()) {
      if (v.get<bool>()) extra.push_back("--" + key);
      continue;
    }
    if (!v.is_array()) {
      extra.push_back("--" + key + "=" + as_arg(v));
    } else if (opt->get_delimiter() != '\0') {
      std::string joined;
      for (const auto& e : v) joined += (joined.empty() ? "" : std::string(1, opt->get_delimiter())) + as_arg(e);
      extra.push_back("--" + key + "=" + joined);
    } else {
      for (const auto& e : v) extra.push_back("--" + key + "=" + as_arg(e));
    }
  }
  return extra;
}

json measure_doc(const std::string& path) {
  json doc = load_json_file(path);
  // Outputs of transform --op invert and convolve carry their density under "measure".
  return doc.contains("measure") ? doc.at("measure") : doc;
}

json grid_json(const SpectralMeasure& m) {
  const auto& d = m.density();
  return {{"grid", {{"t_min", d.t_min}, {"step", d.step}, {"values", d.values}}}};
}

void write_csv(std::ostream& out, const std::string& header, const GridDensity& d) {
  out << header << '\n';
  for (std::size_t i = 0; i < d.values.size(); ++i)
    out << format_double(d.t(i)) << ',' << format_double(d.values[i]) << '\n';
}

GridSpec resolve_grid(const std::string& text, double lo, double hi, double tau) {
  if (text != "auto") return parse_grid(text);
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw UsageError("--grid auto needs a measure with known support; pass a,b,step");
  const double a = lo - 1.0, b = hi + 1.0;
  const double step = std::max(tau, (b - a) / 20000.0);
  return {a, b, step};
}

std::vector<Complex> parse_points(const std::vector<std::string>& zs) {
  if (zs.empty()) throw UsageError("--z is required");
  std::vector<Complex> out;
  for (const auto& s : zs) out.push_back(parse_complex(s));
  return out;
}

// Emits `report` as JSON, or CSV of `density` with the JSON sent to the
// diagnostics file.
void emit_density(const Opts& o, std::ostream& out, const json& report, const GridDensity& density) {
  if (o.format == "csv") {
    write_csv(out, "t,density", density);
    if (!o.diagnostics.empty()) {
      std::ofstream f(o.diagnostics);
      if (!f) throw UsageError("cannot write " + o.diagnostics);
      f << report.dump() << '\n';
    }
  } else {
    out << report.dump() << '\n';
  }
}

int cmd_partitions(const Opts& o, json head, std::ostream& out) {
  const auto cls = parse_partition_class(o.cls);
  head["count"] = count_partitions(o.n, cls);
  out << head.dump() << '\n';
  if (!o.count_only)
    for_each_partition(o.n, cls, [&](const Partition& p) { out << json(p.blocks()).dump() << '\n'; });
  return kExitOk;
}

int cmd_cumulants(const Opts& o, json head, std::ostream& out) {
  const auto vals = parse_doubles(o.values);
  const bool free = o.kind == "free";
  std::vector<double> result;
  if (o.direction == "m2k") {
    const MomentSequence m(vals);
    result = free ? free_cumulants_from_moments(m, o.path == "mobius" ? FreeCumulantPath::Mobius
                                                                      : FreeCumulantPath::Inductive)
                        .values()
                  : classical_cumulants_from_moments(m).values();
  } else {
    const CumulantSequence k(free ? CumulantKind::Free : CumulantKind::Classical, vals);
    result = free ? free_moments_from_cumulants(k).values() : classical_moments_from_cumulants(k).values();
  }
  head["input"] = vals;
  head["output"] = result;
  out << head.dump() << '\n';
  return kExitOk;
}

int cmd_transform(const Opts& o, json head, std::ostream& out) {
  const json doc = measure_doc(o.measure);
  if (o.op == "cauchy") {
    const auto G = transform_from_json(doc);
    json rows = json::array();
    for (const Complex z : parse_points(o.z)) rows.push_back({{"z", to_json(z)}, {"g", to_json(G(z))}});
    head["values"] = std::move(rows);
    out << head.dump() << '\n';
    return kExitOk;
  }
  if (o.op == "invert") {
    const auto G = transform_from_json(doc);
    const auto grid = resolve_grid(o.grid, G.support_min, G.support_max, o.tau);
    const auto inv = stieltjes_invert(G.value, grid, o.tau);
    head["tau"] = inv.tau;
    head["raw_mass"] = inv.raw_mass;
    head["min_raw_density"] = inv.min_raw_density;
    head["measure"] = grid_json(inv.density);
    emit_density(o, out, head, inv.density.density());
    return kExitOk;
  }
  const auto nu = measure_from_json(doc);
  const auto G = doc.contains("semicircle") ? transform_from_json(doc) : cauchy_transform(nu);
  const double omega_max = o.omega_max > 0.0 ? o.omega_max : default_omega_max(nu.moment(1));
  const double mi = mutual_information(G.value, o.noise, omega_max);
  head["omega_max"] = omega_max;
  head["mutual_information_nats"] = mi;
  head["mutual_information_bits"] = mi / std::numbers::ln2;
  out << head.dump() << '\n';
  return kExitOk;
}

int cmd_convolve(const Opts& o, json head, std::ostream& out) {
  const auto gx = transform_from_json(measure_doc(o.x));
  const auto gy = transform_from_json(measure_doc(o.y));
  const auto grid = resolve_grid(o.grid, gx.support_min + gy.support_min,
                                 gx.support_max + gy.support_max, o.tau);
  SubordinationOptions so;
  so.tol = o.sub_tol;
  so.max_iter = o.sub_max_iter;
  const auto res = free_convolve(gx, gy, grid, o.tau, so, o.workers);
  head["tau"] = res.tau;
  head["raw_mass"] = res.raw_mass;
  head["max_residual"] = res.max_residual;
  head["iterations"] = res.iterations;
  head["residuals"] = res.residuals;
  head["measure"] = grid_json(res.density);
  emit_density(o, out, head, res.density.density());
  return kExitOk;
}

CMatrix load_mean(const Opts& o) {
  return o.mean.empty() ? CMatrix() : matrix_from_json(load_json_file(o.mean));
}

int cmd_detequiv(const Opts& o, json head, std::ostream& out) {
  const auto vp = profile_from_json(load_json_file(o.profile));
  const CMatrix A = load_mean(o);
  const auto zs = parse_points(o.z);
  DeteqOptions d;
  d.tol = o.tol;
  d.max_iter = o.max_iter;
  d.alpha = o.alpha;
  std::vector<json> rows(zs.size());
  parallel_for(zs.size(), o.workers, [&](std::size_t i) {
    Complex g;
    double residual = 0.0;
    int iterations = 0;
    if (o.mode == "gram") {
      const auto r = solve_rectangular(vp, A, zs[i], d);
      g = r.g, residual = r.residual, iterations = r.iterations;
    } else {
      const auto r = solve_hermitian(vp, A, zs[i], d);
      g = r.g, residual = r.residual, iterations = r.iterations;
    }
    rows[i] = {{"z", to_json(zs[i])}, {"g", to_json(g)}, {"iterations", iterations}, {"residual", residual}};
  });
  head["results"] = rows;
  out << head.dump() << '\n';
  return kExitOk;
}

int cmd_capacity(const Opts& o, json head, std::ostream& out) {
  const auto vp = profile_from_json(load_json_file(o.profile));
  const CMatrix A = load_mean(o);
  CapacityOptions co;
  co.eps1 = o.eps1;
  co.eps2 = o.eps2;
  co.omega_max = o.omega_max;
  const double c = capacity(vp, A, o.noise, co);
  head["capacity_nats"] = c;
  head["capacity_bits"] = c / std::numbers::ln2;
  int status = kExitOk;
  if (!o.mc_validate.empty()) {
    const auto n = o.mc_validate[0];
    if (n != static_cast<std::uint64_t>(vp.rows()))
      throw UsageError("--mc-validate: N must equal the profile rows (" + std::to_string(vp.rows()) + ")");
    const auto mc = mc_capacity(vp, A, o.noise, static_cast<int>(o.mc_validate[1]), o.mc_validate[2], o.workers);
    const double rel = std::abs(c - mc.mean) / std::abs(mc.mean);
    head["mc_estimate"] = {{"mean", mc.mean}, {"std_error", mc.std_error}};
    head["rel_err"] = rel;
    head["passed"] = rel <= o.rel_tol;
    if (!(rel <= o.rel_tol)) status = kExitValidation;
  }
  out << head.dump() << '\n';
  return status;
}

std::vector<Letter> parse_word(const std::string& text) {
  std::vector<Letter> word;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(std::remove(tok.begin(), tok.end(), ' '), tok.end());
    Letter l;
    if (!tok.empty() && tok.back() == '*') {
      l.star = true;
      tok.pop_back();
    }
    const auto caret = tok.find('^');
    const std::string idx = tok.substr(0, caret);
    const auto bad = [&] { return UsageError("--word: bad letter '" + tok + "'"); };
    auto [p, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), l.matrix);
    if (idx.empty() || ec != std::errc() || p != idx.data() + idx.size()) throw bad();
    if (caret != std::string::npos) {
      const std::string pw = tok.substr(caret + 1);
      auto [q, ec2] = std::from_chars(pw.data(), pw.data() + pw.size(), l.power);
      if (pw.empty() || ec2 != std::errc() || q != pw.data() + pw.size() || l.power < 1) throw bad();
    }
    word.push_back(l);
  }
  if (word.empty()) throw UsageError("--word is required for --op mixed");
  return word;
}

int cmd_mc(const Opts& o, json head, std::ostream& out) {
  const json doc = load_json_file(o.ensemble);
  if (o.op == "mixed" || o.op == "freeness") {
    const auto sources = sources_from_json(doc, o.seed);
    if (o.op == "mixed") {
      const auto w = parse_word(o.word);
      for (const auto& l : w)
        if (l.matrix < 0 || l.matrix >= static_cast<int>(sources.size()))
          throw UsageError("--word: matrix index " + std::to_string(l.matrix) + " out of range");
      const auto est = mixed_trace(sources, w, o.trials, o.workers);
      head["value"] = to_json(est.mean);
      head["std_error"] = est.std_error;
      out << head.dump() << '\n';
      return kExitOk;
    }
    const auto r = freeness_report(sources, o.max_order, o.trials, o.threshold, o.workers);
    head["max_abs_mixed_cumulant"] = r.report.max_abs_mixed_cumulant;
    head["worst_word"] = r.report.worst_word;
    head["words_checked"] = r.report.words_checked;
    head["threshold"] = r.threshold;
    head["passed"] = r.passed;
    head["n"] = r.n;
    out << head.dump() << '\n';
    return r.passed ? kExitOk : kExitValidation;
  }
  if (doc.contains("matrices")) throw UsageError("--op " + o.op + " takes a single ensemble");
  const auto spec = ensemble_from_json(doc, o.seed);
  if (o.op == "moments") {
    const auto m = empirical_moments(spec, o.max_k, o.trials, o.workers);
    json rows = json::array();
    for (std::size_t k = 0; k < m.size(); ++k)
      rows.push_back({{"k", k + 1}, {"mean", m[k].mean}, {"std_error", m[k].std_error}});
    head["moments"] = std::move(rows);
    out << head.dump() << '\n';
    return kExitOk;
  }
  const auto b = parse_doubles(o.bins);
  if (b.size() != 3) throw UsageError("--bins must be lo,hi,width");
  const auto s = empirical_spectrum(spec, o.trials, o.gram, o.workers);
  const auto h = histogram(s, b[0], b[1], b[2]);
  if (o.format == "csv") {
    out << "bin_center,density\n";
    for (std::size_t i = 0; i < h.density.size(); ++i)
      out << format_double(h.center(i)) << ',' << format_double(h.density[i]) << '\n';
    return kExitOk;
  }
  head["eigenvalue_count"] = s.eigenvalues.size();
  head["min_eigenvalue"] = s.eigenvalues.front();
  head["max_eigenvalue"] = s.eigenvalues.back();
  head["histogram"] = {{"lo", h.lo}, {"width", h.width}, {"density", h.density}};
  out << head.dump() << '\n';
  return kExitOk;
}

int cmd_validate(const Opts& o, json head, std::ostream& out) {
  SuiteParams p;
  p.n = o.suite_n;
  p.trials = o.suite_trials;
  p.seed = o.seed;
  p.workers = o.workers;
  const std::vector<std::string> names =
      o.suite == "all" ? suite_names() : std::vector<std::string>{o.suite};
  json reports = json::array();
  bool ok = true;
  for (const auto& name : names) {
    const auto r = validate_suite(name, p);
    ok = ok && r.passed();
    reports.push_back(r.to_json());
  }
  head["passed"] = ok;
  head["suites"] = std::move(reports);
  out << head.dump() << '\n';
  return ok ? kExitOk : kExitValidation;
}

json error_json(const std::string& kind, const std::string& message) {
  return {{"error", {{"kind", kind}, {"message", message}}}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Parser p = build();
  try {
    std::vector<std::string> merged = args;
    // Resolve --input before parsing so that config values can satisfy
    // required options.
    if (const auto path = input_path(args); path && !args.empty()) {
      CLI::App* sub = p.app->get_subcommand_no_throw(args.front());
      if (sub == nullptr) throw UsageError("--input needs a subcommand first");
      const json doc = load_json_file(*path);
      if (doc.contains("command") && doc.at("command") != sub->get_name())
        throw UsageError("--input: file holds a '" + doc.at("command").get<std::string>() +
                         "' run, not '" + sub->get_name() + "'");
      if (!doc.contains("config")) throw UsageError("--input: no \"config\" object in " + *path);
      const auto extra = config_args(*sub, doc.at("config"), args);
      merged.insert(merged.end(), extra.begin(), extra.end());
    }
    try {
      parse(*p.app, merged);
    } catch (const CLI::CallForHelp& e) {
      return p.app->exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
      return p.app->exit(e, out, err);
    }
    CLI::App* sub = active(*p.app);
    const Opts& o = *p.o;
    const std::string name = sub->get_name();
    json head = {{"command", name}, {"config", echo_config(*sub)}};
    if (name == "partitions") return cmd_partitions(o, std::move(head), out);
    if (name == "cumulants") return cmd_cumulants(o, std::move(head), out);
    if (name == "transform") return cmd_transform(o, std::move(head), out);
    if (name == "convolve") return cmd_convolve(o, std::move(head), out);
    if (name == "detequiv") return cmd_detequiv(o, std::move(head), out);
    if (name == "capacity") return cmd_capacity(o, std::move(head), out);
    if (name == "mc") return cmd_mc(o, std::move(head), out);
    return cmd_validate(o, std::move(head), out);
  } catch (const CLI::ParseError& e) {
    err << error_json("usage", e.what()).dump() << '\n';
  } catch (const UsageError& e) {
    err << error_json("usage", e.what()).dump() << '\n';
  } catch (const ConvergenceError& e) {
    json j = error_json(std::string(to_string(e.code())), e.what());
    j["error"]["last_residual"] = e.last_residual();
    err << j.dump() << '\n';
  } catch (const Error& e) {
    err << error_json(std::string(to_string(e.code())), e.what()).dump() << '\n';
  } catch (const json::exception& e) {
    err << error_json("usage", e.what()).dump() << '\n';
  }
  return kExitUsage;
}

}  // namespace freespec::cli
