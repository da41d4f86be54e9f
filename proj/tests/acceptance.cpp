// Acceptance run: one PASS/FAIL line per criterion, thresholds and scale
// parameters read from the frozen tolerance fixture given as argv[1].

#include "cli/suites.hpp"

#include "freespec/moments.hpp"
#include "freespec/partitions.hpp"
#include "freespec/transforms.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace freespec;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed = true;
  std::string detail;
};

void note(Outcome& o, bool ok, const std::string& what) {
  o.passed = o.passed && ok;
  if (!ok) o.detail += (o.detail.empty() ? "" : "; ") + what;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
  return worst;
}

Outcome combinatorics(const json& f) {
  Outcome o;
  const auto t0 = Clock::now();
  const int max_n = f.at("nc_max_n");
  for (int n = 1; n <= max_n; ++n) {
    const auto c = count_partitions(n, PartitionClass::NonCrossing);
    note(o, c == static_cast<std::uint64_t>(catalan(n)), "|NC(" + std::to_string(n) + ")|");
    note(o, enumerate(n, PartitionClass::NonCrossing).size() == c, "enumerate NC(" + std::to_string(n) + ")");
  }
  const int max_k = f.at("ncpair_max_k");
  for (int k = 1; k <= max_k; ++k) {
    const auto c = count_partitions(2 * k, PartitionClass::NonCrossingPairings);
    note(o, c == static_cast<std::uint64_t>(catalan(k)), "|NC2(" + std::to_string(2 * k) + ")|");
    note(o, enumerate(2 * k, PartitionClass::NonCrossingPairings).size() == c,
         "enumerate NC2(" + std::to_string(2 * k) + ")");
  }
  const double secs = seconds_since(t0);
  note(o, secs < f.at("runtime_s").get<double>(), "runtime " + fmt(secs) + " s");
  if (o.passed) o.detail = "runtime " + fmt(secs) + " s";
  return o;
}

Outcome roundtrip(const json& f) {
  Outcome o;
  std::mt19937_64 rng(f.at("seed").get<std::uint64_t>());
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int len = f.at("length");
  auto draw = [&] {
    std::vector<double> v(static_cast<std::size_t>(len));
    for (auto& x : v) x = u(rng);
    return v;
  };
  // Moment inputs are moments of random atomic probability measures on
  // [-1, 1]; cumulant inputs are unconstrained.
  auto draw_moments = [&] {
    const int atoms = std::uniform_int_distribution<int>(1, f.at("max_atoms").get<int>())(rng);
    std::vector<double> x(static_cast<std::size_t>(atoms)), p(x.size());
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = u(rng), p[i] = 0.5 * (u(rng) + 1.0), total += p[i];
    std::vector<double> m(static_cast<std::size_t>(len), 0.0);
    for (std::size_t n = 1; n <= m.size(); ++n)
      for (std::size_t i = 0; i < x.size(); ++i) m[n - 1] += p[i] / total * std::pow(x[i], static_cast<double>(n));
    return m;
  };
  double worst = 0.0, paths = 0.0;
  for (int t = 0; t < f.at("sequences").get<int>(); ++t) {
    const auto m = draw_moments();
    const auto k = draw();
    const MomentSequence ms(m);
    worst = std::max(worst, max_rel(free_moments_from_cumulants(free_cumulants_from_moments(ms)).values(), m));
    worst = std::max(worst, max_rel(free_cumulants_from_moments(
                                        free_moments_from_cumulants(CumulantSequence(CumulantKind::Free, k)))
                                        .values(),
                                    k));
    worst = std::max(worst, max_rel(classical_moments_from_cumulants(classical_cumulants_from_moments(ms)).values(), m));
    worst = std::max(worst, max_rel(classical_cumulants_from_moments(classical_moments_from_cumulants(
                                        CumulantSequence(CumulantKind::Classical, k)))
                                        .values(),
                                    k));
    paths = std::max(paths, max_rel(free_cumulants_from_moments(ms, FreeCumulantPath::Inductive).values(),
                                    free_cumulants_from_moments(ms, FreeCumulantPath::Mobius).values()));
  }
  note(o, worst <= f.at("max_rel_err").get<double>(), "roundtrip " + fmt(worst));
  note(o, paths <= f.at("path_agreement").get<double>(), "paths " + fmt(paths));
  if (o.passed) o.detail = "roundtrip " + fmt(worst) + ", paths " + fmt(paths);
  return o;
}

Outcome semicircle_moments(const json& f) {
  Outcome o;
  const int max_k = f.at("max_k");
  for (double s2 : f.at("variances").get<std::vector<double>>()) {
    std::vector<double> kappa(static_cast<std::size_t>(2 * max_k), 0.0);
    kappa[1] = s2;
    const auto m = free_moments_from_cumulants(CumulantSequence(CumulantKind::Free, kappa)).values();
    for (int k = 1; k <= max_k; ++k) {
      const double exact = std::pow(s2, k) * static_cast<double>(catalan(k));
      note(o, m[static_cast<std::size_t>(2 * k - 1)] == exact, "m_" + std::to_string(2 * k) + " at " + fmt(s2));
      note(o, m[static_cast<std::size_t>(2 * k - 2)] == 0.0, "m_" + std::to_string(2 * k - 1) + " at " + fmt(s2));
    }
  }
  if (o.passed) o.detail = "exact";
  return o;
}

Outcome suite(const std::string& name, const json& f) {
  Outcome o;
  const auto& p = f.at("params");
  cli::SuiteParams sp;
  sp.n = p.at("n");
  sp.trials = p.at("trials");
  sp.seed = p.at("seed");
  const auto t0 = Clock::now();
  const auto report = cli::validate_suite(name, sp);
  const double secs = seconds_since(t0);
  std::string summary;
  for (const auto& [check, bound] : f.at("checks").items()) {
    const auto it = std::find_if(report.checks.begin(), report.checks.end(),
                                 [&](const cli::Check& c) { return c.name == check; });
    if (it == report.checks.end()) {
      note(o, false, "missing check '" + check + "'");
      continue;
    }
    const bool ok = std::isfinite(it->observed) &&
                    (bound.contains("max") ? it->observed <= bound.at("max").get<double>()
                                           : it->observed >= bound.at("min").get<double>());
    note(o, ok, check + " = " + fmt(it->observed));
    summary += (summary.empty() ? "" : ", ") + check + " = " + fmt(it->observed);
  }
  if (f.contains("runtime_s"))
    note(o, secs < f.at("runtime_s").get<double>(), "runtime " + fmt(secs) + " s");
  if (o.passed) o.detail = summary + ", runtime " + fmt(secs) + " s";
  return o;
}

Outcome inversion(const json& f) {
  Outcome o;
  const auto G = [](Complex z) { return semicircle_cauchy(z); };

  const auto& dz = f.at("density_zero");
  const double step0 = dz.at("step");
  const auto inv0 = stieltjes_invert(G, GridSpec{-3.0, 3.0, step0}, dz.at("tau").get<double>());
  const auto& d0 = inv0.density.density();
  const double at0 = d0.values[static_cast<std::size_t>(std::lround(3.0 / step0))];
  note(o, std::abs(at0 - 1.0 / std::numbers::pi) <= dz.at("tol").get<double>(), "density(0) = " + fmt(at0));

  const auto& fi = f.at("fidelity");
  const double tau = fi.at("tau"), step = fi.at("step");
  const auto inv = stieltjes_invert(G, GridSpec{-4.0, 4.0, step}, tau);
  const auto& d = inv.density.density();
  double l1 = 0.0;
  for (std::size_t i = 0; i < d.values.size(); ++i) l1 += std::abs(d.values[i] - semicircle_density(d.t(i), 1.0)) * step;
  const double l1_max = fi.at("l1_tau_factor").get<double>() * tau + fi.at("l1_step_factor").get<double>() * step;
  note(o, l1 <= l1_max, "L1 = " + fmt(l1));

  const auto& lz = f.at("lorentzian");
  const double h = lz.at("half_window");
  const auto atom = stieltjes_invert([](Complex z) { return 1.0 / z; },
                                     GridSpec{-5.0, 5.0, lz.at("step").get<double>()}, lz.at("tau").get<double>());
  const double mass = atom.density.density().mass_between(-h, h);
  note(o, mass >= lz.at("min_mass").get<double>(), "Lorentzian mass = " + fmt(mass));

  if (o.passed)
    o.detail = "density(0) = " + fmt(at0) + ", L1 = " + fmt(l1) + " (<= " + fmt(l1_max) + "), mass = " + fmt(mass);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: acceptance <tolerances.json>\n";
    return 1;
  }
  std::ifstream in(argv[1]);
  if (!in) {
    std::cerr << "cannot open " << argv[1] << "\n";
    return 1;
  }
  const json fx = json::parse(in);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"combinatorics exactness", [&] { return combinatorics(fx.at("combinatorics")); }},
      {"moment-cumulant roundtrips", [&] { return roundtrip(fx.at("roundtrip")); }},
      {"semicircle moments", [&] { return semicircle_moments(fx.at("semicircle_moments")); }},
      {"Wigner law", [&] { return suite("wigner", fx.at("wigner")); }},
      {"asymptotic freeness", [&] { return suite("freeness", fx.at("freeness")); }},
      {"subordination convolution", [&] { return suite("convolution", fx.at("convolution")); }},
      {"deterministic equivalents", [&] { return suite("detequiv", fx.at("detequiv")); }},
      {"capacity pipeline", [&] { return suite("capacity", fx.at("capacity")); }},
      {"Stieltjes inversion", [&] { return inversion(fx.at("inversion")); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.passed ? 0 : 1;
    std::cout << (o.passed ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
