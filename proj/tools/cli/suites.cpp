#include "cli/suites.hpp"

#include "cli/io.hpp"

#include "freespec/convolution.hpp"
#include "freespec/deteq.hpp"
#include "freespec/parallel.hpp"
#include "freespec/rmt.hpp"
#include "freespec/transforms.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace freespec::cli {

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

nlohmann::json SuiteReport::to_json() const {
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : checks)
    cs.push_back({{"name", c.name},
                  {"observed", c.observed},
                  {"threshold", c.threshold},
                  {"comparison", c.at_least ? ">=" : "<="},
                  {"passed", c.passed}});
  return {{"suite", suite}, {"n", n}, {"trials", trials}, {"seed", seed},
          {"passed", passed()}, {"checks", std::move(cs)}};
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"wigner", "freeness", "convolution", "detequiv",
                                              "capacity"};
  return names;
}

namespace {

void add(SuiteReport& r, std::string name, double observed, double threshold,
         bool at_least = false) {
  const bool ok = std::isfinite(observed) && (at_least ? observed >= threshold : observed <= threshold);
  r.checks.push_back({std::move(name), observed, threshold, at_least, ok});
}

// Semicircle distribution function for variance 1.
double semicircle_cdf(double t) {
  if (t <= -2.0) return 0.0;
  if (t >= 2.0) return 1.0;
  return 0.5 + t * std::sqrt(4.0 - t * t) / (4.0 * std::numbers::pi) +
         std::asin(0.5 * t) / std::numbers::pi;
}

CMatrix alternating_signs(int n) {
  CMatrix A = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) A(i, i) = (i % 2 == 0) ? 1.0 : -1.0;
  return A;
}

void wigner(SuiteReport& r, const SuiteParams& p) {
  EnsembleSpec g;
  g.n = r.n;
  g.seed = r.seed;
  const auto m = empirical_moments(g, 6, r.trials, p.workers);
  add(r, "|E tr X^2 - 1|", std::abs(m[1].mean - 1.0), 0.02);
  add(r, "|E tr X^3|", std::abs(m[2].mean), 0.05);
  add(r, "|E tr X^4 - 2|", std::abs(m[3].mean - 2.0), 0.05);
  add(r, "|E tr X^6 - 5|", std::abs(m[5].mean - 5.0), 0.1);

  const auto spec = empirical_spectrum(g, std::min(r.trials, 10), false, p.workers);
  const auto h = histogram(spec, -2.5, 2.5, 0.05);
  double l1 = 0.0;
  for (std::size_t i = 0; i < h.density.size(); ++i) {
    const double lo = h.lo + static_cast<double>(i) * h.width;
    l1 += std::abs(h.density[i] * h.width - (semicircle_cdf(lo + h.width) - semicircle_cdf(lo)));
  }
  add(r, "histogram L1 to semicircle", l1, 0.05);
  const auto outside = std::count_if(spec.eigenvalues.begin(), spec.eigenvalues.end(),
                                     [](double l) { return std::abs(l) > 2.1; });
  add(r, "fraction outside [-2.1, 2.1]",
      static_cast<double>(outside) / static_cast<double>(spec.eigenvalues.size()), 0.005);
}

void freeness(SuiteReport& r, const SuiteParams& p) {
  EnsembleSpec x;
  x.n = r.n;
  x.seed = r.seed;
  EnsembleSpec y = x;
  y.seed = splitmix64(r.seed);
  const std::vector<MatrixSource> xy{x, y};
  const auto xyxy = mixed_trace(xy, {{0}, {1}, {0}, {1}}, r.trials, p.workers);
  add(r, "|E tr XYXY|", std::abs(xyxy.mean), 0.05);
  const auto x2y2 = mixed_trace(xy, {{0, 2}, {1, 2}}, r.trials, p.workers);
  add(r, "|E tr X^2Y^2 - 1|", std::abs(x2y2.mean - 1.0), 0.05);

  CMatrix B = CMatrix::Zero(r.n, r.n);
  for (int i = 0; i < r.n; ++i) B(i, i) = static_cast<double>(i + 1) / r.n;
  const std::vector<MatrixSource> pair{alternating_signs(r.n),
                                       HaarConjugated{B, splitmix64(r.seed + 1)}};
  const auto haar = freeness_report(pair, 4, r.trials, 0.05, p.workers);
  add(r, "max mixed cumulant {A, UBU*}", haar.report.max_abs_mixed_cumulant, 0.05);

  const auto self = freeness_report({x, x}, 4, 1, 0.05, p.workers);
  add(r, "max mixed cumulant {X, X} (negative control)", self.report.max_abs_mixed_cumulant,
      5.0 * 0.05, true);
}

void convolution(SuiteReport& r, const SuiteParams& p) {
  const auto sc = semicircle_transform(1.0);
  const auto res = free_convolve(sc, sc, GridSpec{-5.0, 5.0, 0.01}, 1e-3, {}, p.workers);
  const auto& d = res.density.density();
  double linf = 0.0;
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    const double t = d.t(i);
    if (std::abs(t) <= 2.7) linf = std::max(linf, std::abs(d.values[i] - semicircle_density(t, 2.0)));
  }
  add(r, "semicircle(1)+semicircle(1) Linf to semicircle(2)", linf, 0.01);
  add(r, "max subordination residual", res.max_residual, 1e-9);

  const auto bern = SpectralMeasure::atoms({-1.0, 1.0}, {0.5, 0.5});
  const auto bb = free_convolve(bern, bern, GridSpec{-3.0, 3.0, 1e-3}, 1e-3, {}, p.workers);
  const CMatrix A = alternating_signs(r.n);
  std::vector<std::vector<double>> per(static_cast<std::size_t>(r.trials));
  parallel_for(per.size(), p.workers, [&](std::size_t t) {
    const CMatrix U = haar_unitary(r.n, trial_seed(r.seed, t));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(A + U * A * U.adjoint(), Eigen::EigenvaluesOnly);
    per[t].assign(es.eigenvalues().data(), es.eigenvalues().data() + r.n);
  });
  EmpiricalSpectrum s;
  s.trials = r.trials;
  s.n = r.n;
  for (const auto& v : per) s.eigenvalues.insert(s.eigenvalues.end(), v.begin(), v.end());
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
  const auto h = histogram(s, -2.5, 2.5, 0.05);
  double l1 = 0.0;
  for (std::size_t i = 0; i < h.density.size(); ++i) {
    const double lo = h.lo + static_cast<double>(i) * h.width;
    l1 += std::abs(h.density[i] * h.width - bb.density.density().mass_between(lo, lo + h.width));
  }
  add(r, "Bernoulli+Bernoulli histogram L1 to A+UBU*", l1, 0.05);
}

void detequiv(SuiteReport& r, const SuiteParams& p) {
  {
    const int n = 8;
    CMatrix A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        A(i, j) = i == j ? Complex(0.1 * i, 0.0) : Complex(0.05 / (1 + i + j), 0.02 * (i - j));
    const VarianceProfile zero(Eigen::MatrixXd::Zero(n, n));
    const Complex z(0.0, 2.0);
    const auto s = solve_hermitian(zero, A, z);
    const CMatrix exact = (z * CMatrix::Identity(n, n) - A).inverse();
    add(r, "sigma=0: |G - (z - A)^-1|max", (s.G - exact).cwiseAbs().maxCoeff(), 1e-12);
    add(r, "sigma=0: iterations", s.iterations, 1.0);
  }
  {
    const auto vp = VarianceProfile::constant(64, 64);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      const Complex z(-3.0 + 6.0 * k / 9.0, 0.1 + 0.2 * (k % 3));
      worst = std::max(worst, std::abs(solve_hermitian(vp, {}, z).g - semicircle_cauchy(z)));
    }
    add(r, "constant profile vs semicircle, 10 points", worst, 1e-7);
  }
  {
    const double s2 = 2.0;
    const Complex a(0.3, 0.0), z(0.7, 0.4);
    const auto sol = solve_hermitian(VarianceProfile(Eigen::MatrixXd::Constant(1, 1, s2)),
                                     CMatrix::Constant(1, 1, a), z);
    const Complex w = z - a;
    const Complex root = std::sqrt(w * w - 4.0 * s2);
    Complex g = (w - root) / (2.0 * s2);
    if (g.imag() > 0.0) g = (w + root) / (2.0 * s2);
    add(r, "N=1 scalar quadratic", std::abs(sol.g - g), 1e-10);
  }
  {
    const auto vp = VarianceProfile::banded(r.n, 5);
    const Complex z(0.5, 0.1);
    const auto de = solve_hermitian(vp, {}, z);
    EnsembleSpec e;
    e.kind = EnsembleKind::ProfileGaussian;
    e.profile = vp;
    e.hermitian = true;
    e.seed = r.seed;
    const std::vector<Complex> zs{z};
    const auto mc = empirical_cauchy(e, zs, r.trials, false, p.workers);
    add(r, "banded profile vs Monte Carlo", std::abs(de.g - mc[0].mean), 2e-2);
  }
  {
    const int n = 512;
    const auto vp = VarianceProfile::constant(n, n);
    const std::vector<Complex> zs{{-1.0, 0.0}, {0.5, 0.1}, {1.0, 0.1}, {2.0, 0.1}, {3.0, 0.1}};
    EnsembleSpec e;
    e.kind = EnsembleKind::ComplexIID;
    e.n = n;
    e.seed = splitmix64(r.seed);
    const auto mc = empirical_cauchy(e, zs, 16, true, p.workers);
    double worst = 0.0;
    for (std::size_t k = 0; k < zs.size(); ++k)
      worst = std::max(worst, std::abs(solve_rectangular(vp, {}, zs[k]).g - mc[k].mean));
    add(r, "rectangular N=M=512 vs Monte Carlo Gram", worst, 1e-2);
  }
}

void capacity_suite(SuiteReport& r, const SuiteParams& p) {
  {
    const std::vector<double> lam{0.5, 1.0, 3.0}, w{0.2, 0.5, 0.3};
    const double sigma = 0.7;
    const auto nu = SpectralMeasure::atoms(lam, w);
    double m1 = 0.0, exact = 0.0;
    for (std::size_t i = 0; i < lam.size(); ++i) {
      m1 += w[i] * lam[i];
      exact += w[i] * std::log1p(lam[i] / sigma);
    }
    const double mi = mutual_information(cauchy_transform(nu), sigma, default_omega_max(m1));
    add(r, "atomic measure identity", std::abs(mi - exact), 1e-6);
  }
  {
    const VarianceProfile zero(Eigen::MatrixXd::Zero(4, 4));
    const double c = capacity(zero, CMatrix::Identity(4, 4), 1.0);
    add(r, "deterministic channel A=I: |C - log 2|", std::abs(c - std::log(2.0)), 1e-6);
  }
  {
    const auto vp = VarianceProfile::constant(r.n, r.n);
    const double de = capacity(vp, {}, 1.0);
    const auto mc = mc_capacity(vp, {}, 1.0, r.trials, r.seed, p.workers);
    add(r, "flat profile capacity relative error", std::abs(de - mc.mean) / mc.mean, 0.02);
  }
}

}  // namespace

SuiteReport validate_suite(const std::string& name, const SuiteParams& params) {
  struct Defaults {
    int n, trials;
  };
  Defaults d{};
  void (*fn)(SuiteReport&, const SuiteParams&) = nullptr;
  if (name == "wigner") d = {1024, 20}, fn = wigner;
  else if (name == "freeness") d = {1024, 2}, fn = freeness;
  else if (name == "convolution") d = {1024, 8}, fn = convolution;
  else if (name == "detequiv") d = {200, 50}, fn = detequiv;
  else if (name == "capacity") d = {256, 20}, fn = capacity_suite;
  else throw UsageError("unknown suite '" + name + "'");
  if (params.n < 0 || params.trials < 0) throw UsageError("--n and --trials must be >= 0");
  SuiteReport r;
  r.suite = name;
  r.n = params.n > 0 ? params.n : d.n;
  r.trials = params.trials > 0 ? params.trials : d.trials;
  r.seed = params.seed;
  fn(r, params);
  return r;
}

}  // namespace freespec::cli
