#include "freespec/error.hpp"
#include "freespec/moments.hpp"
#include "freespec/partitions.hpp"
#include "freespec/transforms.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace freespec;

namespace {

const Complex I(0.0, 1.0);

Complex atoms_oracle(const std::vector<double>& t, const std::vector<double>& w, Complex z) {
  Complex g = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) g += w[i] / (z - t[i]);
  return g;
}

std::vector<double> semicircle_moments(int L) {
  std::vector<double> m(static_cast<std::size_t>(L), 0.0);
  for (int n = 2; n <= L; n += 2) m[static_cast<std::size_t>(n - 1)] = static_cast<double>(catalan(n / 2));
  return m;
}

SpectralMeasure random_atoms(std::mt19937_64& rng, double lo, double hi, int k) {
  std::uniform_real_distribution<double> u(lo, hi), wu(0.1, 1.0);
  std::vector<double> t(static_cast<std::size_t>(k)), w(static_cast<std::size_t>(k));
  for (auto& x : t) x = u(rng);
  std::sort(t.begin(), t.end());
  double s = 0.0;
  for (auto& x : w) s += (x = wu(rng));
  for (auto& x : w) x /= s;
  return SpectralMeasure::atoms(t, w);
}

}  // namespace

TEST(Cauchy, PointMass) {
  EXPECT_NEAR(std::abs(cauchy_from_measure(SpectralMeasure::single_atom(0.0), I) - (-I)), 0.0, 1e-15);
}

TEST(Cauchy, SemicircleGridQuadrature) {
  // Trapezoid error near the square-root edges scales like step^1.5:
  // 1.7e-6 at step 1e-3.
  const auto nu = semicircle_grid(1.0, 2e-4);
  const Complex expected = I * (1.0 - std::sqrt(5.0)) / 2.0;
  EXPECT_LE(std::abs(cauchy_from_measure(nu, I) - expected), 1e-6);
}

TEST(Cauchy, TwoAtoms) {
  const auto nu = SpectralMeasure::atoms({-1.0, 1.0}, {0.5, 0.5});
  const Complex z = 2.0 * I;
  EXPECT_NEAR(std::abs(cauchy_from_measure(nu, z) - atoms_oracle({-1, 1}, {0.5, 0.5}, z)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(cauchy_from_measure(nu, z) - Complex(0.0, -0.4)), 0.0, 1e-15);
  EXPECT_THROW(cauchy_from_measure(nu, Complex(1.0, 0.0)), Error);
}

TEST(Cauchy, HalfPlaneMapping) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> re(-5.0, 5.0), lg(std::log(0.01), std::log(10.0));
  for (int t = 0; t < 200; ++t) {
    const auto nu = t % 2 == 0 ? random_atoms(rng, -3.0, 3.0, 1 + t % 5) : semicircle_grid(0.5 + 0.01 * t, 1e-2);
    const Complex z(re(rng), std::exp(lg(rng)));
    EXPECT_LT(cauchy_from_measure(nu, z).imag(), 0.0);
  }
}

TEST(Cauchy, LargeZAsymptotics) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 20; ++t) {
    const auto nu = random_atoms(rng, -2.0, 2.0, 4);
    // centered second moment is not needed: |zG - 1| <= 2 m2 / |z|^2 holds
    // once |z| >> support for the raw second moment.
    for (double r : {10.0, 30.0, 100.0}) {
      const Complex z = std::polar(r, 0.3 + 0.1 * t);
      if (z.imag() <= 0.0) continue;
      EXPECT_LE(std::abs(z * cauchy_from_measure(nu, z) - 1.0),
                2.0 * std::max(nu.moment(2), std::abs(nu.moment(1)) * r) / (r * r));
    }
  }
}

TEST(Cauchy, UniquenessProxy) {
  const auto a = SpectralMeasure::atoms({-1.0, 0.0, 2.0}, {0.2, 0.5, 0.3});
  const auto b = SpectralMeasure::atoms({-1.0, 0.1, 2.0}, {0.2, 0.5, 0.3});
  double worst = 0.0;
  for (Complex z : {Complex(0.0, 0.1), Complex(1.0, 0.5), Complex(-2.0, 1.0), Complex(0.05, 0.05)})
    worst = std::max(worst, std::abs(cauchy_from_measure(a, z) - cauchy_from_measure(b, z)));
  EXPECT_GE(worst, 1e-3);
}

TEST(Cauchy, DerivativeMatchesDifferences) {
  const auto ct = cauchy_transform(SpectralMeasure::atoms({-1.0, 0.5}, {0.4, 0.6}));
  const Complex z(0.2, 0.3);
  const double h = 1e-6;
  const Complex fd = (ct(z + h) - ct(z - h)) / (2.0 * h);
  EXPECT_LE(std::abs(ct.derivative_at(z) - fd), 1e-6);
  EXPECT_DOUBLE_EQ(ct.support_min, -1.0);
  EXPECT_DOUBLE_EQ(ct.support_max, 0.5);
}

TEST(Semicircle, ClosedFormAndBranch) {
  EXPECT_NEAR(semicircle_cauchy(3.0).real(), (3.0 - std::sqrt(5.0)) / 2.0, 1e-15);
  EXPECT_NEAR(std::abs(semicircle_cauchy(I) - I * (1.0 - std::sqrt(5.0)) / 2.0), 0.0, 1e-15);
  EXPECT_LE(std::abs(semicircle_cauchy(Complex(0.0, 100.0)) - 1.0 / Complex(0.0, 100.0)), 3e-4);
  EXPECT_LE(std::abs(semicircle_cauchy(-100.0) - 1.0 / -100.0), 3e-4);
  // sigma2 G^2 - z G + 1 = 0 with Im G < 0 across the half plane.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> re(-6.0, 6.0), im(1e-4, 6.0);
  for (int t = 0; t < 500; ++t) {
    const Complex z(re(rng), im(rng));
    const double s2 = 0.5 + (t % 4);
    const Complex g = semicircle_cauchy(z, s2);
    EXPECT_LE(std::abs(s2 * g * g - z * g + 1.0), 1e-12 * std::max(1.0, std::abs(z)));
    EXPECT_LT(g.imag(), 0.0);
  }
  EXPECT_THROW(semicircle_cauchy(Complex(0.0, -1.0)), Error);
  EXPECT_THROW(semicircle_cauchy(1.0), Error);
  EXPECT_THROW(semicircle_cauchy(I, 0.0), Error);
}

TEST(MomentSeries, SemicircleTruncation) {
  // The omitted tail at L = 10 is sum_{k >= 6} C_k / 4^(2k+1) ~ 2.5e-6,
  // so the comparison is made against that tail rather than a fixed 1e-6.
  const auto m10 = semicircle_moments(10);
  const auto s10 = cauchy_from_moments(MomentSequence(m10), 4.0);
  double tail = 0.0;
  double c = 1.0;  // C_k / 16^k, built incrementally
  for (int k = 1; k <= 200; ++k) {
    c *= 2.0 * (2.0 * k - 1.0) / (k + 1.0) / 16.0;
    if (k >= 6) tail += c / 4.0;
  }
  const double err10 = std::abs(s10.value - semicircle_cauchy(4.0));
  EXPECT_NEAR(err10, tail, 1e-12);
  EXPECT_LE(err10, s10.truncation_bound);
  const auto s12 = cauchy_from_moments(MomentSequence(semicircle_moments(12)), 4.0);
  EXPECT_LE(std::abs(s12.value - semicircle_cauchy(4.0)), 1e-6);
  EXPECT_DOUBLE_EQ(s10.radius, 2.0 * std::pow(42.0, 0.1));
}

TEST(MomentSeries, TrivialCases) {
  const auto z = Complex(1.5, 0.5);
  EXPECT_NEAR(std::abs(cauchy_from_moments(MomentSequence({0, 0, 0}), z).value - 1.0 / z), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(cauchy_from_moments(std::span<const double>{}, 2.0 * I).value - Complex(0.0, -0.5)), 0.0,
              1e-15);
  EXPECT_THROW(cauchy_from_moments(MomentSequence(semicircle_moments(6)), 1.0), Error);
}

TEST(RTransform, Examples) {
  const CumulantSequence sc(CumulantKind::Free, {0.0, 2.0, 0.0, 0.0});
  for (Complex z : {Complex(0.1, 0.0), Complex(0.2, 0.1)}) EXPECT_NEAR(std::abs(r_transform(sc, z) - 2.0 * z), 0.0, 1e-15);
  const CumulantSequence shift(CumulantKind::Free, {0.7, 0.0, 0.0});
  EXPECT_NEAR(std::abs(r_transform(shift, Complex(0.3, 0.2)) - 0.7), 0.0, 1e-15);
  const CumulantSequence one(CumulantKind::Free, {0.0, 1.0});
  const Complex g = semicircle_cauchy(4.0);
  EXPECT_NEAR(std::abs(r_transform(one, g) + 1.0 / g - 4.0), 0.0, 1e-6);
  EXPECT_THROW(r_transform(CumulantSequence(CumulantKind::Classical, {0, 1}), 0.1), Error);
  EXPECT_DOUBLE_EQ(r_transform_radius(sc), 1.0 / std::sqrt(2.0));
  EXPECT_TRUE(std::isinf(r_transform_radius(CumulantSequence(CumulantKind::Free, {0.0, 0.0}))));
}

TEST(SeriesIdentity, Pairs) {
  const std::vector<Complex> zs{Complex(0.05, 0.0), Complex(0.0, 0.05), std::polar(0.05, 2.0)};
  const std::vector<double> kappa{0, 1, 0, 0, 0, 0, 0, 0};
  const auto m = free_moments_from_cumulants(CumulantSequence(CumulantKind::Free, kappa)).values();
  EXPECT_LE(series_identity_check({m, kappa}, zs), 1e-8);
  const std::vector<double> zero(8, 0.0);
  EXPECT_EQ(series_identity_check({zero, zero}, zs), 0.0);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<Complex> small{Complex(0.02, 0.0), Complex(0.0, 0.02), std::polar(0.02, -1.0)};
  for (int t = 0; t < 20; ++t) {
    std::vector<double> k(8);
    for (auto& x : k) x = u(rng);
    const auto mm = free_moments_from_cumulants(CumulantSequence(CumulantKind::Free, k)).values();
    EXPECT_LE(series_identity_check({mm, k}, small), 1e-8);
  }
  EXPECT_THROW(series_identity_check({m, {0, 1}}, zs), Error);
}

TEST(Inversion, SemicircleRecovered) {
  const GridSpec grid{-3.0, 3.0, 0.01};
  const auto inv = stieltjes_invert([](Complex z) { return semicircle_cauchy(z); }, grid, 1e-3);
  const auto& d = inv.density.density();
  EXPECT_NEAR(d.values[300], 1.0 / std::numbers::pi, 0.01);
  EXPECT_LE(d.values[50], 0.01);
  EXPECT_LE(d.values[550], 0.01);
  EXPECT_NEAR(inv.raw_mass, 1.0, 0.01);
  EXPECT_NEAR(d.trapezoid_mass(), 1.0, 1e-12);
}

TEST(Inversion, FidelityOnSmoothDensity) {
  for (double s2 : {0.5, 1.0, 2.0}) {
    const auto nu = semicircle_grid(s2, 2e-3);
    const double tau = 1e-2;
    const GridSpec grid{-4.0, 4.0, 0.01};
    const auto inv = stieltjes_invert([&](Complex z) { return cauchy_from_measure(nu, z); }, grid, tau);
    const auto& d = inv.density.density();
    double l1 = 0.0;
    for (std::size_t i = 0; i < d.values.size(); ++i) l1 += std::abs(d.values[i] - semicircle_density(d.t(i), s2)) * grid.step;
    EXPECT_LE(l1, 5.0 * tau + 2.0 * grid.step) << s2;
  }
}

TEST(Inversion, PointMassLorentzian) {
  const double tau = 1e-2;
  const auto inv = stieltjes_invert([](Complex z) { return 1.0 / z; }, GridSpec{-5.0, 5.0, 1e-3}, tau);
  const double mass = inv.density.density().mass_between(-0.5, 0.5);
  // Poisson kernel mass of [-0.5, 0.5] is (2/pi) atan(0.5/tau), rescaled by
  // the grid mass (2/pi) atan(5/tau).
  const double expected = std::atan(0.5 / tau) / std::atan(5.0 / tau);
  EXPECT_NEAR(mass, expected, 1e-4);
  EXPECT_GE(mass, 0.96);
}

TEST(Inversion, Errors) {
  const auto g = [](Complex z) { return semicircle_cauchy(z); };
  EXPECT_THROW(stieltjes_invert(g, GridSpec{-3.0, 3.0, 0.01}, 0.0), Error);
  try {
    stieltjes_invert([](Complex z) { return -1.0 / z; }, GridSpec{-1.0, 1.0, 0.01}, 1e-2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InconsistentTransform);
  }
  const std::vector<Complex> few(3, Complex(0.0, -1.0));
  EXPECT_THROW(stieltjes_invert_samples(few, GridSpec{-1.0, 1.0, 0.5}, 1e-2), Error);
}

TEST(MutualInformation, AtomsClosedForm) {
  for (double lam : {0.0, 0.3, 1.0, 7.0})
    for (double sigma : {0.2, 1.0, 3.0}) {
      const auto nu = SpectralMeasure::single_atom(lam);
      const double mi =
          mutual_information(cauchy_transform(nu).value, sigma, default_omega_max(nu.moment(1)));
      EXPECT_NEAR(mi, std::log1p(lam / sigma), 1e-6) << lam << " " << sigma;
    }
}

TEST(MutualInformation, RandomAtomicIdentity) {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 30; ++t) {
    const auto nu = random_atoms(rng, 0.0, 5.0, 1 + t % 6);
    const double sigma = 0.1 + 0.1 * t;
    const auto& a = nu.atomic();
    double exact = 0.0;
    for (std::size_t i = 0; i < a.support.size(); ++i) exact += a.weights[i] * std::log1p(a.support[i] / sigma);
    EXPECT_NEAR(mutual_information(cauchy_transform(nu).value, sigma, default_omega_max(nu.moment(1))), exact, 1e-6);
  }
}

TEST(MutualInformation, Eigenvalues) {
  const std::vector<double> one{1.0}, zeros{0.0, 0.0}, two{1.0, 3.0};
  EXPECT_DOUBLE_EQ(mutual_info_from_eigs(one, 1.0), std::log(2.0));
  EXPECT_DOUBLE_EQ(mutual_info_from_eigs(zeros, 1.0), 0.0);
  EXPECT_NEAR(mutual_info_from_eigs(two, 1.0), 1.5 * std::log(2.0), 1e-15);
  EXPECT_THROW(mutual_info_from_eigs(one, 0.0), Error);
  EXPECT_THROW(mutual_info_from_eigs(std::vector<double>{-1.0}, 1.0), Error);
  EXPECT_DOUBLE_EQ(default_omega_max(2.0), 3e4);
}

TEST(MutualInformation, RejectsMeasureOffHalfLine) {
  const auto nu = SpectralMeasure::atoms({-1.0, 1.0}, {0.5, 0.5});
  EXPECT_THROW(mutual_information(cauchy_transform(nu).value, 0.5, 1e4), Error);
  EXPECT_THROW(mutual_information(cauchy_transform(nu).value, 0.5, 0.1), Error);
}
