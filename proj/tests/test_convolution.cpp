#include "freespec/convolution.hpp"
#include "freespec/error.hpp"
#include "freespec/rmt.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

using namespace freespec;

namespace {

const Complex I(0.0, 1.0);

// Bernoulli(+-1) boxplus itself is the arcsine law on (-2, 2):
// G(z) = 1 / sqrt(z^2 - 4) on the branch with G ~ 1/z.
Complex arcsine_cauchy(Complex z) { return 1.0 / (std::sqrt(z - 2.0) * std::sqrt(z + 2.0)); }

CauchyTransform bernoulli() { return cauchy_transform(SpectralMeasure::atoms({-1.0, 1.0}, {0.5, 0.5})); }

// m_k from the contour integral of z^k G(z) on |z| = R. The lower half
// contributes minus the conjugate of the upper half since G(conj z) =
// conj G(z) and dz flips orientation.
double contour_moment(const CauchyTransform& a, const CauchyTransform& b, int k, double R) {
  const int nodes = 64;
  Complex acc = 0.0;
  for (int j = 0; j < nodes / 2; ++j) {
    const double th = std::numbers::pi * (j + 0.5) / (nodes / 2);
    const Complex z = std::polar(R, th);
    const Complex g = subordination_solve(a, b, z).g;
    const Complex dz = I * z;
    acc += std::pow(z, k) * g * dz - std::conj(std::pow(z, k) * g * dz);
  }
  return (acc * (2.0 * std::numbers::pi / nodes) / (2.0 * std::numbers::pi * I)).real();
}

}  // namespace

TEST(Subordination, SemicircleSum) {
  const auto sc = semicircle_transform(1.0);
  const auto s = subordination_solve(sc, sc, 2.0 * I);
  EXPECT_LE(std::abs(s.g - semicircle_cauchy(2.0 * I, 2.0)), 1e-8);
  EXPECT_LE(std::abs(sc(s.omega_x) - sc(s.omega_y)), 1e-9);
  EXPECT_LE(s.residual, 1e-9);
}

TEST(Subordination, AddingZero) {
  const auto sc = semicircle_transform(1.5);
  const auto zero = cauchy_transform(SpectralMeasure::single_atom(0.0));
  const Complex z(0.4, 0.3);
  const auto s = subordination_solve(sc, zero, z);
  EXPECT_LE(std::abs(s.omega_x - z), 1e-8);
  EXPECT_LE(std::abs(s.g - sc(z)), 1e-9);
}

TEST(Subordination, BernoulliMatchesArcsine) {
  const auto b = bernoulli();
  for (Complex z : {I, Complex(0.5, 0.01), Complex(-1.9, 0.001), Complex(2.5, 0.2), Complex(0.0, 10.0)}) {
    const auto s = subordination_solve(b, b, z);
    EXPECT_LE(std::abs(s.g - arcsine_cauchy(z)), 1e-8) << z;
    EXPECT_LT(s.g.imag(), 0.0);
  }
}

TEST(Subordination, BernoulliMatchesHaarConjugation) {
  const int n = 1024;
  CMatrix A = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) A(i, i) = i % 2 == 0 ? 1.0 : -1.0;
  const auto g = subordination_solve(bernoulli(), bernoulli(), I).g;
  Complex mc = 0.0;
  const int trials = 2;
  for (int t = 0; t < trials; ++t) {
    const CMatrix U = haar_unitary(n, trial_seed(3, static_cast<std::uint64_t>(t)));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(A + U * A * U.adjoint(), Eigen::EigenvaluesOnly);
    for (int i = 0; i < n; ++i) mc += 1.0 / (I - es.eigenvalues()(i));
  }
  mc /= static_cast<double>(n * trials);
  EXPECT_LE(std::abs(g - mc), 5e-3);
}

TEST(Subordination, Errors) {
  const auto sc = semicircle_transform();
  EXPECT_THROW(subordination_solve(sc, sc, Complex(0.5, 0.0)), Error);
  SubordinationOptions o;
  o.max_iter = 1;
  try {
    subordination_solve(bernoulli(), bernoulli(), Complex(0.3, 0.01), o);
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.last_residual(), o.tol);
    EXPECT_FALSE(e.residual_trace().empty());
  }
}

TEST(Subordination, MeanAndVarianceAdd) {
  const auto a = cauchy_transform(SpectralMeasure::atoms({-0.5, 1.0, 2.0}, {0.3, 0.5, 0.2}));
  const auto b = cauchy_transform(SpectralMeasure::atoms({0.0, 3.0}, {0.6, 0.4}));
  const double ma = 0.3 * -0.5 + 0.5 + 0.4, mb = 1.2;
  const double va = 0.3 * 0.25 + 0.5 + 0.8 - ma * ma, vb = 0.4 * 9.0 - mb * mb;
  const double m1 = contour_moment(a, b, 1, 8.0);
  const double m2 = contour_moment(a, b, 2, 8.0);
  EXPECT_NEAR(m1, ma + mb, 1e-4);
  EXPECT_NEAR(m2 - m1 * m1, va + vb, 1e-4);
}

TEST(FreeConvolve, SemicirclePlusSemicircle) {
  const auto sc = semicircle_transform(1.0);
  const auto r = free_convolve(sc, sc, GridSpec{-5.0, 5.0, 0.01}, 1e-3);
  const auto& d = r.density.density();
  double linf = 0.0;
  for (std::size_t i = 0; i < d.values.size(); ++i)
    if (std::abs(d.t(i)) <= 2.7) linf = std::max(linf, std::abs(d.values[i] - semicircle_density(d.t(i), 2.0)));
  EXPECT_LE(linf, 0.01);
  EXPECT_LE(r.max_residual, 1e-9);
  EXPECT_EQ(r.iterations.size(), d.values.size());
}

TEST(FreeConvolve, ShiftByAtom) {
  const double c = 0.75, tau = 1e-3;
  const auto r = free_convolve(semicircle_transform(1.0), cauchy_transform(SpectralMeasure::single_atom(c)),
                               GridSpec{-4.0, 5.0, 0.005}, tau);
  const auto& d = r.density.density();
  double l1 = 0.0;
  for (std::size_t i = 0; i < d.values.size(); ++i)
    l1 += std::abs(d.values[i] - semicircle_density(d.t(i) - c, 1.0)) * d.step;
  EXPECT_LE(l1, 5.0 * tau);
}

TEST(FreeConvolve, Commutes) {
  const auto a = SpectralMeasure::atoms({-1.0, 1.0}, {0.5, 0.5});
  const auto b = SpectralMeasure::atoms({-0.5, 0.0, 2.0}, {0.25, 0.5, 0.25});
  const GridSpec grid{-3.0, 5.0, 0.01};
  const auto ab = free_convolve(a, b, grid, 1e-2);
  const auto ba = free_convolve(b, a, grid, 1e-2);
  const auto& x = ab.density.density().values;
  const auto& y = ba.density.density().values;
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
  EXPECT_LE(worst, 1e-6);
}

TEST(FreeConvolve, BernoulliMomentsMatchRTransform) {
  const auto b = SpectralMeasure::atoms({-1.0, 1.0}, {0.5, 0.5});
  const auto r = free_convolve(b, b, GridSpec{-3.0, 3.0, 1e-3}, 1e-3);
  const auto kb = free_cumulants_from_moments(MomentSequence({0, 1, 0, 1, 0, 1}));
  const auto m = r_transform_convolve(kb, kb).values();
  EXPECT_EQ(m, (std::vector<double>{0, 2, 0, 6, 0, 20}));
  for (int k = 1; k <= 6; ++k) {
    const double grid_m = r.density.moment(k);
    if (k % 2 == 1)
      EXPECT_NEAR(grid_m, 0.0, 1e-6);
    else
      EXPECT_NEAR(grid_m / m[static_cast<std::size_t>(k - 1)], 1.0, 0.01) << k;
  }
}

TEST(FreeConvolve, DeterministicAcrossWorkers) {
  const auto b = SpectralMeasure::atoms({-1.0, 1.0}, {0.5, 0.5});
  const GridSpec grid{-3.0, 3.0, 0.01};
  const auto one = free_convolve(b, b, grid, 1e-3, {}, 1);
  const auto three = free_convolve(b, b, grid, 1e-3, {}, 3);
  EXPECT_EQ(one.density.density().values, three.density.density().values);
  EXPECT_EQ(one.iterations, three.iterations);
}

TEST(FreeConvolve, Errors) {
  const auto sc = semicircle_transform();
  EXPECT_THROW(free_convolve(sc, sc, GridSpec{-2.0, 2.0, 0.01}, 1e-3), Error);
  EXPECT_THROW(free_convolve(sc, sc, GridSpec{-5.0, 5.0, 0.01}, 0.0), Error);
}

TEST(RTransformRoute, Examples) {
  const CumulantSequence sc(CumulantKind::Free, {0, 1, 0, 0, 0, 0});
  EXPECT_EQ(r_transform_convolve(sc, sc).values(), (std::vector<double>{0, 2, 0, 8, 0, 40}));
  const CumulantSequence x(CumulantKind::Free, {0.3, 1.2, -0.4, 0.5});
  const CumulantSequence zero(CumulantKind::Free, {0, 0, 0, 0});
  EXPECT_EQ(r_transform_convolve(x, zero).values(), free_moments_from_cumulants(x).values());
}
