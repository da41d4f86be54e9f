#include "freespec/error.hpp"
#include "freespec/rmt.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

using namespace freespec;

namespace {

double max_abs(const CMatrix& M) { return M.cwiseAbs().maxCoeff(); }

EnsembleSpec gue(int n, std::uint64_t seed) {
  EnsembleSpec e;
  e.kind = EnsembleKind::GUE;
  e.n = n;
  e.seed = seed;
  return e;
}

}  // namespace

TEST(Seeding, TrialSeedsDiffer) {
  EXPECT_NE(trial_seed(7, 0), trial_seed(7, 1));
  EXPECT_NE(trial_seed(7, 0), trial_seed(8, 0));
  EXPECT_EQ(trial_seed(7, 3), splitmix64(7 ^ splitmix64(3)));
}

TEST(Sample, Deterministic) {
  for (auto kind : {EnsembleKind::GUE, EnsembleKind::WignerReal, EnsembleKind::ComplexIID,
                    EnsembleKind::HaarUnitary}) {
    EnsembleSpec e;
    e.kind = kind;
    e.n = 16;
    e.seed = 11;
    EXPECT_EQ(sample(e, 2), sample(e, 2));
    EXPECT_NE(sample(e, 2), sample(e, 3));
    EXPECT_EQ(sample(e), sample(e, 0));
  }
}

TEST(Sample, Shapes) {
  EnsembleSpec e;
  e.kind = EnsembleKind::ComplexIID;
  e.n = 4;
  e.m = 7;
  EXPECT_EQ(sample(e).rows(), 4);
  EXPECT_EQ(sample(e).cols(), 7);
  e.kind = EnsembleKind::ProfileGaussian;
  e.profile = VarianceProfile::constant(3, 5);
  EXPECT_EQ(sample(e).cols(), 5);
}

TEST(Sample, HermitianKinds) {
  EXPECT_EQ(max_abs(sample(gue(32, 1)) - sample(gue(32, 1)).adjoint()), 0.0);
  EnsembleSpec e;
  e.kind = EnsembleKind::ProfileGaussian;
  e.profile = VarianceProfile::banded(20, 3);
  e.hermitian = true;
  const CMatrix X = sample(e);
  EXPECT_EQ(max_abs(X - X.adjoint()), 0.0);
  EXPECT_EQ(X(0, 10), Complex(0.0));
}

TEST(Haar, Unitary) {
  const CMatrix U = haar_unitary(64, 5);
  EXPECT_LE(max_abs(U * U.adjoint() - CMatrix::Identity(64, 64)), 1e-12);
  EXPECT_THROW(haar_unitary(0, 1), Error);
}

TEST(Haar, EntryModulus) {
  // |U_11|^2 is Beta(1, N - 1): mean 1/N, variance (N - 1) / (N^2 (N + 1)).
  const int n = 64, draws = 200;
  double s = 0.0;
  for (int t = 0; t < draws; ++t) s += std::norm(haar_unitary(n, trial_seed(9, static_cast<std::uint64_t>(t)))(0, 0));
  const double sd = std::sqrt((n - 1.0) / (n * n * (n + 1.0)) / draws);
  EXPECT_NEAR(s / draws, 1.0 / n, 3.0 * sd);
}

TEST(Moments, GUESemicircle) {
  const auto m = empirical_moments(gue(512, 3), 6, 20);
  const double exact[] = {0, 1, 0, 2, 0, 5};
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(m[static_cast<std::size_t>(k)].mean, exact[k], 0.02 * std::max(1.0, exact[k])) << k + 1;
}

TEST(Moments, RademacherWigner) {
  EnsembleSpec e;
  e.kind = EnsembleKind::WignerReal;
  e.entry = EntryDist::Rademacher;
  e.n = 1024;
  e.seed = 4;
  const auto m = empirical_moments(e, 4, 2);
  EXPECT_NEAR(m[1].mean, 1.0, 0.05);
  EXPECT_NEAR(m[3].mean, 2.0, 0.05);
}

TEST(Moments, FlatProfileMatchesIIDGram) {
  // Gram moments of a square IID matrix are Catalan numbers.
  EnsembleSpec p;
  p.kind = EnsembleKind::ProfileGaussian;
  p.profile = VarianceProfile::constant(256, 256);
  p.seed = 1;
  EnsembleSpec c;
  c.kind = EnsembleKind::ComplexIID;
  c.n = 256;
  c.seed = 2;
  const auto sp = empirical_spectrum(p, 4, true);
  const auto sc = empirical_spectrum(c, 4, true);
  for (int k = 1; k <= 3; ++k) {
    double a = 0.0, b = 0.0;
    for (double x : sp.eigenvalues) a += std::pow(x, k);
    for (double x : sc.eigenvalues) b += std::pow(x, k);
    a /= static_cast<double>(sp.eigenvalues.size());
    b /= static_cast<double>(sc.eigenvalues.size());
    const double cat = k == 1 ? 1.0 : k == 2 ? 2.0 : 5.0;
    EXPECT_NEAR(a, cat, 0.05 * cat);
    EXPECT_NEAR(b, cat, 0.05 * cat);
  }
}

TEST(Moments, CircularHermitianPart) {
  // Y1 = (X + X*) / sqrt(2) and Y2 = (X - X*) / (i sqrt(2)) are GUE-like
  // and X = (Y1 + i Y2) / sqrt(2).
  EnsembleSpec c;
  c.kind = EnsembleKind::ComplexIID;
  c.n = 512;
  c.seed = 6;
  const CMatrix X = sample(c);
  const CMatrix Y1 = (X + X.adjoint()) / std::numbers::sqrt2;
  const CMatrix Y2 = (X - X.adjoint()) / (Complex(0.0, 1.0) * std::numbers::sqrt2);
  EXPECT_LE(max_abs((Y1 + Complex(0.0, 1.0) * Y2) / std::numbers::sqrt2 - X), 1e-14);
  for (const CMatrix& Y : {Y1, Y2}) {
    EXPECT_LE(max_abs(Y - Y.adjoint()), 1e-15);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(Y, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues();
    EXPECT_NEAR(ev.mean(), 0.0, 0.03);
    EXPECT_NEAR(ev.array().square().mean(), 1.0, 0.03);
    EXPECT_NEAR(ev.array().cube().mean(), 0.0, 0.05);
    EXPECT_NEAR(ev.array().pow(4).mean(), 2.0, 0.1);
  }
  EXPECT_NEAR(std::abs((Y1 * Y2).trace()) / 512.0, 0.0, 0.03);
}

TEST(Spectrum, GramIsNonNegative) {
  EnsembleSpec c;
  c.kind = EnsembleKind::ComplexIID;
  c.n = 50;
  c.m = 30;
  const auto s = empirical_spectrum(c, 3, true);
  EXPECT_EQ(s.eigenvalues.size(), 150u);
  EXPECT_GE(s.eigenvalues.front(), -1e-10);
  EXPECT_TRUE(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));
}

TEST(Spectrum, HistogramAndDistance) {
  const auto s = empirical_spectrum(gue(400, 8), 5, false);
  const auto h = histogram(s, -2.5, 2.5, 0.05);
  double mass = 0.0;
  for (double d : h.density) mass += d * h.width;
  EXPECT_NEAR(mass, 1.0, 1e-12);
  const auto sc = [](double x) { return std::abs(x) < 2.0 ? std::sqrt(4.0 - x * x) / (2.0 * std::numbers::pi) : 0.0; };
  EXPECT_LT(l1_distance(h, sc), 0.1);
  EXPECT_NEAR(l1_distance(h, [](double) { return 0.0; }), 1.0, 1e-12);
  EXPECT_THROW(histogram(s, 1.0, 1.0, 0.1), Error);
}

TEST(Spectrum, DeterministicAcrossWorkers) {
  const auto a = empirical_spectrum(gue(64, 2), 6, false, 1);
  const auto b = empirical_spectrum(gue(64, 2), 6, false, 3);
  EXPECT_EQ(a.eigenvalues, b.eigenvalues);
  const auto ma = empirical_moments(gue(64, 2), 4, 6, 1);
  const auto mb = empirical_moments(gue(64, 2), 4, 6, 3);
  for (std::size_t k = 0; k < ma.size(); ++k) EXPECT_EQ(ma[k].mean, mb[k].mean);
}

TEST(Cauchy, GUEAtImaginaryPoint) {
  const std::vector<Complex> zs{{0.0, 1.0}};
  const auto g = empirical_cauchy(gue(256, 4), zs, 4, false);
  const Complex z(0.0, 1.0);
  const Complex exact = (z - std::sqrt(z - 2.0) * std::sqrt(z + 2.0)) / 2.0;
  EXPECT_LE(std::abs(g[0].mean - exact), 1e-2);
}

TEST(MixedTrace, SharedSeedGivesSameMatrix) {
  const std::vector<MatrixSource> src{gue(64, 5), gue(64, 5)};
  const auto xy = mixed_trace(src, {{0, 1, false}, {1, 1, false}}, 3);
  const auto x2 = mixed_trace(src, {{0, 2, false}}, 3);
  EXPECT_NEAR(std::abs(xy.mean - x2.mean), 0.0, 1e-12);
}

TEST(MixedTrace, GUESecondMoment) {
  const std::vector<MatrixSource> src{gue(256, 12)};
  EXPECT_NEAR(mixed_trace(src, {{0, 2, false}}, 4).mean.real(), 1.0, 0.02);
}

TEST(MixedTrace, FixedMatrices) {
  CMatrix A = CMatrix::Identity(3, 3);
  A(2, 2) = 4.0;
  const std::vector<MatrixSource> src{A};
  EXPECT_NEAR(mixed_trace(src, {{0, 2, false}}, 1).mean.real(), 6.0, 1e-14);
  const std::vector<MatrixSource> bad{A, CMatrix(CMatrix::Identity(4, 4))};
  EXPECT_THROW(mixed_trace(bad, {{0, 1, false}}, 1), Error);
  EXPECT_THROW(mixed_trace(src, {{1, 1, false}}, 1), Error);
}

TEST(Freeness, IndependentGUEPass) {
  const std::vector<MatrixSource> src{gue(256, 1), gue(256, 2)};
  const auto r = freeness_report(src, 4, 2);
  EXPECT_TRUE(r.passed);
  EXPECT_DOUBLE_EQ(r.threshold, 50.0 / 256.0);
}

TEST(Freeness, IdenticalMatricesFail) {
  const std::vector<MatrixSource> src{gue(128, 1), gue(128, 1)};
  EXPECT_FALSE(freeness_report(src, 4, 1).passed);
}

TEST(Capacity, MonteCarloMatchesSmallClosedForm) {
  // Zero profile: log det(I + A A* / sigma) / N exactly.
  const VarianceProfile zero(Eigen::MatrixXd::Zero(2, 2));
  CMatrix A = CMatrix::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 2.0;
  const auto e = mc_capacity(zero, A, 0.5, 2, 1);
  EXPECT_NEAR(e.mean, 0.5 * (std::log(3.0) + std::log(9.0)), 1e-12);
  EXPECT_THROW(mc_capacity(zero, A, 0.0, 2, 1), Error);
}

TEST(Rmt, Errors) {
  EnsembleSpec e = gue(0, 1);
  EXPECT_THROW(sample(e), Error);
  e.kind = EnsembleKind::ProfileGaussian;
  EXPECT_THROW(sample(e), Error);
  e.profile = VarianceProfile::constant(3, 4);
  e.hermitian = true;
  EXPECT_THROW(sample(e), Error);
  EnsembleSpec c;
  c.kind = EnsembleKind::ComplexIID;
  c.n = 4;
  try {
    empirical_moments(c, 2, 1);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::Kind);
  }
  EXPECT_THROW(empirical_spectrum(c, 1, false), Error);
  EXPECT_THROW(empirical_moments(gue(4, 1), 2, 0), Error);
  const std::vector<MatrixSource> one{gue(4, 1)};
  EXPECT_THROW(freeness_report(one, 4, 1), Error);
  const std::vector<MatrixSource> two{gue(4, 1), gue(4, 2)};
  try {
    freeness_report(two, 1, 1);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::Order);
  }
}
