#pragma once

// Monte Carlo random-matrix lab: ensemble samplers, empirical spectra and
// moments, mixed traces and an empirical freeness check.
//
// Seeding: trial t of an ensemble with base seed s draws from a mt19937_64
// seeded with splitmix64(s ^ splitmix64(t)), so every trial is an
// independent, reproducible stream no matter how trials are scheduled.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "freespec/deteq.hpp"
#include "freespec/moments.hpp"

namespace freespec {

enum class EnsembleKind { GUE, WignerReal, ComplexIID, HaarUnitary, ProfileGaussian };
enum class EntryDist { Gaussian, Rademacher, UniformCentered };

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::GUE;
  int n = 1;
  /// Columns for ComplexIID; 0 means square. ProfileGaussian takes its
  /// shape from the profile.
  int m = 0;
  EntryDist entry = EntryDist::Gaussian;  // WignerReal only
  std::optional<VarianceProfile> profile;  // ProfileGaussian only
  CMatrix mean;                            // ProfileGaussian, optional
  /// ProfileGaussian: sample a Hermitian matrix (square symmetric profile).
  bool hermitian = false;
  std::uint64_t seed = 0;

  int rows() const;
  int cols() const;
  bool is_hermitian() const;
  /// Throws Error(Input) or Error(Dimension) on inconsistent fields.
  void validate() const;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial) noexcept;

/// One draw with the ensemble's own seed (trial 0).
CMatrix sample(const EnsembleSpec& spec);
/// Draw number `trial` of the ensemble's stream family.
CMatrix sample(const EnsembleSpec& spec, std::uint64_t trial);

/// Haar unitary from a complex Ginibre matrix: Q of its QR factorization
/// times diag(R_ii / |R_ii|).
CMatrix haar_unitary(int n, std::uint64_t seed);

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

struct ComplexEstimate {
  Complex mean;
  double std_error = 0.0;
};

/// E tr(X^k), k = 1..max_k, averaged over trials. Hermitian kinds only
/// (Error(Kind) otherwise). Standard errors from the spread across trials
/// (0 for a single trial).
std::vector<Estimate> empirical_moments(const EnsembleSpec& spec, int max_k, int trials,
                                        unsigned workers = 0);

struct EmpiricalSpectrum {
  std::vector<double> eigenvalues;  // sorted, pooled over trials
  int trials = 0;
  int n = 0;
};

/// Pooled eigenvalues of X (Hermitian kinds) or of XX* when gram is set.
EmpiricalSpectrum empirical_spectrum(const EnsembleSpec& spec, int trials, bool gram,
                                     unsigned workers = 0);

struct Histogram {
  double lo = 0.0;
  double width = 0.0;
  std::vector<double> density;  // normalized by the total eigenvalue count
  double center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * width; }
};

/// Bins [lo, hi) of the given width; eigenvalues outside are counted in
/// the normalization but not binned.
Histogram histogram(const EmpiricalSpectrum& s, double lo, double hi, double width);

/// sum_i |h_i - f(center_i)| * width. Mass of f outside the histogram
/// range is ignored, so the range should cover the support.
double l1_distance(const Histogram& h, const std::function<double(double)>& f);

/// Monte Carlo tr (z - X)^{-1} (or of XX* when gram) at each z, with the
/// standard error of the real and imaginary parts combined.
std::vector<ComplexEstimate> empirical_cauchy(const EnsembleSpec& spec,
                                              std::span<const Complex> zs, int trials,
                                              bool gram, unsigned workers = 0);

/// U B U* with U Haar, drawn from the same seeding scheme as EnsembleSpec.
struct HaarConjugated {
  CMatrix B;
  std::uint64_t seed = 0;
};

/// A matrix entering a mixed trace: random (resampled per trial), fixed,
/// or a fixed matrix conjugated by a fresh Haar unitary per trial.
using MatrixSource = std::variant<EnsembleSpec, CMatrix, HaarConjugated>;

struct Letter {
  int matrix = 0;
  int power = 1;
  bool star = false;
};

/// E tr(product over letters of M_matrix^power, adjointed when star).
/// Sources sharing a seed produce identical matrices within a trial.
ComplexEstimate mixed_trace(const std::vector<MatrixSource>& sources,
                            const std::vector<Letter>& word, int trials, unsigned workers = 0);

struct FreenessMCReport {
  FreenessReport report;
  double threshold = 0.0;
  bool passed = false;
  int n = 0;
  int trials = 0;
};

/// Estimates every mixed moment up to max_order (real parts of E tr),
/// feeds them to freeness_test and compares against `threshold`
/// (0 selects 50 / N).
FreenessMCReport freeness_report(const std::vector<MatrixSource>& sources, int max_order,
                                 int trials, double threshold = 0.0, unsigned workers = 0);

/// Monte Carlo (1/N) E log det(I + HH* / sigma) with H = A + X drawn from
/// the profile (non-Hermitian, N x M).
Estimate mc_capacity(const VarianceProfile& vp, const CMatrix& A, double sigma_noise,
                     int trials, std::uint64_t seed, unsigned workers = 0);

}  // namespace freespec
