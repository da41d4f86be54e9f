#pragma once

// Cauchy and R-transforms, series identities, Stieltjes inversion and the
// mutual-information functional built on the Cauchy transform.

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "freespec/measure.hpp"
#include "freespec/moments.hpp"

namespace freespec {

using CauchyFn = std::function<Complex(Complex)>;

/// A Cauchy transform as a callable plus what the solvers can use about
/// it. `derivative` may be empty (callers fall back to finite
/// differences). The support hull is NaN when unknown.
struct CauchyTransform {
  CauchyFn value;
  CauchyFn derivative;
  double support_min = std::numeric_limits<double>::quiet_NaN();
  double support_max = std::numeric_limits<double>::quiet_NaN();

  Complex operator()(Complex z) const { return value(z); }
  /// G'(z), analytic if available, else a central difference.
  Complex derivative_at(Complex z) const;
};

/// G(z) = integral of 1/(z - t) d nu(t). Atoms: exact sum. Grid: trapezoid
/// rule normalized by the trapezoid mass. Requires Im z > 0.
Complex cauchy_from_measure(const SpectralMeasure& nu, Complex z);

/// Unchecked transform of `nu` for use off the support (including real
/// points outside it), with the analytic derivative.
CauchyTransform cauchy_transform(const SpectralMeasure& nu);

/// (z - sqrt(z^2 - 4 sigma2)) / (2 sigma2) on the branch with G ~ 1/z.
/// Accepts Im z > 0, or real z with |z| > 2 sigma.
Complex semicircle_cauchy(Complex z, double sigma2 = 1.0);
CauchyTransform semicircle_transform(double sigma2 = 1.0);

struct SeriesValue {
  Complex value;
  /// Geometric bound on the omitted tail, assuming |m_n| <= r^n beyond the
  /// available moments, r = max_n |m_n|^{1/n}.
  double truncation_bound = 0.0;
  /// Divergence radius 2 r; |z| must exceed it.
  double radius = 0.0;
};

/// Partial sum sum_{n=0}^{L} m_n / z^{n+1} with m_0 = 1.
SeriesValue cauchy_from_moments(const MomentSequence& m, Complex z);
/// Same, accepting an empty moment list (only the m_0 term).
SeriesValue cauchy_from_moments(std::span<const double> moments, Complex z);

/// R(z) = sum_{n>=0} kappa_{n+1} z^n, truncated to the given cumulants.
Complex r_transform(const CumulantSequence& kappa, Complex z);
/// Heuristic validity radius 1 / max_n |kappa_n|^{1/n} (infinite when all
/// cumulants vanish).
double r_transform_radius(const CumulantSequence& kappa);

/// Coefficients of M(z) = 1 + sum m_n z^n and C(z) = 1 + sum kappa_n z^n.
struct PowerSeriesPair {
  std::vector<double> M_coeffs;
  std::vector<double> C_coeffs;
};

/// max over samples of |M(z) - C(z M(z))| with both series truncated.
double series_identity_check(const PowerSeriesPair& p, std::span<const Complex> z_samples);

struct InversionResult {
  SpectralMeasure density;
  double tau = 0.0;
  /// Trapezoid mass of -Im G / pi before renormalization.
  double raw_mass = 0.0;
  /// Most negative raw density value (>= -1e-3 or an error was thrown).
  double min_raw_density = 0.0;
};

/// density(t) = -Im G(t + i tau) / pi on the grid, clipped at 0 and
/// renormalized. The result is the continuous part smoothed by a Poisson
/// kernel of half-width tau; atoms show up as Lorentzians.
InversionResult stieltjes_invert(const CauchyFn& G, const GridSpec& grid, double tau);
/// Same, from precomputed values G(grid.t(i) + i tau).
InversionResult stieltjes_invert_samples(std::span<const Complex> g_on_line,
                                         const GridSpec& grid, double tau);

/// Mutual information per receive dimension (nats) from the Cauchy
/// transform of the Gram spectrum: integral over [sigma, inf) of
/// 1/omega + G(-omega). Composite Gauss-Legendre in log(omega) with panel
/// width quad_step, plus the tail omega_max * f(omega_max).
double mutual_information(const CauchyFn& G, double sigma, double omega_max,
                          double quad_step = 0.25);

/// Upper limit used when the caller has no better choice: 1e4 (1 + m_1).
double default_omega_max(double first_moment);

/// (1/N) sum log(1 + lambda_i / sigma).
double mutual_info_from_eigs(std::span<const double> eigs, double sigma);

}  // namespace freespec
