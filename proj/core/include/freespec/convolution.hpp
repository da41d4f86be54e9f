#pragma once

// Free additive convolution by subordination, with the R-transform route
// as an algebraic cross-check.

#include <vector>

#include "freespec/measure.hpp"
#include "freespec/moments.hpp"
#include "freespec/transforms.hpp"

namespace freespec {

struct SubordinationState {
  Complex z;
  Complex omega_x;
  Complex omega_y;
  /// G_{x+y}(z) = G_x(omega_x) = G_y(omega_y).
  Complex g;
  double residual = 0.0;
  int iterations = 0;
};

struct SubordinationOptions {
  double tol = 1e-9;
  int max_iter = 2000;
  /// Iterations of the plain alternating scheme before safeguarded Newton
  /// steps are tried.
  int newton_after = 3;
  bool use_newton = true;
  /// Newton is switched off, and the iteration restarted, when the
  /// residual has not halved within this many iterations.
  int stall_window = 50;
  /// Starting point omega_x = z + i * start_offset.
  double start_offset = 1.0;
};

/// Solves G_x(w_x) = G_y(w_y), w_x + w_y - 1/G_x(w_x) = z.
///
/// Alternating fixed point w_x <- z + h_y(w_y), w_y <- z + h_x(w_x) with
/// h(w) = 1/G(w) - w, started above z and damped by 1/2 whenever the
/// residual grows. After `newton_after` sweeps a Newton step on the
/// composed map is offered and kept only if it stays in Im w >= Im z and
/// lowers the residual. Newton can settle on a near-real local minimum of
/// the residual next to a spectral edge; when progress stalls the solver
/// falls back to the plain iteration from the starting point.
///
/// Throws ConvergenceError after max_iter, Error(Domain) if an iterate
/// leaves C+.
SubordinationState subordination_solve(const CauchyTransform& Gx, const CauchyTransform& Gy,
                                       Complex z, const SubordinationOptions& opts = {});

struct ConvolutionResult {
  SpectralMeasure density;
  double tau = 0.0;
  double raw_mass = 0.0;
  std::vector<int> iterations;
  std::vector<double> residuals;
  double max_residual = 0.0;
};

/// Density of nu_x boxplus nu_y on `grid`, from G_{x+y}(t + i tau) via the
/// subordination solver and Stieltjes inversion. The grid must cover
/// [min_x + min_y - 1, max_x + max_y + 1] when the supports are known.
/// Grid points are solved independently (on `workers` threads, 0 = default).
ConvolutionResult free_convolve(const SpectralMeasure& nu_x, const SpectralMeasure& nu_y,
                                const GridSpec& grid, double tau = 1e-3,
                                const SubordinationOptions& opts = {}, unsigned workers = 0);
ConvolutionResult free_convolve(const CauchyTransform& Gx, const CauchyTransform& Gy,
                                const GridSpec& grid, double tau = 1e-3,
                                const SubordinationOptions& opts = {}, unsigned workers = 0);

/// Moments of x + y from R_{x+y} = R_x + R_y.
MomentSequence r_transform_convolve(const CumulantSequence& kx, const CumulantSequence& ky);

}  // namespace freespec
