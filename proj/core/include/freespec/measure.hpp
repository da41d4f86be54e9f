#pragma once

#include <complex>
#include <functional>
#include <variant>
#include <vector>

namespace freespec {

using Complex = std::complex<double>;

/// Finitely many atoms: strictly increasing support, positive weights
/// summing to 1 (within 1e-9).
struct AtomicMeasure {
  std::vector<double> support;
  std::vector<double> weights;
};

/// Density sampled on t_min, t_min + step, ..., t_max. Trapezoid mass 1
/// within 1e-6, values >= 0.
struct GridDensity {
  double t_min = 0.0;
  double t_max = 0.0;
  double step = 0.0;
  std::vector<double> values;

  double t(std::size_t i) const { return t_min + static_cast<double>(i) * step; }
  double trapezoid_mass() const;
  /// Integral over [a, b] of the piecewise-linear interpolant (0 outside
  /// the sampled interval).
  double mass_between(double a, double b) const;
};

/// Uniform grid description {a, b, step}; the last node is the largest
/// a + k*step not exceeding b (within step*1e-9).
struct GridSpec {
  double a = 0.0;
  double b = 0.0;
  double step = 0.0;

  std::size_t points() const;
  double t(std::size_t i) const { return a + static_cast<double>(i) * step; }
};

class SpectralMeasure {
 public:
  static SpectralMeasure atoms(std::vector<double> support, std::vector<double> weights);
  static SpectralMeasure single_atom(double at) { return atoms({at}, {1.0}); }
  static SpectralMeasure grid(double t_min, double step, std::vector<double> values);

  bool is_atomic() const noexcept { return std::holds_alternative<AtomicMeasure>(rep_); }
  const AtomicMeasure& atomic() const { return std::get<AtomicMeasure>(rep_); }
  const GridDensity& density() const { return std::get<GridDensity>(rep_); }

  /// Convex hull of the support (grid: the sampled interval).
  double support_min() const;
  double support_max() const;

  /// k-th moment; exact for atoms, trapezoid for grids.
  double moment(int k) const;

 private:
  explicit SpectralMeasure(std::variant<AtomicMeasure, GridDensity> rep)
      : rep_(std::move(rep)) {}

  std::variant<AtomicMeasure, GridDensity> rep_;
};

/// Semicircle of variance sigma2 sampled on [-2 sigma, 2 sigma] and
/// rescaled to unit trapezoid mass.
SpectralMeasure semicircle_grid(double sigma2, double step);

/// Closed-form semicircle density sqrt(4 sigma2 - t^2) / (2 pi sigma2).
double semicircle_density(double t, double sigma2);

}  // namespace freespec
