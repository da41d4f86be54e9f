#include "freespec/measure.hpp"

#include "freespec/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace freespec {

double GridDensity::trapezoid_mass() const {
  if (values.size() < 2) return 0.0;
  double acc = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) acc += values[i];
  return acc * step;
}

double GridDensity::mass_between(double a, double b) const {
  if (values.size() < 2 || !(b > a)) return 0.0;
  const double lo = std::max(a, t_min);
  const double hi = std::min(b, t_max);
  if (!(hi > lo)) return 0.0;
  auto value_at = [&](double x) {
    const double u = (x - t_min) / step;
    const auto i = std::min(static_cast<std::size_t>(std::max(u, 0.0)), values.size() - 2);
    const double f = u - static_cast<double>(i);
    return (1.0 - f) * values[i] + f * values[i + 1];
  };
  // Exact trapezoid on every linear piece between the interior nodes.
  const auto first = static_cast<std::size_t>(std::ceil((lo - t_min) / step));
  const auto last = static_cast<std::size_t>(std::floor((hi - t_min) / step));
  if (first > last || last >= values.size()) return 0.5 * (value_at(lo) + value_at(hi)) * (hi - lo);
  double acc = 0.5 * (value_at(lo) + values[first]) * (t(first) - lo);
  for (std::size_t i = first; i < last; ++i) acc += 0.5 * (values[i] + values[i + 1]) * step;
  acc += 0.5 * (values[last] + value_at(hi)) * (hi - t(last));
  return acc;
}

std::size_t GridSpec::points() const {
  if (!(step > 0.0) || !(b > a) || !std::isfinite(a) || !std::isfinite(b))
    throw Error(ErrorCode::Input, "grid needs a < b and step > 0");
  return static_cast<std::size_t>(std::floor((b - a) / step * (1.0 + 1e-12) + 1e-9)) + 1;
}

SpectralMeasure SpectralMeasure::atoms(std::vector<double> support,
                                       std::vector<double> weights) {
  if (support.empty() || support.size() != weights.size())
    throw Error(ErrorCode::Input, "atoms need equally many support points and weights");
  double total = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (!std::isfinite(support[i]) || !std::isfinite(weights[i]))
      throw Error(ErrorCode::Input, "atom with non-finite location or weight");
    if (!(weights[i] > 0.0)) throw Error(ErrorCode::Input, "atom weights must be positive");
    if (i > 0 && !(support[i] > support[i - 1]))
      throw Error(ErrorCode::Input, "atom support must be strictly increasing");
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw Error(ErrorCode::Input, "atom weights sum to " + std::to_string(total) + ", not 1");
  return SpectralMeasure(AtomicMeasure{std::move(support), std::move(weights)});
}

SpectralMeasure SpectralMeasure::grid(double t_min, double step, std::vector<double> values) {
  if (values.size() < 2) throw Error(ErrorCode::Input, "grid density needs >= 2 samples");
  if (!(step > 0.0) || !std::isfinite(t_min))
    throw Error(ErrorCode::Input, "grid density needs finite t_min and step > 0");
  for (double v : values)
    if (!std::isfinite(v) || v < 0.0)
      throw Error(ErrorCode::Input, "grid density values must be finite and >= 0");
  GridDensity g{t_min, t_min + static_cast<double>(values.size() - 1) * step, step,
                std::move(values)};
  const double mass = g.trapezoid_mass();
  if (std::abs(mass - 1.0) > 1e-6)
    throw Error(ErrorCode::Input, "grid density has mass " + std::to_string(mass) + ", not 1");
  return SpectralMeasure(std::move(g));
}

double SpectralMeasure::support_min() const {
  return is_atomic() ? atomic().support.front() : density().t_min;
}

double SpectralMeasure::support_max() const {
  return is_atomic() ? atomic().support.back() : density().t_max;
}

double SpectralMeasure::moment(int k) const {
  if (is_atomic()) {
    const auto& a = atomic();
    double acc = 0.0;
    for (std::size_t i = 0; i < a.support.size(); ++i)
      acc += a.weights[i] * std::pow(a.support[i], k);
    return acc;
  }
  const auto& g = density();
  double acc = 0.0;
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    const double w = (i == 0 || i + 1 == g.values.size()) ? 0.5 : 1.0;
    acc += w * g.values[i] * std::pow(g.t(i), k);
  }
  return acc * g.step;
}

double semicircle_density(double t, double sigma2) {
  const double r2 = 4.0 * sigma2 - t * t;
  return r2 > 0.0 ? std::sqrt(r2) / (2.0 * std::numbers::pi * sigma2) : 0.0;
}

SpectralMeasure semicircle_grid(double sigma2, double step) {
  if (!(sigma2 > 0.0)) throw Error(ErrorCode::Input, "semicircle variance must be positive");
  const double edge = 2.0 * std::sqrt(sigma2);
  const auto n = static_cast<std::size_t>(std::ceil(2.0 * edge / step)) + 1;
  const double h = 2.0 * edge / static_cast<double>(n - 1);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = semicircle_density(-edge + static_cast<double>(i) * h, sigma2);
  GridDensity tmp{-edge, edge, h, v};
  const double mass = tmp.trapezoid_mass();
  for (auto& x : v) x /= mass;
  return SpectralMeasure::grid(-edge, h, std::move(v));
}

}  // namespace freespec
