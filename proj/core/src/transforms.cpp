#include "freespec/transforms.hpp"

#include "freespec/error.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

namespace freespec {

Complex CauchyTransform::derivative_at(Complex z) const {
  if (derivative) return derivative(z);
  const double h = 1e-5 * std::max(1.0, std::abs(z));
  return (value(z + h) - value(z - h)) / (2.0 * h);
}

namespace {

void require_upper_half_plane(Complex z, const char* who) {
  if (!(z.imag() > 0.0))
    throw Error(ErrorCode::HalfPlane,
                std::string(who) + ": Im(z) must be > 0, got " + std::to_string(z.imag()));
}

// Quadrature nodes and weights of a measure, shared by value and
// derivative closures.
struct Nodes {
  std::vector<double> t;
  std::vector<double> w;
};

std::shared_ptr<const Nodes> nodes_of(const SpectralMeasure& nu) {
  auto n = std::make_shared<Nodes>();
  if (nu.is_atomic()) {
    n->t = nu.atomic().support;
    n->w = nu.atomic().weights;
    return n;
  }
  const auto& g = nu.density();
  const double mass = g.trapezoid_mass();
  const std::size_t count = g.values.size();
  n->t.resize(count);
  n->w.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double end = (i == 0 || i + 1 == count) ? 0.5 : 1.0;
    n->t[i] = g.t(i);
    n->w[i] = end * g.step * g.values[i] / mass;
  }
  return n;
}

Complex sum_resolvent(const Nodes& n, Complex z) {
  Complex acc = 0.0;
  for (std::size_t i = 0; i < n.t.size(); ++i)
    if (n.w[i] != 0.0) acc += n.w[i] / (z - n.t[i]);
  return acc;
}

}  // namespace

Complex cauchy_from_measure(const SpectralMeasure& nu, Complex z) {
  require_upper_half_plane(z, "cauchy_from_measure");
  return sum_resolvent(*nodes_of(nu), z);
}

CauchyTransform cauchy_transform(const SpectralMeasure& nu) {
  auto nodes = nodes_of(nu);
  CauchyTransform ct;
  ct.value = [nodes](Complex z) { return sum_resolvent(*nodes, z); };
  ct.derivative = [nodes](Complex z) {
    Complex acc = 0.0;
    for (std::size_t i = 0; i < nodes->t.size(); ++i) {
      const Complex d = z - nodes->t[i];
      acc -= nodes->w[i] / (d * d);
    }
    return acc;
  };
  ct.support_min = nu.support_min();
  ct.support_max = nu.support_max();
  return ct;
}

Complex semicircle_cauchy(Complex z, double sigma2) {
  if (!(sigma2 > 0.0)) throw Error(ErrorCode::Input, "semicircle variance must be positive");
  const double edge = 2.0 * std::sqrt(sigma2);
  if (z.imag() < 0.0)
    throw Error(ErrorCode::HalfPlane, "semicircle_cauchy: Im(z) < 0");
  if (z.imag() == 0.0 && std::abs(z.real()) <= edge)
    throw Error(ErrorCode::BranchPoint,
                "semicircle_cauchy: real z=" + std::to_string(z.real()) +
                    " lies on the cut [-2 sigma, 2 sigma]");
  // The product of principal roots has its cut exactly on [-edge, edge]
  // and behaves like z at infinity, which selects G ~ 1/z.
  const Complex s = std::sqrt(z - edge) * std::sqrt(z + edge);
  return (z - s) / (2.0 * sigma2);
}

CauchyTransform semicircle_transform(double sigma2) {
  CauchyTransform ct;
  ct.value = [sigma2](Complex z) { return semicircle_cauchy(z, sigma2); };
  // G' = G^2 / (1 - sigma2 G^2) from sigma2 G^2 - z G + 1 = 0.
  ct.derivative = [sigma2](Complex z) {
    const Complex g = semicircle_cauchy(z, sigma2);
    return g * g / (1.0 - sigma2 * g * g);
  };
  ct.support_min = -2.0 * std::sqrt(sigma2);
  ct.support_max = 2.0 * std::sqrt(sigma2);
  return ct;
}

SeriesValue cauchy_from_moments(std::span<const double> moments, Complex z) {
  double r = 0.0;
  for (std::size_t n = 1; n <= moments.size(); ++n)
    r = std::max(r, std::pow(std::abs(moments[n - 1]), 1.0 / static_cast<double>(n)));
  const double radius = 2.0 * r;
  const double az = std::abs(z);
  if (!(az > radius) || az == 0.0)
    throw Error(ErrorCode::Divergence, "cauchy_from_moments: |z|=" + std::to_string(az) +
                                           " not above the series radius " +
                                           std::to_string(radius));
  // Horner in 1/z: sum_{n=0}^{L} m_n u^{n+1}, u = 1/z.
  const Complex u = 1.0 / z;
  Complex acc = 0.0;
  for (std::size_t n = moments.size(); n >= 1; --n) acc = (acc + moments[n - 1]) * u;
  acc = (acc + 1.0) * u;

  SeriesValue out;
  out.value = acc;
  out.radius = radius;
  if (r > 0.0) {
    const double L = static_cast<double>(moments.size());
    out.truncation_bound = std::pow(r, L + 1) / std::pow(az, L + 2) / (1.0 - r / az);
  }
  return out;
}

SeriesValue cauchy_from_moments(const MomentSequence& m, Complex z) {
  return cauchy_from_moments(std::span<const double>(m.values()), z);
}

Complex r_transform(const CumulantSequence& kappa, Complex z) {
  if (kappa.kind() != CumulantKind::Free)
    throw Error(ErrorCode::Kind, "r_transform expects free cumulants");
  Complex acc = 0.0;
  const auto& k = kappa.values();
  for (std::size_t i = k.size(); i-- > 0;) acc = acc * z + k[i];
  return acc;
}

double r_transform_radius(const CumulantSequence& kappa) {
  double r = 0.0;
  for (std::size_t n = 1; n <= kappa.size(); ++n)
    r = std::max(r, std::pow(std::abs(kappa.values()[n - 1]), 1.0 / static_cast<double>(n)));
  return r > 0.0 ? 1.0 / r : std::numeric_limits<double>::infinity();
}

namespace {

Complex one_plus_series(const std::vector<double>& c, Complex z) {
  Complex acc = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) acc = (acc + c[i]) * z;
  return 1.0 + acc;
}

}  // namespace

double series_identity_check(const PowerSeriesPair& p, std::span<const Complex> z_samples) {
  if (p.M_coeffs.size() != p.C_coeffs.size())
    throw Error(ErrorCode::Dimension, "series_identity_check: truncation lengths differ");
  double worst = 0.0;
  for (Complex z : z_samples) {
    const Complex M = one_plus_series(p.M_coeffs, z);
    const Complex C = one_plus_series(p.C_coeffs, z * M);
    worst = std::max(worst, std::abs(M - C));
  }
  return worst;
}

InversionResult stieltjes_invert(const CauchyFn& G, const GridSpec& grid, double tau) {
  if (!(tau > 0.0)) throw Error(ErrorCode::Input, "stieltjes_invert: tau must be > 0");
  const std::size_t n = grid.points();
  std::vector<Complex> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = G(Complex(grid.t(i), tau));
  return stieltjes_invert_samples(g, grid, tau);
}

InversionResult stieltjes_invert_samples(std::span<const Complex> g_on_line,
                                         const GridSpec& grid, double tau) {
  if (!(tau > 0.0)) throw Error(ErrorCode::Input, "stieltjes_invert: tau must be > 0");
  const std::size_t n = grid.points();
  if (n < 2) throw Error(ErrorCode::Input, "stieltjes_invert: grid needs >= 2 points");
  if (g_on_line.size() != n)
    throw Error(ErrorCode::Dimension, "stieltjes_invert: sample count does not match grid");
  std::vector<double> raw(n);
  double min_raw = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    raw[i] = -g_on_line[i].imag() / std::numbers::pi;
    if (!std::isfinite(raw[i]))
      throw Error(ErrorCode::InconsistentTransform,
                  "stieltjes_invert: non-finite value at t=" + std::to_string(grid.t(i)));
    min_raw = std::min(min_raw, raw[i]);
  }
  if (min_raw < -1e-3)
    throw Error(ErrorCode::InconsistentTransform,
                "stieltjes_invert: density " + std::to_string(min_raw) +
                    " < -1e-3; G does not map C+ to C-");
  for (auto& v : raw) v = std::max(v, 0.0);
  GridDensity tmp{grid.a, grid.t(n - 1), grid.step, raw};
  const double mass = tmp.trapezoid_mass();
  if (!(mass > 0.0))
    throw Error(ErrorCode::InconsistentTransform, "stieltjes_invert: zero mass on the grid");
  for (auto& v : raw) v /= mass;
  return InversionResult{SpectralMeasure::grid(grid.a, grid.step, std::move(raw)), tau, mass,
                         min_raw};
}

double default_omega_max(double first_moment) {
  return 1e4 * (1.0 + std::abs(first_moment));
}

double mutual_information(const CauchyFn& G, double sigma, double omega_max,
                          double quad_step) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::Input, "mutual_information: sigma must be > 0");
  if (!(omega_max > sigma))
    throw Error(ErrorCode::Input, "mutual_information: omega_max must exceed sigma");
  if (!(quad_step > 0.0)) throw Error(ErrorCode::Input, "mutual_information: quad_step > 0");

  // f(omega) = 1/omega + G(-omega) = integral lambda / (omega (omega + lambda)).
  // In u = log omega the integrand is omega f(omega), smooth and in [0, 1].
  auto scaled = [&](double u) {
    const double omega = std::exp(u);
    const double v = omega * (1.0 / omega + G(Complex(-omega, 0.0)).real());
    if (!std::isfinite(v))
      throw Error(ErrorCode::Model, "mutual_information: integrand not finite at omega=" +
                                        std::to_string(omega));
    if (v < -1e-6)
      throw Error(ErrorCode::Model, "mutual_information: negative integrand at omega=" +
                                        std::to_string(omega) +
                                        "; G is not the transform of a measure on [0, inf)");
    return v;
  };

  const double u0 = std::log(sigma);
  const double u1 = std::log(omega_max);
  double total = 0.0;
  for (double a = u0; a < u1; a += quad_step) {
    const double b = std::min(u1, a + quad_step);
    total += boost::math::quadrature::gauss<double, 20>::integrate(scaled, a, b);
  }
  const double tail = scaled(u1);
  if (tail > 1e-2)
    throw Error(ErrorCode::Model, "mutual_information: integrand does not decay (omega f = " +
                                      std::to_string(tail) + " at omega_max)");
  return total + tail;
}

double mutual_info_from_eigs(std::span<const double> eigs, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::Input, "mutual_info_from_eigs: sigma must be > 0");
  if (eigs.empty()) throw Error(ErrorCode::Input, "mutual_info_from_eigs: no eigenvalues");
  double acc = 0.0;
  for (double l : eigs) {
    if (l < -1e-9)
      throw Error(ErrorCode::Input, "mutual_info_from_eigs: negative eigenvalue " +
                                        std::to_string(l));
    acc += std::log1p(std::max(l, 0.0) / sigma);
  }
  return acc / static_cast<double>(eigs.size());
}

}  // namespace freespec
