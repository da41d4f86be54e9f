#include "freespec/convolution.hpp"

#include "freespec/error.hpp"
#include "freespec/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace freespec {

namespace {

struct Sweep {
  Complex omega_y;
  Complex gx;
  Complex gy;
  double residual;
};

// One evaluation of the system at a given omega_x; omega_y is chosen so
// that the second equation holds, the residual measures the first.
Sweep evaluate(const CauchyTransform& Gx, const CauchyTransform& Gy, Complex z,
               Complex omega_x) {
  const Complex gx = Gx(omega_x);
  if (gx == 0.0 || !std::isfinite(gx.real()) || !std::isfinite(gx.imag()))
    throw Error(ErrorCode::Numerical, "subordination: G_x degenerate at omega_x");
  const Complex omega_y = z + 1.0 / gx - omega_x;
  if (!(omega_y.imag() > 0.0))
    throw Error(ErrorCode::Domain, "subordination: omega_y left the upper half-plane");
  const Complex gy = Gy(omega_y);
  const double r = std::max(std::abs(gx - gy), std::abs(omega_x + omega_y - 1.0 / gx - z));
  return {omega_y, gx, gy, r};
}

Complex h_prime(const CauchyTransform& G, Complex w, Complex g) {
  return -G.derivative_at(w) / (g * g) - 1.0;
}

}  // namespace

SubordinationState subordination_solve(const CauchyTransform& Gx, const CauchyTransform& Gy,
                                       Complex z, const SubordinationOptions& opts) {
  if (!(z.imag() > 0.0))
    throw Error(ErrorCode::HalfPlane, "subordination_solve: Im(z) must be > 0");

  const Complex start = z + Complex(0.0, opts.start_offset);
  Complex omega_x = start;
  Sweep s = evaluate(Gx, Gy, z, omega_x);
  double previous = s.residual;
  double best = s.residual;
  int last_progress = 0;
  bool newton = opts.use_newton;
  std::vector<double> trace;

  for (int it = 1; it <= opts.max_iter; ++it) {
    if (s.residual <= opts.tol)
      return {z, omega_x, s.omega_y, s.gx, s.residual, it};
    if (trace.size() < 64) trace.push_back(s.residual);
    if (s.residual < 0.5 * best) {
      best = s.residual;
      last_progress = it;
    }
    if (newton && it - last_progress > opts.stall_window) {
      newton = false;
      omega_x = start;
      s = evaluate(Gx, Gy, z, omega_x);
      previous = best = s.residual;
      last_progress = it;
      continue;
    }

    const Complex phi = z + 1.0 / s.gy - s.omega_y;  // fixed-point image of omega_x

    bool stepped = false;
    if (newton && it > opts.newton_after) {
      const Complex dphi = h_prime(Gy, s.omega_y, s.gy) * h_prime(Gx, omega_x, s.gx);
      const Complex candidate = omega_x - (phi - omega_x) / (dphi - 1.0);
      if (candidate.imag() >= z.imag() && std::isfinite(candidate.real()) &&
          std::isfinite(candidate.imag())) {
        try {
          Sweep c = evaluate(Gx, Gy, z, candidate);
          if (c.residual < s.residual) {
            omega_x = candidate;
            previous = s.residual;
            s = c;
            stepped = true;
          }
        } catch (const Error&) {
          // rejected candidate; take the fixed-point step instead
        }
      }
    }
    if (!stepped) {
      const double alpha = s.residual >= previous && it > 1 ? 0.5 : 1.0;
      omega_x = omega_x + alpha * (phi - omega_x);
      if (!(omega_x.imag() > 0.0))
        throw Error(ErrorCode::Domain, "subordination: omega_x left the upper half-plane");
      previous = s.residual;
      s = evaluate(Gx, Gy, z, omega_x);
    }
  }
  if (s.residual <= opts.tol)
    return {z, omega_x, s.omega_y, s.gx, s.residual, opts.max_iter};
  std::ostringstream msg;
  msg << "subordination_solve: no convergence at z=(" << z.real() << "," << z.imag()
      << ") after " << opts.max_iter << " iterations, residual " << s.residual;
  throw ConvergenceError(msg.str(), s.residual, std::move(trace));
}

ConvolutionResult free_convolve(const CauchyTransform& Gx, const CauchyTransform& Gy,
                                const GridSpec& grid, double tau,
                                const SubordinationOptions& opts, unsigned workers) {
  if (!(tau > 0.0)) throw Error(ErrorCode::Input, "free_convolve: tau must be > 0");
  if (std::isfinite(Gx.support_min) && std::isfinite(Gy.support_min)) {
    const double lo = Gx.support_min + Gy.support_min - 1.0;
    const double hi = Gx.support_max + Gy.support_max + 1.0;
    if (grid.a > lo + 1e-12 || grid.b < hi - 1e-12) {
      std::ostringstream msg;
      msg << "free_convolve: grid [" << grid.a << ", " << grid.b << "] must cover [" << lo
          << ", " << hi << "]";
      throw Error(ErrorCode::Input, msg.str());
    }
  }

  const std::size_t n = grid.points();
  std::vector<Complex> g(n);
  std::vector<int> iters(n, -1);
  std::vector<double> residual(n, 0.0);
  std::vector<char> failed(n, 0);

  parallel_for(n, workers, [&](std::size_t i) {
    try {
      const auto st = subordination_solve(Gx, Gy, Complex(grid.t(i), tau), opts);
      g[i] = st.g;
      iters[i] = st.iterations;
      residual[i] = st.residual;
    } catch (const ConvergenceError& e) {
      failed[i] = 1;
      residual[i] = e.last_residual();
    }
  });

  std::vector<double> bad;
  for (std::size_t i = 0; i < n; ++i)
    if (failed[i]) bad.push_back(grid.t(i));
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "free_convolve: " << bad.size() << " grid point(s) failed to converge, t =";
    for (std::size_t k = 0; k < std::min<std::size_t>(bad.size(), 20); ++k) msg << ' ' << bad[k];
    if (bad.size() > 20) msg << " ...";
    throw ConvergenceError(msg.str(), *std::max_element(residual.begin(), residual.end()));
  }

  auto inv = stieltjes_invert_samples(g, grid, tau);

  ConvolutionResult out{std::move(inv.density), tau, inv.raw_mass, std::move(iters),
                        residual, 0.0};
  out.max_residual = *std::max_element(out.residuals.begin(), out.residuals.end());
  return out;
}

ConvolutionResult free_convolve(const SpectralMeasure& nu_x, const SpectralMeasure& nu_y,
                                const GridSpec& grid, double tau,
                                const SubordinationOptions& opts, unsigned workers) {
  return free_convolve(cauchy_transform(nu_x), cauchy_transform(nu_y), grid, tau, opts,
                       workers);
}

MomentSequence r_transform_convolve(const CumulantSequence& kx, const CumulantSequence& ky) {
  return free_moments_from_cumulants(free_cumulant_add(kx, ky));
}

}  // namespace freespec
