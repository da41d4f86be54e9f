#include "freespec/deteq.hpp"

#include "freespec/error.hpp"
#include "freespec/transforms.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <utility>

namespace freespec {

VarianceProfile::VarianceProfile(Eigen::MatrixXd sigma) : sigma_(std::move(sigma)) {
  if (sigma_.size() == 0) throw Error(ErrorCode::Input, "variance profile is empty");
  for (Eigen::Index i = 0; i < sigma_.rows(); ++i)
    for (Eigen::Index j = 0; j < sigma_.cols(); ++j) {
      const double v = sigma_(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        std::ostringstream msg;
        msg << "variance profile entry (" << i << "," << j << ") = " << v
            << " must be finite and >= 0";
        throw Error(ErrorCode::Input, msg.str());
      }
    }
}

VarianceProfile VarianceProfile::constant(int rows, int cols, double value) {
  if (rows < 1 || cols < 1) throw Error(ErrorCode::Input, "profile dimensions must be >= 1");
  return VarianceProfile(Eigen::MatrixXd::Constant(rows, cols, value));
}

VarianceProfile VarianceProfile::banded(int n, int half_width) {
  if (n < 1 || half_width < 0) throw Error(ErrorCode::Input, "banded profile needs n >= 1");
  Eigen::MatrixXd s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s(i, j) = std::abs(i - j) <= half_width ? 1.0 : 0.0;
  return VarianceProfile(std::move(s));
}

bool VarianceProfile::is_square_symmetric() const {
  if (sigma_.rows() != sigma_.cols()) return false;
  const double scale = std::max(1.0, sigma_.maxCoeff());
  return (sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

namespace {

using CVector = Eigen::VectorXcd;

void require_dims(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::Dimension, msg);
}

void require_not_lower(Complex z, const char* who) {
  if (z.imag() < 0.0)
    throw Error(ErrorCode::HalfPlane, std::string(who) + ": Im(z) must be >= 0");
}

// Row-scaled profile products: (1/N) sigma v and (1/N) sigma^T v.
CVector eta_left_vec(const VarianceProfile& vp, const CVector& v) {
  return (vp.sigma().cast<Complex>() * v) / static_cast<double>(vp.rows());
}
CVector eta_right_vec(const VarianceProfile& vp, const CVector& v) {
  return (vp.sigma().transpose().cast<Complex>() * v) / static_cast<double>(vp.rows());
}

CMatrix inverse_checked(const CMatrix& M, const char* who) {
  Eigen::PartialPivLU<CMatrix> lu(M);
  const double rc = lu.rcond();
  if (!(rc > 1e-14)) {
    std::ostringstream msg;
    msg << who << ": singular resolvent (rcond " << rc << ")";
    throw Error(ErrorCode::Numerical, msg.str());
  }
  return lu.inverse();
}

Complex reciprocal_checked(Complex d, const char* who) {
  if (!(std::abs(d) > 1e-300)) throw Error(ErrorCode::Numerical, std::string(who) + ": singular resolvent");
  return 1.0 / d;
}

bool is_diagonal(const CMatrix& A) {
  for (Eigen::Index j = 0; j < A.cols(); ++j)
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      if (i != j && A(i, j) != 0.0) return false;
  return true;
}

double max_abs(const CMatrix& M) { return M.size() ? M.cwiseAbs().maxCoeff() : 0.0; }

// Caps r q / (1 - q) so a noisy ratio near 1 at the rounding floor cannot
// stall convergence.
constexpr double kMaxErrorFactor = 1e3;

// Damped iteration x <- (1 - alpha) x + alpha F(x); alpha halves when the
// residual r = |F(x) - x|_max grows. Returns F(x) once r q / (1 - q) <= tol,
// q being the observed residual ratio (the a-posteriori bound for a
// contraction with rate q), and r itself <= tol.
template <class S, class Map, class Dist, class Blend, class Check>
S fixed_point(S x, Map&& map, Dist&& dist, Blend&& blend, Check&& check,
              const DeteqOptions& opts, const std::string& who, Complex z, double& residual,
              int& iterations) {
  if (!(opts.tol > 0.0) || opts.max_iter < 1 || !(opts.alpha > 0.0 && opts.alpha <= 1.0))
    throw Error(ErrorCode::Input, who + ": need tol > 0, max_iter >= 1, alpha in (0, 1]");
  double alpha = opts.alpha;
  double previous = std::numeric_limits<double>::infinity();
  std::vector<double> trace;
  double r = previous;
  for (int it = 1; it <= opts.max_iter; ++it) {
    S fx = map(x);
    r = dist(fx, x);
    if (!std::isfinite(r)) throw Error(ErrorCode::Numerical, who + ": iterate is not finite");
    if (trace.size() < 256) trace.push_back(r);
    const double q = std::isfinite(previous) && previous > 0.0 ? r / previous : 0.0;
    const double bound = q > 0.0 && q < 1.0 ? std::min(q / (1.0 - q), kMaxErrorFactor) : 1.0;
    if (r <= opts.tol && r * bound <= opts.tol) {
      residual = r;
      iterations = it;
      return fx;
    }
    if (r > previous) alpha = std::max(0.5 * alpha, 1.0 / 128.0);
    previous = r;
    x = blend(x, fx, alpha);
    if (opts.check_every_iterate) check(x);
  }
  std::ostringstream msg;
  msg << who << ": no convergence at z=(" << z.real() << "," << z.imag() << ") after "
      << opts.max_iter << " iterations, residual " << r;
  throw ConvergenceError(msg.str(), r, std::move(trace));
}

void check_half_plane(const CMatrix& G, const std::string& who) {
  const double v = half_plane_violation(G);
  if (v > 1e-8 * std::max(1.0, max_abs(G)))
    throw Error(ErrorCode::Domain, who + ": iterate left the matrix half-plane (Im G has eigenvalue " +
                                       std::to_string(v) + ")");
}

void check_half_plane_diag(const CVector& g, const std::string& who) {
  for (Eigen::Index i = 0; i < g.size(); ++i)
    if (g(i).imag() > 1e-8 * std::max(1.0, std::abs(g(i))))
      throw Error(ErrorCode::Domain, who + ": iterate left the matrix half-plane");
}

CMatrix zero_if_empty(const CMatrix& A, Eigen::Index rows, Eigen::Index cols) {
  return A.size() == 0 ? CMatrix::Zero(rows, cols) : A;
}

}  // namespace

CMatrix eta(const CMatrix& B, const VarianceProfile& vp) {
  require_dims(vp.rows() == vp.cols(), "eta: profile must be square");
  require_dims(B.rows() == vp.rows() && B.cols() == vp.cols(), "eta: B must be N x N");
  return eta_left_vec(vp, B.diagonal()).asDiagonal();
}

CMatrix eta12(const CMatrix& B, const VarianceProfile& vp, EtaSide side) {
  if (side == EtaSide::Left) {
    require_dims(B.rows() == vp.cols() && B.cols() == vp.cols(), "eta12(Left): B must be M x M");
    return eta_left_vec(vp, B.diagonal()).asDiagonal();
  }
  require_dims(B.rows() == vp.rows() && B.cols() == vp.rows(), "eta12(Right): B must be N x N");
  return eta_right_vec(vp, B.diagonal()).asDiagonal();
}

double half_plane_violation(const CMatrix& G) {
  require_dims(G.rows() == G.cols(), "half_plane_violation: G must be square");
  const CMatrix H = (G - G.adjoint()) / Complex(0.0, 2.0);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double gram_first_moment(const VarianceProfile& vp, const CMatrix& A) {
  const double n = vp.rows();
  double m1 = vp.sigma().sum() / n;
  if (A.size()) {
    require_dims(A.rows() == vp.rows() && A.cols() == vp.cols(), "gram_first_moment: A must be N x M");
    m1 += A.squaredNorm();
  }
  return m1 / n;
}

namespace {

MatrixCauchy solve_hermitian_dense(const EtaMap& eta_map, const CMatrix& A, Complex z,
                                   const DeteqOptions& opts) {
  const std::string who = "solve_hermitian";
  const Eigen::Index n = A.rows();
  const CMatrix zI = z * CMatrix::Identity(n, n);
  CMatrix G0 = inverse_checked(zI - A, "solve_hermitian");
  auto map = [&](const CMatrix& G) {
    CMatrix e = eta_map(G);
    require_dims(e.rows() == n && e.cols() == n, "solve_hermitian: eta(G) must be N x N");
    return inverse_checked(zI - e - A, "solve_hermitian");
  };
  auto dist = [](const CMatrix& a, const CMatrix& b) { return max_abs(a - b); };
  auto blend = [](const CMatrix& x, const CMatrix& fx, double alpha) -> CMatrix {
    return (1.0 - alpha) * x + alpha * fx;
  };
  auto check = [&](const CMatrix& G) { check_half_plane(G, who); };
  MatrixCauchy out;
  out.z = z;
  out.G = fixed_point(std::move(G0), map, dist, blend, check, opts, who, z, out.residual,
                      out.iterations);
  check_half_plane(out.G, who);
  out.g = out.G.trace() / static_cast<double>(n);
  return out;
}

}  // namespace

MatrixCauchy solve_hermitian(const VarianceProfile& vp, const CMatrix& A_in, Complex z,
                             const DeteqOptions& opts) {
  require_not_lower(z, "solve_hermitian");
  if (!vp.is_square_symmetric())
    throw Error(ErrorCode::Input, "solve_hermitian: profile must be square and symmetric");
  const Eigen::Index n = vp.rows();
  const CMatrix A = zero_if_empty(A_in, n, n);
  require_dims(A.rows() == n && A.cols() == n, "solve_hermitian: A must be N x N");
  if (max_abs(A - A.adjoint()) > 1e-12 * std::max(1.0, max_abs(A)))
    throw Error(ErrorCode::Input, "solve_hermitian: A must be Hermitian");

  if (opts.force_dense || !is_diagonal(A)) {
    EtaMap m = [&vp](const CMatrix& B) { return eta(B, vp); };
    return solve_hermitian_dense(m, A, z, opts);
  }

  // Diagonal A keeps every iterate diagonal: g_i = 1 / (z - eta_i - a_i).
  const std::string who = "solve_hermitian";
  const CVector a = A.diagonal();
  CVector g0(n);
  for (Eigen::Index i = 0; i < n; ++i) g0(i) = reciprocal_checked(z - a(i), "solve_hermitian");
  auto map = [&](const CVector& g) {
    const CVector e = eta_left_vec(vp, g);
    CVector out(n);
    for (Eigen::Index i = 0; i < n; ++i)
      out(i) = reciprocal_checked(z - e(i) - a(i), "solve_hermitian");
    return out;
  };
  auto dist = [](const CVector& x, const CVector& y) { return (x - y).cwiseAbs().maxCoeff(); };
  auto blend = [](const CVector& x, const CVector& fx, double alpha) -> CVector {
    return (1.0 - alpha) * x + alpha * fx;
  };
  auto check = [&](const CVector& g) { check_half_plane_diag(g, who); };
  MatrixCauchy out;
  out.z = z;
  const CVector g = fixed_point(std::move(g0), map, dist, blend, check, opts, who, z,
                                out.residual, out.iterations);
  check_half_plane_diag(g, who);
  out.G = g.asDiagonal();
  out.g = g.mean();
  return out;
}

MatrixCauchy solve_hermitian(const EtaMap& eta_map, const CMatrix& A, Complex z,
                             const DeteqOptions& opts) {
  require_not_lower(z, "solve_hermitian");
  require_dims(A.rows() == A.cols() && A.size() > 0,
               "solve_hermitian: A must be a non-empty N x N matrix with a custom eta");
  if (!eta_map) throw Error(ErrorCode::Input, "solve_hermitian: empty eta map");
  return solve_hermitian_dense(eta_map, A, z, opts);
}

namespace {

using Pair = std::pair<CMatrix, CMatrix>;

RectangularCauchy solve_rectangular_dense(const EtaMap& eta1, const EtaMap& eta2,
                                          const CMatrix& A, Complex w,
                                          const DeteqOptions& opts) {
  const std::string who = "solve_rectangular";
  const Eigen::Index n = A.rows();
  const Eigen::Index m = A.cols();
  const CMatrix In = CMatrix::Identity(n, n);
  const CMatrix Im = CMatrix::Identity(m, m);
  const CMatrix Ah = A.adjoint();
  auto map = [&](const Pair& G) {
    const CMatrix e1 = eta1(G.second);
    const CMatrix e2 = eta2(G.first);
    require_dims(e1.rows() == n && e1.cols() == n, "solve_rectangular: eta_1(G2) must be N x N");
    require_dims(e2.rows() == m && e2.cols() == m, "solve_rectangular: eta_2(G1) must be M x M");
    const CMatrix P1 = In - e1;
    const CMatrix P2 = Im - e2;
    CMatrix G1 = inverse_checked(w * P1 - A * inverse_checked(P2, "solve_rectangular") * Ah,
                                 "solve_rectangular");
    CMatrix G2 = inverse_checked(w * P2 - Ah * inverse_checked(P1, "solve_rectangular") * A,
                                 "solve_rectangular");
    return Pair{std::move(G1), std::move(G2)};
  };
  auto dist = [](const Pair& a, const Pair& b) {
    return std::max(max_abs(a.first - b.first), max_abs(a.second - b.second));
  };
  auto blend = [](const Pair& x, const Pair& fx, double alpha) {
    return Pair{(1.0 - alpha) * x.first + alpha * fx.first,
                (1.0 - alpha) * x.second + alpha * fx.second};
  };
  auto check = [&](const Pair& G) {
    check_half_plane(G.first, who);
    check_half_plane(G.second, who);
  };
  RectangularCauchy out;
  out.z2 = w;
  // Start from the sigma = 0 solution, which is already the fixed point
  // when the profile vanishes.
  Pair G0{In / w, Im / w};
  try {
    G0 = map(Pair{CMatrix::Zero(n, n), CMatrix::Zero(m, m)});
  } catch (const Error&) {
  }
  Pair G = fixed_point(std::move(G0), map, dist, blend, check, opts, who, w, out.residual,
                       out.iterations);
  check(G);
  out.G1 = std::move(G.first);
  out.G2 = std::move(G.second);
  out.g = out.G1.trace() / static_cast<double>(n);
  return out;
}

}  // namespace

RectangularCauchy solve_rectangular(const VarianceProfile& vp, const CMatrix& A_in, Complex z2,
                                    const DeteqOptions& opts) {
  require_not_lower(z2, "solve_rectangular");
  if (z2 == 0.0) throw Error(ErrorCode::Domain, "solve_rectangular: z2 must be nonzero");
  const Eigen::Index n = vp.rows();
  const Eigen::Index m = vp.cols();
  const CMatrix A = zero_if_empty(A_in, n, m);
  require_dims(A.rows() == n && A.cols() == m, "solve_rectangular: A must be N x M");

  if (opts.force_dense || !is_diagonal(A)) {
    EtaMap e1 = [&vp](const CMatrix& B) { return eta12(B, vp, EtaSide::Left); };
    EtaMap e2 = [&vp](const CMatrix& B) { return eta12(B, vp, EtaSide::Right); };
    return solve_rectangular_dense(e1, e2, A, z2, opts);
  }

  // Diagonal A: both blocks stay diagonal. State is (g1, g2) stacked.
  const std::string who = "solve_rectangular";
  const Eigen::Index d = std::min(n, m);
  Eigen::VectorXd a2 = Eigen::VectorXd::Zero(d);
  for (Eigen::Index i = 0; i < d; ++i) a2(i) = std::norm(A(i, i));
  const Complex w = z2;
  auto map = [&](const CVector& g) {
    const CVector e1 = eta_left_vec(vp, g.tail(m));   // N entries
    const CVector e2 = eta_right_vec(vp, g.head(n));  // M entries
    CVector out(n + m);
    for (Eigen::Index i = 0; i < n; ++i) {
      Complex den = w * (1.0 - e1(i));
      if (i < d && a2(i) != 0.0) den -= a2(i) * reciprocal_checked(1.0 - e2(i), "solve_rectangular");
      out(i) = reciprocal_checked(den, "solve_rectangular");
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      Complex den = w * (1.0 - e2(j));
      if (j < d && a2(j) != 0.0) den -= a2(j) * reciprocal_checked(1.0 - e1(j), "solve_rectangular");
      out(n + j) = reciprocal_checked(den, "solve_rectangular");
    }
    return out;
  };
  auto dist = [](const CVector& x, const CVector& y) { return (x - y).cwiseAbs().maxCoeff(); };
  auto blend = [](const CVector& x, const CVector& fx, double alpha) -> CVector {
    return (1.0 - alpha) * x + alpha * fx;
  };
  auto check = [&](const CVector& g) { check_half_plane_diag(g, who); };
  RectangularCauchy out;
  out.z2 = z2;
  CVector g0 = CVector::Constant(n + m, 1.0 / w);
  try {
    g0 = map(CVector::Zero(n + m));
  } catch (const Error&) {
  }
  const CVector g = fixed_point(std::move(g0), map, dist, blend, check, opts, who, z2,
                                out.residual, out.iterations);
  check(g);
  out.G1 = g.head(n).asDiagonal();
  out.G2 = g.tail(m).asDiagonal();
  out.g = g.head(n).mean();
  return out;
}

RectangularCauchy solve_rectangular(const EtaMap& eta1, const EtaMap& eta2, const CMatrix& A,
                                    Complex z2, const DeteqOptions& opts) {
  require_not_lower(z2, "solve_rectangular");
  if (z2 == 0.0) throw Error(ErrorCode::Domain, "solve_rectangular: z2 must be nonzero");
  require_dims(A.size() > 0, "solve_rectangular: A must be a non-empty N x M matrix with custom eta");
  if (!eta1 || !eta2) throw Error(ErrorCode::Input, "solve_rectangular: empty eta map");
  return solve_rectangular_dense(eta1, eta2, A, z2, opts);
}

double capacity(const VarianceProfile& vp, const CMatrix& A, double sigma_noise,
                const CapacityOptions& opts) {
  if (!(sigma_noise > 0.0)) throw Error(ErrorCode::Input, "capacity: noise level must be > 0");
  if (!(opts.eps1 > 0.0 && opts.eps2 > 0.0 && opts.eps1 != opts.eps2))
    throw Error(ErrorCode::Input, "capacity: need two distinct positive offsets");
  const double m1 = gram_first_moment(vp, A);
  const double omega_max = opts.omega_max > 0.0
                               ? opts.omega_max
                               : default_omega_max(m1) * std::max(1.0, sigma_noise);
  const double e1 = opts.eps1;
  const double e2 = opts.eps2;
  auto G = [&](Complex z) {
    const double omega = -z.real();
    const Complex g1 = solve_rectangular(vp, A, Complex(-omega, e1), opts.solver).g;
    const Complex g2 = solve_rectangular(vp, A, Complex(-omega, e2), opts.solver).g;
    // Linear extrapolation of g(-omega + i eps) to eps = 0.
    return Complex(((e1 * g2 - e2 * g1) / (e1 - e2)).real(), 0.0);
  };
  return mutual_information(G, sigma_noise, omega_max, opts.quad_step);
}

}  // namespace freespec
