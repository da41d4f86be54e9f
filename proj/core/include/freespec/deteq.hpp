#pragma once

// Deterministic-equivalent fixed-point solvers for matrices with
// independent entries of prescribed variance: the Hermitian A + X system,
// the rectangular (A + X)(A + X)* system, and the capacity built on it.
//
// Conventions: sigma is stored unscaled; entry (i, j) of X has variance
// sigma_ij / N where N is the row count. An empty mean matrix (size 0)
// stands for A = 0.

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "freespec/measure.hpp"

namespace freespec {

using CMatrix = Eigen::MatrixXcd;
using EtaMap = std::function<CMatrix(const CMatrix&)>;

class VarianceProfile {
 public:
  /// Throws Error(Input) on negative or non-finite entries or an empty matrix.
  explicit VarianceProfile(Eigen::MatrixXd sigma);
  static VarianceProfile constant(int rows, int cols, double value = 1.0);
  /// sigma_ij = 1 if |i - j| <= half_width, else 0.
  static VarianceProfile banded(int n, int half_width);

  int rows() const { return static_cast<int>(sigma_.rows()); }
  int cols() const { return static_cast<int>(sigma_.cols()); }
  const Eigen::MatrixXd& sigma() const { return sigma_; }
  bool is_square_symmetric() const;
  bool is_zero() const { return sigma_.isZero(0.0); }

 private:
  Eigen::MatrixXd sigma_;
};

/// Diagonal matrix with entry i = (1/N) sum_k sigma_ik B_kk. B is N x N.
CMatrix eta(const CMatrix& B, const VarianceProfile& vp);

enum class EtaSide { Left, Right };

/// Left: B is M x M, result N x N with (1/N) sum_k sigma_ik B_kk.
/// Right: B is N x N, result M x M with (1/N) sum_k sigma_kj B_kk.
CMatrix eta12(const CMatrix& B, const VarianceProfile& vp, EtaSide side);

struct DeteqOptions {
  double tol = 1e-10;
  int max_iter = 20000;
  /// Initial damping; halved whenever the residual grows.
  double alpha = 0.7;
  /// Skip the diagonal fast path even when A is diagonal.
  bool force_dense = false;
  /// Check the half-plane condition on every iterate, not only at the end.
  bool check_every_iterate = false;
};

struct MatrixCauchy {
  Complex z;
  CMatrix G;
  /// tr(G) = Tr(G) / N.
  Complex g;
  double residual = 0.0;
  int iterations = 0;
};

struct RectangularCauchy {
  Complex z2;
  CMatrix G1;  // N x N
  CMatrix G2;  // M x M
  /// (1/N) Tr(G1), the Cauchy transform of the spectrum of YY*.
  Complex g;
  double residual = 0.0;
  int iterations = 0;
};

/// G = (z - eta(G) - A)^{-1} for Hermitian A (N x N) and symmetric square
/// profile. Im z > 0, or real z away from the spectrum. Uses a diagonal
/// recursion when A is diagonal.
///
/// Throws ConvergenceError (with residual trace) after max_iter,
/// Error(Numerical) for a singular resolvent, Error(HalfPlane) for
/// Im z < 0, Error(Domain) if the limit violates Im G <= 0.
MatrixCauchy solve_hermitian(const VarianceProfile& vp, const CMatrix& A, Complex z,
                             const DeteqOptions& opts = {});
/// Same with a caller-supplied linear map in place of the profile one.
MatrixCauchy solve_hermitian(const EtaMap& eta_map, const CMatrix& A, Complex z,
                             const DeteqOptions& opts = {});

/// With w = z2:
///   G1 = [w (I - eta_1(G2)) - A (I - eta_2(G1))^{-1} A*]^{-1}
///   G2 = [w (I - eta_2(G1)) - A* (I - eta_1(G2))^{-1} A]^{-1}
/// where eta_1 = eta12(., Left) and eta_2 = eta12(., Right). A is N x M.
/// The two blocks are updated together from the previous iterate.
RectangularCauchy solve_rectangular(const VarianceProfile& vp, const CMatrix& A, Complex z2,
                                    const DeteqOptions& opts = {});
RectangularCauchy solve_rectangular(const EtaMap& eta1, const EtaMap& eta2, const CMatrix& A,
                                    Complex z2, const DeteqOptions& opts = {});

/// max eigenvalue of (G - G*) / (2i); <= 0 in the matrix half-plane.
double half_plane_violation(const CMatrix& G);

/// First moment of the spectrum of YY*: (1/N) [sum sigma_ij / N + |A|_F^2].
double gram_first_moment(const VarianceProfile& vp, const CMatrix& A);

struct CapacityOptions {
  double eps1 = 1e-3;
  double eps2 = 1e-4;
  /// 0 selects default_omega_max(gram_first_moment).
  double omega_max = 0.0;
  double quad_step = 0.25;
  DeteqOptions solver;
};

/// Mutual information in nats per receive dimension of y = (A + X) x + n
/// at noise level sigma_noise, from g_{YY*}(-omega). Each evaluation
/// solves at -omega + i eps for both eps and extrapolates linearly to 0.
double capacity(const VarianceProfile& vp, const CMatrix& A, double sigma_noise,
                const CapacityOptions& opts = {});

}  // namespace freespec
