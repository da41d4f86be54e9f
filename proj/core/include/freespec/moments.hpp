#pragma once

// Moment and cumulant calculus for one variable (sequences) and for
// several non-commuting variables (moment functionals on words).

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "freespec/partitions.hpp"

namespace freespec {

/// m_1..m_L; m_0 = 1 is implicit.
class MomentSequence {
 public:
  explicit MomentSequence(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  /// m_n for n >= 0 (m_0 = 1).
  double moment(std::size_t n) const { return n == 0 ? 1.0 : values_.at(n - 1); }

 private:
  std::vector<double> values_;
};

enum class CumulantKind { Classical, Free };

class CumulantSequence {
 public:
  CumulantSequence(CumulantKind kind, std::vector<double> values);

  CumulantKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  CumulantKind kind_;
  std::vector<double> values_;
};

/// A unital linear functional on non-commutative monomials in `arity`
/// variables, stored densely for every word of length <= max_length.
/// Variable indices are 0-based.
class MomentFunctional {
 public:
  MomentFunctional(int arity, int max_length);

  /// Fills the table from f(word) for every non-empty word.
  static MomentFunctional from_function(
      int arity, int max_length,
      const std::function<double(std::span<const int>)>& f);

  int arity() const noexcept { return arity_; }
  int max_length() const noexcept { return max_length_; }

  double operator()(std::span<const int> word) const;
  void set(std::span<const int> word, double value);

  /// Every word of length `length`, in base-`arity` counting order.
  std::vector<std::vector<int>> words(int length) const;

 private:
  std::size_t index(std::span<const int> word) const;

  int arity_;
  int max_length_;
  std::vector<std::size_t> offsets_;
  std::vector<double> table_;
};

/// Symmetric non-negative definite covariance of a Gaussian or
/// semicircular family (eigenvalues >= -1e-12).
class CovarianceSpec {
 public:
  explicit CovarianceSpec(Eigen::MatrixXd c);

  static CovarianceSpec identity(int r);

  int size() const noexcept { return static_cast<int>(c_.rows()); }
  double operator()(int i, int j) const { return c_(i, j); }
  const Eigen::MatrixXd& matrix() const noexcept { return c_; }

 private:
  Eigen::MatrixXd c_;
};

// Single-variable conversions. Lengths are bounded by the partition
// caps: classical <= 12, free <= 14 (Möbius path <= 10).

MomentSequence classical_moments_from_cumulants(const CumulantSequence& k);
CumulantSequence classical_cumulants_from_moments(const MomentSequence& m);

MomentSequence free_moments_from_cumulants(const CumulantSequence& kappa);

enum class FreeCumulantPath {
  Inductive,  // peel kappa_n off the NC(n) moment-cumulant sum
  Mobius,     // kappa_n = sum_{pi in NC(n)} mu(pi, 1_n) m_pi
};
CumulantSequence free_cumulants_from_moments(
    const MomentSequence& m, FreeCumulantPath path = FreeCumulantPath::Inductive);

CumulantSequence free_cumulant_add(const CumulantSequence& a,
                                   const CumulantSequence& b);

// Multi-variable formulas.

/// Product over blocks V = (i_1 < ... < i_l) of F(word[i_1] ... word[i_l]).
double e_pi(const Partition& pi, std::span<const int> word, const MomentFunctional& F);

/// Wick: sum over all pairings of the word of products of covariances.
double wick_gaussian_moment(std::span<const int> word, const CovarianceSpec& cov);

/// Free Wick: the same sum restricted to non-crossing pairings.
double semicircular_family_moment(std::span<const int> word, const CovarianceSpec& cov);

/// kappa_n(x_{w_1}, ..., x_{w_n}) by Möbius inversion over NC(n); n <= 10.
double mixed_free_cumulant(std::span<const int> word, const MomentFunctional& F);

struct FreenessReport {
  double max_abs_mixed_cumulant = 0.0;
  std::vector<int> worst_word;
  std::size_t words_checked = 0;
};

/// Scans every word of length 2..max_order with at least two distinct
/// letters and reports the largest |mixed free cumulant|.
FreenessReport freeness_test(const MomentFunctional& F, int max_order);

}  // namespace freespec
