#include "freespec/moments.hpp"

#include "freespec/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace freespec {

namespace {

void require_finite(const std::vector<double>& v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x))
      throw Error(ErrorCode::Input, std::string(what) + " contains a non-finite entry");
}

// prod_i x_i^{r_i} with x_i = values[i-1].
double type_product(const std::vector<int>& counts, const std::vector<double>& values) {
  double p = 1.0;
  for (std::size_t i = 0; i < counts.size(); ++i)
    for (int r = 0; r < counts[i]; ++r) p *= values[i];
  return p;
}

void check_length(std::size_t len, PartitionClass cls) {
  if (len == 0) throw Error(ErrorCode::Input, "sequence must have length >= 1");
  if (static_cast<int>(len) > materialize_cap(cls))
    throw Error(ErrorCode::SizeLimit, "sequence length " + std::to_string(len) +
                                          " exceeds the enumeration cap " +
                                          std::to_string(materialize_cap(cls)));
}

}  // namespace

MomentSequence::MomentSequence(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorCode::Input, "moment sequence must be non-empty");
  require_finite(values_, "moment sequence");
}

CumulantSequence::CumulantSequence(CumulantKind kind, std::vector<double> values)
    : kind_(kind), values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorCode::Input, "cumulant sequence must be non-empty");
  require_finite(values_, "cumulant sequence");
}

MomentFunctional::MomentFunctional(int arity, int max_length)
    : arity_(arity), max_length_(max_length) {
  if (arity < 1 || max_length < 0)
    throw Error(ErrorCode::Input, "moment functional needs arity >= 1 and max_length >= 0");
  offsets_.push_back(0);
  std::size_t block = 1;
  for (int len = 0; len <= max_length; ++len) {
    offsets_.push_back(offsets_.back() + block);
    if (offsets_.back() > 50'000'000)
      throw Error(ErrorCode::SizeLimit, "moment functional table too large");
    block *= static_cast<std::size_t>(arity);
  }
  table_.assign(offsets_.back(), 0.0);
  table_[0] = 1.0;  // E(1) = 1
}

MomentFunctional MomentFunctional::from_function(
    int arity, int max_length, const std::function<double(std::span<const int>)>& f) {
  MomentFunctional F(arity, max_length);
  for (int len = 1; len <= max_length; ++len)
    for (const auto& w : F.words(len)) F.set(w, f(w));
  return F;
}

std::size_t MomentFunctional::index(std::span<const int> word) const {
  if (static_cast<int>(word.size()) > max_length_)
    throw Error(ErrorCode::SizeLimit, "word of length " + std::to_string(word.size()) +
                                          " exceeds functional max_length " +
                                          std::to_string(max_length_));
  std::size_t idx = 0;
  std::size_t base = 1;
  for (int v : word) {
    if (v < 0 || v >= arity_)
      throw Error(ErrorCode::Dimension, "variable index " + std::to_string(v) +
                                            " outside arity " + std::to_string(arity_));
    idx += static_cast<std::size_t>(v) * base;
    base *= static_cast<std::size_t>(arity_);
  }
  return offsets_[word.size()] + idx;
}

double MomentFunctional::operator()(std::span<const int> word) const {
  return table_[index(word)];
}

void MomentFunctional::set(std::span<const int> word, double value) {
  if (word.empty()) throw Error(ErrorCode::Input, "E(1) is fixed to 1");
  table_[index(word)] = value;
}

std::vector<std::vector<int>> MomentFunctional::words(int length) const {
  std::vector<std::vector<int>> out;
  std::vector<int> w(static_cast<std::size_t>(length), 0);
  for (;;) {
    out.push_back(w);
    int pos = 0;
    while (pos < length && ++w[pos] == arity_) w[pos++] = 0;
    if (pos == length) break;
  }
  return out;
}

CovarianceSpec::CovarianceSpec(Eigen::MatrixXd c) : c_(std::move(c)) {
  if (c_.rows() != c_.cols() || c_.rows() == 0)
    throw Error(ErrorCode::Dimension, "covariance must be a non-empty square matrix");
  if (!c_.allFinite()) throw Error(ErrorCode::Input, "covariance has non-finite entries");
  const double scale = std::max(1.0, c_.cwiseAbs().maxCoeff());
  if ((c_ - c_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw Error(ErrorCode::Input, "covariance is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-12)
    throw Error(ErrorCode::Input, "covariance is not non-negative definite");
}

CovarianceSpec CovarianceSpec::identity(int r) {
  return CovarianceSpec(Eigen::MatrixXd::Identity(r, r));
}

// Classical conversions use m_n = sum_j C(n-1, j-1) kappa_j m_{n-j}, the
// partition sum grouped by the block containing 1. Accumulated in long
// double: the partition sum itself loses ~1e-9 at length 10.
namespace {

std::vector<long double> binomial_row(std::size_t n) {
  std::vector<long double> c(n + 1, 1.0L);
  for (std::size_t j = 1; j < n; ++j) c[j] = c[j - 1] * static_cast<long double>(n - j + 1) / j;
  return c;
}

}  // namespace

MomentSequence classical_moments_from_cumulants(const CumulantSequence& k) {
  if (k.kind() != CumulantKind::Classical)
    throw Error(ErrorCode::Kind, "expected classical cumulants");
  check_length(k.size(), PartitionClass::All);
  const auto& kv = k.values();
  std::vector<long double> m(k.size());
  for (std::size_t n = 1; n <= k.size(); ++n) {
    const auto c = binomial_row(n - 1);
    long double acc = kv[n - 1];
    for (std::size_t j = 1; j < n; ++j) acc += c[j - 1] * kv[j - 1] * m[n - j - 1];
    m[n - 1] = acc;
  }
  return MomentSequence(std::vector<double>(m.begin(), m.end()));
}

CumulantSequence classical_cumulants_from_moments(const MomentSequence& m) {
  check_length(m.size(), PartitionClass::All);
  const auto& mv = m.values();
  std::vector<long double> k(m.size());
  for (std::size_t n = 1; n <= m.size(); ++n) {
    const auto c = binomial_row(n - 1);
    long double acc = mv[n - 1];
    for (std::size_t j = 1; j < n; ++j) acc -= c[j - 1] * k[j - 1] * mv[n - j - 1];
    k[n - 1] = acc;
  }
  return CumulantSequence(CumulantKind::Classical, std::vector<double>(k.begin(), k.end()));
}

MomentSequence free_moments_from_cumulants(const CumulantSequence& kappa) {
  if (kappa.kind() != CumulantKind::Free)
    throw Error(ErrorCode::Kind, "expected free cumulants");
  check_length(kappa.size(), PartitionClass::NonCrossing);
  std::vector<double> m(kappa.size());
  for (std::size_t n = 1; n <= kappa.size(); ++n) {
    double acc = 0.0;
    for (const auto& t : block_type_census(static_cast<int>(n), PartitionClass::NonCrossing))
      acc += static_cast<double>(t.multiplicity) * type_product(t.counts, kappa.values());
    m[n - 1] = acc;
  }
  return MomentSequence(std::move(m));
}

CumulantSequence free_cumulants_from_moments(const MomentSequence& m,
                                             FreeCumulantPath path) {
  const std::size_t L = m.size();
  std::vector<double> kappa(L, 0.0);

  if (path == FreeCumulantPath::Mobius) {
    if (L > static_cast<std::size_t>(kMobiusTableCap))
      throw Error(ErrorCode::SizeLimit, "Möbius path supports length <= " +
                                            std::to_string(kMobiusTableCap));
    for (std::size_t n = 1; n <= L; ++n) {
      double acc = 0.0;
      for (const auto& e : mobius_to_top_table(static_cast<int>(n))) {
        double prod = 1.0;
        for (const auto& b : e.partition.blocks()) prod *= m.values()[b.size() - 1];
        acc += static_cast<double>(e.mu_to_top) * prod;
      }
      kappa[n - 1] = acc;
    }
    return CumulantSequence(CumulantKind::Free, std::move(kappa));
  }

  check_length(L, PartitionClass::NonCrossing);
  for (std::size_t n = 1; n <= L; ++n) {
    // m_n = kappa_n + sum over pi != 1_n; every other type only uses
    // kappa_1..kappa_{n-1}, which are already known.
    double rest = 0.0;
    for (const auto& t : block_type_census(static_cast<int>(n), PartitionClass::NonCrossing)) {
      if (t.counts[n - 1] == 1) continue;  // the single-block partition 1_n
      rest += static_cast<double>(t.multiplicity) * type_product(t.counts, kappa);
    }
    kappa[n - 1] = m.values()[n - 1] - rest;
  }
  return CumulantSequence(CumulantKind::Free, std::move(kappa));
}

CumulantSequence free_cumulant_add(const CumulantSequence& a, const CumulantSequence& b) {
  if (a.kind() != CumulantKind::Free || b.kind() != CumulantKind::Free)
    throw Error(ErrorCode::Kind, "free_cumulant_add expects free cumulants");
  if (a.size() != b.size())
    throw Error(ErrorCode::Dimension, "cumulant sequences differ in length (" +
                                          std::to_string(a.size()) + " vs " +
                                          std::to_string(b.size()) + ")");
  std::vector<double> s(a.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = a.values()[i] + b.values()[i];
  return CumulantSequence(CumulantKind::Free, std::move(s));
}

double e_pi(const Partition& pi, std::span<const int> word, const MomentFunctional& F) {
  if (static_cast<std::size_t>(pi.size()) != word.size())
    throw Error(ErrorCode::Dimension, "e_pi: partition size " + std::to_string(pi.size()) +
                                          " != word length " + std::to_string(word.size()));
  double prod = 1.0;
  std::vector<int> sub;
  for (const auto& b : pi.blocks()) {
    sub.clear();
    for (int e : b) sub.push_back(word[e - 1]);
    prod *= F(sub);
  }
  return prod;
}

namespace {

double pairing_sum(std::span<const int> word, const CovarianceSpec& cov, PartitionClass cls) {
  for (int v : word)
    if (v < 0 || v >= cov.size())
      throw Error(ErrorCode::Dimension, "word index " + std::to_string(v) +
                                            " outside covariance of size " +
                                            std::to_string(cov.size()));
  if (word.empty()) return 1.0;
  if (word.size() % 2) return 0.0;
  double acc = 0.0;
  for_each_partition(static_cast<int>(word.size()), cls, [&](const Partition& p) {
    double prod = 1.0;
    for (const auto& b : p.blocks()) prod *= cov(word[b[0] - 1], word[b[1] - 1]);
    acc += prod;
  });
  return acc;
}

}  // namespace

double wick_gaussian_moment(std::span<const int> word, const CovarianceSpec& cov) {
  return pairing_sum(word, cov, PartitionClass::Pairings);
}

double semicircular_family_moment(std::span<const int> word, const CovarianceSpec& cov) {
  return pairing_sum(word, cov, PartitionClass::NonCrossingPairings);
}

double mixed_free_cumulant(std::span<const int> word, const MomentFunctional& F) {
  if (word.empty()) throw Error(ErrorCode::Input, "cumulant of the empty word");
  if (static_cast<int>(word.size()) > F.max_length())
    throw Error(ErrorCode::SizeLimit, "word longer than the functional's table");
  double acc = 0.0;
  for (const auto& e : mobius_to_top_table(static_cast<int>(word.size())))
    acc += static_cast<double>(e.mu_to_top) * e_pi(e.partition, word, F);
  return acc;
}

FreenessReport freeness_test(const MomentFunctional& F, int max_order) {
  if (max_order > F.max_length())
    throw Error(ErrorCode::SizeLimit, "functional is only defined up to length " +
                                          std::to_string(F.max_length()));
  if (max_order > kMobiusTableCap)
    throw Error(ErrorCode::SizeLimit, "freeness_test supports orders <= " +
                                          std::to_string(kMobiusTableCap));
  FreenessReport report;
  if (F.arity() < 2) return report;
  for (int len = 2; len <= max_order; ++len) {
    for (const auto& w : F.words(len)) {
      bool mixed = false;
      for (int v : w) mixed |= (v != w.front());
      if (!mixed) continue;
      const double k = std::abs(mixed_free_cumulant(w, F));
      ++report.words_checked;
      if (report.worst_word.empty() || k > report.max_abs_mixed_cumulant) {
        report.max_abs_mixed_cumulant = k;
        report.worst_word = w;
      }
    }
  }
  return report;
}

}  // namespace freespec
