#include "freespec/rmt.hpp"

#include "freespec/error.hpp"
#include "freespec/parallel.hpp"
#include "freespec/transforms.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

namespace freespec {

int EnsembleSpec::rows() const {
  return kind == EnsembleKind::ProfileGaussian && profile ? profile->rows() : n;
}

int EnsembleSpec::cols() const {
  switch (kind) {
    case EnsembleKind::ComplexIID:
      return m > 0 ? m : n;
    case EnsembleKind::ProfileGaussian:
      return profile ? profile->cols() : n;
    default:
      return n;
  }
}

bool EnsembleSpec::is_hermitian() const {
  switch (kind) {
    case EnsembleKind::GUE:
    case EnsembleKind::WignerReal:
      return true;
    case EnsembleKind::ProfileGaussian:
      return hermitian;
    default:
      return false;
  }
}

void EnsembleSpec::validate() const {
  if (kind == EnsembleKind::ProfileGaussian) {
    if (!profile) throw Error(ErrorCode::Input, "ProfileGaussian needs a variance profile");
    if (hermitian && !profile->is_square_symmetric())
      throw Error(ErrorCode::Input, "Hermitian ProfileGaussian needs a square symmetric profile");
    if (mean.size() != 0) {
      if (mean.rows() != profile->rows() || mean.cols() != profile->cols())
        throw Error(ErrorCode::Dimension, "ProfileGaussian mean must match the profile shape");
      if (hermitian && (mean - mean.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw Error(ErrorCode::Input, "Hermitian ProfileGaussian needs a Hermitian mean");
    }
    return;
  }
  if (n < 1) throw Error(ErrorCode::Input, "ensemble size n must be >= 1");
  if (m < 0) throw Error(ErrorCode::Input, "ensemble column count m must be >= 0");
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial) noexcept {
  return splitmix64(base ^ splitmix64(trial));
}

namespace {

using Engine = std::mt19937_64;

Complex complex_gaussian(Engine& eng, double variance) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5 * variance));
  const double re = nd(eng);
  const double im = nd(eng);
  return {re, im};
}

double real_entry(Engine& eng, EntryDist d) {
  switch (d) {
    case EntryDist::Gaussian:
      return std::normal_distribution<double>(0.0, 1.0)(eng);
    case EntryDist::Rademacher:
      return (eng() >> 63) ? 1.0 : -1.0;
    case EntryDist::UniformCentered: {
      const double h = std::sqrt(3.0);
      return std::uniform_real_distribution<double>(-h, h)(eng);
    }
  }
  return 0.0;
}

CMatrix haar_from_engine(int n, Engine& eng) {
  CMatrix Z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) Z(i, j) = complex_gaussian(eng, 1.0);
  Eigen::HouseholderQR<CMatrix> qr(Z);
  CMatrix Q = qr.householderQ();
  const CMatrix& R = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const Complex r = R(j, j);
    const double a = std::abs(r);
    Q.col(j) *= a > 0.0 ? r / a : Complex(1.0, 0.0);
  }
  return Q;
}

CMatrix draw(const EnsembleSpec& spec, Engine& eng) {
  const int n = spec.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  switch (spec.kind) {
    case EnsembleKind::GUE: {
      CMatrix X(n, n);
      std::normal_distribution<double> diag(0.0, std::sqrt(inv_n));
      for (int j = 0; j < n; ++j) {
        X(j, j) = diag(eng);
        for (int i = j + 1; i < n; ++i) {
          X(i, j) = complex_gaussian(eng, inv_n);
          X(j, i) = std::conj(X(i, j));
        }
      }
      return X;
    }
    case EnsembleKind::WignerReal: {
      CMatrix X(n, n);
      const double s = std::sqrt(inv_n);
      for (int j = 0; j < n; ++j)
        for (int i = j; i < n; ++i) {
          X(i, j) = s * real_entry(eng, spec.entry);
          X(j, i) = X(i, j);
        }
      return X;
    }
    case EnsembleKind::ComplexIID: {
      const int m = spec.cols();
      CMatrix X(n, m);
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) X(i, j) = complex_gaussian(eng, inv_n);
      return X;
    }
    case EnsembleKind::HaarUnitary:
      return haar_from_engine(n, eng);
    case EnsembleKind::ProfileGaussian: {
      const auto& sig = spec.profile->sigma();
      const int m = spec.cols();
      CMatrix X(n, m);
      if (spec.hermitian) {
        for (int j = 0; j < n; ++j) {
          X(j, j) = std::normal_distribution<double>(0.0, std::sqrt(sig(j, j) * inv_n))(eng);
          for (int i = j + 1; i < n; ++i) {
            X(i, j) = complex_gaussian(eng, sig(i, j) * inv_n);
            X(j, i) = std::conj(X(i, j));
          }
        }
      } else {
        for (int j = 0; j < m; ++j)
          for (int i = 0; i < n; ++i) X(i, j) = complex_gaussian(eng, sig(i, j) * inv_n);
      }
      if (spec.mean.size() != 0) X += spec.mean;
      return X;
    }
  }
  throw Error(ErrorCode::Input, "unknown ensemble kind");
}

std::vector<double> eigenvalues_of(const EnsembleSpec& spec, std::uint64_t trial, bool gram) {
  const CMatrix X = sample(spec, trial);
  Eigen::SelfAdjointEigenSolver<CMatrix> es;
  if (gram) {
    es.compute(X * X.adjoint(), Eigen::EigenvaluesOnly);
  } else {
    if (!spec.is_hermitian())
      throw Error(ErrorCode::Kind, "spectrum of a non-Hermitian ensemble; use the Gram option");
    es.compute(X, Eigen::EigenvaluesOnly);
  }
  if (es.info() != Eigen::Success) throw Error(ErrorCode::Numerical, "eigensolver failed");
  const auto& ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

Estimate summarize(const std::vector<double>& xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  const double t = static_cast<double>(xs.size());
  const double mean = s.value() / t;
  if (xs.size() < 2) return {mean, 0.0};
  CompensatedSum v;
  for (double x : xs) v.add((x - mean) * (x - mean));
  return {mean, std::sqrt(v.value() / (t - 1.0) / t)};
}

void require_trials(int trials) {
  if (trials < 1) throw Error(ErrorCode::Input, "trials must be >= 1");
}

}  // namespace

CMatrix sample(const EnsembleSpec& spec) { return sample(spec, 0); }

CMatrix sample(const EnsembleSpec& spec, std::uint64_t trial) {
  spec.validate();
  Engine eng(trial_seed(spec.seed, trial));
  return draw(spec, eng);
}

CMatrix haar_unitary(int n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::Input, "haar_unitary: n must be >= 1");
  Engine eng(seed);
  return haar_from_engine(n, eng);
}

std::vector<Estimate> empirical_moments(const EnsembleSpec& spec, int max_k, int trials,
                                        unsigned workers) {
  require_trials(trials);
  if (max_k < 1) throw Error(ErrorCode::Input, "empirical_moments: max_k must be >= 1");
  if (!spec.is_hermitian())
    throw Error(ErrorCode::Kind, "empirical_moments needs a Hermitian ensemble");
  std::vector<std::vector<double>> per(static_cast<std::size_t>(max_k),
                                       std::vector<double>(static_cast<std::size_t>(trials)));
  parallel_for(static_cast<std::size_t>(trials), workers, [&](std::size_t t) {
    const auto ev = eigenvalues_of(spec, t, false);
    for (int k = 1; k <= max_k; ++k) {
      CompensatedSum s;
      for (double l : ev) s.add(std::pow(l, k));
      per[static_cast<std::size_t>(k - 1)][t] = s.value() / static_cast<double>(ev.size());
    }
  });
  std::vector<Estimate> out;
  for (const auto& v : per) out.push_back(summarize(v));
  return out;
}

EmpiricalSpectrum empirical_spectrum(const EnsembleSpec& spec, int trials, bool gram,
                                     unsigned workers) {
  require_trials(trials);
  std::vector<std::vector<double>> per(static_cast<std::size_t>(trials));
  parallel_for(per.size(), workers, [&](std::size_t t) { per[t] = eigenvalues_of(spec, t, gram); });
  EmpiricalSpectrum s;
  s.trials = trials;
  s.n = static_cast<int>(per.front().size());
  for (auto& v : per) s.eigenvalues.insert(s.eigenvalues.end(), v.begin(), v.end());
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
  return s;
}

Histogram histogram(const EmpiricalSpectrum& s, double lo, double hi, double width) {
  if (!(hi > lo) || !(width > 0.0)) throw Error(ErrorCode::Input, "histogram: need lo < hi, width > 0");
  if (s.eigenvalues.empty()) throw Error(ErrorCode::Input, "histogram: empty spectrum");
  const auto bins = static_cast<std::size_t>(std::ceil((hi - lo) / width - 1e-9));
  Histogram h{lo, width, std::vector<double>(bins, 0.0)};
  for (double l : s.eigenvalues) {
    if (l < lo) continue;
    const auto b = static_cast<std::size_t>((l - lo) / width);
    if (b < bins) h.density[b] += 1.0;
  }
  const double norm = static_cast<double>(s.eigenvalues.size()) * width;
  for (auto& d : h.density) d /= norm;
  return h;
}

double l1_distance(const Histogram& h, const std::function<double(double)>& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < h.density.size(); ++i)
    acc += std::abs(h.density[i] - f(h.center(i))) * h.width;
  return acc;
}

std::vector<ComplexEstimate> empirical_cauchy(const EnsembleSpec& spec,
                                              std::span<const Complex> zs, int trials,
                                              bool gram, unsigned workers) {
  require_trials(trials);
  const std::size_t nz = zs.size();
  std::vector<std::vector<double>> re(nz, std::vector<double>(static_cast<std::size_t>(trials)));
  auto im = re;
  parallel_for(static_cast<std::size_t>(trials), workers, [&](std::size_t t) {
    const auto ev = eigenvalues_of(spec, t, gram);
    for (std::size_t k = 0; k < nz; ++k) {
      CompensatedSum sr, si;
      for (double l : ev) {
        const Complex r = 1.0 / (zs[k] - l);
        sr.add(r.real());
        si.add(r.imag());
      }
      re[k][t] = sr.value() / static_cast<double>(ev.size());
      im[k][t] = si.value() / static_cast<double>(ev.size());
    }
  });
  std::vector<ComplexEstimate> out;
  for (std::size_t k = 0; k < nz; ++k) {
    const Estimate a = summarize(re[k]);
    const Estimate b = summarize(im[k]);
    out.push_back({Complex(a.mean, b.mean), std::hypot(a.std_error, b.std_error)});
  }
  return out;
}

namespace {

std::vector<CMatrix> materialize(const std::vector<MatrixSource>& sources, std::uint64_t trial) {
  std::vector<CMatrix> out;
  out.reserve(sources.size());
  for (const auto& src : sources) {
    if (const auto* spec = std::get_if<EnsembleSpec>(&src)) {
      out.push_back(sample(*spec, trial));
    } else if (const auto* fixed = std::get_if<CMatrix>(&src)) {
      out.push_back(*fixed);
    } else {
      const auto& hc = std::get<HaarConjugated>(src);
      if (hc.B.rows() != hc.B.cols() || hc.B.size() == 0)
        throw Error(ErrorCode::Dimension, "Haar-conjugated matrix must be square");
      const CMatrix U = haar_unitary(static_cast<int>(hc.B.rows()), trial_seed(hc.seed, trial));
      out.push_back(U * hc.B * U.adjoint());
    }
  }
  if (out.empty()) throw Error(ErrorCode::Input, "mixed trace needs at least one matrix");
  const auto n = out.front().rows();
  for (const auto& M : out)
    if (M.rows() != n || M.cols() != n)
      throw Error(ErrorCode::Dimension, "mixed trace needs square matrices of one size");
  return out;
}

// tr(PQ) = (1/N) sum_ij P_ij Q_ji without forming PQ.
Complex trace_of_product(const CMatrix& P, const CMatrix& Q) {
  return (P.array() * Q.transpose().array()).sum() / static_cast<double>(P.rows());
}

std::pair<double, double> complex_summary(const std::vector<Complex>& xs, Complex& mean) {
  std::vector<double> re, im;
  for (auto x : xs) {
    re.push_back(x.real());
    im.push_back(x.imag());
  }
  const Estimate a = summarize(re);
  const Estimate b = summarize(im);
  mean = Complex(a.mean, b.mean);
  return {a.std_error, b.std_error};
}

}  // namespace

ComplexEstimate mixed_trace(const std::vector<MatrixSource>& sources,
                            const std::vector<Letter>& word, int trials, unsigned workers) {
  require_trials(trials);
  if (word.empty()) return {Complex(1.0, 0.0), 0.0};
  for (const auto& l : word) {
    if (l.matrix < 0 || static_cast<std::size_t>(l.matrix) >= sources.size())
      throw Error(ErrorCode::Dimension, "mixed_trace: letter refers to a missing matrix");
    if (l.power < 1) throw Error(ErrorCode::Input, "mixed_trace: powers must be >= 1");
  }
  std::vector<Complex> per(static_cast<std::size_t>(trials));
  parallel_for(per.size(), workers, [&](std::size_t t) {
    const auto mats = materialize(sources, t);
    std::vector<CMatrix> factors;
    for (const auto& l : word) {
      const CMatrix& M = mats[static_cast<std::size_t>(l.matrix)];
      for (int p = 0; p < l.power; ++p) factors.push_back(l.star ? CMatrix(M.adjoint()) : M);
    }
    if (factors.size() == 1) {
      per[t] = factors.front().trace() / static_cast<double>(factors.front().rows());
      return;
    }
    const std::size_t half = (factors.size() + 1) / 2;
    CMatrix P = factors[0];
    for (std::size_t i = 1; i < half; ++i) P = P * factors[i];
    CMatrix Q = factors[half];
    for (std::size_t i = half + 1; i < factors.size(); ++i) Q = Q * factors[i];
    per[t] = trace_of_product(P, Q);
  });
  Complex mean;
  const auto [sr, si] = complex_summary(per, mean);
  return {mean, std::hypot(sr, si)};
}

FreenessMCReport freeness_report(const std::vector<MatrixSource>& sources, int max_order,
                                 int trials, double threshold, unsigned workers) {
  require_trials(trials);
  if (max_order < 2) throw Error(ErrorCode::Order, "freeness_report: max_order must be >= 2");
  const int arity = static_cast<int>(sources.size());
  if (arity < 2) throw Error(ErrorCode::Input, "freeness_report needs at least two matrices");

  MomentFunctional shape(arity, max_order);
  std::vector<std::vector<int>> all_words;
  for (int len = 1; len <= max_order; ++len)
    for (auto& w : shape.words(len)) all_words.push_back(std::move(w));
  const std::size_t half_max = static_cast<std::size_t>((max_order + 1) / 2);

  std::vector<std::vector<double>> per(static_cast<std::size_t>(trials));
  std::vector<int> sizes(static_cast<std::size_t>(trials), 0);
  parallel_for(per.size(), workers, [&](std::size_t t) {
    const auto mats = materialize(sources, t);
    sizes[t] = static_cast<int>(mats.front().rows());
    // Products of every word up to half the order; longer words are a
    // trace of two cached products.
    std::map<std::vector<int>, CMatrix> prod;
    for (const auto& w : all_words) {
      if (w.size() > half_max) break;
      if (w.size() == 1) {
        prod.emplace(w, mats[static_cast<std::size_t>(w[0])]);
      } else {
        const std::vector<int> head(w.begin(), w.end() - 1);
        prod.emplace(w, prod.at(head) * mats[static_cast<std::size_t>(w.back())]);
      }
    }
    auto& vals = per[t];
    vals.reserve(all_words.size());
    for (const auto& w : all_words) {
      if (w.size() == 1) {
        const CMatrix& M = prod.at(w);
        vals.push_back((M.trace() / static_cast<double>(M.rows())).real());
        continue;
      }
      const std::size_t h = (w.size() + 1) / 2;
      const std::vector<int> a(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(h));
      const std::vector<int> b(w.begin() + static_cast<std::ptrdiff_t>(h), w.end());
      vals.push_back(trace_of_product(prod.at(a), prod.at(b)).real());
    }
  });

  MomentFunctional F(arity, max_order);
  for (std::size_t k = 0; k < all_words.size(); ++k) {
    CompensatedSum s;
    for (const auto& v : per) s.add(v[k]);
    F.set(all_words[k], s.value() / static_cast<double>(trials));
  }
  FreenessMCReport out;
  out.n = sizes.front();
  out.trials = trials;
  out.threshold = threshold > 0.0 ? threshold : 50.0 / static_cast<double>(out.n);
  out.report = freeness_test(F, max_order);
  out.passed = out.report.max_abs_mixed_cumulant <= out.threshold;
  return out;
}

Estimate mc_capacity(const VarianceProfile& vp, const CMatrix& A, double sigma_noise, int trials,
                     std::uint64_t seed, unsigned workers) {
  require_trials(trials);
  if (!(sigma_noise > 0.0)) throw Error(ErrorCode::Input, "mc_capacity: noise level must be > 0");
  EnsembleSpec spec;
  spec.kind = EnsembleKind::ProfileGaussian;
  spec.profile = vp;
  spec.mean = A;
  spec.seed = seed;
  spec.validate();
  std::vector<double> per(static_cast<std::size_t>(trials));
  parallel_for(per.size(), workers, [&](std::size_t t) {
    const auto ev = eigenvalues_of(spec, t, true);
    per[t] = mutual_info_from_eigs(ev, sigma_noise);
  });
  return summarize(per);
}

}  // namespace freespec
