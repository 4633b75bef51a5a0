#include "ev/states.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ev {

size_t dims_product(const Dims& dims) {
  size_t d = 1;
  for (int m : dims) {
    if (m < 2) throw InvalidInput("every local dimension must be >= 2");
    d *= static_cast<size_t>(m);
  }
  return d;
}

size_t flat_index(const Dims& dims, const std::vector<int>& idx) {
  size_t f = 0;
  for (size_t i = 0; i < dims.size(); ++i) f = f * dims[i] + idx[i];
  return f;
}

std::vector<int> unflatten_index(const Dims& dims, size_t flat) {
  std::vector<int> idx(dims.size());
  for (size_t i = dims.size(); i-- > 0;) {
    idx[i] = static_cast<int>(flat % dims[i]);
    flat /= dims[i];
  }
  return idx;
}

namespace {

Eigen::MatrixXcd to_eigen(const Matrix<FloatScalar>& m) {
  Eigen::MatrixXcd out(m.rows(), m.cols());
  for (size_t i = 0; i < m.rows(); ++i)
    for (size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

template <class S>
typename ScalarOps<S>::Real vector_norm2(const std::vector<S>& v) {
  auto n = ScalarOps<S>::real_zero();
  for (const S& x : v) {
    S m = ScalarOps<S>::conj(x) * x;
    if constexpr (ScalarOps<S>::exact)
      n += m.re;
    else
      n += m.real();
  }
  return n;
}

}  // namespace

template <class S>
void DensityMatrix<S>::validate(double tol) const {
  size_t d = dims_product(dims);
  if (entries.rows() != d || entries.cols() != d)
    throw InvalidInput("density matrix shape does not match dims");
  if (!entries.is_hermitian(tol))
    throw InvalidInput("density matrix is not Hermitian");
  S tr = entries.trace();
  if (!ScalarOps<S>::eq(tr, ScalarOps<S>::one(), tol))
    throw InvalidInput("density matrix trace is not 1");
}

template <class S>
void Ensemble<S>::validate(double tol) const {
  size_t d = dims_product(dims);
  if (weights.size() != vectors.size())
    throw InvalidInput("ensemble weights and vectors differ in length");
  if (vectors.empty()) throw InvalidInput("empty ensemble");
  auto sum = ScalarOps<S>::real_zero();
  for (size_t f = 0; f < weights.size(); ++f) {
    if (!(weights[f] > ScalarOps<S>::real_zero()))
      throw InvalidInput("ensemble weights must be positive");
    sum += weights[f];
    if (vectors[f].size() != d)
      throw InvalidInput("ensemble vector length does not match dims");
    auto n2 = vector_norm2<S>(vectors[f]);
    if constexpr (ScalarOps<S>::exact) {
      if (n2 == 0) throw InvalidInput("ensemble vector is zero");
    } else {
      if (std::abs(n2 - 1.0) > std::max(tol, 1e-12) * 10)
        throw InvalidInput("float ensemble vectors must be unit length");
    }
  }
  if constexpr (ScalarOps<S>::exact) {
    if (sum != 1) throw InvalidInput("ensemble weights must sum to 1");
  } else {
    if (std::abs(sum - 1.0) > std::max(tol, 1e-12) * 10)
      throw InvalidInput("ensemble weights must sum to 1");
  }
}

template <class S>
typename ScalarOps<S>::Real Ensemble<S>::squared_norm(size_t f) const {
  return vector_norm2<S>(vectors[f]);
}

template <class S>
typename ScalarOps<S>::Real Ensemble<S>::column_weight(size_t f) const {
  return weights[f] / squared_norm(f);
}

template <class S>
DensityMatrix<S> density_from_ensemble_serial(const Ensemble<S>& e) {
  e.validate();
  size_t d = dims_product(e.dims);
  Matrix<S> rho(d, d);
  for (size_t f = 0; f < e.size(); ++f) {
    S w = ScalarOps<S>::from_real(e.column_weight(f));
    const auto& v = e.vectors[f];
    for (size_t i = 0; i < d; ++i) {
      if (ScalarOps<S>::is_zero(v[i], 0.0)) continue;
      S wi = w * v[i];
      for (size_t j = 0; j < d; ++j)
        rho(i, j) += wi * ScalarOps<S>::conj(v[j]);
    }
  }
  return DensityMatrix<S>{e.dims, std::move(rho)};
}

template <class S>
DensityMatrix<S> density_from_ensemble(const Ensemble<S>& e) {
  e.validate();
  size_t d = dims_product(e.dims);
  std::vector<S> w(e.size());
  for (size_t f = 0; f < e.size(); ++f)
    w[f] = ScalarOps<S>::from_real(e.column_weight(f));
  Matrix<S> rho(d, d);
#pragma omp parallel for schedule(dynamic)
  for (size_t i = 0; i < d; ++i) {
    for (size_t f = 0; f < e.size(); ++f) {
      const auto& v = e.vectors[f];
      if (ScalarOps<S>::is_zero(v[i], 0.0)) continue;
      S wi = w[f] * v[i];
      for (size_t j = 0; j < d; ++j)
        rho(i, j) += wi * ScalarOps<S>::conj(v[j]);
    }
  }
  return DensityMatrix<S>{e.dims, std::move(rho)};
}

template <>
Ensemble<ExactScalar> ensemble_from_density(const DensityMatrix<ExactScalar>& rho,
                                            double) {
  rho.validate();
  size_t d = dims_product(rho.dims);
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j)
      if (i != j && !rho.entries(i, j).is_zero())
        throw UnsupportedExactDecomposition(
            "exact decomposition requires a diagonal density matrix");
  Ensemble<ExactScalar> e;
  e.dims = rho.dims;
  for (size_t i = 0; i < d; ++i) {
    const ExactScalar& p = rho.entries(i, i);
    if (p.is_zero()) continue;
    if (p.im != 0 || p.re < 0)
      throw InvalidInput("diagonal entries must be nonnegative reals");
    std::vector<ExactScalar> v(d);
    v[i] = ExactScalar(1);
    e.weights.push_back(p.re);
    e.vectors.push_back(std::move(v));
  }
  e.validate();
  return e;
}

template <>
Ensemble<FloatScalar> ensemble_from_density(const DensityMatrix<FloatScalar>& rho,
                                            double tol) {
  rho.validate(tol);
  size_t d = dims_product(rho.dims);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(rho.entries));
  if (es.info() != Eigen::Success)
    throw NumericFailure("eigendecomposition failed");
  double cut = tol * static_cast<double>(d) *
               std::max(rho.entries.max_abs(), 1e-300);
  Ensemble<FloatScalar> e;
  e.dims = rho.dims;
  for (Eigen::Index k = d - 1; k >= 0; --k) {  // descending eigenvalues
    double lam = es.eigenvalues()(k);
    if (lam <= cut) continue;
    std::vector<FloatScalar> v(d);
    for (size_t i = 0; i < d; ++i) v[i] = es.eigenvectors()(i, k);
    e.weights.push_back(lam);
    e.vectors.push_back(std::move(v));
  }
  if (e.vectors.empty()) throw NumericFailure("density matrix is numerically zero");
  // renormalize the retained spectrum so downstream checks see weight sum 1
  double sum = std::accumulate(e.weights.begin(), e.weights.end(), 0.0);
  for (double& w : e.weights) w /= sum;
  return e;
}

template <class S>
Matrix<S> partial_transpose(const DensityMatrix<S>& rho,
                            const std::set<int>& parties) {
  size_t d = dims_product(rho.dims);
  for (int p : parties)
    if (p < 0 || p >= static_cast<int>(rho.dims.size()))
      throw InvalidInput("party index out of range");
  Matrix<S> out(d, d);
  for (size_t a = 0; a < d; ++a) {
    auto ai = unflatten_index(rho.dims, a);
    for (size_t b = 0; b < d; ++b) {
      auto bi = unflatten_index(rho.dims, b);
      auto a2 = ai, b2 = bi;
      for (int p : parties) std::swap(a2[p], b2[p]);
      out(flat_index(rho.dims, a2), flat_index(rho.dims, b2)) =
          rho.entries(a, b);
    }
  }
  return out;
}

template <>
PsdWitness is_positive_semidefinite(const Matrix<ExactScalar>& m, double) {
  if (!m.is_hermitian(0.0)) throw InvalidInput("PSD test needs Hermitian input");
  size_t n = m.rows();
  // Symmetric elimination A -> E A E^dag over the active block, keeping the
  // accumulated row operations P so that a bad pivot yields an exact witness
  // ray x = P^dag y with x^dag M x < 0.
  Matrix<ExactScalar> a = m;
  Matrix<ExactScalar> p_ops = Matrix<ExactScalar>::identity(n);
  std::vector<bool> done(n, false);
  PsdWitness w;

  auto witness_from = [&](const std::vector<ExactScalar>& seed) {
    Matrix<ExactScalar> pd = p_ops.adjoint();
    std::vector<ExactScalar> x(n);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) x[i] += pd(i, j) * seed[j];
    return x;
  };

  for (size_t step = 0; step < n; ++step) {
    size_t piv = n;
    for (size_t i = 0; i < n; ++i)
      if (!done[i] && !a(i, i).is_zero()) {
        piv = i;
        break;
      }
    if (piv == n) {
      // no usable diagonal pivot; any active off-diagonal entry is a
      // certificate of indefiniteness
      for (size_t i = 0; i < n; ++i) {
        if (done[i]) continue;
        for (size_t j = 0; j < n; ++j) {
          if (done[j] || j == i || a(i, j).is_zero()) continue;
          std::vector<ExactScalar> seed(n);
          seed[i] = -a(i, j);  // y^dag A y = -2 |a_ij|^2
          seed[j] = ExactScalar(1);
          w.psd = false;
          w.ray = witness_from(seed);
          return w;
        }
      }
      break;  // active block is identically zero
    }
    const ExactScalar d = a(piv, piv);
    if (d.im != 0) throw InvalidInput("PSD test needs Hermitian input");
    if (d.re < 0) {
      std::vector<ExactScalar> seed(n);
      seed[piv] = ExactScalar(1);
      w.psd = false;
      w.ray = witness_from(seed);
      return w;
    }
    done[piv] = true;
    std::vector<ExactScalar> factors(n);
    for (size_t r = 0; r < n; ++r)
      if (!done[r]) factors[r] = a(r, piv) / d;
    for (size_t r = 0; r < n; ++r) {
      if (done[r] || factors[r].is_zero()) continue;
      const ExactScalar& f = factors[r];
      for (size_t c = 0; c < n; ++c) {
        a(r, c) -= f * a(piv, c);
        p_ops(r, c) -= f * p_ops(piv, c);
      }
    }
    // symmetric column sweep
    for (size_t c = 0; c < n; ++c) {
      if (done[c] || factors[c].is_zero()) continue;
      ExactScalar fc = conj(factors[c]);
      for (size_t r = 0; r < n; ++r) a(r, c) -= fc * a(r, piv);
    }
  }
  w.psd = true;
  return w;
}

template <>
PsdWitness is_positive_semidefinite(const Matrix<FloatScalar>& m, double tol) {
  if (!m.is_hermitian(std::sqrt(tol) * std::max(1.0, m.max_abs())))
    throw InvalidInput("PSD test needs Hermitian input");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(m),
                                                     Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericFailure("eigendecomposition failed");
  PsdWitness w;
  w.min_eigenvalue = es.eigenvalues().minCoeff();
  w.psd = w.min_eigenvalue >= -tol;
  return w;
}

template <class S>
PptResult<S> ppt_check(const DensityMatrix<S>& rho, const std::set<int>& side_a,
                       const std::set<int>& side_b, double tol) {
  size_t k = rho.dims.size();
  std::set<int> all;
  for (int p : side_a) all.insert(p);
  for (int p : side_b) all.insert(p);
  if (all.size() != side_a.size() + side_b.size() || all.size() != k ||
      side_a.empty() || side_b.empty() || *all.begin() != 0 ||
      *all.rbegin() != static_cast<int>(k) - 1)
    throw InvalidInput("bipartition must split all parties into two nonempty sides");

  Matrix<S> pt = partial_transpose(rho, side_a);
  PptResult<S> out;
  out.transpose_equals_state = pt.equals(rho.entries, ScalarOps<S>::exact ? 0.0 : tol);
  out.witness = is_positive_semidefinite(pt, tol);
  out.ppt = out.witness.psd;
  return out;
}

namespace {

template <class S>
std::vector<S> bell_vector(int which) {
  // unnormalized +-1 Bell patterns; products of two of them get the 1/2
  // normalization applied by the caller, so all coefficients stay rational
  std::vector<S> v(4, ScalarOps<S>::zero());
  S one = ScalarOps<S>::one();
  S minus = ScalarOps<S>::from_int(-1);
  switch (which) {
    case 0: v[0] = one; v[3] = one; break;
    case 1: v[0] = one; v[3] = minus; break;
    case 2: v[1] = one; v[2] = one; break;
    default: v[1] = one; v[2] = minus; break;
  }
  return v;
}

}  // namespace

template <class S>
Ensemble<S> smolin_state() {
  Ensemble<S> e;
  e.dims = {2, 2, 2, 2};
  for (int which = 0; which < 4; ++which) {
    auto b = bell_vector<S>(which);
    S half = ScalarOps<S>::one() / ScalarOps<S>::from_int(2);
    std::vector<S> v(16, ScalarOps<S>::zero());
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) v[i * 4 + j] = half * b[i] * b[j];
    e.weights.push_back(ScalarOps<S>::real_one() / 4);
    e.vectors.push_back(std::move(v));
  }
  e.validate();
  return e;
}

template <class S>
void FamilyParams<S>::validate(double tol) const {
  for (const auto& hv : h)
    if (hv.size() != 4) throw InvalidInput("family h vectors must live in C^4");
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      S ip = ScalarOps<S>::zero();
      for (int t = 0; t < 4; ++t) ip += ScalarOps<S>::conj(h[i][t]) * h[j][t];
      if (i == j) {
        if constexpr (ScalarOps<S>::exact) {
          if (ScalarOps<S>::is_zero(ip, 0.0))
            throw InvalidInput("family h vectors must be nonzero");
        } else {
          if (!ScalarOps<S>::eq(ip, ScalarOps<S>::one(), std::max(tol, 1e-12) * 10))
            throw InvalidInput("family h vectors must be unit length");
        }
      } else if (!ScalarOps<S>::is_zero(ip, tol)) {
        throw InvalidInput("family h vectors must be mutually orthogonal");
      }
    }
  }
  for (const S& ai : a)
    if (ScalarOps<S>::is_zero(ai, tol))
      throw InvalidInput("family amplitudes must be nonzero");
}

template <class S>
Matrix<S> family_raw_columns(const FamilyParams<S>& p) {
  Matrix<S> t(16, 4);
  const std::pair<int, int> slots[8] = {
      {0, 0}, {3, 1}, {5, 2}, {6, 3}, {9, 2}, {10, 3}, {12, 0}, {15, 1}};
  for (int s = 0; s < 8; ++s) {
    auto [row, hi] = slots[s];
    for (int j = 0; j < 4; ++j) t(row, j) = p.a[s] * p.h[hi][j];
  }
  return t;
}

template <class S>
Ensemble<S> family_state(const FamilyParams<S>& p, double tol) {
  p.validate(tol);
  Matrix<S> t = family_raw_columns(p);
  Ensemble<S> e;
  e.dims = {2, 2, 2, 2};
  for (int j = 0; j < 4; ++j) {
    std::vector<S> v(16);
    for (int i = 0; i < 16; ++i) v[i] = t(i, j);
    if constexpr (!ScalarOps<S>::exact) {
      double n = std::sqrt(vector_norm2<S>(v));
      if (n == 0.0) throw InvalidInput("family column is zero");
      for (auto& x : v) x /= n;
    }
    e.weights.push_back(ScalarOps<S>::real_one() / 4);
    e.vectors.push_back(std::move(v));
  }
  e.validate(tol);
  return e;
}

template <class S>
Ensemble<S> apply_local_transform(const Ensemble<S>& e,
                                  const std::vector<Matrix<S>>& mats,
                                  double tol) {
  e.validate(tol);
  if (mats.size() != e.dims.size())
    throw InvalidInput("need one matrix per party");
  for (size_t p = 0; p < mats.size(); ++p) {
    if (mats[p].rows() != static_cast<size_t>(e.dims[p]) ||
        mats[p].cols() != static_cast<size_t>(e.dims[p]))
      throw InvalidInput("local matrix shape does not match party dimension");
    matrix_inverse(mats[p], tol);  // throws if singular
  }
  size_t d = dims_product(e.dims);
  Ensemble<S> out;
  out.dims = e.dims;
  out.weights = e.weights;
  for (const auto& v : e.vectors) {
    std::vector<S> w(d, ScalarOps<S>::zero());
    for (size_t i = 0; i < d; ++i) {
      if (ScalarOps<S>::is_zero(v[i], 0.0)) continue;
      auto idx = unflatten_index(e.dims, i);
      for (size_t j = 0; j < d; ++j) {
        auto jidx = unflatten_index(e.dims, j);
        S f = v[i];
        for (size_t pidx = 0; pidx < e.dims.size(); ++pidx)
          f *= mats[pidx](jidx[pidx], idx[pidx]);
        w[j] += f;
      }
    }
    out.vectors.push_back(std::move(w));
  }
  if constexpr (!ScalarOps<S>::exact) {
    // unitary transforms preserve norms up to roundoff; renormalize so the
    // result is a valid float ensemble even for general invertible maps
    for (size_t f = 0; f < out.vectors.size(); ++f) {
      double n = std::sqrt(vector_norm2<S>(out.vectors[f]));
      if (n == 0.0) throw NumericFailure("transformed vector collapsed to zero");
      for (auto& x : out.vectors[f]) x /= n;
      out.weights[f] *= n * n;
    }
    double sum = std::accumulate(out.weights.begin(), out.weights.end(), 0.0);
    for (auto& wt : out.weights) wt /= sum;
  }
  return out;
}

#define EV_INSTANTIATE_STATES(S)                                             \
  template struct DensityMatrix<S>;                                          \
  template struct Ensemble<S>;                                               \
  template DensityMatrix<S> density_from_ensemble(const Ensemble<S>&);       \
  template DensityMatrix<S> density_from_ensemble_serial(const Ensemble<S>&); \
  template Matrix<S> partial_transpose(const DensityMatrix<S>&,              \
                                       const std::set<int>&);                \
  template PptResult<S> ppt_check(const DensityMatrix<S>&,                   \
                                  const std::set<int>&, const std::set<int>&, \
                                  double);                                   \
  template Ensemble<S> smolin_state<S>();                                    \
  template struct FamilyParams<S>;                                           \
  template Ensemble<S> family_state(const FamilyParams<S>&, double);         \
  template Matrix<S> family_raw_columns(const FamilyParams<S>&);             \
  template Ensemble<S> apply_local_transform(                                \
      const Ensemble<S>&, const std::vector<Matrix<S>>&, double);

EV_INSTANTIATE_STATES(ExactScalar)
EV_INSTANTIATE_STATES(FloatScalar)
#undef EV_INSTANTIATE_STATES

}  // namespace ev
