#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "ev/random.hpp"
#include "ev/states.hpp"
#include "oracle.hpp"

using namespace ev;

namespace {

ExactScalar exq(long num, long den = 1) {
  return ExactScalar(Rational(num, den));
}

Ensemble<ExactScalar> two_term_product() {
  // (1/2)|000> + (1/2)|111>
  Ensemble<ExactScalar> e;
  e.dims = {2, 2, 2};
  e.weights = {Rational(1, 2), Rational(1, 2)};
  e.vectors.assign(2, std::vector<ExactScalar>(8));
  e.vectors[0][0] = exq(1);
  e.vectors[1][7] = exq(1);
  return e;
}

DensityMatrix<FloatScalar> bell_pair_density() {
  Ensemble<FloatScalar> e;
  e.dims = {2, 2};
  e.weights = {1.0};
  double s = 1.0 / std::sqrt(2.0);
  e.vectors = {{FloatScalar(s), 0.0, 0.0, FloatScalar(s)}};
  return density_from_ensemble(e);
}

}  // namespace

TEST_CASE("density from a single pure state is the projector") {
  Ensemble<ExactScalar> e;
  e.dims = {2, 2, 2, 2};
  e.weights = {Rational(1)};
  e.vectors.assign(1, std::vector<ExactScalar>(16));
  e.vectors[0][0] = exq(1);
  auto rho = density_from_ensemble(e);
  CHECK(rho.entries(0, 0) == exq(1));
  CHECK(matrix_rank(rho.entries, 0.0) == 1);
  rho.validate();
}

TEST_CASE("smolin density matches the entrywise oracle") {
  auto rho = density_from_ensemble(smolin_state<ExactScalar>());
  CHECK(rho.entries(0, 0) == exq(1, 8));
  auto want = oracle::smolin_rho();
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) {
      auto got = ScalarOps<ExactScalar>::to_complex(rho.entries(i, j));
      CHECK(std::abs(got - want[i][j]) < 1e-12);
    }
  CHECK(matrix_rank(rho.entries, 0.0) == 4);
}

TEST_CASE("orthogonal diagonal mixture stays diagonal") {
  auto rho = density_from_ensemble(two_term_product());
  CHECK(rho.entries(0, 0) == exq(1, 2));
  CHECK(rho.entries(7, 7) == exq(1, 2));
  CHECK(rho.entries(0, 7) == exq(0));
}

TEST_CASE("parallel and serial density assembly agree exactly") {
  Rng rng(7);
  auto e = rng.product_ensemble({2, 2, 2}, 4);
  auto a = density_from_ensemble(e);
  auto b = density_from_ensemble_serial(e);
  CHECK(a.entries.equals(b.entries, 0.0));
}

TEST_CASE("float eigen-ensemble recovers rank and weights") {
  // maximally mixed on four qubits
  Ensemble<FloatScalar> mm;
  mm.dims = {2, 2, 2, 2};
  for (int i = 0; i < 16; ++i) {
    std::vector<FloatScalar> v(16, 0.0);
    v[i] = 1.0;
    mm.weights.push_back(1.0 / 16);
    mm.vectors.push_back(std::move(v));
  }
  auto back = ensemble_from_density(density_from_ensemble(mm));
  CHECK(back.size() == 16);
  for (double w : back.weights) CHECK(w == doctest::Approx(1.0 / 16));

  auto smolin_rho = density_from_ensemble(smolin_state<FloatScalar>());
  auto se = ensemble_from_density(smolin_rho);
  CHECK(se.size() == 4);
  for (double w : se.weights) CHECK(w == doctest::Approx(0.25));
  // reconstruction
  auto again = density_from_ensemble(se);
  CHECK(again.entries.equals(smolin_rho.entries, 1e-9));

  Ensemble<FloatScalar> pure;
  pure.dims = {2, 2, 2};
  pure.weights = {1.0};
  pure.vectors.assign(1, std::vector<FloatScalar>(8, 0.0));
  pure.vectors[0][0] = 1.0;
  auto pe = ensemble_from_density(density_from_ensemble(pure));
  CHECK(pe.size() == 1);
}

TEST_CASE("exact decomposition needs a diagonal matrix") {
  auto rho = density_from_ensemble(two_term_product());
  auto e = ensemble_from_density(rho);  // diagonal: fine
  CHECK(e.size() == 2);
  auto smolin_rho = density_from_ensemble(smolin_state<ExactScalar>());
  CHECK_THROWS_AS(ensemble_from_density(smolin_rho),
                  UnsupportedExactDecomposition);
}

TEST_CASE("partial transpose is an involution and complements conjugate") {
  Rng rng(11);
  auto e = rng.product_ensemble({2, 2, 2}, 3);
  auto rho = density_from_ensemble(e);
  auto pt = partial_transpose(rho, {0, 2});
  DensityMatrix<ExactScalar> wrapped{rho.dims, pt};
  auto back = partial_transpose(wrapped, {0, 2});
  CHECK(back.equals(rho.entries, 0.0));

  // transpose over a set equals the conjugate of the complement transpose
  auto pt_complement = partial_transpose(rho, {1});
  Matrix<ExactScalar> conj_pt(pt.rows(), pt.cols());
  for (size_t i = 0; i < pt.rows(); ++i)
    for (size_t j = 0; j < pt.cols(); ++j)
      conj_pt(i, j) = ev::conj(pt_complement(i, j));
  CHECK(pt.equals(conj_pt, 0.0));
}

TEST_CASE("diagonal product states are transpose invariant") {
  auto rho = density_from_ensemble(two_term_product());
  for (int p = 0; p < 3; ++p) {
    auto pt = partial_transpose(rho, {p});
    CHECK(pt.equals(rho.entries, 0.0));
  }
}

TEST_CASE("smolin partial transposes equal the state entrywise") {
  auto rho = density_from_ensemble(smolin_state<ExactScalar>());
  for (std::set<int> side : {std::set<int>{0, 1}, {0, 2}, {0, 3}}) {
    auto pt = partial_transpose(rho, side);
    CHECK(pt.equals(rho.entries, 0.0));
  }
}

TEST_CASE("bell pair partial transpose has eigenvalue -1/2") {
  auto rho = bell_pair_density();
  auto pt = partial_transpose(rho, {0});
  Eigen::MatrixXcd m(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = pt(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  CHECK(es.eigenvalues().minCoeff() == doctest::Approx(-0.5));

  auto w = is_positive_semidefinite(pt);
  CHECK_FALSE(w.psd);
  CHECK(w.min_eigenvalue == doctest::Approx(-0.5));
}

TEST_CASE("exact psd test with witness rays") {
  // identity / D
  Matrix<ExactScalar> id = Matrix<ExactScalar>::identity(4);
  CHECK(is_positive_semidefinite(id).psd);

  Matrix<ExactScalar> diag(2, 2);
  diag(0, 0) = exq(1000, 999);
  diag(1, 1) = exq(-1, 999);
  auto w = is_positive_semidefinite(diag);
  CHECK_FALSE(w.psd);

  // smolin partial transpose over {A, C} stays positive
  auto rho = density_from_ensemble(smolin_state<ExactScalar>());
  auto pt = partial_transpose(rho, {0, 2});
  CHECK(is_positive_semidefinite(pt).psd);

  // exact witness ray certifies indefiniteness of the bell transpose
  Ensemble<ExactScalar> bell;
  bell.dims = {2, 2};
  bell.weights = {Rational(1)};
  bell.vectors.assign(1, std::vector<ExactScalar>(4));
  bell.vectors[0][0] = exq(1, 2);  // unnormalized; folding handles it
  bell.vectors[0][3] = exq(1, 2);
  auto bpt = partial_transpose(density_from_ensemble(bell), {0});
  auto bw = is_positive_semidefinite(bpt);
  CHECK_FALSE(bw.psd);
  REQUIRE(bw.ray.size() == 4);
  ExactScalar quad;
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j)
      quad += ev::conj(bw.ray[i]) * bpt(i, j) * bw.ray[j];
  CHECK(quad.im == 0);
  CHECK(quad.re < 0);

  Matrix<ExactScalar> nonherm(2, 2);
  nonherm(0, 1) = exq(1);
  CHECK_THROWS_AS(is_positive_semidefinite(nonherm), InvalidInput);
}

TEST_CASE("ppt checks are side independent") {
  auto rho = density_from_ensemble(smolin_state<ExactScalar>());
  auto ab = ppt_check(rho, {0, 1}, {2, 3});
  CHECK(ab.ppt);
  CHECK(ab.transpose_equals_state);
  auto ba = ppt_check(rho, {2, 3}, {0, 1});
  CHECK(ba.ppt == ab.ppt);

  auto sep = density_from_ensemble(two_term_product());
  CHECK(ppt_check(sep, {0}, {1, 2}).ppt);

  auto bell = bell_pair_density();
  CHECK_FALSE(ppt_check(bell, {0}, {1}).ppt);

  CHECK_THROWS_AS(ppt_check(rho, {0, 1}, {1, 2, 3}), InvalidInput);
  CHECK_THROWS_AS(ppt_check(rho, {0}, {1, 2}), InvalidInput);
}

TEST_CASE("smolin ensemble structure") {
  auto e = smolin_state<ExactScalar>();
  CHECK(e.size() == 4);
  for (const auto& w : e.weights) CHECK(w == Rational(1, 4));
  // pairwise orthogonal unit vectors with +-1/2 coefficients
  for (size_t f = 0; f < 4; ++f) {
    CHECK(e.squared_norm(f) == Rational(1));
    for (const auto& x : e.vectors[f]) {
      if (!x.is_zero()) {
        CHECK(x.im == 0);
        CHECK(abs(x.re) == Rational(1, 2));
      }
    }
    for (size_t g = f + 1; g < 4; ++g) {
      ExactScalar ip;
      for (size_t i = 0; i < 16; ++i)
        ip += ev::conj(e.vectors[f][i]) * e.vectors[g][i];
      CHECK(ip.is_zero());
    }
  }
}

TEST_CASE("family state with the standard frame") {
  FamilyParams<ExactScalar> p;
  for (int i = 0; i < 4; ++i) {
    p.h[i].assign(4, exq(0));
    p.h[i][i] = exq(1);
  }
  for (int i = 0; i < 8; ++i) p.a[i] = exq(1);
  auto t = family_raw_columns(p);
  // Gram of the raw columns is 2 * identity
  auto gram = t.adjoint() * t;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(gram(i, j) == (i == j ? exq(2) : exq(0)));
  auto e = family_state(p);
  auto rho = density_from_ensemble(e);
  CHECK(matrix_rank(rho.entries, 0.0) == 4);
  // the AB-blocked partial transpose fixes the state (real amplitudes)
  auto pt = partial_transpose(rho, {0, 1});
  CHECK(pt.equals(rho.entries, 0.0));
}

TEST_CASE("family states with random real amplitudes are AB-transpose fixed") {
  Rng rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    FamilyParams<ExactScalar> p;
    for (int i = 0; i < 4; ++i) {
      p.h[i].assign(4, exq(0));
      p.h[i][i] = exq(1);
    }
    for (int i = 0; i < 8; ++i)
      p.a[i] = ExactScalar(rng.nonzero_rational(5, 5));
    auto rho = density_from_ensemble(family_state(p));
    auto pt = partial_transpose(rho, {0, 1});
    CHECK(pt.equals(rho.entries, 0.0));
  }
}

TEST_CASE("family parameter validation") {
  FamilyParams<ExactScalar> p;
  for (int i = 0; i < 4; ++i) {
    p.h[i].assign(4, exq(0));
    p.h[i][i] = exq(1);
  }
  for (int i = 0; i < 8; ++i) p.a[i] = exq(1);
  p.a[0] = exq(0);
  CHECK_THROWS_AS(family_state(p), InvalidInput);
  p.a[0] = exq(1);
  p.h[1] = p.h[0];
  CHECK_THROWS_AS(family_state(p), InvalidInput);
}

TEST_CASE("local transforms act column by column") {
  auto e = smolin_state<ExactScalar>();
  std::vector<Matrix<ExactScalar>> id(4, Matrix<ExactScalar>::identity(2));
  auto same = apply_local_transform(e, id);
  for (size_t f = 0; f < 4; ++f)
    CHECK(same.vectors[f] == e.vectors[f]);

  // phase flips on every party leave the state fixed
  std::vector<Matrix<ExactScalar>> flips(4, Matrix<ExactScalar>::identity(2));
  for (auto& m : flips) m(1, 1) = exq(-1);
  auto flipped = apply_local_transform(e, flips);
  auto rho0 = density_from_ensemble(e);
  auto rho1 = density_from_ensemble(flipped);
  CHECK(rho1.entries.equals(rho0.entries, 0.0));

  // random invertible mats: the new columns are the kron image, exactly
  Rng rng(3);
  std::vector<Matrix<ExactScalar>> mats;
  for (int p = 0; p < 4; ++p) mats.push_back(rng.invertible_exact(2));
  auto te = apply_local_transform(e, mats);
  Matrix<ExactScalar> big = Matrix<ExactScalar>::identity(1);
  for (const auto& m : mats) big = kron(big, m);
  for (size_t f = 0; f < e.size(); ++f)
    for (size_t i = 0; i < 16; ++i) {
      ExactScalar want;
      for (size_t j = 0; j < 16; ++j) want += big(i, j) * e.vectors[f][j];
      CHECK(te.vectors[f][i] == want);
    }

  std::vector<Matrix<ExactScalar>> bad(4, Matrix<ExactScalar>::identity(2));
  bad[2](0, 0) = exq(0);
  bad[2](1, 1) = exq(0);
  CHECK_THROWS_AS(apply_local_transform(e, bad), InvalidInput);
}

TEST_CASE("ensemble validation rejects malformed data") {
  Ensemble<ExactScalar> e;
  e.dims = {2, 2};
  e.weights = {Rational(1, 2), Rational(1, 3)};  // does not sum to 1
  e.vectors.assign(2, std::vector<ExactScalar>(4));
  e.vectors[0][0] = exq(1);
  e.vectors[1][3] = exq(1);
  CHECK_THROWS_AS(e.validate(), InvalidInput);
  e.weights = {Rational(1, 2), Rational(1, 2)};
  e.validate();
  e.vectors[1].assign(4, exq(0));
  CHECK_THROWS_AS(e.validate(), InvalidInput);
}
