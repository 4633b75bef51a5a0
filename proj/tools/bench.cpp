// Timing comparison of the OpenMP kernels against their serial references:
// density assembly from an ensemble and minor expansion of a pencil.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ev/random.hpp"
#include "ev/varieties.hpp"

using namespace ev;

namespace {

template <class F>
double time_ms(F&& fn, int reps) {
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

Ensemble<ExactScalar> random_dense_ensemble(Rng& rng, const Dims& dims,
                                            size_t g) {
  Ensemble<ExactScalar> e;
  e.dims = dims;
  size_t d = dims_product(dims);
  for (size_t f = 0; f < g; ++f) {
    std::vector<ExactScalar> v(d);
    bool nz = false;
    for (auto& x : v) {
      x = ExactScalar(Rational(rng.int_in(-4, 4)), Rational(rng.int_in(-4, 4)));
      if (!x.is_zero()) nz = true;
    }
    if (!nz) v[0] = ExactScalar(1);
    e.weights.push_back(Rational(1, static_cast<long>(g)));
    e.vectors.push_back(std::move(v));
  }
  return e;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (no OpenMP)\n");
#endif

  Rng rng(42);

  {
    Dims dims{2, 2, 2, 2, 2};
    auto e = random_dense_ensemble(rng, dims, 32);
    auto serial = time_ms([&] { density_from_ensemble_serial(e); }, 5);
    auto parallel = time_ms([&] { density_from_ensemble(e); }, 5);
    auto a = density_from_ensemble_serial(e);
    auto b = density_from_ensemble(e);
    std::printf("density 32x32 g=32   serial %8.2f ms   omp %8.2f ms   x%.2f   %s\n",
                serial, parallel, serial / parallel,
                a.entries.equals(b.entries, 0.0) ? "match" : "MISMATCH");
  }

  {
    Dims dims{2, 2, 2, 2};
    auto e = random_dense_ensemble(rng, dims, 16);
    auto cut = parse_cut("A:B|CD", dims);
    auto pencil = build_pencil(e, cut);
    auto serial = time_ms([&] { variety_polynomials_serial(pencil); }, 3);
    auto parallel = time_ms([&] { variety_polynomials(pencil); }, 3);
    auto a = variety_polynomials_serial(pencil);
    auto b = variety_polynomials(pencil);
    bool same = a.minors.size() == b.minors.size();
    for (size_t i = 0; same && i < a.minors.size(); ++i)
      same = a.minors[i].poly == b.minors[i].poly;
    std::printf("minors 4x16 t=4 (%zu) serial %8.2f ms   omp %8.2f ms   x%.2f   %s\n",
                a.minors.size(), serial, parallel, serial / parallel,
                same ? "match" : "MISMATCH");
  }

  return 0;
}
