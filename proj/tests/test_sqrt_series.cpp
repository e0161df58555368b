#include <cmath>

#include "doctest.h"
#include "sosfejer/bauer.hpp"
#include "sosfejer/fixtures.hpp"
#include "sosfejer/sqrt_series.hpp"
#include "support.hpp"

using namespace sosfejer;
using namespace sosfejer::testing;

namespace {

CMatrix eigen_sqrt(const CMatrix& s) { return Eigen::SelfAdjointEigenSolver<CMatrix>(s).operatorSqrt(); }

}  // namespace

TEST_CASE("sqrt_series of the identity is exact") {
  const SqrtSeriesResult r = sqrt_series(CMatrix::Identity(4, 4), 50, 1e-14);
  CHECK(r.root == CMatrix::Identity(4, 4));
  CHECK(r.contraction == 0.0);
  CHECK(r.tail_bound == 0.0);
}

TEST_CASE("sqrt_series of a diagonal contraction") {
  CMatrix s = CMatrix::Zero(2, 2);
  s(0, 0) = 0.64;
  s(1, 1) = 1.0;
  const SqrtSeriesResult r = sqrt_series(s, 200, 1e-15);
  CHECK(std::abs(r.root(0, 0) - 0.8) < 1e-13);
  CHECK(std::abs(r.root(1, 1) - 1.0) < 1e-15);
  CHECK(r.contraction == doctest::Approx(0.36).epsilon(1e-8));
}

TEST_CASE("sqrt_series of the scaled 2x2 matrix section stays within its tail bound") {
  const CentralSection section = assemble_section(fixtures::matrix_example(), 10);
  const CMatrix s = section.dense() / 20.0;
  const CMatrix exact = eigen_sqrt(s);

  const SqrtSeriesResult short_run = sqrt_series(s, 200, 0.0);
  CHECK(short_run.terms == 200);
  CHECK(short_run.contraction < 1.0);
  const double err = spectral_norm(short_run.root - exact);
  CHECK(err <= short_run.tail_bound + 1e-12);
  CHECK(spectral_norm(short_run.root * short_run.root - s) <= short_run.reconstruction_bound + 1e-12);

  const SqrtSeriesResult long_run = sqrt_series(s, 5000, 1e-16);
  CHECK(spectral_norm(long_run.root - exact) < 1e-8);
  CHECK(long_run.tail_bound < short_run.tail_bound);
}

TEST_CASE("sqrt_series agrees with the eigendecomposition on random contractions") {
  Rng rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = rng.integer(1, 8);
    CMatrix e(n, n);
    for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = rng.complex();
    e = 0.5 * (e + e.adjoint()).eval();
    const double norm = Eigen::SelfAdjointEigenSolver<CMatrix>(e).eigenvalues().cwiseAbs().maxCoeff();
    e *= rng.uniform(0.1, 0.9) / norm;
    const CMatrix s = CMatrix::Identity(n, n) + e;
    const SqrtSeriesResult r = sqrt_series(s, 2000, 1e-15);
    CHECK(r.contraction == doctest::Approx(spectral_norm(e)).epsilon(1e-6));
    CHECK(spectral_norm(r.root - eigen_sqrt(s)) <= r.tail_bound + 1e-12);
    CHECK((r.root - r.root.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("hermitian_norm_estimate handles symmetric spectra") {
  CMatrix e = CMatrix::Zero(3, 3);
  e(0, 0) = 0.5;
  e(1, 1) = -0.5;
  e(2, 2) = 0.1;
  CHECK(hermitian_norm_estimate(e) == doctest::Approx(0.5));
  CHECK(hermitian_norm_estimate(CMatrix::Zero(2, 2)) == 0.0);
}

TEST_CASE("sqrt_series errors") {
  CMatrix s = CMatrix::Identity(2, 2);
  s(0, 0) = 2.5;
  CHECK_THROWS_AS(sqrt_series(s, 10, 1e-12), NotContraction);
  CMatrix asym = CMatrix::Identity(2, 2);
  asym(0, 1) = 0.1;
  CHECK_THROWS_AS(sqrt_series(asym, 10, 1e-12), NotHermitian);
  CHECK_THROWS_AS(sqrt_series(CMatrix::Identity(2, 2), 0, 1e-12), InvalidArgument);
  CHECK_THROWS_AS(sqrt_series(CMatrix::Identity(2, 3), 10, 1e-12), DimensionMismatch);
}
