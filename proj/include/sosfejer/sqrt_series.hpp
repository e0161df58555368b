#pragma once

// Positive square root of a Hermitian matrix close to the identity through the
// binomial series sqrt(I + E) = sum_i (-1)^i (2i-3)!!/(2i)!! E^i, valid for
// ||E||_2 < 1. Slow and restricted to contractions; it serves as an
// independent check on the Cholesky route, never as a production path.

#include "sosfejer/bauer.hpp"
#include "sosfejer/poly.hpp"

namespace sosfejer {

struct SqrtSeriesResult {
  CMatrix root;
  int terms = 0;                      // powers E^0 .. E^(terms-1) were summed
  double contraction = 0.0;           // estimate of ||S - I||_2
  double tail_bound = 0.0;            // bound on ||exact root - partial sum||_2
  double reconstruction_bound = 0.0;  // bound on ||root^2 - S||_2
};

/// Largest |eigenvalue| of a Hermitian matrix by power iteration.
double hermitian_norm_estimate(const CMatrix& e, int max_iterations = 2000, double rel_tol = 1e-13);

/// Throws NotContraction when ||S - I||_2 >= 1, NotHermitian for non-Hermitian S.
SqrtSeriesResult sqrt_series(const CMatrix& s, int max_terms, double tol);
SqrtSeriesResult sqrt_series(const CentralSection& s, int max_terms, double tol);

}  // namespace sosfejer
