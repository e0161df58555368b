#pragma once

// Nonnegative bivariate polynomials: simple factors |z - z0|^2 on the unit
// circle, positivity of central sections once they are removed, and the
// section-ladder diagnostic for the factor of the bi-infinite operator.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sosfejer/poly.hpp"

namespace sosfejer {

struct SimpleRoot {
  cplx z0;
  int multiplicity = 1;
};

struct SimpleFactorReport {
  int variable = 0;
  std::vector<SimpleRoot> roots;
  MatLaurent reduced{2, 1};
};

/// Unimodular z0 (in variable `var`) with P(z0, w) = 0 for every w, each
/// deflated as often as it divides. Throws NotBivariate, NotHermitian.
SimpleFactorReport detect_simple_factors(const MatLaurent& p, int var = 0, double tol = 1e-8);

/// P / ((z - z0)(1/z - 1/z0)) in z = variable `var`, Hermitian part of the
/// quotient. Throws NotDivisible when a division remainder exceeds
/// tol * |P|_1, InvalidArgument when |z0| != 1.
MatLaurent remove_simple_factor(const MatLaurent& p, cplx z0, int var = 0, double tol = 1e-9);

/// Unimodular roots of the univariate scalar Laurent polynomial `c`, found
/// from the companion matrix of z^{-min exponent} c(z) with a radial filter.
/// Eigenvalues of one multiple root are merged; multiplicity counts them.
std::vector<SimpleRoot> unimodular_roots(const MatLaurent& c, double radial_tol = 1e-2);

/// For every size s, the smallest eigenvalue over `grid_points` points in the
/// other variable of the unweighted s x s central section in `var`.
std::vector<double> section_positivity_check(const MatLaurent& p, std::span<const int> sizes, int grid_points = 64,
                                             int var = 0);

struct LadderEntry {
  int size = 0;
  MatLaurent candidate{2, 1};
  std::vector<cplx> coefficients;    // ordered as ConvergenceReport::exponents
  std::optional<double> drift;       // max change from the previous size
  double toeplitz_deviation = 0.0;   // last vs next-to-last row of the factor block
};

struct ConvergenceReport {
  int variable = 0;
  std::vector<Exponent> exponents;  // candidate monomials, other variable outermost
  std::vector<LadderEntry> ladder;
  double tol = 0.0;
  bool converging = false;
};

/// For each size s: unweighted section of order s - 1 in `var`, a y-direction
/// Cholesky of `y_blocks` blocks (0: converge with the doubling schedule), and
/// the candidate read from the last block row. Sizes must be strictly
/// increasing and larger than the degree in `var`.
/// Throws NotPositiveDefinite carrying the size as stage.
ConvergenceReport nonneg_convergence_ladder(const MatLaurent& p, std::span<const int> sizes, double tol,
                                            int y_blocks = 50, int var = 0);

/// size, one column per candidate monomial (c_const, c_x, c_y, c_xy, ...), drift.
std::string ladder_csv(const ConvergenceReport& report);
std::string ladder_text(const ConvergenceReport& report);

}  // namespace sosfejer
