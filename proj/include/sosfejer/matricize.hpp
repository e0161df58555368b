#pragma once

// Rewrites P(z_v, z') = Z^H M(z') Z with Z = [1, z_v, ..., z_v^m] (x) I_block.

#include <map>

#include "sosfejer/poly.hpp"

namespace sosfejer {

enum class MatricizeVariant {
  /// Entry (j,k) = p_{k-j} / (m + 1 - |j-k|): every block diagonal sums to
  /// the matching coefficient slice, so the sandwich identity reproduces P.
  weighted,
  /// Entry (j,k) = p_{k-j}: the unweighted central section of the
  /// bi-infinite block Toeplitz operator whose symbol is P.
  section,
};

struct MatricizeOrder {
  int m = 0;       // vector length is m + 1
  int n = 0;       // coordinate degree being eliminated
  double C = 0.0;  // sup-norm constant of the coefficient slices
  double eps = 0.0;
};

/// Smallest m > n with n(n+1)C / (2(m-n)) < eps; m = 1 when n = 0.
/// Throws InvalidEps for eps <= 0, InvalidArgument for n < 0 or C < 0,
/// OrderTooLarge when m would exceed `limit`.
MatricizeOrder choose_order(int n, double C, double eps, int limit = 1 << 20);

/// p_i(z') for every exponent i of variable `var`; the slices live in the
/// remaining vars() - 1 variables.
std::map<int, MatLaurent> coefficient_slices(const MatLaurent& p, int var);

/// max over i and the grid (restricted to the remaining axes) of ||p_i(z')||_2.
/// `grid` must have p.vars() dimensions; only its points-per-axis is used.
double sup_norm_constant(const MatLaurent& p, int var, const TorusGrid& grid);

/// Result has vars() - 1 variables and block (m + 1) * p.block(); the scalar
/// index of block entry (j, k) is j * p.block() + inner.
/// Throws OrderTooSmall (weighted variant, m < degree) and NotHermitian.
MatLaurent matricize_step(const MatLaurent& p, int var, int m,
                          MatricizeVariant variant = MatricizeVariant::weighted);

/// Max coefficient-wise deviation between the block-diagonal sums of M and
/// the slices of P. Zero (up to rounding) exactly when M lies in the family
/// of admissible matricizations.
double diagonal_sum_check(const MatLaurent& m, const MatLaurent& p, int var);

}  // namespace sosfejer
