#pragma once

// Laurent polynomials in d variables with square complex matrix coefficients,
// evaluated on the multi-torus |z_1| = ... = |z_d| = 1.

#include <Eigen/Dense>

#include <compare>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <span>
#include <vector>

namespace sosfejer {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

/// Monomial exponent: one signed integer per variable.
class Exponent {
 public:
  Exponent() = default;
  explicit Exponent(std::vector<int> k) : k_(std::move(k)) {}
  Exponent(std::initializer_list<int> k) : k_(k) {}

  static Exponent zero(int vars) { return Exponent(std::vector<int>(static_cast<std::size_t>(vars), 0)); }

  int vars() const noexcept { return static_cast<int>(k_.size()); }
  int operator[](int i) const { return k_[static_cast<std::size_t>(i)]; }
  int& operator[](int i) { return k_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& values() const noexcept { return k_; }

  Exponent operator-() const;
  Exponent operator+(const Exponent& other) const;

  /// Drops coordinate `var`.
  Exponent without(int var) const;
  /// Inserts `value` so that it becomes coordinate `var`.
  Exponent with_inserted(int var, int value) const;

  friend auto operator<=>(const Exponent&, const Exponent&) = default;
  friend bool operator==(const Exponent&, const Exponent&) = default;

 private:
  std::vector<int> k_;
};

/// Laurent polynomial with `block` x `block` complex coefficients.
///
/// Storage is sparse and canonical: a coefficient that is exactly the zero
/// matrix is never stored. `vars() == 0` is allowed and denotes a constant
/// matrix (what is left after every variable has been eliminated).
class MatLaurent {
 public:
  using Terms = std::map<Exponent, CMatrix>;

  explicit MatLaurent(int vars = 1, int block = 1);

  static MatLaurent constant(int vars, const CMatrix& value);
  static MatLaurent scalar_constant(int vars, cplx value);
  static MatLaurent monomial(const Exponent& k, cplx value);

  int vars() const noexcept { return vars_; }
  int block() const noexcept { return block_; }
  bool is_scalar() const noexcept { return block_ == 1; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t term_count() const noexcept { return terms_.size(); }
  const Terms& terms() const noexcept { return terms_; }

  /// Coefficient at `k`, the zero matrix when absent.
  CMatrix coeff(const Exponent& k) const;
  cplx scalar_coeff(const Exponent& k) const;

  void set(const Exponent& k, const CMatrix& value);
  void set(const Exponent& k, cplx value);
  void accumulate(const Exponent& k, const CMatrix& value);
  void accumulate(const Exponent& k, cplx value);

  /// Coordinate degree max |k_var| over stored exponents.
  int degree(int var) const;
  int min_exponent(int var) const;
  int max_exponent(int var) const;

  /// Sum of absolute values of all coefficient entries.
  double l1_norm() const;

  friend bool operator==(const MatLaurent& a, const MatLaurent& b);

 private:
  void check_exponent(const Exponent& k) const;
  void check_block(const CMatrix& value) const;

  int vars_;
  int block_;
  Terms terms_;
};

/// Relative tolerance used when an operation requires a Hermitian symbol.
inline constexpr double kHermitianTol = 1e-12;

/// True when coeff(-k) = coeff(k)^H for every k, up to `rel_tol * max(1, |P|_1)`
/// entrywise (rel_tol = 0 demands exact equality).
bool hermitian_symbol(const MatLaurent& p, double rel_tol = 0.0);

/// Throws NotHermitian unless hermitian_symbol(p, kHermitianTol).
void require_hermitian(const MatLaurent& p, const char* where);

/// (P + conj_reflect(P)) / 2.
MatLaurent hermitian_part(const MatLaurent& p);

CMatrix eval(const MatLaurent& p, std::span<const double> theta);
MatLaurent conj_reflect(const MatLaurent& p);
MatLaurent add(const MatLaurent& p, const MatLaurent& q);
MatLaurent subtract(const MatLaurent& p, const MatLaurent& q);
MatLaurent mul(const MatLaurent& p, const MatLaurent& q);
MatLaurent scale(const MatLaurent& p, cplx factor);

/// Sum of square magnitudes: sum_k conj_reflect(Q_k) * Q_k for scalar Q_k.
MatLaurent sosm(std::span<const MatLaurent> qs, int vars);

/// Reorders variables: variable i of the result is variable order[i] of `p`.
MatLaurent permute_vars(const MatLaurent& p, std::span<const int> order);

/// Uniform grid theta_j = 2*pi*j/G on each of `dims` axes; G^dims points.
/// Axis 0 varies fastest in the flat point index.
class TorusGrid {
 public:
  TorusGrid(int dims, int points_per_axis);

  int dims() const noexcept { return dims_; }
  int points_per_axis() const noexcept { return points_; }
  std::size_t size() const noexcept { return size_; }

  /// Integer coordinates j_i of flat point `index`.
  std::vector<int> coordinates(std::size_t index) const;
  std::vector<double> angles(std::size_t index) const;

 private:
  int dims_;
  int points_;
  std::size_t size_;
};

/// Evaluates one polynomial at the points of one grid. Values are exact
/// roots of unity exp(2*pi*i*r/G) looked up by r = <k, j> mod G, so no angle
/// rounding accumulates with the exponent. Keeps its own copy of the terms.
class GridEvaluator {
 public:
  GridEvaluator(const MatLaurent& p, const TorusGrid& grid);

  CMatrix operator()(std::size_t point) const;
  cplx scalar(std::size_t point) const;

 private:
  const cplx& root(std::size_t term, const std::vector<int>& j) const;

  TorusGrid grid_;
  int vars_;
  int block_;
  std::vector<cplx> roots_;
  std::vector<int> exponents_;  // vars_ entries per term
  std::vector<CMatrix> coeffs_;
};

/// Minimum over the grid of the smallest eigenvalue of P(theta).
///
/// Sampling only: this over-estimates the true infimum when the minimum falls
/// between grid points. Throws NotHermitian.
double torus_min(const MatLaurent& p, const TorusGrid& grid);

/// Maximum over the grid of the spectral norm of P(theta); works for any
/// (not necessarily Hermitian) symbol.
double torus_max_norm(const MatLaurent& p, const TorusGrid& grid);

/// Spectral norm of a general complex matrix.
double spectral_norm(const CMatrix& m);

}  // namespace sosfejer
