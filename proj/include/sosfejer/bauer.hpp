#pragma once

// Spectral factorization A(z) = Q(z)^H Q(z) of a univariate Hermitian matrix
// Laurent polynomial from Cholesky factors of growing central sections of its
// block Toeplitz operator.
//
// Layout conventions shared by every routine here:
//  * section block (i, j) is the coefficient p_{j-i};
//  * the section is factored as S = L L^H with L lower triangular;
//  * the last block row of L reads [..., G_2, G_1, G_0] and the factor is
//    Q(z)^H = G_0 + G_1 z^-1 + ... + G_n z^-n, i.e. Q(z) = sum_j G_j^H z^j.

#include <span>
#include <string>
#include <vector>

#include "sosfejer/error.hpp"
#include "sosfejer/poly.hpp"

namespace sosfejer {

inline constexpr double kPivotRelTol = 1e-12;

/// Finite block Toeplitz section with `blocks` x `blocks` blocks of size block().
class CentralSection {
 public:
  CentralSection(std::vector<CMatrix> coefficients, int blocks);

  int blocks() const noexcept { return blocks_; }
  int block() const noexcept { return block_; }
  int degree() const noexcept { return degree_; }
  std::size_t rows() const noexcept { return static_cast<std::size_t>(blocks_) * block_; }

  /// p_k for |k| <= degree(), zero matrix otherwise.
  CMatrix coefficient(int k) const;
  /// Block (i, j) = p_{j-i}.
  CMatrix block_at(int i, int j) const;
  CMatrix dense() const;
  /// sum_k ||p_k||_F, an upper bound on ||S||_2 for every section size.
  double norm_bound() const noexcept { return norm_bound_; }

 private:
  std::vector<CMatrix> coeffs_;  // coeffs_[k + degree_] = p_k
  int blocks_;
  int block_;
  int degree_;
  double norm_bound_;
};

/// Throws DimensionMismatch unless A is univariate and blocks >= degree + 1;
/// NotHermitian for a non-Hermitian symbol.
CentralSection assemble_section(const MatLaurent& a, int blocks);

/// Dense right-looking Cholesky of a Hermitian matrix (lower triangle read).
/// Throws NotPositiveDefinite(offset + j) when pivot j <= pivot_tol.
CMatrix cholesky_dense(const CMatrix& s, double pivot_tol, std::size_t offset = 0);

/// Lower block-banded factor of a central section; row i holds blocks
/// L(i, j) for max(0, i - degree) <= j <= i.
class SectionFactor {
 public:
  SectionFactor(int block, int bandwidth) : block_(block), bandwidth_(bandwidth) {}

  int blocks() const noexcept { return static_cast<int>(rows_.size()); }
  int block() const noexcept { return block_; }
  int bandwidth() const noexcept { return bandwidth_; }
  int first_column(int row) const noexcept { return row > bandwidth_ ? row - bandwidth_ : 0; }

  const CMatrix& at(int i, int j) const;
  CMatrix dense() const;

  void push_row(std::vector<CMatrix> row) { rows_.push_back(std::move(row)); }

 private:
  int block_;
  int bandwidth_;
  std::vector<std::vector<CMatrix>> rows_;
};

/// Block-banded Cholesky of the section; pivot tolerance is
/// pivot_rel_tol * s.norm_bound().
SectionFactor cholesky(const CentralSection& s, double pivot_rel_tol = kPivotRelTol);

/// Factors block rows one at a time. Because a leading principal submatrix of
/// a Toeplitz section is the smaller section, after advance() has run K times
/// the newest row is the last block row of the K-block section's factor.
class StreamingSectionCholesky {
 public:
  explicit StreamingSectionCholesky(const CentralSection& s, double pivot_rel_tol = kPivotRelTol);

  void advance();
  int rows_done() const noexcept { return rows_done_; }
  /// G_0 .. G_w of the newest row, w = min(rows_done - 1, degree).
  std::vector<CMatrix> last_row_factor() const;

 private:
  CentralSection section_;
  double pivot_tol_;
  int rows_done_ = 0;
  // Most recent rows, newest last, each stored leftmost block first.
  std::vector<std::vector<CMatrix>> window_;
};

/// G_0..G_degree from the last block row of L. Throws DimensionMismatch when
/// L has fewer than degree + 1 block rows.
std::vector<CMatrix> extract_factor(const SectionFactor& l, int degree);
std::vector<CMatrix> extract_factor(const CMatrix& l, int block, int degree);

/// Last-row factor coefficients of the `blocks`-block section of A.
std::vector<CMatrix> section_factor_row(const MatLaurent& a, int blocks,
                                        double pivot_rel_tol = kPivotRelTol);

struct HistoryEntry {
  int blocks = 0;
  double change = 0.0;    // max entrywise change against the previous extraction
  double residual = 0.0;  // grid residual of this extraction
};

struct FactorResult {
  std::vector<CMatrix> coeffs;  // G_0 .. G_n
  std::vector<HistoryEntry> history;
  double residual = 0.0;
  bool converged = false;
};

struct FactorOptions {
  double tol = 1e-10;
  int max_blocks = 4096;
  int initial_blocks = 0;  // 0 selects 4 * (degree + 1)
  int residual_grid = 256;
  double pivot_rel_tol = kPivotRelTol;
};

class NotConverged : public Error {
 public:
  explicit NotConverged(FactorResult result)
      : Error("section factors did not converge within the block budget"), result_(std::move(result)) {}
  const FactorResult& result() const noexcept { return result_; }

 private:
  FactorResult result_;
};

/// Runs sections of K0, 2K0, 4K0, ... blocks until successive extractions
/// differ by less than tol (a constant symbol converges at once). Throws
/// NotPositiveDefinite, or NotConverged (carrying the history) when the block
/// budget runs out first.
FactorResult factor_matrix_polynomial(const MatLaurent& a, const FactorOptions& options = {});

/// Q(z) = sum_j G_j^H z^j.
MatLaurent factor_polynomial(std::span<const CMatrix> g);

/// max over a `grid_points` grid of ||A(z) - Q(z)^H Q(z)||_2.
double factor_residual(const MatLaurent& a, std::span<const CMatrix> g, int grid_points = 256);

/// CSV with header "K,change_norm,residual".
std::string history_csv(const FactorResult& result);

struct ScaledPolynomial {
  MatLaurent scaled;
  double scale = 1.0;
};

/// scale = 1.25 * (grid sup of ||A(theta)||_2); scaled = A / scale.
/// Throws ZeroPolynomial.
ScaledPolynomial scale_to_contraction(const MatLaurent& a, int grid_points = 256);

}  // namespace sosfejer
