#include "sosfejer/bauer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sosfejer/poly_io.hpp"

namespace sosfejer {

CentralSection::CentralSection(std::vector<CMatrix> coefficients, int blocks)
    : coeffs_(std::move(coefficients)), blocks_(blocks) {
  if (coeffs_.empty() || coeffs_.size() % 2 == 0)
    throw DimensionMismatch("central section needs coefficients p_-n .. p_n");
  degree_ = static_cast<int>(coeffs_.size() / 2);
  block_ = static_cast<int>(coeffs_.front().rows());
  if (blocks < 1) throw DimensionMismatch("central section needs at least one block");
  norm_bound_ = 0.0;
  for (const auto& c : coeffs_) {
    if (c.rows() != block_ || c.cols() != block_) throw DimensionMismatch("coefficient blocks differ in size");
    norm_bound_ += c.norm();
  }
}

CMatrix CentralSection::coefficient(int k) const {
  if (std::abs(k) > degree_) return CMatrix::Zero(block_, block_);
  return coeffs_[static_cast<std::size_t>(k + degree_)];
}

CMatrix CentralSection::block_at(int i, int j) const { return coefficient(j - i); }

CMatrix CentralSection::dense() const {
  const Eigen::Index b = block_;
  CMatrix s = CMatrix::Zero(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(rows()));
  for (int i = 0; i < blocks_; ++i)
    for (int j = std::max(0, i - degree_); j <= std::min(blocks_ - 1, i + degree_); ++j)
      s.block(i * b, j * b, b, b) = coefficient(j - i);
  return s;
}

CentralSection assemble_section(const MatLaurent& a, int blocks) {
  if (a.vars() != 1) throw DimensionMismatch("assemble_section needs a univariate polynomial");
  require_hermitian(a, "assemble_section");
  const int n = a.degree(0);
  if (blocks < n + 1)
    throw DimensionMismatch("section of " + std::to_string(blocks) + " blocks is smaller than degree + 1 = " +
                            std::to_string(n + 1));
  std::vector<CMatrix> coeffs;
  coeffs.reserve(static_cast<std::size_t>(2 * n + 1));
  for (int k = -n; k <= n; ++k) coeffs.push_back(a.coeff(Exponent{k}));
  return CentralSection(std::move(coeffs), blocks);
}

CMatrix cholesky_dense(const CMatrix& s, double pivot_tol, std::size_t offset) {
  if (s.rows() != s.cols()) throw DimensionMismatch("cholesky of a non-square matrix");
  const Eigen::Index n = s.rows();
  CMatrix a = s.triangularView<Eigen::Lower>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double pivot = a(j, j).real();
    if (!(pivot > pivot_tol)) throw NotPositiveDefinite(offset + static_cast<std::size_t>(j), pivot);
    const double root = std::sqrt(pivot);
    a(j, j) = root;
    const Eigen::Index rest = n - j - 1;
    if (rest == 0) break;
    a.col(j).tail(rest) /= root;
    // Right-looking update of the trailing lower triangle.
    const auto v = a.col(j).tail(rest);
    for (Eigen::Index c = 0; c < rest; ++c)
      a.col(j + 1 + c).tail(rest - c) -= v.tail(rest - c) * std::conj(v(c));
  }
  return a;
}

const CMatrix& SectionFactor::at(int i, int j) const {
  if (i < 0 || i >= blocks() || j < first_column(i) || j > i)
    throw DimensionMismatch("SectionFactor::at outside the band");
  return rows_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - first_column(i))];
}

CMatrix SectionFactor::dense() const {
  const Eigen::Index b = block_;
  const Eigen::Index n = static_cast<Eigen::Index>(blocks()) * b;
  CMatrix l = CMatrix::Zero(n, n);
  for (int i = 0; i < blocks(); ++i)
    for (int j = first_column(i); j <= i; ++j) l.block(i * b, j * b, b, b) = at(i, j);
  return l;
}

namespace {

// Block row i of L from the previous (up to degree) rows held in `window`,
// which stores rows i-w .. i-1 with each row leftmost block first.
std::vector<CMatrix> factor_row(const CentralSection& s, int i, const std::vector<std::vector<CMatrix>>& window,
                                double pivot_tol) {
  const int n = s.degree();
  const int first = std::max(0, i - n);
  const auto first_of = [n](int row) { return std::max(0, row - n); };
  const auto prev = [&](int row, int col) -> const CMatrix& {
    const auto& r = window[window.size() - static_cast<std::size_t>(i - row)];
    return r[static_cast<std::size_t>(col - first_of(row))];
  };

  std::vector<CMatrix> row;
  row.reserve(static_cast<std::size_t>(i - first + 1));
  for (int j = first; j < i; ++j) {
    CMatrix r = s.block_at(i, j);
    for (int k = first; k < j; ++k) r.noalias() -= row[static_cast<std::size_t>(k - first)] * prev(j, k).adjoint();
    // L(i,j) L(j,j)^H = r
    const CMatrix& ljj = prev(j, j);
    CMatrix lij = ljj.adjoint().triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(r);
    row.push_back(std::move(lij));
  }
  CMatrix d = s.block_at(i, i);
  for (int k = first; k < i; ++k) {
    const CMatrix& lik = row[static_cast<std::size_t>(k - first)];
    d.noalias() -= lik * lik.adjoint();
  }
  row.push_back(cholesky_dense(d, pivot_tol, static_cast<std::size_t>(i) * s.block()));
  return row;
}

}  // namespace

SectionFactor cholesky(const CentralSection& s, double pivot_rel_tol) {
  SectionFactor l(s.block(), s.degree());
  const double tol = pivot_rel_tol * s.norm_bound();
  std::vector<std::vector<CMatrix>> window;
  for (int i = 0; i < s.blocks(); ++i) {
    auto row = factor_row(s, i, window, tol);
    window.push_back(row);
    if (static_cast<int>(window.size()) > s.degree()) window.erase(window.begin());
    l.push_row(std::move(row));
  }
  return l;
}

StreamingSectionCholesky::StreamingSectionCholesky(const CentralSection& s, double pivot_rel_tol)
    : section_(s), pivot_tol_(pivot_rel_tol * s.norm_bound()) {}

void StreamingSectionCholesky::advance() {
  auto row = factor_row(section_, rows_done_, window_, pivot_tol_);
  window_.push_back(std::move(row));
  if (static_cast<int>(window_.size()) > section_.degree() + 1) window_.erase(window_.begin());
  ++rows_done_;
}

std::vector<CMatrix> StreamingSectionCholesky::last_row_factor() const {
  if (window_.empty()) throw DimensionMismatch("no rows factored yet");
  const auto& row = window_.back();
  return {row.rbegin(), row.rend()};
}

std::vector<CMatrix> extract_factor(const SectionFactor& l, int degree) {
  if (degree < 0 || l.blocks() < degree + 1)
    throw DimensionMismatch("factor has " + std::to_string(l.blocks()) + " block rows, need degree + 1 = " +
                            std::to_string(degree + 1));
  const int last = l.blocks() - 1;
  std::vector<CMatrix> g;
  for (int j = 0; j <= degree; ++j) {
    const int col = last - j;
    if (col >= l.first_column(last))
      g.push_back(l.at(last, col));
    else
      g.push_back(CMatrix::Zero(l.block(), l.block()));
  }
  return g;
}

std::vector<CMatrix> extract_factor(const CMatrix& l, int block, int degree) {
  if (block < 1 || l.rows() != l.cols() || l.rows() % block != 0)
    throw DimensionMismatch("extract_factor: factor is not a whole number of blocks");
  const int blocks = static_cast<int>(l.rows() / block);
  if (degree < 0 || blocks < degree + 1) throw DimensionMismatch("extract_factor: too few block rows");
  const Eigen::Index last = blocks - 1;
  std::vector<CMatrix> g;
  for (int j = 0; j <= degree; ++j) g.push_back(l.block(last * block, (last - j) * block, block, block));
  return g;
}

std::vector<CMatrix> section_factor_row(const MatLaurent& a, int blocks, double pivot_rel_tol) {
  const CentralSection s = assemble_section(a, blocks);
  StreamingSectionCholesky stream(s, pivot_rel_tol);
  for (int k = 0; k < blocks; ++k) stream.advance();
  return stream.last_row_factor();
}

MatLaurent factor_polynomial(std::span<const CMatrix> g) {
  if (g.empty()) throw DimensionMismatch("factor_polynomial: no coefficients");
  MatLaurent q(1, static_cast<int>(g.front().rows()));
  for (std::size_t j = 0; j < g.size(); ++j) q.set(Exponent{static_cast<int>(j)}, g[j].adjoint());
  return q;
}

double factor_residual(const MatLaurent& a, std::span<const CMatrix> g, int grid_points) {
  const MatLaurent q = factor_polynomial(g);
  const MatLaurent diff = subtract(a, mul(conj_reflect(q), q));
  return torus_max_norm(diff, TorusGrid(1, grid_points));
}

namespace {

double max_entry_change(const std::vector<CMatrix>& now, const std::vector<CMatrix>* before) {
  double worst = 0.0;
  for (std::size_t j = 0; j < now.size(); ++j) {
    const double d = before && j < before->size() ? (now[j] - (*before)[j]).cwiseAbs().maxCoeff()
                                                  : now[j].cwiseAbs().maxCoeff();
    worst = std::max(worst, d);
  }
  return worst;
}

}  // namespace

FactorResult factor_matrix_polynomial(const MatLaurent& a, const FactorOptions& options) {
  if (a.vars() != 1) throw DimensionMismatch("factor_matrix_polynomial needs a univariate polynomial");
  if (!(options.tol > 0.0)) throw InvalidArgument("tol must be positive");
  const int n = a.degree(0);
  const int k0 = options.initial_blocks > 0 ? options.initial_blocks : 4 * (n + 1);
  const CentralSection s = assemble_section(a, n + 1);
  StreamingSectionCholesky stream(s, options.pivot_rel_tol);

  FactorResult result;
  std::vector<CMatrix> previous;
  for (long k = k0; k <= options.max_blocks; k *= 2) {
    while (stream.rows_done() < k) stream.advance();
    std::vector<CMatrix> g = stream.last_row_factor();
    const double change = max_entry_change(g, previous.empty() ? nullptr : &previous);
    const double residual = factor_residual(a, g, options.residual_grid);
    result.history.push_back({static_cast<int>(k), change, residual});
    result.coeffs = g;
    result.residual = residual;
    // A constant symbol has a block-diagonal section, so every extraction is exact.
    if (n == 0 || (!previous.empty() && change < options.tol)) {
      result.converged = true;
      return result;
    }
    previous = std::move(g);
  }
  throw NotConverged(std::move(result));
}

std::string history_csv(const FactorResult& result) {
  std::ostringstream out;
  out << "K,change_norm,residual\n";
  for (const auto& h : result.history)
    out << h.blocks << ',' << format_double(h.change) << ',' << format_double(h.residual) << '\n';
  return out.str();
}

ScaledPolynomial scale_to_contraction(const MatLaurent& a, int grid_points) {
  require_hermitian(a, "scale_to_contraction");
  if (a.is_zero()) throw ZeroPolynomial();
  const double sup = torus_max_norm(a, TorusGrid(a.vars(), grid_points));
  if (!(sup > 0.0)) throw ZeroPolynomial();
  const double factor = 1.25 * sup;
  return {scale(a, 1.0 / factor), factor};
}

}  // namespace sosfejer
