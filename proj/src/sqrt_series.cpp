#include "sosfejer/sqrt_series.hpp"

#include <cmath>

#include "sosfejer/error.hpp"

namespace sosfejer {

double hermitian_norm_estimate(const CMatrix& e, int max_iterations, double rel_tol) {
  const Eigen::Index n = e.rows();
  if (n == 0) return 0.0;
  // Deterministic start with components along every eigenvector in general.
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(1.0 + 0.37 * static_cast<double>(i % 7), 0.11 * static_cast<double>(i % 5));
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    // Iterate with E^2 so that +-lambda_max do not make the iterate oscillate.
    Eigen::VectorXcd w = e * (e * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    const double next = std::sqrt(norm);
    v = w / norm;
    if (std::abs(next - estimate) <= rel_tol * next) return next;
    estimate = next;
  }
  return estimate;
}

SqrtSeriesResult sqrt_series(const CMatrix& s, int max_terms, double tol) {
  if (s.rows() != s.cols()) throw DimensionMismatch("sqrt_series needs a square matrix");
  if ((s - s.adjoint()).cwiseAbs().maxCoeff() > 1e-14 * std::max(1.0, s.cwiseAbs().maxCoeff()))
    throw NotHermitian("sqrt_series: matrix is not Hermitian");
  if (max_terms < 1) throw InvalidArgument("sqrt_series needs at least one term");
  const Eigen::Index n = s.rows();
  const CMatrix e = s - CMatrix::Identity(n, n);
  // Small safety margin: power iteration approaches the norm from below.
  const double r = hermitian_norm_estimate(e) * (1.0 + 1e-9);
  if (r >= 1.0) throw NotContraction(r);

  SqrtSeriesResult out;
  out.contraction = r;
  out.root = CMatrix::Identity(n, n);
  CMatrix power = CMatrix::Identity(n, n);
  double coefficient = 1.0;  // (-1)^i (2i-3)!!/(2i)!! = binom(1/2, i)
  int i = 1;
  for (; i < max_terms; ++i) {
    coefficient *= (0.5 - (i - 1)) / i;
    power = power * e;
    const CMatrix term = coefficient * power;
    out.root += term;
    if (term.norm() < tol) {
      ++i;
      break;
    }
  }
  out.terms = i;
  // |binom(1/2, k)| decreases in k, so the tail is dominated by a geometric series.
  const double next = std::abs(coefficient * (0.5 - (i - 1)) / i);
  out.tail_bound = r == 0.0 ? 0.0 : next * std::pow(r, i) / (1.0 - r);
  out.reconstruction_bound = 2.0 * std::sqrt(1.0 + r) * out.tail_bound + out.tail_bound * out.tail_bound;
  out.root = (0.5 * (out.root + out.root.adjoint())).eval();
  return out;
}

SqrtSeriesResult sqrt_series(const CentralSection& s, int max_terms, double tol) {
  return sqrt_series(s.dense(), max_terms, tol);
}

}  // namespace sosfejer
