#pragma once

// Shared fixtures and independent oracles for the test binaries. The oracles
// deliberately avoid the library's own evaluation and assembly routines.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "sosfejer/poly.hpp"

namespace sosfejer::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(gen_); }
  cplx complex(double r = 1.0) { return {uniform(-r, r), uniform(-r, r)}; }

 private:
  std::mt19937_64 gen_;
};

/// Dense random polynomial with exponents in [lo, hi]^vars.
inline MatLaurent random_polynomial(Rng& rng, int vars, int lo, int hi, int block = 1, double r = 1.0) {
  MatLaurent p(vars, block);
  std::vector<int> k(static_cast<std::size_t>(vars), lo);
  while (true) {
    CMatrix c(block, block);
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = rng.complex(r);
    p.set(Exponent(k), c);
    int i = 0;
    while (i < vars && ++k[static_cast<std::size_t>(i)] > hi) k[static_cast<std::size_t>(i++)] = lo;
    if (i == vars) break;
  }
  return p;
}

/// Random Hermitian symbol of the given coordinate degree in every variable.
inline MatLaurent random_hermitian(Rng& rng, int vars, int degree, int block = 1) {
  return hermitian_part(random_polynomial(rng, vars, -degree, degree, block));
}

/// S + rel_eps * |S|_1 with S = sum_k |Q_k|^2 over `count` random scalar Q_k
/// of degree <= `degree`.
inline MatLaurent random_sos(Rng& rng, int vars, int degree, int count, double rel_eps) {
  std::vector<MatLaurent> qs;
  for (int i = 0; i < count; ++i) qs.push_back(random_polynomial(rng, vars, 0, degree));
  const MatLaurent s = sosm(qs, vars);
  return add(s, MatLaurent::scalar_constant(vars, rel_eps * s.l1_norm()));
}

/// Direct sum of c_k exp(i <k, theta>) with std::polar per monomial.
inline CMatrix naive_eval(const MatLaurent& p, const std::vector<double>& theta) {
  CMatrix s = CMatrix::Zero(p.block(), p.block());
  for (const auto& [k, c] : p.terms()) {
    double phase = 0.0;
    for (int i = 0; i < k.vars(); ++i) phase += k[i] * theta[static_cast<std::size_t>(i)];
    s += c * std::polar(1.0, phase);
  }
  return s;
}

/// Grid angle vector for flat index `index` of a G^dims grid, axis 0 fastest.
inline std::vector<double> grid_angles(std::size_t index, int dims, int g) {
  std::vector<double> t(static_cast<std::size_t>(dims));
  for (int i = 0; i < dims; ++i) {
    t[static_cast<std::size_t>(i)] = 2.0 * std::numbers::pi * static_cast<double>(index % g) / g;
    index /= static_cast<std::size_t>(g);
  }
  return t;
}

inline std::size_t grid_size(int dims, int g) {
  std::size_t n = 1;
  for (int i = 0; i < dims; ++i) n *= static_cast<std::size_t>(g);
  return n;
}

/// Largest absolute coefficient entry.
inline double max_coeff(const MatLaurent& p) {
  double m = 0.0;
  for (const auto& [k, c] : p.terms()) m = std::max(m, c.cwiseAbs().maxCoeff());
  return m;
}

/// Smallest m > n with n(n+1)C / (2(m-n)) < eps, by linear scan.
inline int scan_order(int n, double c, double eps) {
  if (n == 0) return 1;
  for (int m = n + 1;; ++m)
    if (n * (n + 1) * c / (2.0 * (m - n)) < eps) return m;
}

/// Block section with block (i, j) = coefficient of z^(j - i), written entry
/// by entry from the coefficient list p_{-n}..p_n.
inline CMatrix section_oracle(const std::vector<CMatrix>& coeffs, int blocks) {
  const int n = static_cast<int>(coeffs.size() / 2);
  const int b = static_cast<int>(coeffs.front().rows());
  CMatrix s = CMatrix::Zero(blocks * b, blocks * b);
  for (int r = 0; r < blocks * b; ++r)
    for (int c = 0; c < blocks * b; ++c) {
      const int shift = c / b - r / b;
      if (std::abs(shift) <= n) s(r, c) = coeffs[static_cast<std::size_t>(shift + n)](r % b, c % b);
    }
  return s;
}

/// z-vector sandwich v^H M v with v = [1, z, .., z^m] (x) I, z in variable `var`.
inline CMatrix sandwich_oracle(const MatLaurent& mat, int var, int m, int block, const std::vector<double>& theta) {
  std::vector<double> rest;
  for (std::size_t i = 0; i < theta.size(); ++i)
    if (static_cast<int>(i) != var) rest.push_back(theta[i]);
  const CMatrix inner = naive_eval(mat, rest);
  CMatrix z = CMatrix::Zero((m + 1) * block, block);
  for (int j = 0; j <= m; ++j)
    z.block(j * block, 0, block, block) =
        CMatrix::Identity(block, block) * std::polar(1.0, j * theta[static_cast<std::size_t>(var)]);
  return z.adjoint() * inner * z;
}

inline MatLaurent scalar_poly(int vars, std::initializer_list<std::pair<std::vector<int>, double>> terms) {
  MatLaurent p(vars, 1);
  for (const auto& [k, v] : terms) p.set(Exponent(k), cplx(v));
  return p;
}

}  // namespace sosfejer::testing
