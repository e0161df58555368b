#include "sosfejer/matricize.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sosfejer/error.hpp"

namespace sosfejer {

MatricizeOrder choose_order(int n, double C, double eps, int limit) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidEps("eps must be a positive finite number");
  if (n < 0) throw InvalidArgument("degree must be non-negative");
  if (!(C >= 0.0) || !std::isfinite(C)) throw InvalidArgument("sup-norm constant must be non-negative");
  if (n == 0) return {1, 0, C, eps};
  const double slack = n * (n + 1.0) * C / (2.0 * eps);
  // m - n must strictly exceed slack.
  double gap = std::floor(slack) + 1.0;
  if (gap + n > static_cast<double>(limit)) throw OrderTooLarge(static_cast<int>(std::min(gap + n, 2e9)), limit);
  int m = n + static_cast<int>(gap);
  const auto bound = [&](int mm) { return n * (n + 1.0) * C / (2.0 * (mm - n)); };
  while (m > n + 1 && bound(m - 1) < eps) --m;
  while (!(bound(m) < eps)) ++m;
  return {m, n, C, eps};
}

std::map<int, MatLaurent> coefficient_slices(const MatLaurent& p, int var) {
  if (var < 0 || var >= p.vars()) throw DimensionMismatch("coefficient_slices: variable out of range");
  std::map<int, MatLaurent> slices;
  for (const auto& [k, c] : p.terms()) {
    auto it = slices.try_emplace(k[var], p.vars() - 1, p.block()).first;
    it->second.set(k.without(var), c);
  }
  return slices;
}

double sup_norm_constant(const MatLaurent& p, int var, const TorusGrid& grid) {
  if (var < 0 || var >= p.vars()) throw DimensionMismatch("sup_norm_constant: variable out of range");
  if (grid.dims() != p.vars()) throw DimensionMismatch("sup_norm_constant: grid dimension mismatch");
  const TorusGrid rest(p.vars() - 1, grid.points_per_axis());
  double c = 0.0;
  for (const auto& [i, slice] : coefficient_slices(p, var)) c = std::max(c, torus_max_norm(slice, rest));
  return c;
}

MatLaurent matricize_step(const MatLaurent& p, int var, int m, MatricizeVariant variant) {
  if (var < 0 || var >= p.vars()) throw DimensionMismatch("matricize_step: variable out of range");
  if (m < 0) throw InvalidArgument("matricize_step: order must be non-negative");
  const int n = p.degree(var);
  if (variant == MatricizeVariant::weighted && m < n) throw OrderTooSmall(m, n);
  require_hermitian(p, "matricize_step");

  const int b = p.block();
  const int big = (m + 1) * b;
  std::map<Exponent, CMatrix> acc;
  for (const auto& [k, c] : p.terms()) {
    const int shift = k[var];  // the slice p_shift sits on block diagonal k - j = shift
    if (std::abs(shift) > m) continue;
    const double w = variant == MatricizeVariant::weighted ? 1.0 / (m + 1 - std::abs(shift)) : 1.0;
    const Exponent rest = k.without(var);
    auto it = acc.find(rest);
    if (it == acc.end()) it = acc.emplace(rest, CMatrix::Zero(big, big)).first;
    for (int j = 0; j <= m; ++j) {
      const int col = j + shift;
      if (col < 0 || col > m) continue;
      it->second.block(j * b, col * b, b, b) += w * c;
    }
  }
  MatLaurent r(p.vars() - 1, big);
  for (auto& [k, c] : acc) r.set(k, c);
  return r;
}

double diagonal_sum_check(const MatLaurent& mat, const MatLaurent& p, int var) {
  if (var < 0 || var >= p.vars()) throw DimensionMismatch("diagonal_sum_check: variable out of range");
  if (mat.vars() != p.vars() - 1) throw DimensionMismatch("diagonal_sum_check: variable counts disagree");
  const int b = p.block();
  if (mat.block() % b != 0) throw DimensionMismatch("diagonal_sum_check: block sizes disagree");
  const int m = mat.block() / b - 1;

  // Diagonal sums, keyed by (shift, remaining exponent).
  std::map<int, MatLaurent> sums;
  for (const auto& [k, c] : mat.terms()) {
    for (int j = 0; j <= m; ++j) {
      for (int col = 0; col <= m; ++col) {
        const CMatrix blk = c.block(j * b, col * b, b, b);
        if (blk.isZero(0.0)) continue;
        sums.try_emplace(col - j, p.vars() - 1, b).first->second.accumulate(k, blk);
      }
    }
  }
  const auto slices = coefficient_slices(p, var);
  double worst = 0.0;
  const auto deviation = [&](const MatLaurent& a, const MatLaurent* bptr) {
    MatLaurent d = bptr ? subtract(a, *bptr) : a;
    for (const auto& [k, c] : d.terms()) worst = std::max(worst, c.cwiseAbs().maxCoeff());
  };
  for (const auto& [shift, s] : sums) {
    auto it = slices.find(shift);
    deviation(s, it == slices.end() ? nullptr : &it->second);
  }
  for (const auto& [shift, s] : slices)
    if (!sums.count(shift)) deviation(s, nullptr);
  return worst;
}

}  // namespace sosfejer
