#pragma once

// Sum-of-squares factorization of a strictly positive scalar Laurent
// polynomial in d variables: eliminate z_1 .. z_{d-1} by weighted
// matricization, factor the remaining univariate matrix polynomial, and read
// one scalar term off every row of the factor.

#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "sosfejer/bauer.hpp"
#include "sosfejer/matricize.hpp"
#include "sosfejer/poly.hpp"

namespace sosfejer {

enum class OrderPolicy {
  /// Smallest order (from the eliminated degree upward, capped by the
  /// remainder bound) whose matricization is positive on the grid with margin.
  adaptive,
  /// Exactly the order from choose_order.
  bound,
};

struct SosOptions {
  std::optional<double> eps;               // overrides the grid estimate of min P
  std::optional<std::vector<int>> orders;  // one order per eliminated variable
  /// Permutation of the variables: elimination[0] is eliminated first, the
  /// last entry is the variable left for the univariate factorization.
  /// Empty means ascending order.
  std::vector<int> elimination;
  double tol = 1e-9;
  int grid_points = 0;  // 0: 64 per axis for d <= 2, 32 for d = 3, 16 beyond
  int max_blocks = 4096;
  OrderPolicy policy = OrderPolicy::adaptive;
  int max_order = 256;
};

struct SosCertificate {
  int vars = 1;
  std::vector<MatLaurent> terms;
  std::vector<int> orders;        // m_1 .. m_{d-1}, in elimination order
  std::vector<int> order_bounds;  // choose_order result per stage, 0 when not computed
  std::vector<int> elimination;
  double eps_used = 0.0;
  double residual = 0.0;
  double coefficient_deviation = 0.0;
  int grid_points = 0;
  int term_count = 0;
  FactorResult factor;  // univariate factorization of the last stage
};

/// Default verification grid points per axis for `vars` variables.
int default_grid_points(int vars);

/// Throws NotPositive, OrderTooSmall, OrderTooLarge, NotPositiveDefinite
/// (stage attached), NotConverged, VerificationFailed.
SosCertificate sos_factorize(const MatLaurent& p, const SosOptions& options = {});

/// Row r of Q(z_d) = sum_j G_j^H z_d^j dotted with the Kronecker monomial
/// vector [1..z_{d-1}^{m_{d-1}}] (x) ... (x) [1..z_1^{m_1}]. Result terms are in
/// the elimination frame (variable i is the i-th eliminated one).
std::vector<MatLaurent> reconstruct_terms(std::span<const CMatrix> g, std::span<const int> orders, int vars);

struct VerificationReport {
  double residual = 0.0;               // max over grid |P - sum_k |Q_k|^2|
  double coefficient_deviation = 0.0;  // max |coeff(P - sosm(terms))|
};

VerificationReport verify_certificate(const MatLaurent& p, std::span<const MatLaurent> terms, const TorusGrid& grid);

nlohmann::json certificate_to_json(const SosCertificate& cert);
/// Reads back the parts needed for verification (terms, orders, grid, ...).
SosCertificate certificate_from_json(const nlohmann::json& j);

}  // namespace sosfejer
