#include "sosfejer/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

#include "sosfejer/error.hpp"
#include "sosfejer/parallel.hpp"
#include "sosfejer/poly_io.hpp"

namespace sosfejer {

namespace {

// Estimated minima at or below this fraction of |P|_1 count as "not positive".
constexpr double kPositivityFloor = 1e-10;
// Adaptive orders must keep the grid minimum above this share of the level
// eps / (m + 1) that the remainder bound guarantees asymptotically.
constexpr double kAdaptiveMargin = 0.05;

std::vector<int> inverse_permutation(const std::vector<int>& perm) {
  std::vector<int> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[static_cast<std::size_t>(perm[i])] = static_cast<int>(i);
  return inv;
}

struct StageChoice {
  int order = 0;
  int bound = 0;
};

StageChoice pick_order(const MatLaurent& cur, int stage, double eps, const SosOptions& options, int grid_points) {
  const int n = cur.degree(0);
  if (options.orders) {
    const int m = (*options.orders)[static_cast<std::size_t>(stage)];
    if (m < n) throw OrderTooSmall(m, n);
    return {m, 0};
  }
  if (n == 0) return {0, 0};

  const TorusGrid grid(cur.vars(), grid_points);
  const double c = sup_norm_constant(cur, 0, grid);
  if (options.policy == OrderPolicy::bound) {
    const MatricizeOrder o = choose_order(n, c, eps, options.max_order);
    return {o.m, o.m};
  }
  int bound = 0;
  try {
    bound = choose_order(n, c, eps).m;
  } catch (const OrderTooLarge& e) {
    bound = e.order();
  }
  const int cap = std::min(bound, options.max_order);
  // A univariate remainder is cheap to sample densely; intermediate stages use
  // the verification grid.
  const TorusGrid rest(cur.vars() - 1, cur.vars() == 2 ? std::max(4 * grid_points, 256) : grid_points);
  const auto positive = [&](int m) {
    const MatLaurent candidate = matricize_step(cur, 0, m);
    const double level = candidate.vars() == 0 ? Eigen::SelfAdjointEigenSolver<CMatrix>(
                                                     candidate.coeff(Exponent{}), Eigen::EigenvaluesOnly)
                                                     .eigenvalues()
                                                     .minCoeff()
                                               : torus_min(candidate, rest);
    return level >= kAdaptiveMargin * eps / (m + 1);
  };
  // Probe n, n+1, n+3, n+7, ... and bisect the last gap, so a large order
  // costs O(log m) grid checks instead of m.
  int failed = n - 1;
  for (int step = 1, m = n; m <= cap; m = n + (step *= 2) - 1) {
    if (positive(m)) {
      int good = m;
      while (good - failed > 1) {
        const int mid = failed + (good - failed) / 2;
        (positive(mid) ? good : failed) = mid;
      }
      return {good, bound};
    }
    failed = m;
  }
  if (cap == bound || (failed < cap && positive(cap))) return {cap, bound};
  throw OrderTooLarge(bound, options.max_order);
}

}  // namespace

int default_grid_points(int vars) {
  if (vars <= 2) return 64;
  if (vars == 3) return 32;
  return 16;
}

std::vector<MatLaurent> reconstruct_terms(std::span<const CMatrix> g, std::span<const int> orders, int vars) {
  if (vars < 1 || static_cast<int>(orders.size()) != vars - 1)
    throw DimensionMismatch("reconstruct_terms: need one order per eliminated variable");
  if (g.empty()) throw DimensionMismatch("reconstruct_terms: empty factor");
  std::vector<int> stride(orders.size() + 1, 1);
  for (std::size_t i = 0; i < orders.size(); ++i) stride[i + 1] = stride[i] * (orders[i] + 1);
  const int b = stride.back();
  for (const auto& gj : g)
    if (gj.rows() != b || gj.cols() != b)
      throw DimensionMismatch("reconstruct_terms: factor block " + std::to_string(gj.rows()) +
                              " does not match product of (m_i + 1) = " + std::to_string(b));

  std::vector<MatLaurent> terms;
  terms.reserve(static_cast<std::size_t>(b));
  for (int r = 0; r < b; ++r) {
    MatLaurent term(vars, 1);
    for (std::size_t j = 0; j < g.size(); ++j) {
      for (int c = 0; c < b; ++c) {
        const cplx v = std::conj(g[j](c, r));  // (G_j^H)(r, c)
        if (v == cplx{}) continue;
        std::vector<int> k(static_cast<std::size_t>(vars));
        for (std::size_t i = 0; i < orders.size(); ++i) k[i] = (c / stride[i]) % (orders[i] + 1);
        k.back() = static_cast<int>(j);
        term.accumulate(Exponent(std::move(k)), v);
      }
    }
    terms.push_back(std::move(term));
  }
  return terms;
}

VerificationReport verify_certificate(const MatLaurent& p, std::span<const MatLaurent> terms, const TorusGrid& grid) {
  if (!p.is_scalar()) throw DimensionMismatch("verify_certificate: P must be scalar");
  for (const auto& t : terms)
    if (t.vars() != p.vars() || !t.is_scalar()) throw DimensionMismatch("verify_certificate: incompatible term");
  VerificationReport report;

  const GridEvaluator pe(p, grid);
  std::vector<GridEvaluator> te;
  te.reserve(terms.size());
  for (const auto& t : terms) te.emplace_back(t, grid);
  std::mutex m;
  parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
    double local = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      double s = 0.0;
      for (const auto& e : te) s += std::norm(e.scalar(i));
      local = std::max(local, std::abs(pe.scalar(i) - s));
    }
    std::lock_guard lock(m);
    report.residual = std::max(report.residual, local);
  });

  const MatLaurent diff = subtract(p, sosm(terms, p.vars()));
  for (const auto& [k, c] : diff.terms()) report.coefficient_deviation = std::max(report.coefficient_deviation, std::abs(c(0, 0)));
  return report;
}

SosCertificate sos_factorize(const MatLaurent& p, const SosOptions& options) {
  if (!p.is_scalar()) throw DimensionMismatch("sos_factorize needs a scalar polynomial");
  const int d = p.vars();
  if (d < 1) throw DimensionMismatch("sos_factorize needs at least one variable");
  require_hermitian(p, "sos_factorize");
  if (!(options.tol > 0.0)) throw InvalidArgument("tol must be positive");

  std::vector<int> elimination = options.elimination;
  if (elimination.empty()) {
    elimination.resize(static_cast<std::size_t>(d));
    std::iota(elimination.begin(), elimination.end(), 0);
  }
  if (static_cast<int>(elimination.size()) != d) throw InvalidArgument("elimination order must list every variable");
  if (options.orders && static_cast<int>(options.orders->size()) != d - 1)
    throw InvalidArgument("expected " + std::to_string(d - 1) + " orders");

  SosCertificate cert;
  cert.vars = d;
  cert.elimination = elimination;
  cert.grid_points = options.grid_points > 0 ? options.grid_points : default_grid_points(d);
  const int gp = cert.grid_points;

  const double floor = kPositivityFloor * std::max(1.0, p.l1_norm());
  const double eps_hat = options.eps ? *options.eps : torus_min(p, TorusGrid(d, gp));
  cert.eps_used = eps_hat;
  if (!(eps_hat > floor)) throw NotPositive(eps_hat);

  // Work in the frame where variables are eliminated in ascending order.
  MatLaurent cur = permute_vars(p, elimination);
  double eps = eps_hat;
  for (int stage = 0; stage < d - 1; ++stage) {
    if (stage > 0 && cur.degree(0) > 0 && !options.orders) {
      eps = torus_min(cur, TorusGrid(cur.vars(), gp));
      if (!(eps > kPositivityFloor * std::max(1.0, cur.l1_norm()))) throw NotPositive(eps);
    }
    const StageChoice choice = pick_order(cur, stage, eps, options, gp);
    cert.orders.push_back(choice.order);
    cert.order_bounds.push_back(choice.bound);
    cur = hermitian_part(matricize_step(cur, 0, choice.order));
  }

  FactorOptions fo;
  fo.tol = options.tol;
  fo.max_blocks = options.max_blocks;
  try {
    cert.factor = factor_matrix_polynomial(cur, fo);
  } catch (const NotPositiveDefinite& e) {
    throw e.with_stage(d - 1);
  }

  const std::vector<MatLaurent> frame_terms = reconstruct_terms(cert.factor.coeffs, cert.orders, d);
  const std::vector<int> back = inverse_permutation(elimination);
  for (const auto& t : frame_terms) cert.terms.push_back(permute_vars(t, back));
  cert.term_count = static_cast<int>(cert.terms.size());

  const VerificationReport report = verify_certificate(p, cert.terms, TorusGrid(d, gp));
  cert.residual = report.residual;
  cert.coefficient_deviation = report.coefficient_deviation;
  const double bound = options.tol * p.l1_norm();
  if (cert.residual > bound) throw VerificationFailed(cert.residual, bound);
  return cert;
}

nlohmann::json certificate_to_json(const SosCertificate& cert) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : cert.terms) terms.push_back(format_polynomial(t));
  return {
      {"vars", cert.vars},
      {"orders", cert.orders},
      {"order_bounds", cert.order_bounds},
      {"elimination", cert.elimination},
      {"eps_used", cert.eps_used},
      {"residual", cert.residual},
      {"coefficient_deviation", cert.coefficient_deviation},
      {"grid", {{"dims", cert.vars}, {"points_per_axis", cert.grid_points}}},
      {"term_count", cert.term_count},
      {"terms", terms},
  };
}

SosCertificate certificate_from_json(const nlohmann::json& j) {
  try {
    SosCertificate cert;
    cert.vars = j.at("vars").get<int>();
    cert.orders = j.value("orders", std::vector<int>{});
    cert.order_bounds = j.value("order_bounds", std::vector<int>{});
    cert.elimination = j.value("elimination", std::vector<int>{});
    cert.eps_used = j.value("eps_used", 0.0);
    cert.residual = j.value("residual", 0.0);
    cert.coefficient_deviation = j.value("coefficient_deviation", 0.0);
    cert.grid_points = j.contains("grid") ? j.at("grid").value("points_per_axis", 0) : 0;
    for (const auto& t : j.at("terms")) cert.terms.push_back(parse_polynomial(t.get<std::string>()));
    cert.term_count = static_cast<int>(cert.terms.size());
    return cert;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, 1, std::string("malformed certificate: ") + e.what());
  }
}

}  // namespace sosfejer
