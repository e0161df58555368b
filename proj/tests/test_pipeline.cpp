#include <cmath>

#include "doctest.h"
#include "sosfejer/fixtures.hpp"
#include "sosfejer/pipeline.hpp"
#include "support.hpp"

using namespace sosfejer;
using namespace sosfejer::testing;

namespace {

/// max over random points of |P - sum |Q_k|^2| through the naive evaluator.
double sampled_residual(Rng& rng, const MatLaurent& p, const std::vector<MatLaurent>& terms, int samples = 200) {
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    std::vector<double> theta;
    for (int i = 0; i < p.vars(); ++i) theta.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
    double sum = 0.0;
    for (const auto& t : terms) sum += std::norm(naive_eval(t, theta)(0, 0));
    worst = std::max(worst, std::abs(naive_eval(p, theta)(0, 0) - sum));
  }
  return worst;
}

std::size_t product_bound(const SosCertificate& c) {
  std::size_t b = 1;
  for (int m : c.orders) b *= static_cast<std::size_t>(m + 1);
  return b;
}

}  // namespace

TEST_CASE("positive bivariate example factors with three terms") {
  const MatLaurent p = fixtures::positive_example();
  const SosCertificate c = sos_factorize(p);
  CHECK(c.orders == std::vector<int>{2});
  CHECK(c.order_bounds.size() == 1);
  CHECK(c.order_bounds[0] >= 2);
  CHECK(c.term_count == 3);
  CHECK(c.residual <= 1e-8);
  CHECK(c.coefficient_deviation <= 1e-8);
  Rng rng(51);
  CHECK(sampled_residual(rng, p, c.terms) <= 1e-8);
  // First term's constant is the top-left entry of the printed Q_0.
  CHECK(std::abs(c.terms[0].scalar_coeff(Exponent{0, 0}) - 3.185602126) < 1e-6);
}

TEST_CASE("positive bivariate example with the bound policy") {
  SosOptions o;
  o.policy = OrderPolicy::bound;
  const SosCertificate c = sos_factorize(fixtures::positive_example(), o);
  CHECK(c.orders[0] == c.order_bounds[0]);
  CHECK(c.orders[0] > 2);
  CHECK(c.residual <= 1e-9 * fixtures::positive_example().l1_norm());
}

TEST_CASE("constant polynomial gives a single constant term") {
  for (int d = 1; d <= 3; ++d) {
    const SosCertificate c = sos_factorize(MatLaurent::scalar_constant(d, 4.0));
    REQUIRE(c.term_count == 1);
    CHECK(c.terms[0].term_count() == 1);
    CHECK(std::abs(c.terms[0].scalar_coeff(Exponent::zero(d)) - 2.0) < 1e-14);
    CHECK(c.orders == std::vector<int>(static_cast<std::size_t>(d - 1), 0));
  }
}

TEST_CASE("sum of shifted squares against a sampled oracle") {
  const MatLaurent p = scalar_poly(2, {{{0, 0}, 5}, {{1, 0}, 1}, {{-1, 0}, 1}, {{0, 1}, 1}, {{0, -1}, 1}});
  const SosCertificate c = sos_factorize(p);
  Rng rng(52);
  CHECK(sampled_residual(rng, p, c.terms) <= 1e-9 * p.l1_norm());
  CHECK(c.terms.size() <= product_bound(c));
}

TEST_CASE("univariate input is a scalar spectral factorization") {
  // 1.25 + cos(theta) = |1 + z/2|^2.
  const MatLaurent p = scalar_poly(1, {{{0}, 1.25}, {{1}, 0.5}, {{-1}, 0.5}});
  const SosCertificate c = sos_factorize(p);
  REQUIRE(c.term_count == 1);
  CHECK(std::abs(c.terms[0].scalar_coeff(Exponent{0}) - 1.0) < 1e-9);
  CHECK(std::abs(c.terms[0].scalar_coeff(Exponent{1}) - 0.5) < 1e-9);
  CHECK(c.orders.empty());
}

TEST_CASE("reconstruct_terms matches the Kronecker monomial oracle") {
  const std::vector<CMatrix> scalar{CMatrix::Constant(1, 1, 2.0), CMatrix::Constant(1, 1, cplx(1, 1))};
  const auto uni = reconstruct_terms(scalar, std::vector<int>{}, 1);
  REQUIRE(uni.size() == 1);
  CHECK(uni[0] == add(scalar_poly(1, {{{0}, 2}}), MatLaurent::monomial(Exponent{1}, cplx(1, -1))));

  Rng rng(53);
  for (const std::vector<int>& orders : {std::vector<int>{1}, std::vector<int>{2}, std::vector<int>{1, 2}}) {
    const int vars = static_cast<int>(orders.size()) + 1;
    int b = 1;
    for (int m : orders) b *= m + 1;
    std::vector<CMatrix> g;
    for (int j = 0; j < 3; ++j) {
      CMatrix gj(b, b);
      for (Eigen::Index i = 0; i < gj.size(); ++i) gj(i) = rng.complex();
      g.push_back(gj);
    }
    const auto terms = reconstruct_terms(g, orders, vars);
    REQUIRE(terms.size() == static_cast<std::size_t>(b));
    for (int s = 0; s < 5; ++s) {
      std::vector<double> theta;
      for (int i = 0; i < vars; ++i) theta.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
      // Kronecker vector with the first eliminated variable varying fastest.
      Eigen::VectorXcd v(b);
      for (int c = 0; c < b; ++c) {
        double phase = 0.0;
        int rest = c;
        for (std::size_t i = 0; i < orders.size(); ++i) {
          phase += (rest % (orders[i] + 1)) * theta[i];
          rest /= orders[i] + 1;
        }
        v(c) = std::polar(1.0, phase);
      }
      Eigen::VectorXcd q = Eigen::VectorXcd::Zero(b);
      for (std::size_t j = 0; j < g.size(); ++j)
        q += g[j].adjoint() * v * std::polar(1.0, static_cast<double>(j) * theta.back());
      for (int r = 0; r < b; ++r) CHECK(std::abs(naive_eval(terms[static_cast<std::size_t>(r)], theta)(0, 0) - q(r)) < 1e-12);
    }
  }
  CHECK_THROWS_AS(reconstruct_terms(scalar, std::vector<int>{1}, 2), DimensionMismatch);
  CHECK_THROWS_AS(reconstruct_terms(scalar, std::vector<int>{}, 2), DimensionMismatch);
  CHECK_THROWS_AS(reconstruct_terms(std::vector<CMatrix>{}, std::vector<int>{}, 1), DimensionMismatch);
}

TEST_CASE("verify_certificate measures the missing square") {
  const MatLaurent q1 = scalar_poly(2, {{{0, 0}, 2}, {{1, 0}, 1}});
  const MatLaurent q2 = scalar_poly(2, {{{0, 0}, 1}, {{0, 1}, -1}});
  const std::vector<MatLaurent> both{q1, q2};
  const MatLaurent p = sosm(both, 2);
  const TorusGrid grid(2, 32);
  const VerificationReport exact = verify_certificate(p, both, grid);
  CHECK(exact.residual < 1e-14);
  CHECK(exact.coefficient_deviation < 1e-15);
  // Dropping q2 leaves |1 - y|^2, whose grid max is 4 and largest coefficient 2.
  const VerificationReport missing = verify_certificate(p, std::vector<MatLaurent>{q1}, grid);
  CHECK(missing.residual == doctest::Approx(4.0));
  CHECK(missing.coefficient_deviation == doctest::Approx(2.0));
  CHECK_THROWS_AS(verify_certificate(p, std::vector<MatLaurent>{scalar_poly(1, {{{0}, 1}})}, grid), DimensionMismatch);
}

TEST_CASE("random sums of squares factor with bounded term counts and degrees") {
  Rng rng(54);
  for (int trial = 0; trial < 8; ++trial) {
    const int d = rng.integer(2, 3);
    const int degree = rng.integer(1, 2);
    const MatLaurent p = random_sos(rng, d, degree, rng.integer(1, 3), 0.1);
    const SosCertificate c = sos_factorize(p);
    CHECK(c.residual <= 1e-9 * p.l1_norm());
    CHECK(c.terms.size() <= product_bound(c));
    CHECK(sampled_residual(rng, p, c.terms, 50) <= 1e-8 * p.l1_norm());
    for (const auto& t : c.terms) {
      for (int i = 0; i + 1 < d; ++i) {
        CHECK(t.min_exponent(i) >= 0);
        CHECK(t.max_exponent(i) <= c.orders[static_cast<std::size_t>(i)]);
      }
      CHECK(t.min_exponent(d - 1) >= 0);
      CHECK(t.max_exponent(d - 1) <= p.degree(d - 1));
    }
  }
}

TEST_CASE("either elimination order verifies") {
  const MatLaurent p = fixtures::positive_example();
  for (const std::vector<int>& order : {std::vector<int>{0, 1}, std::vector<int>{1, 0}}) {
    SosOptions o;
    o.elimination = order;
    const SosCertificate c = sos_factorize(p, o);
    CHECK(c.elimination == order);
    CHECK(c.residual <= 1e-9 * p.l1_norm());
    Rng rng(55);
    CHECK(sampled_residual(rng, p, c.terms, 50) <= 1e-8 * p.l1_norm());
  }
}

TEST_CASE("pipeline errors") {
  CHECK_THROWS_AS(sos_factorize(fixtures::nonnegative_example()), NotPositive);
  CHECK_THROWS_AS(sos_factorize(scalar_poly(2, {{{0, 0}, -1}})), NotPositive);

  SosOptions small;
  small.orders = std::vector<int>{1};
  CHECK_THROWS_AS(sos_factorize(fixtures::positive_example(), small), OrderTooSmall);

  SosOptions wrong_count;
  wrong_count.orders = std::vector<int>{2, 2};
  CHECK_THROWS_AS(sos_factorize(fixtures::positive_example(), wrong_count), InvalidArgument);

  SosOptions bad_tol;
  bad_tol.tol = 0.0;
  CHECK_THROWS_AS(sos_factorize(fixtures::positive_example(), bad_tol), InvalidArgument);

  SosOptions capped;
  capped.policy = OrderPolicy::bound;
  capped.max_order = 3;
  CHECK_THROWS_AS(sos_factorize(fixtures::positive_example(), capped), OrderTooLarge);

  CHECK_THROWS_AS(sos_factorize(MatLaurent::constant(1, CMatrix::Identity(2, 2))), DimensionMismatch);

  // A forced eps skips the positivity estimate, so an indefinite input only
  // surfaces in the last-stage section.
  SosOptions forced;
  forced.eps = 1.0;
  forced.orders = std::vector<int>{1};
  const MatLaurent indefinite =
      scalar_poly(2, {{{0, 0}, 1}, {{1, 1}, 0.9}, {{1, -1}, 0.9}, {{-1, 1}, 0.9}, {{-1, -1}, 0.9}});
  try {
    sos_factorize(indefinite, forced);
    FAIL("expected NotPositiveDefinite");
  } catch (const NotPositiveDefinite& e) {
    CHECK(e.stage() == 1);
  }
}

TEST_CASE("certificate json round trip") {
  const SosCertificate c = sos_factorize(fixtures::positive_example());
  const nlohmann::json j = certificate_to_json(c);
  for (const char* key : {"vars", "orders", "order_bounds", "elimination", "eps_used", "residual",
                          "coefficient_deviation", "grid", "term_count", "terms"})
    CHECK(j.contains(key));
  const SosCertificate back = certificate_from_json(j);
  CHECK(back.vars == c.vars);
  CHECK(back.orders == c.orders);
  CHECK(back.grid_points == c.grid_points);
  REQUIRE(back.terms.size() == c.terms.size());
  for (std::size_t i = 0; i < c.terms.size(); ++i) CHECK(back.terms[i] == c.terms[i]);
  CHECK(certificate_to_json(back)["terms"] == j["terms"]);
  CHECK_THROWS_AS(certificate_from_json(nlohmann::json::parse("{\"vars\": 2}")), ParseError);
}
