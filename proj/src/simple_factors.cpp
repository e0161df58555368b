#include "sosfejer/simple_factors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sosfejer/bauer.hpp"
#include "sosfejer/error.hpp"
#include "sosfejer/matricize.hpp"
#include "sosfejer/poly_io.hpp"

namespace sosfejer {

namespace {

constexpr double kUnimodularTol = 1e-8;
constexpr double kMergeDistance = 1e-6;
// Raw companion eigenvalues closer than this are treated as one multiple root.
constexpr double kClusterRadius = 1e-2;

cplx eval_univariate(const MatLaurent& c, cplx z) {
  cplx s{};
  for (const auto& [k, v] : c.terms()) s += v(0, 0) * std::pow(z, k[0]);
  return s;
}

// Newton on d/dtheta c(e^{i theta}) = 0 for a real-valued c. A unimodular
// zero of a nonnegative c has even order mult; the derivative then has a zero
// of order mult - 1, which the multiplicity-scaled step handles.
double refine_angle(const MatLaurent& c, double theta, int mult) {
  const double factor = std::max(1, mult - 1);
  double last = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 50; ++it) {
    double d1 = 0.0, d2 = 0.0;
    for (const auto& [k, v] : c.terms()) {
      const double kk = k[0];
      const cplx e = v(0, 0) * std::polar(1.0, kk * theta);
      d1 += (cplx(0, kk) * e).real();
      d2 += (-kk * kk * e).real();
    }
    if (d2 == 0.0 || !(std::abs(d1) < last)) break;
    last = std::abs(d1);
    const double step = factor * d1 / d2;
    theta -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return theta;
}

cplx snap_unit(cplx z) {
  for (const cplx s : {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)})
    if (std::abs(z - s) < 1e-12) return s;
  return z / std::abs(z);
}

// Divides a_0 + a_1 z + ... + a_D z^D by (z - z0); returns the quotient and
// stores |remainder| in `rem`.
std::vector<cplx> divide_linear(const std::vector<cplx>& a, cplx z0, double& rem) {
  if (a.empty()) {
    rem = 0.0;
    return {};
  }
  const std::size_t d = a.size() - 1;
  std::vector<cplx> q(d);
  cplx carry{};
  for (std::size_t i = d + 1; i-- > 1;) {
    carry = a[i] + z0 * carry;
    q[i - 1] = carry;
  }
  rem = std::abs(a[0] + z0 * carry);
  return q;
}

std::string monomial_label(const Exponent& k) {
  static const char* names[] = {"x", "y"};
  std::string s;
  for (int i = 0; i < k.vars(); ++i) {
    if (k[i] == 0) continue;
    s += i < 2 ? names[i] : "z" + std::to_string(i + 1);
    if (k[i] != 1) s += "^" + std::to_string(k[i]);
  }
  return s.empty() ? "c_const" : "c_" + s;
}

std::string format_csv_complex(cplx v) {
  if (std::abs(v.imag()) <= 1e-12 * std::max(1.0, std::abs(v.real()))) return format_double(v.real());
  return format_double(v.real()) + (v.imag() >= 0 ? "+" : "") + format_double(v.imag()) + "i";
}

}  // namespace

std::vector<SimpleRoot> unimodular_roots(const MatLaurent& c, double radial_tol) {
  if (c.vars() != 1 || !c.is_scalar()) throw DimensionMismatch("unimodular_roots needs a univariate scalar polynomial");
  if (c.is_zero()) return {};
  const int lo = c.min_exponent(0);
  const int d = c.max_exponent(0) - lo;
  if (d == 0) return {};
  const cplx lead = c.scalar_coeff(Exponent{lo + d});
  CMatrix companion = CMatrix::Zero(d, d);
  for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) companion(i, d - 1) = -c.scalar_coeff(Exponent{lo + i}) / lead;
  const Eigen::ComplexEigenSolver<CMatrix> es(companion, false);

  // Eigenvalues of a root of multiplicity mu scatter by about eps^(1/mu);
  // their centroid is well conditioned, so cluster first, then refine.
  struct Cluster {
    cplx sum;
    int count;
  };
  std::vector<Cluster> clusters;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const cplx lambda = es.eigenvalues()(i);
    if (std::abs(std::abs(lambda) - 1.0) >= radial_tol) continue;
    auto near = std::find_if(clusters.begin(), clusters.end(), [&](const Cluster& cl) {
      return std::abs(cl.sum / static_cast<double>(cl.count) - lambda) < kClusterRadius;
    });
    if (near != clusters.end()) {
      near->sum += lambda;
      ++near->count;
    } else {
      clusters.push_back({lambda, 1});
    }
  }
  std::vector<SimpleRoot> roots;
  for (const Cluster& cl : clusters) {
    const cplx centre = cl.sum / static_cast<double>(cl.count);
    const cplx z0 = snap_unit(std::polar(1.0, refine_angle(c, std::arg(centre), cl.count)));
    auto same = std::find_if(roots.begin(), roots.end(),
                             [&](const SimpleRoot& r) { return std::abs(r.z0 - z0) < kMergeDistance; });
    if (same != roots.end())
      same->multiplicity += cl.count;
    else
      roots.push_back({z0, cl.count});
  }
  std::sort(roots.begin(), roots.end(), [](const SimpleRoot& a, const SimpleRoot& b) {
    return std::arg(a.z0) < std::arg(b.z0);
  });
  return roots;
}

MatLaurent remove_simple_factor(const MatLaurent& p, cplx z0, int var, double tol) {
  if (!p.is_scalar()) throw DimensionMismatch("remove_simple_factor needs a scalar polynomial");
  if (var < 0 || var >= p.vars()) throw InvalidArgument("variable index out of range");
  if (std::abs(std::abs(z0) - 1.0) > kUnimodularTol) throw InvalidArgument("z0 must lie on the unit circle");

  // Group by the exponents of the other variables: division in z acts on each
  // group independently.
  std::map<Exponent, std::map<int, cplx>> groups;
  for (const auto& [k, c] : p.terms()) groups[k.without(var)][k[var]] = c(0, 0);

  MatLaurent out(p.vars(), 1);
  double worst = 0.0;
  for (const auto& [rest, column] : groups) {
    const int lo = column.begin()->first;
    const int hi = column.rbegin()->first;
    std::vector<cplx> a(static_cast<std::size_t>(hi - lo + 1));
    for (const auto& [e, v] : column) a[static_cast<std::size_t>(e - lo)] = v;
    double r1 = 0.0, r2 = 0.0;
    const std::vector<cplx> q = divide_linear(divide_linear(a, z0, r1), z0, r2);
    worst = std::max({worst, r1, r2});
    // (1/z - 1/z0) = -(z - z0) / (z z0), so the quotient picks up -z0 * z.
    for (std::size_t i = 0; i < q.size(); ++i)
      out.accumulate(rest.with_inserted(var, lo + 1 + static_cast<int>(i)), -z0 * q[i]);
  }
  if (worst > tol * p.l1_norm()) throw NotDivisible(worst);
  return hermitian_part(out);
}

SimpleFactorReport detect_simple_factors(const MatLaurent& p, int var, double tol) {
  if (p.vars() != 2) throw NotBivariate(p.vars());
  if (!p.is_scalar()) throw DimensionMismatch("detect_simple_factors needs a scalar polynomial");
  if (var < 0 || var > 1) throw InvalidArgument("variable index must be 0 or 1");
  require_hermitian(p, "detect_simple_factors");

  SimpleFactorReport report;
  report.variable = var;
  report.reduced = p;
  const int other = 1 - var;
  const auto slices = coefficient_slices(p, other);
  const auto c0 = slices.find(0);
  if (c0 == slices.end()) return report;

  const auto is_factor = [&](const MatLaurent& q, cplx z0) {
    if (q.degree(var) == 0) return false;
    for (const auto& [k, c] : coefficient_slices(q, other))
      if (!(std::abs(eval_univariate(c, z0)) < tol * c.l1_norm())) return false;
    return true;
  };
  for (const SimpleRoot& candidate : unimodular_roots(c0->second)) {
    int mult = 0;
    while (is_factor(report.reduced, candidate.z0)) {
      try {
        report.reduced = remove_simple_factor(report.reduced, candidate.z0, var);
      } catch (const NotDivisible&) {
        break;
      }
      ++mult;
    }
    if (mult > 0) report.roots.push_back({candidate.z0, mult});
  }
  return report;
}

std::vector<double> section_positivity_check(const MatLaurent& p, std::span<const int> sizes, int grid_points,
                                             int var) {
  std::vector<double> out;
  out.reserve(sizes.size());
  for (const int s : sizes) {
    if (s < 1) throw InvalidArgument("section sizes must be positive");
    const MatLaurent t = matricize_step(p, var, s - 1, MatricizeVariant::section);
    if (t.vars() == 0) {
      const Eigen::SelfAdjointEigenSolver<CMatrix> es(t.coeff(Exponent{}), Eigen::EigenvaluesOnly);
      out.push_back(es.eigenvalues().minCoeff());
    } else {
      out.push_back(torus_min(t, TorusGrid(t.vars(), grid_points)));
    }
  }
  return out;
}

ConvergenceReport nonneg_convergence_ladder(const MatLaurent& p, std::span<const int> sizes, double tol, int y_blocks,
                                            int var) {
  if (p.vars() != 2) throw NotBivariate(p.vars());
  if (!p.is_scalar()) throw DimensionMismatch("the ladder needs a scalar polynomial");
  if (var < 0 || var > 1) throw InvalidArgument("variable index must be 0 or 1");
  if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
  if (y_blocks < 0) throw InvalidArgument("y_blocks must be nonnegative");
  if (sizes.empty()) throw InvalidArgument("the ladder needs at least one size");
  const int nx = p.degree(var);
  const int ny = p.degree(1 - var);
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] <= nx) throw InvalidArgument("section size must exceed the degree " + std::to_string(nx));
    if (i > 0 && sizes[i] <= sizes[i - 1]) throw InvalidArgument("ladder sizes must be strictly increasing");
  }

  ConvergenceReport report;
  report.variable = var;
  report.tol = tol;
  for (int j = 0; j <= ny; ++j)
    for (int a = 0; a <= nx; ++a) {
      Exponent k = Exponent::zero(2);
      k[var] = a;
      k[1 - var] = j;
      report.exponents.push_back(k);
    }

  for (const int s : sizes) {
    const MatLaurent t = matricize_step(p, var, s - 1, MatricizeVariant::section);
    std::vector<CMatrix> g;
    try {
      if (y_blocks > 0) {
        g = section_factor_row(t, y_blocks);
      } else {
        FactorOptions fo;
        fo.tol = tol;
        g = factor_matrix_polynomial(t, fo).coeffs;
      }
    } catch (const NotPositiveDefinite& e) {
      throw e.with_stage(s);
    }

    LadderEntry entry;
    entry.size = s;
    const int last = s - 1;
    double dev = 0.0;
    for (int j = 0; j <= ny; ++j)
      for (int a = 0; a <= nx; ++a) {
        const cplx v = std::conj(g[static_cast<std::size_t>(j)](last, last - a));
        entry.coefficients.push_back(v);
        if (last - 1 - a >= 0)
          dev = std::max(dev, std::abs(g[static_cast<std::size_t>(j)](last, last - a) -
                                       g[static_cast<std::size_t>(j)](last - 1, last - 1 - a)));
      }
    entry.toeplitz_deviation = dev;
    MatLaurent cand(2, 1);
    for (std::size_t i = 0; i < report.exponents.size(); ++i) cand.set(report.exponents[i], entry.coefficients[i]);
    entry.candidate = std::move(cand);
    if (!report.ladder.empty()) {
      const auto& prev = report.ladder.back().coefficients;
      double d = 0.0;
      for (std::size_t i = 0; i < prev.size(); ++i) d = std::max(d, std::abs(entry.coefficients[i] - prev[i]));
      entry.drift = d;
    }
    report.ladder.push_back(std::move(entry));
  }

  // Converging: drift strictly decreases while it is at or above tol, stays
  // below tol once it gets there, and ends below tol.
  bool ok = report.ladder.size() >= 2;
  for (std::size_t i = 2; ok && i < report.ladder.size(); ++i) {
    const double before = *report.ladder[i - 1].drift;
    const double now = *report.ladder[i].drift;
    ok = before >= tol ? now < before : now < tol;
  }
  report.converging = ok && *report.ladder.back().drift < tol;
  return report;
}

std::string ladder_csv(const ConvergenceReport& report) {
  std::ostringstream out;
  out << "size";
  for (const auto& k : report.exponents) out << ',' << monomial_label(k);
  out << ",drift\n";
  for (const auto& e : report.ladder) {
    out << e.size;
    for (const cplx v : e.coefficients) out << ',' << format_csv_complex(v);
    out << ',';
    if (e.drift) out << format_double(*e.drift);
    out << '\n';
  }
  return out.str();
}

std::string ladder_text(const ConvergenceReport& report) {
  std::ostringstream out;
  for (const auto& e : report.ladder) {
    const std::string size = std::to_string(e.size) + "x" + std::to_string(e.size);
    out << size << std::string(size.size() < 10 ? 10 - size.size() : 1, ' ') << pretty_polynomial(e.candidate, 10);
    if (e.drift) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "   drift %.3e", *e.drift);
      out << buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "   toeplitz %.3e", e.toeplitz_deviation);
    out << buf << '\n';
  }
  out << "verdict: " << (report.converging ? "converging" : "not converging") << " at tol " << report.tol << '\n';
  return out.str();
}

}  // namespace sosfejer
