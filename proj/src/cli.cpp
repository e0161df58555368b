#include "sosfejer/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "CLI11.hpp"
#include "sosfejer/bauer.hpp"
#include "sosfejer/error.hpp"
#include "sosfejer/fixtures.hpp"
#include "sosfejer/matricize.hpp"
#include "sosfejer/poly_io.hpp"
#include "sosfejer/simple_factors.hpp"

namespace sosfejer::cli {

namespace {

constexpr const char* kVersion = "sosfejer 1.0.0";

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// Maps library exceptions onto the exit-code contract.
template <class F>
int guarded(F&& body, std::ostream& err) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const nlohmann::json::exception& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const NotPositiveDefinite& e) {
    err << "error: " << e.what();
    if (e.stage() >= 0) err << " (at stage/size " << e.stage() << ")";
    err << '\n';
    return kExitStructure;
  } catch (const VerificationFailed& e) {
    err << "verification failed: " << e.what() << '\n';
    return kExitVerification;
  } catch (const NotConverged& e) {
    err << "error: " << e.what() << '\n';
    return kExitVerification;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitStructure;
  }
}

void emit(const RunConfig& config, const std::string& payload, std::ostream& out) {
  if (config.output.empty()) {
    out << payload;
    return;
  }
  std::ofstream file(config.output, std::ios::binary);
  if (!file) throw InvalidArgument("cannot write " + config.output);
  file << payload;
}

std::vector<int> parse_index_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument("bad variable index '" + item + "' in --eliminate");
    }
  }
  return out;
}

std::vector<int> elimination_order(const std::string& spec, int vars) {
  std::vector<int> order(static_cast<std::size_t>(vars));
  std::iota(order.begin(), order.end(), 0);
  if (spec.empty() || spec == "x") return order;
  if (spec == "y") {
    if (vars < 2) throw InvalidArgument("--eliminate y needs at least two variables");
    std::swap(order[0], order[1]);
    return order;
  }
  order = parse_index_list(spec);
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expected(static_cast<std::size_t>(vars));
  std::iota(expected.begin(), expected.end(), 0);
  if (sorted != expected) throw InvalidArgument("--eliminate must be a permutation of 0.." + std::to_string(vars - 1));
  return order;
}

int ladder_variable(const std::string& spec) {
  if (spec.empty() || spec == "x" || spec == "0") return 0;
  if (spec == "y" || spec == "1") return 1;
  throw InvalidArgument("--eliminate for table must be x or y");
}

std::string variable_list(const std::vector<int>& order) {
  static const char* names[] = {"x", "y", "w"};
  std::string s;
  for (const int v : order) {
    if (!s.empty()) s += ", ";
    s += v < 3 && order.size() <= 3 ? names[v] : "z" + std::to_string(v + 1);
  }
  return s;
}

std::string int_list(const std::vector<int>& v) {
  std::string s;
  for (const int x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
  return s.empty() ? "-" : s;
}

}  // namespace

void validate(const RunConfig& config) {
  if (!(config.tol > 0.0)) throw InvalidArgument("--tol must be positive");
  if (config.grid != 0 && config.grid < 8) throw InvalidArgument("--grid must be at least 8");
  if (config.max_sections < 8) throw InvalidArgument("--max-sections must be at least 8");
  if (config.y_blocks < 0) throw InvalidArgument("--y-blocks must be nonnegative");
}

int cmd_factor(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        const MatLaurent p = read_polynomial_file(config.input);
        SosOptions options;
        options.eps = config.eps;
        options.orders = config.orders;
        options.tol = config.tol;
        options.grid_points = config.grid;
        options.max_blocks = config.max_sections;
        options.policy = config.order_policy;
        options.elimination = elimination_order(config.eliminate, p.vars());

        SosCertificate cert;
        try {
          cert = sos_factorize(p, options);
        } catch (const NotPositive& e) {
          err << "error: " << e.what() << '\n';
          if (p.vars() == 2)
            err << "hint: the input looks nonnegative but not strictly positive; "
                   "try `sosfejer table` for the section ladder\n";
          return kExitStructure;
        }

        const nlohmann::json j = certificate_to_json(cert);
        if (!config.certificate.empty()) {
          std::ofstream file(config.certificate, std::ios::binary);
          if (!file) throw InvalidArgument("cannot write " + config.certificate);
          file << j.dump(2) << '\n';
        }
        if (config.format == OutputFormat::json) {
          emit(config, j.dump(2) + "\n", out);
          return kExitOk;
        }
        std::ostringstream s;
        s << kVersion << '\n';
        s << "variables:             " << cert.vars << '\n';
        s << "elimination:           " << variable_list(cert.elimination) << '\n';
        s << "orders:                " << int_list(cert.orders) << '\n';
        s << "eps used:              " << sci(cert.eps_used) << '\n';
        s << "terms:                 " << cert.term_count << '\n';
        s << "residual:              " << sci(cert.residual) << '\n';
        s << "coefficient deviation: " << sci(cert.coefficient_deviation) << '\n';
        s << "sections (K, change, residual):\n";
        for (const auto& h : cert.factor.history)
          s << "  " << h.blocks << "  " << sci(h.change) << "  " << sci(h.residual) << '\n';
        for (std::size_t k = 0; k < cert.terms.size(); ++k)
          s << "Q_" << (k + 1) << " = " << pretty_polynomial(cert.terms[k]) << '\n';
        emit(config, s.str(), out);
        return kExitOk;
      },
      err);
}

int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        const MatLaurent p = read_polynomial_file(config.input);
        if (config.certificate.empty()) throw InvalidArgument("verify needs --certificate");
        std::ifstream in(config.certificate, std::ios::binary);
        if (!in) throw ParseError(0, 0, "cannot open " + config.certificate);
        std::stringstream buf;
        buf << in.rdbuf();
        const std::string text = buf.str();

        SosCertificate cert;
        if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
          nlohmann::json j;
          try {
            j = nlohmann::json::parse(text);
          } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(1, static_cast<int>(e.byte), e.what());
          }
          cert = certificate_from_json(j);
        }
        const int points = config.grid > 0 ? config.grid
                           : cert.grid_points > 0 ? cert.grid_points
                                                  : default_grid_points(p.vars());
        const VerificationReport report = verify_certificate(p, cert.terms, TorusGrid(p.vars(), points));
        const double bound = config.tol * p.l1_norm();
        const bool ok = report.residual <= bound;

        std::ostringstream s;
        if (config.format == OutputFormat::json) {
          const nlohmann::json j = {{"residual", report.residual},
                                    {"coefficient_deviation", report.coefficient_deviation},
                                    {"bound", bound},
                                    {"terms", cert.terms.size()},
                                    {"verified", ok}};
          s << j.dump(2) << '\n';
        } else {
          s << kVersion << '\n';
          s << "terms:                 " << cert.terms.size() << '\n';
          s << "residual:              " << sci(report.residual) << '\n';
          s << "coefficient deviation: " << sci(report.coefficient_deviation) << '\n';
          s << "bound (tol * |P|_1):   " << sci(bound) << '\n';
          s << (ok ? "verified" : "NOT verified") << '\n';
        }
        emit(config, s.str(), out);
        return ok ? kExitOk : kExitVerification;
      },
      err);
}

int cmd_table(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        const MatLaurent p = read_polynomial_file(config.input);
        const int var = ladder_variable(config.eliminate);
        const SimpleFactorReport factors = detect_simple_factors(p, var);
        static const char* names[] = {"x", "y"};
        for (const auto& r : factors.roots) {
          err << "removed simple factor |" << names[var] << " - (" << format_double(r.z0.real()) << (r.z0.imag() < 0 ? "" : "+")
              << format_double(r.z0.imag()) << "i)|^2";
          if (r.multiplicity > 1) err << " with multiplicity " << r.multiplicity;
          err << '\n';
        }
        const ConvergenceReport report =
            nonneg_convergence_ladder(factors.reduced, config.sizes, config.tol, config.y_blocks, var);

        std::string payload;
        if (config.format == OutputFormat::csv) {
          payload = ladder_csv(report);
        } else if (config.format == OutputFormat::json) {
          nlohmann::json rows = nlohmann::json::array();
          for (const auto& e : report.ladder) {
            nlohmann::json coeffs = nlohmann::json::array();
            for (const cplx v : e.coefficients) coeffs.push_back({v.real(), v.imag()});
            rows.push_back({{"size", e.size},
                            {"coefficients", coeffs},
                            {"drift", e.drift ? nlohmann::json(*e.drift) : nlohmann::json(nullptr)},
                            {"toeplitz_deviation", e.toeplitz_deviation}});
          }
          nlohmann::json monomials = nlohmann::json::array();
          for (const auto& k : report.exponents) monomials.push_back(k.values());
          nlohmann::json removed = nlohmann::json::array();
          for (const auto& r : factors.roots)
            removed.push_back({{"z0", {r.z0.real(), r.z0.imag()}}, {"multiplicity", r.multiplicity}});
          const nlohmann::json j = {{"variable", var},   {"monomials", monomials},
                                    {"rows", rows},      {"tol", report.tol},
                                    {"removed", removed}, {"converging", report.converging}};
          payload = j.dump(2) + "\n";
        } else {
          std::ostringstream s;
          s << kVersion << '\n';
          for (const auto& r : factors.roots)
            s << "removed |" << names[var] << " - (" << format_double(r.z0.real()) << (r.z0.imag() < 0 ? "" : "+")
              << format_double(r.z0.imag()) << "i)|^2, multiplicity " << r.multiplicity << '\n';
          s << ladder_text(report);
          payload = s.str();
        }
        emit(config, payload, out);
        return report.converging ? kExitOk : kExitVerification;
      },
      err);
}

namespace {

struct ExampleOutcome {
  std::string name;
  bool pass = false;
  double deviation = 0.0;   // worst deviation against the reference values
  double tolerance = 0.0;
  std::string detail;
};

double max_abs_diff(const CMatrix& a, const std::vector<std::vector<double>>& ref) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      worst = std::max(worst, std::abs(a(i, j) - cplx(ref[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])));
  return worst;
}

template <class F>
ExampleOutcome run_example(const std::string& name, double tolerance, F&& body) {
  ExampleOutcome o;
  o.name = name;
  o.tolerance = tolerance;
  try {
    body(o);
    o.pass = o.pass && o.deviation <= tolerance;
  } catch (const NotConverged& e) {
    o.pass = false;
    o.detail = std::string("NotConverged: ") + e.what();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = e.what();
  }
  return o;
}

}  // namespace

int cmd_examples(const RunConfig& config, std::ostream& out, std::ostream& err) {
  (void)err;
  std::vector<ExampleOutcome> outcomes;

  outcomes.push_back(run_example("matrix-2x2", 1e-9, [&](ExampleOutcome& o) {
    const MatLaurent p = fixtures::matrix_example();
    FactorOptions fo;
    fo.tol = config.tol;
    fo.max_blocks = config.max_sections;
    const FactorResult r = factor_matrix_polynomial(p, fo);
    const double s385 = std::sqrt(385.0), s2310 = std::sqrt(2310.0);
    o.deviation = std::max(max_abs_diff(r.coeffs[0], {{s385 / 7, 0}, {6 / s385, s2310 / 55}}),
                           max_abs_diff(r.coeffs[1], {{s385 / 55, -s2310 / 385}, {s385 / 55, -s2310 / 385}}));
    const double residual = factor_residual(p, r.coeffs, 256);
    o.pass = residual <= 1e-10;
    o.detail = "factor residual " + sci(residual);
  }));

  outcomes.push_back(run_example("positive-bivariate", 1e-6, [&](ExampleOutcome& o) {
    const MatLaurent p = fixtures::positive_example();
    SosOptions options;
    options.orders = std::vector<int>{2};
    options.tol = config.tol;
    options.max_blocks = config.max_sections;
    const SosCertificate cert = sos_factorize(p, options);
    const std::vector<std::vector<std::vector<double>>> ref = {
        {{3.185602126, 0, 0}, {1.873651218, 2.539725049, 0}, {1.524622962, 1.128505745, 2.269126602}},
        {{1.797364251, 0.08381502303, -0.0003518239229},
         {0.7675275947, 1.633796832, 0.06150315980},
         {0.00008111923034, 0.9665117592, 1.856367398}},
        {{0.5231873284, 0.007768330871, 0.08530594055}, {0, 0.6562390159, 0.1143305535}, {0, 0, 0.7344969935}}};
    for (std::size_t j = 0; j < 3; ++j) o.deviation = std::max(o.deviation, max_abs_diff(cert.factor.coeffs[j], ref[j]));
    const MatLaurent pt = matricize_step(p, 0, 2);
    const MatLaurent q = factor_polynomial(cert.factor.coeffs);
    const MatLaurent diff = subtract(pt, mul(conj_reflect(q), q));
    double coeff_dev = 0.0;
    for (const auto& [k, c] : diff.terms()) coeff_dev = std::max(coeff_dev, c.cwiseAbs().maxCoeff());
    o.pass = coeff_dev <= 1e-8 && cert.term_count == 3;
    o.detail = "terms " + std::to_string(cert.term_count) + ", coefficient deviation " + sci(coeff_dev) +
               ", residual " + sci(cert.residual);
  }));

  outcomes.push_back(run_example("nonnegative-ladder", 1e-6, [&](ExampleOutcome& o) {
    const MatLaurent p = fixtures::nonnegative_example();
    const std::vector<int> sizes{16, 32, 64, 128};
    const ConvergenceReport report = nonneg_convergence_ladder(p, sizes, config.tol, config.y_blocks);
    const std::vector<std::vector<double>> ref = {{4.01207952, 2.984741799, 2.000226870, 0.996712925},
                                                  {4.004041536, 2.994924757, 2.000034879, 0.998949058},
                                                  {4.001381387, 2.998269650, 2.000005690, 0.999648058},
                                                  {4.00069369, 2.999134582, 1.99999896, 0.999821915}};
    for (std::size_t r = 0; r < ref.size(); ++r)
      for (std::size_t c = 0; c < ref[r].size(); ++c)
        o.deviation = std::max(o.deviation, std::abs(report.ladder[r].coefficients[c] - ref[r][c]));
    o.pass = true;
    o.detail = "final drift " + sci(*report.ladder.back().drift);
  }));

  bool all = true;
  std::ostringstream s;
  if (config.format == OutputFormat::json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& o : outcomes) {
      all = all && o.pass;
      arr.push_back({{"name", o.name},
                     {"pass", o.pass},
                     {"deviation", o.deviation},
                     {"tolerance", o.tolerance},
                     {"detail", o.detail}});
    }
    s << arr.dump(2) << '\n';
  } else {
    s << kVersion << '\n';
    for (const auto& o : outcomes) {
      all = all && o.pass;
      s << (o.pass ? "PASS " : "FAIL ") << o.name << "  deviation " << sci(o.deviation) << " (tolerance "
        << sci(o.tolerance) << ")  " << o.detail << '\n';
    }
  }
  emit(config, s.str(), out);
  return all ? kExitOk : kExitVerification;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sum-of-squares factorization of positive Laurent polynomials on the torus", "sosfejer"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  RunConfig config;
  std::string format = "text";
  std::string policy = "adaptive";
  std::vector<int> orders;
  double eps = 0.0;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--tol", config.tol, "Tolerance (factor convergence, verification bound, ladder verdict)");
    sub->add_option("--grid", config.grid, "Grid points per axis (0: 64 for d <= 2, 32 for d = 3, 16 beyond)");
    sub->add_option("--output", config.output, "Write the main output here instead of stdout");
  };

  CLI::App* factor = app.add_subcommand("factor", "Factor a strictly positive polynomial into a sum of squares");
  factor->add_option("input", config.input, "Polynomial file (text or JSON)")->required();
  factor->add_option("--eps", eps, "Lower bound of P on the torus (default: grid estimate)");
  factor->add_option("--orders", orders, "Matricization orders m_1,...,m_{d-1}")->delimiter(',');
  factor->add_option("--max-sections", config.max_sections, "Largest section (blocks) for the univariate factor");
  factor->add_option("--eliminate", config.eliminate, "Elimination order: x, y or indices such as 2,0,1");
  factor->add_option("--order-policy", policy, "adaptive or bound")->check(CLI::IsMember({"adaptive", "bound"}));
  factor->add_option("--certificate", config.certificate, "Also write the certificate JSON here");
  factor->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  add_common(factor);

  CLI::App* verify = app.add_subcommand("verify", "Check a certificate against a polynomial");
  verify->add_option("input", config.input, "Polynomial file (text or JSON)")->required();
  verify->add_option("--certificate", config.certificate, "Certificate JSON")->required();
  verify->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  add_common(verify);

  CLI::App* table = app.add_subcommand("table", "Section ladder for a nonnegative bivariate polynomial");
  table->add_option("input", config.input, "Polynomial file (text or JSON)")->required();
  table->add_option("--sizes", config.sizes, "Section sizes, strictly increasing")->delimiter(',');
  table->add_option("--y-blocks", config.y_blocks, "Blocks of the section in the other variable (0: converge)");
  table->add_option("--eliminate", config.eliminate, "Section variable: x or y");
  table->add_option("--format", format, "text, csv or json")->check(CLI::IsMember({"text", "csv", "json"}));
  add_common(table);

  CLI::App* examples = app.add_subcommand("examples", "Run the built-in worked examples");
  examples->add_option("--max-sections", config.max_sections, "Largest section (blocks) for the univariate factor");
  examples->add_option("--y-blocks", config.y_blocks, "Blocks in y for the ladder example");
  examples->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  add_common(examples);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }

  if (factor->parsed()) config.command = Command::factor;
  if (verify->parsed()) config.command = Command::verify;
  if (table->parsed()) config.command = Command::table;
  if (examples->parsed()) config.command = Command::examples;
  if (factor->count("--eps") > 0) config.eps = eps;
  if (factor->count("--orders") > 0) config.orders = orders;
  config.order_policy = policy == "bound" ? OrderPolicy::bound : OrderPolicy::adaptive;
  config.format = format == "json" ? OutputFormat::json : format == "csv" ? OutputFormat::csv : OutputFormat::text;

  try {
    validate(config);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  }

  switch (config.command) {
    case Command::factor:
      return cmd_factor(config, out, err);
    case Command::verify:
      return cmd_verify(config, out, err);
    case Command::table:
      return cmd_table(config, out, err);
    case Command::examples:
      return cmd_examples(config, out, err);
  }
  return kExitParse;
}

}  // namespace sosfejer::cli
