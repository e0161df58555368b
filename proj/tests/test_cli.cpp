#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "sosfejer/cli.hpp"
#include "sosfejer/fixtures.hpp"
#include "sosfejer/poly_io.hpp"
#include "support.hpp"

using namespace sosfejer;
using namespace sosfejer::testing;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("sosfejer_cli_" + name)).string();
}

std::string write_file(const std::string& name, const std::string& content) {
  const std::string path = temp_path(name);
  std::ofstream(path, std::ios::binary) << content;
  return path;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string positive_file() { return write_file("positive.txt", std::string(fixtures::kPositiveText)); }
std::string nonnegative_file() { return write_file("nonnegative.txt", std::string(fixtures::kNonnegativeText)); }

}  // namespace

TEST_CASE("factor then verify round trip") {
  const std::string input = positive_file();
  const std::string cert = temp_path("positive_cert.json");
  const Run f = run({"factor", input, "--certificate", cert});
  CHECK(f.code == cli::kExitOk);
  CHECK(f.out.find("terms:                 3") != std::string::npos);
  CHECK(f.out.find("orders:                2") != std::string::npos);
  const nlohmann::json j = nlohmann::json::parse(read_file(cert));
  CHECK(j["residual"].get<double>() <= 1e-8);

  const Run v = run({"verify", input, "--certificate", cert});
  CHECK(v.code == cli::kExitOk);
  CHECK(v.out.find("verified") != std::string::npos);

  // The same certificate does not certify a different polynomial.
  const std::string other = write_file("other.txt", "vars 2 block 1\n0 0 50 0\n1 0 1 0\n-1 0 1 0\n");
  CHECK(run({"verify", other, "--certificate", cert}).code == cli::kExitVerification);

  const std::string empty = write_file("empty_cert.json", "");
  CHECK(run({"verify", input, "--certificate", empty}).code == cli::kExitVerification);
  const std::string broken = write_file("broken_cert.json", "{\"terms\": [");
  CHECK(run({"verify", input, "--certificate", broken}).code == cli::kExitParse);
}

TEST_CASE("json output is deterministic") {
  const std::string input = positive_file();
  const Run a = run({"factor", input, "--format", "json"});
  const Run b = run({"factor", input, "--format", "json"});
  REQUIRE(a.code == cli::kExitOk);
  CHECK(a.out == b.out);
  CHECK(nlohmann::json::parse(a.out)["term_count"] == 3);

  const std::string nonneg = nonnegative_file();
  const Run c = run({"table", nonneg, "--format", "csv", "--sizes", "16,32"});
  const Run d = run({"table", nonneg, "--format", "csv", "--sizes", "16,32"});
  CHECK(c.out == d.out);
  CHECK(c.out.rfind("size,c_const,c_x,c_y,c_xy,drift\n", 0) == 0);
}

TEST_CASE("factor exit codes") {
  const Run nonneg = run({"factor", nonnegative_file()});
  CHECK(nonneg.code == cli::kExitStructure);
  CHECK(nonneg.err.find("sosfejer table") != std::string::npos);

  CHECK(run({"factor", write_file("negative.txt", "vars 1 block 1\n0 -1 0\n")}).code == cli::kExitStructure);

  const Run parse = run({"factor", write_file("bad.txt", "vars 2 block 1\n0 0 1 x\n")});
  CHECK(parse.code == cli::kExitParse);
  CHECK(parse.err.find("line 2, column 7") != std::string::npos);

  CHECK(run({"factor", temp_path("does_not_exist.txt")}).code == cli::kExitParse);
  CHECK(run({"factor", positive_file(), "--orders", "1"}).code == cli::kExitStructure);
  CHECK(run({"factor", positive_file(), "--eliminate", "z"}).code == cli::kExitParse);

  const Run eliminated = run({"factor", positive_file(), "--eliminate", "y"});
  CHECK(eliminated.code == cli::kExitOk);
  CHECK(eliminated.out.find("elimination:           y, x") != std::string::npos);
}

TEST_CASE("output file and orders override") {
  const std::string path = temp_path("summary.txt");
  const Run r = run({"factor", positive_file(), "--orders", "3", "--output", path});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.empty());
  CHECK(read_file(path).find("orders:                3") != std::string::npos);
}

TEST_CASE("usage and validation errors") {
  CHECK(run({"factor", positive_file(), "--grid", "4"}).code == cli::kExitParse);
  CHECK(run({"factor", positive_file(), "--tol", "0"}).code == cli::kExitParse);
  CHECK(run({"factor", positive_file(), "--max-sections", "2"}).code == cli::kExitParse);
  CHECK(run({"factor", positive_file(), "--format", "xml"}).code == cli::kExitParse);
  CHECK(run({"bogus"}).code == cli::kExitParse);
  CHECK(run({}).code == cli::kExitParse);
  CHECK(run({"table", nonnegative_file(), "--sizes", "32,16"}).code == cli::kExitParse);
  const Run help = run({"--help"});
  CHECK(help.code == cli::kExitOk);
  CHECK(help.out.find("factor") != std::string::npos);
  CHECK(run({"--version"}).code == cli::kExitOk);
}

TEST_CASE("table on the nonnegative example") {
  const Run r = run({"table", nonnegative_file()});
  // Algebraic convergence near the zero: the drift at 128 is far above 1e-9.
  CHECK(r.code == cli::kExitVerification);
  CHECK(r.out.find("16x16     4.01207952") != std::string::npos);
  CHECK(r.out.find("verdict: not converging") != std::string::npos);

  const Run loose = run({"table", nonnegative_file(), "--tol", "1e-2"});
  CHECK(loose.code == cli::kExitOk);

  const Run json = run({"table", nonnegative_file(), "--format", "json", "--sizes", "16,32"});
  const nlohmann::json j = nlohmann::json::parse(json.out);
  CHECK(j["rows"].size() == 2);
  CHECK(j["rows"][0]["drift"].is_null());
}

TEST_CASE("table removes simple factors before the ladder") {
  MatLaurent factor(2, 1);
  factor.set(Exponent{0, 0}, cplx(2.0));
  factor.set(Exponent{1, 0}, cplx(1.0));
  factor.set(Exponent{-1, 0}, cplx(1.0));
  const MatLaurent p = mul(factor, scalar_poly(2, {{{0, 0}, 3}, {{0, 1}, 1}, {{0, -1}, 1}}));
  const Run r = run({"table", write_file("simple_factor.txt", format_polynomial(p)), "--sizes", "4,8,16"});
  CHECK(r.err.find("removed simple factor |x - (-1+0i)|^2") != std::string::npos);
  CHECK(r.out.find("removed") != std::string::npos);
  CHECK(r.code == cli::kExitOk);
}

TEST_CASE("table reports indefinite sections with the size") {
  const Run r = run({"table", write_file("indefinite.txt", "vars 2 block 1\n0 0 1 0\n1 1 1 0\n-1 -1 1 0\n"),
                     "--sizes", "16,32"});
  CHECK(r.code == cli::kExitStructure);
  CHECK(r.err.find("16") != std::string::npos);
}

TEST_CASE("examples command") {
  const Run r = run({"examples"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("PASS matrix-2x2") != std::string::npos);
  CHECK(r.out.find("PASS positive-bivariate") != std::string::npos);
  CHECK(r.out.find("PASS nonnegative-ladder") != std::string::npos);

  const Run tight = run({"examples", "--tol", "1e-14"});
  CHECK(tight.code == cli::kExitOk);

  const Run starved = run({"examples", "--max-sections", "8"});
  CHECK(starved.code == cli::kExitVerification);
  CHECK(starved.out.find("FAIL positive-bivariate") != std::string::npos);
  CHECK(starved.out.find("NotConverged") != std::string::npos);
}
