#pragma once

// Command-line front end. run_cli is the whole program minus main(), so tests
// can drive it with captured streams.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sosfejer/pipeline.hpp"

namespace sosfejer::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 1;
inline constexpr int kExitStructure = 2;
inline constexpr int kExitVerification = 3;

enum class Command { factor, verify, table, examples };
enum class OutputFormat { text, json, csv };

struct RunConfig {
  Command command = Command::examples;
  std::string input;
  std::string certificate;  // factor: where to write it; verify: what to read
  std::optional<double> eps;
  std::optional<std::vector<int>> orders;
  double tol = 1e-9;
  int grid = 0;  // 0: per-dimension default (64 for d <= 2)
  int max_sections = 4096;
  std::vector<int> sizes{16, 32, 64, 128};
  int y_blocks = 50;
  std::string eliminate;  // "x", "y" or a comma-separated index order
  OrderPolicy order_policy = OrderPolicy::adaptive;
  std::string output;  // empty: stdout
  OutputFormat format = OutputFormat::text;
};

/// Throws InvalidArgument when tol <= 0, grid < 8 (unless 0) or max_sections < 8.
void validate(const RunConfig& config);

int cmd_factor(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_table(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_examples(const RunConfig& config, std::ostream& out, std::ostream& err);

/// `args` excludes the program name. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sosfejer::cli
