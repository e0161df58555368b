#pragma once

// Text and JSON encodings of MatLaurent.
//
// Text format:
//
//   # comment
//   vars 2 block 1
//   1 0 3 0          <- k_1 .. k_d  re im
//   0 -1 2.5 -1
//
// With block m > 1 each monomial line carries m*m (re, im) pairs, row-major.
// Numbers are written with 17 significant digits so that parse(format(p)) == p
// bit for bit.

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "sosfejer/poly.hpp"

namespace sosfejer {

std::string format_polynomial(const MatLaurent& p);

/// Throws ParseError with 1-based line/column on malformed input.
MatLaurent parse_polynomial(std::string_view text);

/// JSON form: {"vars": d, "block": m, "monomials": [{"k": [...], "c": [[re, im], ...]}]}.
nlohmann::json polynomial_to_json(const MatLaurent& p);
MatLaurent polynomial_from_json(const nlohmann::json& j);

/// Reads either encoding; a file whose first non-blank character is '{' is JSON.
MatLaurent read_polynomial_file(const std::filesystem::path& path);

/// 17 significant digits (%.17g, exact round trip); used by every
/// machine-readable writer.
std::string format_double(double v);

/// Human form such as "4 + 3*x + 2*y + x*y" for scalar polynomials in up to
/// three variables named x, y, w (z1, z2, ... beyond that).
std::string pretty_polynomial(const MatLaurent& p, int digits = 10);

}  // namespace sosfejer
