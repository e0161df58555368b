#pragma once

// Built-in worked examples, stored as text so the `examples` command needs no
// files on disk.

#include <string_view>

#include "sosfejer/poly.hpp"

namespace sosfejer::fixtures {

/// 2x2 univariate matrix polynomial [[8 + z + 1/z, 1 + z], [1 + 1/z, 1]].
extern const std::string_view kMatrixText;
/// |5 + 2x + 3y + xy + x^2 + y^2|^2, strictly positive on the torus.
extern const std::string_view kPositiveText;
/// |4 + 3x + 2y + xy|^2, nonnegative with an isolated zero at (-1, -1).
extern const std::string_view kNonnegativeText;

MatLaurent matrix_example();
MatLaurent positive_example();
MatLaurent nonnegative_example();

}  // namespace sosfejer::fixtures
