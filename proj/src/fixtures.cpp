#include "sosfejer/fixtures.hpp"

#include "sosfejer/poly_io.hpp"

namespace sosfejer::fixtures {

const std::string_view kMatrixText = R"(# [[8 + z + 1/z, 1 + z], [1 + 1/z, 1]]
vars 1 block 2
-1  1 0  0 0  1 0  0 0
 0  8 0  1 0  1 0  1 0
 1  1 0  1 0  0 0  0 0
)";

const std::string_view kPositiveText = R"(# |5 + 2x + 3y + xy + x^2 + y^2|^2
vars 2 block 1
 0  0  41 0
 2  0   5 0
 0  2   5 0
-2  0   5 0
 0 -2   5 0
 1  0  15 0
-1  0  15 0
 0  1  20 0
 0 -1  20 0
 1  1   5 0
-1 -1   5 0
-1  1   8 0
 1 -1   8 0
 1 -2   2 0
-1  2   2 0
-2  1   3 0
 2 -1   3 0
 2 -2   1 0
-2  2   1 0
)";

const std::string_view kNonnegativeText = R"(# |4 + 3x + 2y + xy|^2
vars 2 block 1
 0  0  30 0
 1  0  14 0
-1  0  14 0
 0  1  11 0
 0 -1  11 0
 1  1   4 0
-1 -1   4 0
 1 -1   6 0
-1  1   6 0
)";

MatLaurent matrix_example() { return parse_polynomial(kMatrixText); }
MatLaurent positive_example() { return parse_polynomial(kPositiveText); }
MatLaurent nonnegative_example() { return parse_polynomial(kNonnegativeText); }

}  // namespace sosfejer::fixtures
