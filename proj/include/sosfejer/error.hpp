#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sosfejer {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidEps : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class OrderTooSmall : public Error {
 public:
  OrderTooSmall(int order, int degree)
      : Error("matricization order " + std::to_string(order) +
              " is below the eliminated degree " + std::to_string(degree)),
        order_(order),
        degree_(degree) {}
  int order() const noexcept { return order_; }
  int degree() const noexcept { return degree_; }

 private:
  int order_;
  int degree_;
};

/// A Cholesky pivot fell below the relative pivot tolerance.
///
/// `index()` is the scalar row of the offending pivot inside the section;
/// `stage()` is the pipeline stage (or ladder size) that produced the
/// section, -1 when the caller did not attach one.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(std::size_t index, double pivot, int stage = -1)
      : Error(describe(index, pivot, stage)), index_(index), pivot_(pivot), stage_(stage) {}

  std::size_t index() const noexcept { return index_; }
  double pivot() const noexcept { return pivot_; }
  int stage() const noexcept { return stage_; }

  NotPositiveDefinite with_stage(int stage) const { return {index_, pivot_, stage}; }

 private:
  static std::string describe(std::size_t index, double pivot, int stage) {
    std::string s = "section is not positive definite: pivot " + std::to_string(pivot) +
                    " at row " + std::to_string(index);
    if (stage >= 0) s += " (stage " + std::to_string(stage) + ")";
    return s;
  }
  std::size_t index_;
  double pivot_;
  int stage_;
};

class NotContraction : public Error {
 public:
  explicit NotContraction(double norm)
      : Error("||S - I||_2 ~ " + std::to_string(norm) + " is not below 1"), norm_(norm) {}
  double norm() const noexcept { return norm_; }

 private:
  double norm_;
};

class ZeroPolynomial : public Error {
 public:
  ZeroPolynomial() : Error("polynomial is identically zero") {}
};

class NotPositive : public Error {
 public:
  explicit NotPositive(double eps)
      : Error("polynomial is not strictly positive on the torus (estimated minimum " +
              std::to_string(eps) + ")"),
        eps_(eps) {}
  double eps() const noexcept { return eps_; }

 private:
  double eps_;
};

class OrderTooLarge : public Error {
 public:
  OrderTooLarge(int order, int limit)
      : Error("required matricization order " + std::to_string(order) + " exceeds the limit " +
              std::to_string(limit)),
        order_(order) {}
  int order() const noexcept { return order_; }

 private:
  int order_;
};

class VerificationFailed : public Error {
 public:
  VerificationFailed(double residual, double bound)
      : Error("certificate residual " + std::to_string(residual) + " exceeds " +
              std::to_string(bound)),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class NotBivariate : public Error {
 public:
  explicit NotBivariate(int vars)
      : Error("expected a bivariate polynomial, got " + std::to_string(vars) + " variables") {}
};

class NotDivisible : public Error {
 public:
  explicit NotDivisible(double remainder)
      : Error("division remainder " + std::to_string(remainder) + " exceeds tolerance"),
        remainder_(remainder) {}
  double remainder() const noexcept { return remainder_; }

 private:
  double remainder_;
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace sosfejer
