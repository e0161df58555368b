#include "sosfejer/poly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>

#include "sosfejer/error.hpp"
#include "sosfejer/parallel.hpp"

namespace sosfejer {

Exponent Exponent::operator-() const {
  Exponent r = *this;
  for (auto& v : r.k_) v = -v;
  return r;
}

Exponent Exponent::operator+(const Exponent& other) const {
  if (other.vars() != vars()) throw DimensionMismatch("exponent length mismatch");
  Exponent r = *this;
  for (std::size_t i = 0; i < k_.size(); ++i) r.k_[i] += other.k_[i];
  return r;
}

Exponent Exponent::without(int var) const {
  std::vector<int> r;
  r.reserve(k_.size());
  for (int i = 0; i < vars(); ++i)
    if (i != var) r.push_back((*this)[i]);
  return Exponent(std::move(r));
}

Exponent Exponent::with_inserted(int var, int value) const {
  std::vector<int> r = k_;
  r.insert(r.begin() + var, value);
  return Exponent(std::move(r));
}

MatLaurent::MatLaurent(int vars, int block) : vars_(vars), block_(block) {
  if (vars < 0) throw InvalidArgument("variable count must be non-negative");
  if (block < 1) throw InvalidArgument("block size must be at least 1");
}

MatLaurent MatLaurent::constant(int vars, const CMatrix& value) {
  if (value.rows() != value.cols()) throw DimensionMismatch("coefficient must be square");
  MatLaurent p(vars, static_cast<int>(value.rows()));
  p.set(Exponent::zero(vars), value);
  return p;
}

MatLaurent MatLaurent::scalar_constant(int vars, cplx value) {
  MatLaurent p(vars, 1);
  p.set(Exponent::zero(vars), value);
  return p;
}

MatLaurent MatLaurent::monomial(const Exponent& k, cplx value) {
  MatLaurent p(k.vars(), 1);
  p.set(k, value);
  return p;
}

void MatLaurent::check_exponent(const Exponent& k) const {
  if (k.vars() != vars_)
    throw DimensionMismatch("exponent has " + std::to_string(k.vars()) + " entries, expected " +
                            std::to_string(vars_));
}

void MatLaurent::check_block(const CMatrix& value) const {
  if (value.rows() != block_ || value.cols() != block_)
    throw DimensionMismatch("coefficient is " + std::to_string(value.rows()) + "x" +
                            std::to_string(value.cols()) + ", expected block " +
                            std::to_string(block_));
}

CMatrix MatLaurent::coeff(const Exponent& k) const {
  check_exponent(k);
  auto it = terms_.find(k);
  if (it == terms_.end()) return CMatrix::Zero(block_, block_);
  return it->second;
}

cplx MatLaurent::scalar_coeff(const Exponent& k) const {
  if (block_ != 1) throw DimensionMismatch("scalar_coeff on a matrix polynomial");
  check_exponent(k);
  auto it = terms_.find(k);
  return it == terms_.end() ? cplx{} : it->second(0, 0);
}

void MatLaurent::set(const Exponent& k, const CMatrix& value) {
  check_exponent(k);
  check_block(value);
  if (value.isZero(0.0))
    terms_.erase(k);
  else
    terms_[k] = value;
}

void MatLaurent::set(const Exponent& k, cplx value) {
  if (block_ != 1) throw DimensionMismatch("scalar coefficient on a matrix polynomial");
  set(k, CMatrix::Constant(1, 1, value));
}

void MatLaurent::accumulate(const Exponent& k, const CMatrix& value) {
  check_exponent(k);
  check_block(value);
  auto it = terms_.find(k);
  if (it == terms_.end()) {
    if (!value.isZero(0.0)) terms_.emplace(k, value);
    return;
  }
  it->second += value;
  if (it->second.isZero(0.0)) terms_.erase(it);
}

void MatLaurent::accumulate(const Exponent& k, cplx value) {
  if (block_ != 1) throw DimensionMismatch("scalar coefficient on a matrix polynomial");
  accumulate(k, CMatrix::Constant(1, 1, value));
}

int MatLaurent::degree(int var) const {
  if (var < 0 || var >= vars_) throw DimensionMismatch("variable index out of range");
  int d = 0;
  for (const auto& [k, c] : terms_) d = std::max(d, std::abs(k[var]));
  return d;
}

int MatLaurent::min_exponent(int var) const {
  if (var < 0 || var >= vars_) throw DimensionMismatch("variable index out of range");
  int d = terms_.empty() ? 0 : std::numeric_limits<int>::max();
  for (const auto& [k, c] : terms_) d = std::min(d, k[var]);
  return d;
}

int MatLaurent::max_exponent(int var) const {
  if (var < 0 || var >= vars_) throw DimensionMismatch("variable index out of range");
  int d = terms_.empty() ? 0 : std::numeric_limits<int>::min();
  for (const auto& [k, c] : terms_) d = std::max(d, k[var]);
  return d;
}

double MatLaurent::l1_norm() const {
  double s = 0.0;
  for (const auto& [k, c] : terms_) s += c.cwiseAbs().sum();
  return s;
}

bool operator==(const MatLaurent& a, const MatLaurent& b) {
  return a.vars_ == b.vars_ && a.block_ == b.block_ && a.terms_.size() == b.terms_.size() &&
         std::equal(a.terms_.begin(), a.terms_.end(), b.terms_.begin(),
                    [](const auto& x, const auto& y) { return x.first == y.first && x.second == y.second; });
}

bool hermitian_symbol(const MatLaurent& p, double rel_tol) {
  const double tol = rel_tol * std::max(1.0, p.l1_norm());
  for (const auto& [k, c] : p.terms()) {
    const CMatrix mirror = p.coeff(-k).adjoint();
    const double dev = (c - mirror).cwiseAbs().maxCoeff();
    if (rel_tol == 0.0 ? dev != 0.0 : dev > tol) return false;
  }
  return true;
}

void require_hermitian(const MatLaurent& p, const char* where) {
  if (!hermitian_symbol(p, kHermitianTol))
    throw NotHermitian(std::string(where) + ": symbol is not Hermitian");
}

MatLaurent hermitian_part(const MatLaurent& p) { return scale(add(p, conj_reflect(p)), 0.5); }

CMatrix eval(const MatLaurent& p, std::span<const double> theta) {
  if (static_cast<int>(theta.size()) != p.vars())
    throw DimensionMismatch("eval: expected " + std::to_string(p.vars()) + " angles, got " +
                            std::to_string(theta.size()));
  CMatrix r = CMatrix::Zero(p.block(), p.block());
  for (const auto& [k, c] : p.terms()) {
    double phase = 0.0;
    for (int i = 0; i < p.vars(); ++i) phase += k[i] * theta[static_cast<std::size_t>(i)];
    r += std::polar(1.0, phase) * c;
  }
  return r;
}

MatLaurent conj_reflect(const MatLaurent& p) {
  MatLaurent r(p.vars(), p.block());
  for (const auto& [k, c] : p.terms()) r.set(-k, c.adjoint());
  return r;
}

namespace {
void require_compatible(const MatLaurent& p, const MatLaurent& q, const char* op) {
  if (p.vars() != q.vars() || p.block() != q.block())
    throw DimensionMismatch(std::string(op) + ": operands differ in variable count or block size");
}
}  // namespace

MatLaurent add(const MatLaurent& p, const MatLaurent& q) {
  require_compatible(p, q, "add");
  MatLaurent r = p;
  for (const auto& [k, c] : q.terms()) r.accumulate(k, c);
  return r;
}

MatLaurent subtract(const MatLaurent& p, const MatLaurent& q) { return add(p, scale(q, -1.0)); }

MatLaurent mul(const MatLaurent& p, const MatLaurent& q) {
  require_compatible(p, q, "mul");
  std::map<Exponent, CMatrix> acc;
  for (const auto& [kp, cp] : p.terms()) {
    for (const auto& [kq, cq] : q.terms()) {
      const Exponent k = kp + kq;
      auto it = acc.find(k);
      if (it == acc.end())
        acc.emplace(k, cp * cq);
      else
        it->second.noalias() += cp * cq;
    }
  }
  MatLaurent r(p.vars(), p.block());
  for (auto& [k, c] : acc) r.set(k, c);
  return r;
}

MatLaurent scale(const MatLaurent& p, cplx factor) {
  MatLaurent r(p.vars(), p.block());
  if (factor == cplx{}) return r;
  for (const auto& [k, c] : p.terms()) r.set(k, factor * c);
  return r;
}

MatLaurent sosm(std::span<const MatLaurent> qs, int vars) {
  MatLaurent r(vars, 1);
  for (const auto& q : qs) {
    if (q.vars() != vars) throw DimensionMismatch("sosm: term has the wrong variable count");
    if (!q.is_scalar()) throw DimensionMismatch("sosm: terms must be scalar");
    r = add(r, mul(conj_reflect(q), q));
  }
  return r;
}

MatLaurent permute_vars(const MatLaurent& p, std::span<const int> order) {
  if (static_cast<int>(order.size()) != p.vars()) throw DimensionMismatch("permute_vars: bad order length");
  std::vector<bool> seen(order.size(), false);
  for (int v : order) {
    if (v < 0 || v >= p.vars() || seen[static_cast<std::size_t>(v)])
      throw InvalidArgument("permute_vars: order is not a permutation");
    seen[static_cast<std::size_t>(v)] = true;
  }
  MatLaurent r(p.vars(), p.block());
  for (const auto& [k, c] : p.terms()) {
    std::vector<int> nk(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) nk[i] = k[order[i]];
    r.set(Exponent(std::move(nk)), c);
  }
  return r;
}

TorusGrid::TorusGrid(int dims, int points_per_axis) : dims_(dims), points_(points_per_axis), size_(1) {
  if (dims < 0) throw InvalidArgument("grid dimension must be non-negative");
  if (points_per_axis < 1) throw InvalidArgument("grid needs at least one point per axis");
  for (int i = 0; i < dims; ++i) size_ *= static_cast<std::size_t>(points_per_axis);
}

std::vector<int> TorusGrid::coordinates(std::size_t index) const {
  std::vector<int> j(static_cast<std::size_t>(dims_));
  for (auto& v : j) {
    v = static_cast<int>(index % static_cast<std::size_t>(points_));
    index /= static_cast<std::size_t>(points_);
  }
  return j;
}

std::vector<double> TorusGrid::angles(std::size_t index) const {
  std::vector<double> theta;
  theta.reserve(static_cast<std::size_t>(dims_));
  for (int j : coordinates(index)) theta.push_back(2.0 * std::numbers::pi * j / points_);
  return theta;
}

GridEvaluator::GridEvaluator(const MatLaurent& p, const TorusGrid& grid)
    : grid_(grid), vars_(p.vars()), block_(p.block()) {
  if (grid.dims() != p.vars()) throw DimensionMismatch("grid dimension does not match polynomial");
  const int g = grid.points_per_axis();
  roots_.resize(static_cast<std::size_t>(g));
  for (int r = 0; r < g; ++r) {
    // Quarter-turn symmetric points are set exactly so that e.g. z = -1 is -1.
    if (4 * r % g == 0) {
      static constexpr cplx kQuarter[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
      roots_[static_cast<std::size_t>(r)] = kQuarter[(4 * r / g) % 4];
    } else {
      roots_[static_cast<std::size_t>(r)] = std::polar(1.0, 2.0 * std::numbers::pi * r / g);
    }
  }
  for (const auto& [k, c] : p.terms()) {
    exponents_.insert(exponents_.end(), k.values().begin(), k.values().end());
    coeffs_.push_back(c);
  }
}

namespace {
long positive_mod(long a, long m) {
  const long r = a % m;
  return r < 0 ? r + m : r;
}
}  // namespace

const cplx& GridEvaluator::root(std::size_t term, const std::vector<int>& j) const {
  long phase = 0;
  const int* k = exponents_.data() + term * static_cast<std::size_t>(vars_);
  for (int i = 0; i < vars_; ++i) phase += static_cast<long>(k[i]) * j[static_cast<std::size_t>(i)];
  return roots_[static_cast<std::size_t>(positive_mod(phase, grid_.points_per_axis()))];
}

CMatrix GridEvaluator::operator()(std::size_t point) const {
  const std::vector<int> j = grid_.coordinates(point);
  CMatrix r = CMatrix::Zero(block_, block_);
  for (std::size_t t = 0; t < coeffs_.size(); ++t) r += root(t, j) * coeffs_[t];
  return r;
}

cplx GridEvaluator::scalar(std::size_t point) const {
  const std::vector<int> j = grid_.coordinates(point);
  cplx r{};
  for (std::size_t t = 0; t < coeffs_.size(); ++t) r += root(t, j) * coeffs_[t](0, 0);
  return r;
}

namespace {

template <class PerPoint>
double grid_reduce(std::size_t n, double init, bool take_min, PerPoint per_point) {
  // min/max are order independent, so the result does not depend on scheduling.
  std::mutex m;
  double result = init;
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    double local = init;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = per_point(i);
      local = take_min ? std::min(local, v) : std::max(local, v);
    }
    std::lock_guard lock(m);
    result = take_min ? std::min(result, local) : std::max(result, local);
  });
  return result;
}

}  // namespace

double torus_min(const MatLaurent& p, const TorusGrid& grid) {
  require_hermitian(p, "torus_min");
  GridEvaluator ev(p, grid);
  if (p.is_scalar())
    return grid_reduce(grid.size(), std::numeric_limits<double>::infinity(), true,
                       [&](std::size_t i) { return ev.scalar(i).real(); });
  return grid_reduce(grid.size(), std::numeric_limits<double>::infinity(), true, [&](std::size_t i) {
    const CMatrix v = ev(i);
    const CMatrix h = 0.5 * (v + v.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  });
}

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.size() == 1) return std::abs(m(0, 0));
  Eigen::BDCSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

double torus_max_norm(const MatLaurent& p, const TorusGrid& grid) {
  GridEvaluator ev(p, grid);
  if (p.is_scalar())
    return grid_reduce(grid.size(), 0.0, false, [&](std::size_t i) { return std::abs(ev.scalar(i)); });
  if (hermitian_symbol(p, 1e-13)) {
    return grid_reduce(grid.size(), 0.0, false, [&](std::size_t i) {
      const CMatrix v = ev(i);
      Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (v + v.adjoint()), Eigen::EigenvaluesOnly);
      return es.eigenvalues().cwiseAbs().maxCoeff();
    });
  }
  return grid_reduce(grid.size(), 0.0, false, [&](std::size_t i) { return spectral_norm(ev(i)); });
}

}  // namespace sosfejer
