#include "sosfejer/poly_io.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "sosfejer/error.hpp"

namespace sosfejer {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_polynomial(const MatLaurent& p) {
  std::string out = "vars " + std::to_string(p.vars()) + " block " + std::to_string(p.block()) + "\n";
  for (const auto& [k, c] : p.terms()) {
    std::string line;
    for (int v : k.values()) {
      line += std::to_string(v);
      line += ' ';
    }
    for (int r = 0; r < p.block(); ++r) {
      for (int col = 0; col < p.block(); ++col) {
        line += format_double(c(r, col).real());
        line += ' ';
        line += format_double(c(r, col).imag());
        line += ' ';
      }
    }
    line.pop_back();
    out += line;
    out += '\n';
  }
  return out;
}

namespace {

struct Token {
  std::string_view text;
  int column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    tokens.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return tokens;
}

int parse_int(const Token& t, int line) {
  int v = 0;
  const auto* end = t.text.data() + t.text.size();
  auto [ptr, ec] = std::from_chars(t.text.data(), end, v);
  if (ec != std::errc{} || ptr != end)
    throw ParseError(line, t.column, "expected an integer, got '" + std::string(t.text) + "'");
  return v;
}

double parse_real(const Token& t, int line) {
  const std::string s(t.text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  // ERANGE on underflow still yields the correctly rounded subnormal.
  const bool overflow = errno == ERANGE && std::abs(v) == HUGE_VAL;
  if (end != s.c_str() + s.size() || overflow || !std::isfinite(v))
    throw ParseError(line, t.column, "expected a finite real number, got '" + s + "'");
  return v;
}

}  // namespace

MatLaurent parse_polynomial(std::string_view text) {
  std::optional<MatLaurent> poly;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tokens = tokenize(line);
    if (tokens.empty()) {
      if (eol == text.size()) break;
      continue;
    }
    if (!poly) {
      if (tokens.size() != 4 || tokens[0].text != "vars" || tokens[2].text != "block")
        throw ParseError(line_no, tokens[0].column, "expected header 'vars <d> block <m>'");
      const int d = parse_int(tokens[1], line_no);
      const int m = parse_int(tokens[3], line_no);
      if (d < 0) throw ParseError(line_no, tokens[1].column, "variable count must be >= 0");
      if (m < 1) throw ParseError(line_no, tokens[3].column, "block size must be >= 1");
      poly.emplace(d, m);
      continue;
    }
    const int d = poly->vars();
    const int m = poly->block();
    const std::size_t expected = static_cast<std::size_t>(d) + 2 * static_cast<std::size_t>(m) * m;
    if (tokens.size() != expected) {
      const int col = tokens.size() > expected ? tokens[expected].column : tokens.back().column;
      throw ParseError(line_no, col,
                       "expected " + std::to_string(expected) + " fields, got " + std::to_string(tokens.size()));
    }
    std::vector<int> k(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) k[static_cast<std::size_t>(i)] = parse_int(tokens[static_cast<std::size_t>(i)], line_no);
    CMatrix c(m, m);
    std::size_t t = static_cast<std::size_t>(d);
    for (int r = 0; r < m; ++r) {
      for (int col = 0; col < m; ++col) {
        const double re = parse_real(tokens[t], line_no);
        const double im = parse_real(tokens[t + 1], line_no);
        c(r, col) = cplx(re, im);
        t += 2;
      }
    }
    const Exponent key(std::move(k));
    if (poly->terms().count(key))
      throw ParseError(line_no, tokens[0].column, "duplicate monomial");
    poly->set(key, c);
    if (eol == text.size()) break;
  }
  if (!poly) throw ParseError(line_no == 0 ? 1 : line_no, 1, "missing 'vars <d> block <m>' header");
  return *poly;
}

nlohmann::json polynomial_to_json(const MatLaurent& p) {
  nlohmann::json monomials = nlohmann::json::array();
  for (const auto& [k, c] : p.terms()) {
    nlohmann::json entries = nlohmann::json::array();
    for (int r = 0; r < p.block(); ++r)
      for (int col = 0; col < p.block(); ++col) entries.push_back({c(r, col).real(), c(r, col).imag()});
    monomials.push_back({{"k", k.values()}, {"c", entries}});
  }
  return {{"vars", p.vars()}, {"block", p.block()}, {"monomials", monomials}};
}

MatLaurent polynomial_from_json(const nlohmann::json& j) {
  try {
    const int d = j.at("vars").get<int>();
    const int m = j.value("block", 1);
    if (d < 0 || m < 1) throw ParseError(1, 1, "invalid vars/block");
    MatLaurent p(d, m);
    for (const auto& mono : j.at("monomials")) {
      const auto k = mono.at("k").get<std::vector<int>>();
      if (static_cast<int>(k.size()) != d) throw ParseError(1, 1, "monomial exponent length differs from vars");
      const auto& entries = mono.at("c");
      if (entries.size() != static_cast<std::size_t>(m) * m)
        throw ParseError(1, 1, "monomial needs block*block coefficient pairs");
      CMatrix c(m, m);
      std::size_t t = 0;
      for (int r = 0; r < m; ++r)
        for (int col = 0; col < m; ++col, ++t) c(r, col) = cplx(entries[t].at(0).get<double>(), entries[t].at(1).get<double>());
      const Exponent key(k);
      if (p.terms().count(key)) throw ParseError(1, 1, "duplicate monomial");
      p.set(key, c);
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, 1, std::string("malformed polynomial JSON: ") + e.what());
  }
}

MatLaurent read_polynomial_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, 0, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(1, static_cast<int>(e.byte), e.what());
    }
    return polynomial_from_json(j);
  }
  return parse_polynomial(text);
}

namespace {

std::string variable_name(int i, int vars) {
  static const char* kNames[] = {"x", "y", "w"};
  if (vars <= 3) return kNames[i];
  return "z" + std::to_string(i + 1);
}

std::string format_short(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

}  // namespace

std::string pretty_polynomial(const MatLaurent& p, int digits) {
  if (!p.is_scalar()) throw DimensionMismatch("pretty_polynomial needs a scalar polynomial");
  if (p.is_zero()) return "0";
  // Lower total degree first; ties ordered by the last variable, then earlier ones.
  std::vector<std::pair<std::vector<int>, const MatLaurent::Terms::value_type*>> order;
  for (const auto& t : p.terms()) {
    std::vector<int> key{0};
    for (int i = p.vars(); i-- > 0;) {
      key[0] += std::abs(t.first[i]);
      key.push_back(t.first[i]);
    }
    order.emplace_back(std::move(key), &t);
  }
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string out;
  for (const auto& entry : order) {
    const Exponent& k = entry.second->first;
    const cplx v = entry.second->second(0, 0);
    std::string coef;
    if (v.imag() == 0.0) {
      coef = format_short(v.real(), digits);
    } else {
      coef = "(" + format_short(v.real(), digits) + (v.imag() < 0 ? "-" : "+") +
             format_short(std::abs(v.imag()), digits) + "i)";
    }
    std::string mono;
    for (int i = 0; i < p.vars(); ++i) {
      if (k[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += variable_name(i, p.vars());
      if (k[i] != 1) mono += "^" + std::to_string(k[i]);
    }
    if (!out.empty()) out += coef.front() == '-' ? " - " : " + ";
    else if (coef.front() == '-') out += "-";
    if (coef.front() == '-') coef.erase(0, 1);
    if (mono.empty())
      out += coef;
    else
      out += coef == "1" ? mono : coef + "*" + mono;
  }
  return out;
}

}  // namespace sosfejer
