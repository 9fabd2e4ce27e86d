#pragma once

// Text forms used on the command line.
//
//   complex   2.5   -i   3i   (1+2i)   (0.5-0.25i)
//   q         a complex number, or polar:r,phi
//   weights   factorial[:c]  constant[:c]  power-factorial:s[,c]  explicit:w0,w1,...
//   Manin     terms "coef th^i tb^j" joined by + or -, e.g. "th tb - (0.5+1i) tb^2".
//             Factors multiply left to right in the algebra, so "tb th" = q^{-1} th tb.
//   symbol    the same with L^a (lambda) and Lc^b (conj lambda), e.g. "L + 2 Lc^2 L".

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "manin/algebra.hpp"
#include "manin/errors.hpp"
#include "manin/symbols.hpp"
#include "manin/weights.hpp"

namespace manin::parse {

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline double to_double(std::string_view s, std::string_view what) {
  std::string t = trim(s);
  if (t.size() > 1 && t[0] == '+') t.erase(0, 1);  // from_chars rejects a leading plus
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("cannot read " + std::string(what) + " from '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= s.size(); ++k)
    if (k == s.size() || s[k] == sep) {
      out.push_back(trim(s.substr(start, k - start)));
      start = k + 1;
    }
  return out;
}

/// A real or imaginary literal such as "2", "-1.5", "i", "-3i".
inline cplx literal(std::string_view s) {
  std::string t = trim(s);
  if (t.empty()) throw ConfigError("empty number");
  if (t.back() == 'i' || t.back() == 'j') {
    t.pop_back();
    if (t.empty() || t == "+") return {0.0, 1.0};
    if (t == "-") return {0.0, -1.0};
    return {0.0, to_double(t, "imaginary part")};
  }
  return {to_double(t, "number"), 0.0};
}

/// Splits at top-level + and - signs (not inside parentheses, not exponent signs).
inline std::vector<std::string> signed_terms(std::string_view s) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const char c = s[k];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth < 0) throw ConfigError("unbalanced parentheses in '" + std::string(s) + "'");
    const bool exponent_sign = k > 0 && (s[k - 1] == 'e' || s[k - 1] == 'E') && k >= 2 &&
                               std::isdigit(static_cast<unsigned char>(s[k - 2]));
    if (depth == 0 && (c == '+' || c == '-') && k > start && !exponent_sign) {
      const std::string piece = trim(s.substr(start, k - start));
      if (!piece.empty() && piece != "+" && piece != "-") {
        out.push_back(piece);
        start = k;
      }
    }
  }
  if (depth != 0) throw ConfigError("unbalanced parentheses in '" + std::string(s) + "'");
  out.push_back(trim(s.substr(start)));
  return out;
}

}  // namespace detail

/// "2", "-i", "(1+2i)", "1+2i".
inline cplx complex_number(std::string_view s) {
  std::string t = detail::trim(s);
  if (t.size() >= 2 && t.front() == '(' && t.back() == ')') t = t.substr(1, t.size() - 2);
  cplx sum{};
  for (const auto& part : detail::signed_terms(t)) sum += detail::literal(part);
  return sum;
}

inline QParam q_value(std::string_view s) {
  const std::string t = detail::trim(s);
  if (t.rfind("polar:", 0) == 0) {
    const auto parts = detail::split(std::string_view(t).substr(6), ',');
    if (parts.size() != 2) throw ConfigError("polar q needs r,phi");
    return QParam(std::polar(detail::to_double(parts[0], "|q|"), detail::to_double(parts[1], "arg q")));
  }
  return QParam(complex_number(t));
}

inline WeightSequence weights(std::string_view s) {
  const std::string t = detail::trim(s);
  const auto colon = t.find(':');
  const std::string kind = t.substr(0, colon);
  const std::vector<std::string> args =
      colon == std::string::npos ? std::vector<std::string>{} : detail::split(std::string_view(t).substr(colon + 1), ',');
  auto arg = [&](std::size_t k, double fallback) {
    return k < args.size() ? detail::to_double(args[k], "weight parameter") : fallback;
  };
  if (kind == "factorial") return WeightSequence::factorial(arg(0, 1.0));
  if (kind == "constant") return WeightSequence::constant(arg(0, 1.0));
  if (kind == "power-factorial") {
    if (args.empty()) throw ConfigError("power-factorial needs an exponent: power-factorial:s[,c]");
    return WeightSequence::power_factorial(arg(0, 1.0), arg(1, 1.0));
  }
  if (kind == "explicit") {
    std::vector<double> table;
    for (const auto& a : args) table.push_back(detail::to_double(a, "weight"));
    if (table.empty()) throw ConfigError("explicit weights need at least one value");
    return WeightSequence::explicit_table(std::move(table));
  }
  throw ConfigError("unknown weight kind '" + kind + "'");
}

namespace detail {

struct Factor {
  std::string name;
  std::uint32_t power = 1;
};

/// "coef name^k name^k ..." -> coefficient and factors in order.
inline std::pair<cplx, std::vector<Factor>> term(std::string_view raw) {
  std::string s = trim(raw);
  double sign = 1.0;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    sign = s[0] == '-' ? -1.0 : 1.0;
    s = trim(std::string_view(s).substr(1));
  }
  cplx coef = 1.0;
  std::size_t k = 0;
  if (k < s.size() && s[k] == '(') {
    const auto close = s.find(')');
    if (close == std::string::npos) throw ConfigError("unclosed coefficient in '" + std::string(raw) + "'");
    coef = complex_number(s.substr(0, close + 1));
    k = close + 1;
  } else {
    std::size_t e = k;
    while (e < s.size() && (std::isdigit(static_cast<unsigned char>(s[e])) || s[e] == '.' ||
                            ((s[e] == 'e' || s[e] == 'E') && e > k && e + 1 < s.size() &&
                             (std::isdigit(static_cast<unsigned char>(s[e + 1])) || s[e + 1] == '-' || s[e + 1] == '+')) ||
                            ((s[e] == '-' || s[e] == '+') && e > k && (s[e - 1] == 'e' || s[e - 1] == 'E'))))
      ++e;
    if (e > k) {
      if (e < s.size() && s[e] == 'i' && (e + 1 == s.size() || !std::isalpha(static_cast<unsigned char>(s[e + 1])))) {
        coef = literal(s.substr(k, e - k + 1));
        e += 1;
      } else {
        coef = literal(s.substr(k, e - k));
      }
      k = e;
    } else if (k < s.size() && s[k] == 'i' && (k + 1 == s.size() || !std::isalpha(static_cast<unsigned char>(s[k + 1])))) {
      coef = {0.0, 1.0};
      k += 1;
    }
  }
  std::vector<Factor> factors;
  while (k < s.size()) {
    if (std::isspace(static_cast<unsigned char>(s[k])) || s[k] == '*') {
      ++k;
      continue;
    }
    std::size_t e = k;
    while (e < s.size() && std::isalpha(static_cast<unsigned char>(s[e]))) ++e;
    if (e == k) throw ConfigError("unexpected '" + std::string(1, s[k]) + "' in term '" + std::string(raw) + "'");
    Factor f{s.substr(k, e - k), 1};
    k = e;
    if (k < s.size() && s[k] == '^') {
      ++k;
      std::size_t d = k;
      while (d < s.size() && std::isdigit(static_cast<unsigned char>(s[d]))) ++d;
      if (d == k) throw ConfigError("missing exponent in term '" + std::string(raw) + "'");
      unsigned long p = 0;
      std::from_chars(s.data() + k, s.data() + d, p);
      if (p > 100000) throw InputTooLarge("exponent too large in term '" + std::string(raw) + "'");
      f.power = static_cast<std::uint32_t>(p);
      k = d;
    }
    factors.push_back(f);
  }
  return {sign * coef, factors};
}

}  // namespace detail

/// Manin plane element from "th^i tb^j" terms; factors are multiplied in the
/// algebra, so any order of th and tb is accepted.
inline ManinElement manin(std::string_view expr, const QParam& q) {
  if (detail::trim(expr).empty()) throw ConfigError("empty Manin expression");
  ManinElement total(q);
  for (const auto& piece : detail::signed_terms(expr)) {
    const auto [coef, factors] = detail::term(piece);
    ManinElement prod = ManinElement::monomial(q, 0, 0, coef);
    for (const auto& f : factors) {
      if (f.name == "th")
        prod = normal_order_product(prod, ManinElement::monomial(q, f.power, 0));
      else if (f.name == "tb")
        prod = normal_order_product(prod, ManinElement::monomial(q, 0, f.power));
      else
        throw ConfigError("unknown factor '" + f.name + "' (expected th or tb)");
    }
    total = total + prod;
  }
  return total;
}

/// Phase-space polynomial from "L^a Lc^b" terms (commuting variables).
inline PolynomialSymbol symbol(std::string_view expr) {
  if (detail::trim(expr).empty()) throw ConfigError("empty symbol expression");
  PolynomialSymbol total;
  for (const auto& piece : detail::signed_terms(expr)) {
    const auto [coef, factors] = detail::term(piece);
    std::uint32_t a = 0, b = 0;
    for (const auto& f : factors) {
      if (f.name == "L")
        a += f.power;
      else if (f.name == "Lc")
        b += f.power;
      else
        throw ConfigError("unknown factor '" + f.name + "' (expected L or Lc)");
    }
    total.add(a, b, coef);
  }
  return total;
}

}  // namespace manin::parse
