#include "kscluster/rational.hpp"

#include <cctype>

#include "kscluster/errors.hpp"

namespace kscluster {

namespace {

Rational parse_decimal(std::string_view s) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) negative = s[pos++] == '-';
  std::string digits;
  long exponent = 0;
  bool seen_digit = false;
  bool seen_point = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) --exponent;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw ContractError("not a number: '" + std::string(s) + "'");
  if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
    ++pos;
    std::string exp_text(s.substr(pos));
    if (exp_text.empty()) throw ContractError("bad exponent in '" + std::string(s) + "'");
    std::size_t used = 0;
    long e = 0;
    try {
      e = std::stol(exp_text, &used);
    } catch (const std::exception&) {
      throw ContractError("bad exponent in '" + std::string(s) + "'");
    }
    if (used != exp_text.size()) throw ContractError("trailing characters in '" + std::string(s) + "'");
    exponent += e;
    pos = s.size();
  }
  if (pos != s.size()) throw ContractError("trailing characters in '" + std::string(s) + "'");
  if (exponent > 4096 || exponent < -4096) throw ContractError("exponent out of range in '" + std::string(s) + "'");
  mpz_class mantissa(digits, 10);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational r = exponent < 0 ? Rational(mantissa, scale) : Rational(mantissa * scale);
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw ContractError("empty rational literal");
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  auto num = text.substr(0, slash);
  auto den = text.substr(slash + 1);
  auto is_int = [](std::string_view t) {
    if (!t.empty() && (t.front() == '-' || t.front() == '+')) t.remove_prefix(1);
    if (t.empty()) return false;
    for (char c : t)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  };
  if (!is_int(num) || !is_int(den)) throw ContractError("malformed rational '" + std::string(text) + "'");
  std::string n(num), d(den);
  if (!n.empty() && n.front() == '+') n.erase(0, 1);
  if (!d.empty() && d.front() == '+') d.erase(0, 1);
  mpz_class dz(d, 10);
  if (dz == 0) throw ContractError("zero denominator in '" + std::string(text) + "'");
  Rational r(mpz_class(n, 10), dz);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& q) { return q.get_str(); }

double to_double(const Rational& q) { return q.get_d(); }

}  // namespace kscluster
