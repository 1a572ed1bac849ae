#include "coxcheck/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace coxcheck {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

Rational parse_decimal(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto epos = s.find_first_of("eE"); epos != std::string_view::npos) {
    std::string_view exp_part = s.substr(epos + 1);
    s = s.substr(0, epos);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '-' || exp_part.front() == '+')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    if (!all_digits(exp_part) || exp_part.size() > 6)
      throw std::invalid_argument("bad exponent in number: " + std::string(text));
    exponent = std::stol(std::string(exp_part));
    if (exp_negative) exponent = -exponent;
  }
  std::string digits;
  auto dot = s.find('.');
  if (dot == std::string_view::npos) {
    if (!all_digits(s)) throw std::invalid_argument("bad number: " + std::string(text));
    digits = std::string(s);
  } else {
    std::string_view int_part = s.substr(0, dot);
    std::string_view frac_part = s.substr(dot + 1);
    if ((int_part.empty() && frac_part.empty()) ||
        (!int_part.empty() && !all_digits(int_part)) ||
        (!frac_part.empty() && !all_digits(frac_part)))
      throw std::invalid_argument("bad number: " + std::string(text));
    digits = std::string(int_part) + std::string(frac_part);
    exponent -= static_cast<long>(frac_part.size());
  }
  mpz_class value(digits, 10);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
  Rational result = exponent >= 0 ? Rational(value * scale) : Rational(value, scale);
  result.canonicalize();
  return negative ? Rational(-result) : result;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty number");
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  std::string_view num = text.substr(0, slash);
  std::string_view den = text.substr(slash + 1);
  std::string_view num_digits = num;
  if (!num_digits.empty() && (num_digits.front() == '-' || num_digits.front() == '+'))
    num_digits.remove_prefix(1);
  if (!all_digits(num_digits) || !all_digits(den))
    throw std::invalid_argument("bad fraction: " + std::string(text));
  mpz_class d(std::string(den), 10);
  if (d == 0) throw std::invalid_argument("zero denominator: " + std::string(text));
  std::string num_text(num);
  if (!num_text.empty() && num_text.front() == '+') num_text.erase(0, 1);
  Rational q(mpz_class(num_text, 10), d);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

long double to_long_double(const Rational& q) {
  const mpz_class& n = q.get_num();
  const mpz_class& d = q.get_den();
  if (mpz_sizeinbase(n.get_mpz_t(), 2) <= 62 && mpz_sizeinbase(d.get_mpz_t(), 2) <= 62) {
    auto ni = static_cast<long double>(mpz_get_si(n.get_mpz_t()));
    auto di = static_cast<long double>(mpz_get_si(d.get_mpz_t()));
    return ni / di;
  }
  return static_cast<long double>(q.get_d());
}

Rational power(const Rational& base, unsigned exponent) {
  mpz_class n, d;
  mpz_pow_ui(n.get_mpz_t(), base.get_num().get_mpz_t(), exponent);
  mpz_pow_ui(d.get_mpz_t(), base.get_den().get_mpz_t(), exponent);
  Rational r(n, d);
  r.canonicalize();
  return r;
}

Rational nearest_convergent(long double x, std::uint64_t max_den) {
  if (!std::isfinite(x)) throw std::invalid_argument("nearest_convergent: non-finite input");
  // h/k convergents with the standard recurrence.
  mpz_class h_prev = 1, h = static_cast<long>(std::floor(x));
  mpz_class k_prev = 0, k = 1;
  long double frac = x - std::floor(x);
  for (int iter = 0; iter < 64 && frac > 1e-18L; ++iter) {
    long double inv = 1.0L / frac;
    long double a_ld = std::floor(inv);
    if (a_ld > 1e18L) break;
    mpz_class a = static_cast<long>(a_ld);
    mpz_class h_next = a * h + h_prev;
    mpz_class k_next = a * k + k_prev;
    if (k_next > max_den) break;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
    frac = inv - a_ld;
  }
  Rational r(h, k);
  r.canonicalize();
  return r;
}

Rational canonical(Rational q) {
  q.canonicalize();
  return q;
}

std::vector<Rational> canonical(std::vector<Rational> values) {
  for (auto& v : values) v.canonicalize();
  return values;
}

}  // namespace coxcheck
