#include "sgtree/rational.hpp"

#include <cctype>
#include <cmath>
#include <string>

namespace sgt {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  if (s.empty()) throw std::invalid_argument("empty rational literal");

  auto dot = s.find('.');
  if (dot != std::string::npos && s.find('/') == std::string::npos) {
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t frac_len = s.size() - dot - 1;
    Rational q;
    if (q.get_num().set_str(digits, 10) != 0) {
      throw std::invalid_argument("malformed decimal literal '" + s + "'");
    }
    q.get_den() = pow_integer(10, frac_len);
    q.canonicalize();
    return q;
  }

  Rational q;
  if (q.set_str(s, 10) != 0) {
    throw std::invalid_argument("malformed rational literal '" + s + "'");
  }
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
  q.canonicalize();
  return q;
}

std::string to_fraction_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

namespace {

long double log_integer(const Integer& z) {
  // z = m * 2^e with m in [0.5, 1)
  long e = 0;
  double m = mpz_get_d_2exp(&e, z.get_mpz_t());
  return std::log(static_cast<long double>(m)) + static_cast<long double>(e) * std::log(2.0L);
}

}  // namespace

long double to_long_double(const Rational& q) {
  if (q == 0) return 0.0L;
  mpf_class f(q, 192);
  long e = 0;
  double m = mpf_get_d_2exp(&e, f.get_mpf_t());
  return std::ldexp(static_cast<long double>(m), static_cast<int>(e));
}

long double log_rational(const Rational& q) {
  if (q <= 0) throw std::domain_error("log of a non-positive rational");
  return log_integer(q.get_num()) - log_integer(q.get_den());
}

Integer pow_integer(const Integer& base, unsigned long exponent) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exponent);
  return r;
}

Rational pow_rational(const Rational& base, unsigned long exponent) {
  Rational r;
  mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), exponent);
  r.canonicalize();
  return r;
}

Integer lcm(const Integer& a, const Integer& b) {
  Integer r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

std::uint64_t totient(std::uint64_t n) {
  std::uint64_t result = n;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      result -= result / p;
    }
  }
  if (n > 1) result -= result / n;
  return result;
}

}  // namespace sgt
