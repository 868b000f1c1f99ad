#include "mua/rational.hpp"

#include <cctype>
#include <ostream>
#include <stdexcept>

namespace mua {

Rational::Rational(long num, long den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  q_ = mpq_class(num, den);
  q_.canonicalize();
}

namespace {

bool parse_integer(std::string_view s, mpz_class& out) {
  if (s.empty()) return false;
  std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (start == s.size()) return false;
  for (std::size_t i = start; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  std::string digits(s[0] == '+' ? s.substr(1) : s);
  return out.set_str(digits, 10) == 0;
}

}  // namespace

Rational Rational::parse(std::string_view text) {
  const auto slash = text.find('/');
  mpz_class num;
  mpz_class den = 1;
  const bool ok = slash == std::string_view::npos
                      ? parse_integer(text, num)
                      : parse_integer(text.substr(0, slash), num) &&
                            parse_integer(text.substr(slash + 1), den);
  if (!ok) throw std::invalid_argument("malformed rational \"" + std::string(text) + "\"");
  if (den == 0) throw std::invalid_argument("zero denominator in \"" + std::string(text) + "\"");
  mpq_class q(num, den);
  q.canonicalize();
  return Rational(std::move(q));
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("rational division by zero");
  q_ /= o.q_;
  return *this;
}

mpz_class Rational::floor() const {
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), q_.get_num_mpz_t(), q_.get_den_mpz_t());
  return r;
}

mpz_class Rational::ceil() const {
  mpz_class r;
  mpz_cdiv_q(r.get_mpz_t(), q_.get_num_mpz_t(), q_.get_den_mpz_t());
  return r;
}

std::string Rational::str() const {
  if (is_integer()) return q_.get_num().get_str();
  return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

std::string Rational::decimal(int places) const {
  mpz_class scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  const mpq_class scaled = q_ * scale;
  mpz_class whole;
  mpz_fdiv_q(whole.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
  const mpq_class frac = scaled - whole;
  const int c = cmp(frac, mpq_class(1, 2));
  if (c > 0 || (c == 0 && mpz_odd_p(whole.get_mpz_t()))) whole += 1;

  const bool negative = whole < 0;
  std::string digits = mpz_class(abs(whole)).get_str();
  if (places > 0) {
    if (digits.size() <= static_cast<std::size_t>(places)) {
      digits.insert(0, static_cast<std::size_t>(places) + 1 - digits.size(), '0');
    }
    digits.insert(digits.size() - static_cast<std::size_t>(places), ".");
  }
  return negative ? "-" + digits : digits;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

Rational approximate(double x, long max_den) {
  if (max_den < 1) throw std::invalid_argument("max_den must be positive");
  const mpq_class exact(x);
  if (exact.get_den() <= max_den) return Rational(exact);

  mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  mpz_class n = exact.get_num(), d = exact.get_den();
  while (true) {
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    const mpz_class q2 = q0 + a * q1;
    if (q2 > max_den) break;
    const mpz_class p2 = p0 + a * p1;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const mpz_class r = n - a * d;
    n = d;
    d = r;
    if (d == 0) break;
  }
  mpz_class k = (mpz_class(max_den) - q0) / q1;
  const mpq_class bound1(p0 + k * p1, q0 + k * q1);
  const mpq_class bound2(p1, q1);
  const mpq_class e1 = abs(mpq_class(bound1 - exact));
  const mpq_class e2 = abs(mpq_class(bound2 - exact));
  return e2 <= e1 ? Rational(bound2) : Rational(bound1);
}

}  // namespace mua
