#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace dmtl {

// Exact rational time point. Canonical form: reduced, positive denominator.
class Rational {
 public:
  Rational() : value_(0) {}
  Rational(long n) : value_(n) {}  // NOLINT: implicit by design, 5 is a time point
  Rational(long num, long den) : value_(num, den) { value_.canonicalize(); }
  explicit Rational(mpq_class q) : value_(std::move(q)) { value_.canonicalize(); }

  // Accepts an integer ("5"), an exact decimal ("2.75"), or a fraction ("11/4").
  static std::optional<Rational> parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    bool negative = false;
    std::size_t i = 0;
    if (text[0] == '+' || text[0] == '-') {
      negative = text[0] == '-';
      i = 1;
    }
    std::string digits;
    std::string tail;
    char sep = 0;
    for (; i < text.size(); ++i) {
      char c = text[i];
      if (c >= '0' && c <= '9') {
        (sep == 0 ? digits : tail) += c;
      } else if ((c == '.' || c == '/') && sep == 0) {
        sep = c;
      } else {
        return std::nullopt;
      }
    }
    if (digits.empty()) return std::nullopt;
    if (sep != 0 && tail.empty()) return std::nullopt;
    mpq_class q;
    if (sep == '.') {
      mpz_class scale;
      mpz_ui_pow_ui(scale.get_mpz_t(), 10, tail.size());
      q = mpq_class(mpz_class(digits) * scale + mpz_class(tail), scale);
    } else if (sep == '/') {
      mpz_class den(tail);
      if (den == 0) return std::nullopt;
      q = mpq_class(mpz_class(digits), den);
    } else {
      q = mpq_class(mpz_class(digits));
    }
    q.canonicalize();
    if (negative) q = -q;
    return Rational(std::move(q));
  }

  const mpz_class& numerator() const { return value_.get_num(); }
  const mpz_class& denominator() const { return value_.get_den(); }
  bool is_integer() const { return value_.get_den() == 1; }

  // Canonical text: "5" or "11/4".
  std::string str() const {
    if (is_integer()) return value_.get_num().get_str();
    return value_.get_num().get_str() + "/" + value_.get_den().get_str();
  }

  // Only valid when the value is an integer fitting a long.
  long to_long() const { return static_cast<long>(value_.get_num().get_si()); }

  long floor_long() const {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), value_.get_num().get_mpz_t(), value_.get_den().get_mpz_t());
    return static_cast<long>(q.get_si());
  }
  long ceil_long() const {
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), value_.get_num().get_mpz_t(), value_.get_den().get_mpz_t());
    return static_cast<long>(q.get_si());
  }

  Rational operator+(const Rational& o) const { return Rational(mpq_class(value_ + o.value_)); }
  Rational operator-(const Rational& o) const { return Rational(mpq_class(value_ - o.value_)); }
  Rational operator*(const Rational& o) const { return Rational(mpq_class(value_ * o.value_)); }
  Rational operator-() const { return Rational(mpq_class(-value_)); }

  bool operator==(const Rational& o) const { return value_ == o.value_; }
  std::strong_ordering operator<=>(const Rational& o) const {
    int c = cmp(value_, o.value_);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  mpq_class value_;
};

}  // namespace dmtl
