#pragma once

#include <cassert>
#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "dmtl/rational.hpp"

namespace dmtl {

// Interval endpoint: -inf, a rational, or +inf. Infinities order below/above
// every rational.
class Endpoint {
 public:
  enum class Kind { NegInf, Finite, PosInf };

  static Endpoint neg_inf() { return Endpoint(Kind::NegInf, Rational()); }
  static Endpoint pos_inf() { return Endpoint(Kind::PosInf, Rational()); }
  static Endpoint finite(Rational v) { return Endpoint(Kind::Finite, std::move(v)); }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  const Rational& value() const {
    assert(is_finite());
    return value_;
  }

  bool operator==(const Endpoint& o) const {
    if (kind_ != o.kind_) return false;
    return kind_ != Kind::Finite || value_ == o.value_;
  }
  std::strong_ordering operator<=>(const Endpoint& o) const {
    auto rank = [](Kind k) { return k == Kind::NegInf ? 0 : k == Kind::Finite ? 1 : 2; };
    if (rank(kind_) != rank(o.kind_)) return rank(kind_) <=> rank(o.kind_);
    if (kind_ != Kind::Finite) return std::strong_ordering::equal;
    return value_ <=> o.value_;
  }

  // Shift by a finite rational; infinities absorb.
  Endpoint operator+(const Rational& r) const {
    if (kind_ != Kind::Finite) return *this;
    return finite(value_ + r);
  }
  // Sum of endpoints. Mixed infinities never arise from valid intervals.
  Endpoint operator+(const Endpoint& o) const {
    if (kind_ == Kind::Finite && o.kind_ == Kind::Finite) return finite(value_ + o.value_);
    if (kind_ != Kind::Finite) {
      assert(o.kind_ == Kind::Finite || o.kind_ == kind_);
      return *this;
    }
    return o;
  }
  Endpoint operator-() const {
    switch (kind_) {
      case Kind::NegInf: return pos_inf();
      case Kind::PosInf: return neg_inf();
      default: return finite(-value_);
    }
  }

  std::string str() const {
    switch (kind_) {
      case Kind::NegInf: return "-inf";
      case Kind::PosInf: return "+inf";
      default: return value_.str();
    }
  }

  static std::optional<Endpoint> parse(std::string_view text) {
    if (text == "-inf") return neg_inf();
    if (text == "+inf") return pos_inf();
    auto r = Rational::parse(text);
    if (!r) return std::nullopt;
    return finite(*r);
  }

 private:
  Endpoint(Kind k, Rational v) : kind_(k), value_(std::move(v)) {}
  Kind kind_;
  Rational value_;
};

// Non-empty interval over the rational timeline with open/closed ends.
// Infinite ends are always open.
class Interval {
 public:
  Interval(Endpoint left, Endpoint right, bool left_closed, bool right_closed)
      : left_(std::move(left)),
        right_(std::move(right)),
        left_closed_(left_closed),
        right_closed_(right_closed) {
    if (!valid()) throw std::invalid_argument("empty or malformed interval: " + str());
  }

  static std::optional<Interval> try_make(Endpoint left, Endpoint right, bool left_closed,
                                          bool right_closed) {
    if (!left.is_finite()) left_closed = false;
    if (!right.is_finite()) right_closed = false;
    Interval candidate(std::move(left), std::move(right), left_closed, right_closed, 0);
    if (!candidate.valid()) return std::nullopt;
    return candidate;
  }

  static Interval closed(Rational a, Rational b) {
    return Interval(Endpoint::finite(std::move(a)), Endpoint::finite(std::move(b)), true, true);
  }
  static Interval punctual(Rational t) {
    Endpoint e = Endpoint::finite(std::move(t));
    return Interval(e, e, true, true);
  }
  static Interval whole_line() {
    return Interval(Endpoint::neg_inf(), Endpoint::pos_inf(), false, false);
  }
  static Interval at_most(Rational t) {
    return Interval(Endpoint::neg_inf(), Endpoint::finite(std::move(t)), false, true);
  }
  static Interval at_least(Rational t) {
    return Interval(Endpoint::finite(std::move(t)), Endpoint::pos_inf(), true, false);
  }

  const Endpoint& left() const { return left_; }
  const Endpoint& right() const { return right_; }
  bool left_closed() const { return left_closed_; }
  bool right_closed() const { return right_closed_; }

  bool is_punctual() const {
    return left_ == right_ && left_.is_finite();
  }

  bool contains(const Rational& t) const {
    Endpoint p = Endpoint::finite(t);
    if (p < left_ || (p == left_ && !left_closed_)) return false;
    if (p > right_ || (p == right_ && !right_closed_)) return false;
    return true;
  }

  // Set containment: every point of `inner` lies in *this.
  bool contains(const Interval& inner) const {
    bool left_ok = left_ < inner.left_ ||
                   (left_ == inner.left_ && (left_closed_ || !inner.left_closed_));
    bool right_ok = right_ > inner.right_ ||
                    (right_ == inner.right_ && (right_closed_ || !inner.right_closed_));
    return left_ok && right_ok;
  }

  bool operator==(const Interval& o) const {
    return left_ == o.left_ && right_ == o.right_ && left_closed_ == o.left_closed_ &&
           right_closed_ == o.right_closed_;
  }

  std::string str() const {
    std::string s;
    s += left_closed_ ? '[' : '(';
    s += left_.str();
    s += ',';
    s += right_.str();
    s += right_closed_ ? ']' : ')';
    return s;
  }

  // Text forms: [a,b] (a,b] [a,b) (a,b) with rational or +/-inf endpoints.
  static std::optional<Interval> parse(std::string_view text) {
    if (text.size() < 5) return std::nullopt;
    char open = text.front();
    char close = text.back();
    if ((open != '[' && open != '(') || (close != ']' && close != ')')) return std::nullopt;
    std::string_view body = text.substr(1, text.size() - 2);
    auto comma = body.find(',');
    if (comma == std::string_view::npos) return std::nullopt;
    auto l = Endpoint::parse(body.substr(0, comma));
    auto r = Endpoint::parse(body.substr(comma + 1));
    if (!l || !r) return std::nullopt;
    if (!l->is_finite() && open == '[') return std::nullopt;
    if (!r->is_finite() && close == ']') return std::nullopt;
    auto made = try_make(*l, *r, open == '[', close == ']');
    if (!made) return std::nullopt;
    return made;
  }

 private:
  Interval(Endpoint left, Endpoint right, bool lc, bool rc, int /*unchecked*/)
      : left_(std::move(left)), right_(std::move(right)), left_closed_(lc), right_closed_(rc) {}

  bool valid() const {
    if (!left_.is_finite() && left_closed_) return false;
    if (!right_.is_finite() && right_closed_) return false;
    if (left_ < right_) return true;
    return left_ == right_ && left_.is_finite() && left_closed_ && right_closed_;
  }

  Endpoint left_, right_;
  bool left_closed_, right_closed_;
};

// "Starts at or before": orders interval starts, a closed start at t preceding
// an open start at t.
inline bool starts_before(const Interval& a, const Interval& b) {
  if (a.left() != b.left()) return a.left() < b.left();
  return a.left_closed() && !b.left_closed();
}

inline std::optional<Interval> intersect(const Interval& a, const Interval& b) {
  // Later start wins; at a tie both must be closed for the result to be.
  Endpoint left = a.left() > b.left() ? a.left() : b.left();
  bool lc = (a.left() == left ? a.left_closed() : true) &&
            (b.left() == left ? b.left_closed() : true);
  Endpoint right = a.right() < b.right() ? a.right() : b.right();
  bool rc = (a.right() == right ? a.right_closed() : true) &&
            (b.right() == right ? b.right_closed() : true);
  return Interval::try_make(left, right, lc, rc);
}

// Convex union when the two intervals overlap or touch with at least one
// closed side at the touching point; nullopt otherwise.
inline std::optional<Interval> union_if_coalescable(const Interval& a, const Interval& b) {
  if (!intersect(a, b)) {
    bool adjacent = (a.right() == b.left() && (a.right_closed() || b.left_closed())) ||
                    (b.right() == a.left() && (b.right_closed() || a.left_closed()));
    if (!adjacent) return std::nullopt;
  }
  // Earlier start wins; at a tie the union end is closed if either is.
  Endpoint left = a.left() < b.left() ? a.left() : b.left();
  bool lc = (a.left() == left && a.left_closed()) || (b.left() == left && b.left_closed());
  Endpoint right = a.right() > b.right() ? a.right() : b.right();
  bool rc = (a.right() == right && a.right_closed()) || (b.right() == right && b.right_closed());
  return Interval(left, right, lc, rc);
}

// Minkowski sum {s + t : s in a, t in b}. Ends are closed only when both
// contributing ends are closed.
inline Interval minkowski_sum(const Interval& a, const Interval& b) {
  Endpoint left = a.left() + b.left();
  Endpoint right = a.right() + b.right();
  bool lc = a.left_closed() && b.left_closed() && left.is_finite();
  bool rc = a.right_closed() && b.right_closed() && right.is_finite();
  return Interval(left, right, lc, rc);
}

// {-t : t in a}.
inline Interval reflect(const Interval& a) {
  return Interval(-a.right(), -a.left(), a.right_closed(), a.left_closed());
}

}  // namespace dmtl
