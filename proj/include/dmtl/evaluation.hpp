#pragma once

#include <cassert>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dmtl/ast.hpp"
#include "dmtl/dataset.hpp"
#include "dmtl/holding_set.hpp"

namespace dmtl {

// { t : exists t' in i2 with t - t' in range and (t', t) contained in i1 }.
// Always a single interval or empty. When 0 is in the range, t' = t makes the
// open interval empty, so every point of i2 qualifies regardless of i1.
inline std::optional<Interval> since_combine(const Interval& i1, const Interval& i2,
                                             const Interval& range) {
  std::optional<Interval> vacuous;
  if (range.contains(Rational(0))) vacuous = i2;

  // Witnesses t' < t need t' >= i1.left (the open interval (t',t) must clear
  // i1's left edge; t' itself may sit outside a left-open i1) and t <= i1.right
  // regardless of i1's right flag.
  std::optional<Interval> strict;
  std::optional<Interval> positive_range =
      intersect(range, Interval(Endpoint::finite(Rational(0)), Endpoint::pos_inf(), false, false));
  if (positive_range) {
    std::optional<Interval> admissible =
        i1.left().is_finite()
            ? intersect(i2, Interval(i1.left(), Endpoint::pos_inf(), true, false))
            : std::optional<Interval>(i2);
    if (admissible) {
      Interval reached = minkowski_sum(*admissible, *positive_range);
      strict = i1.right().is_finite()
                   ? intersect(reached, Interval::at_most(i1.right().value()))
                   : std::optional<Interval>(reached);
    }
  }

  if (!vacuous) return strict;
  if (!strict) return vacuous;
  auto joined = union_if_coalescable(*vacuous, *strict);
  assert(joined);  // the strict part grows out of i2's closure
  return joined;
}

// Exact time-mirror of since_combine.
inline std::optional<Interval> until_combine(const Interval& i1, const Interval& i2,
                                             const Interval& range) {
  auto mirrored = since_combine(reflect(i1), reflect(i2), range);
  if (!mirrored) return std::nullopt;
  return reflect(*mirrored);
}

namespace detail {

// Diamond: Minkowski-shift every component by the (possibly reflected) range.
inline HoldingSet shift_set(const HoldingSet& h, const Interval& delta) {
  std::vector<Interval> out;
  out.reserve(h.size());
  for (const Interval& iv : h.intervals()) out.push_back(minkowski_sum(iv, delta));
  return HoldingSet::normalize(std::move(out));
}

// Box-minus: t qualifies iff the window [t - r+, t - r-] (flags inherited from
// the range) fits inside a single component. Components are separated by real
// gaps, so the window can never straddle two of them.
inline HoldingSet box_minus_set(const HoldingSet& h, const Interval& range) {
  std::vector<Interval> out;
  for (const Interval& c : h.intervals()) {
    Endpoint left = Endpoint::pos_inf();  // sentinel: unbounded window rules the component out
    bool lc = false;
    if (range.right().is_finite()) {
      left = c.left() + range.right().value();
      lc = left.is_finite() && (c.left_closed() || !range.right_closed());
    } else if (c.left().kind() == Endpoint::Kind::NegInf) {
      left = Endpoint::neg_inf();
    } else {
      continue;  // window reaches -inf but the component does not
    }
    Endpoint right = c.right() + range.left().value();
    bool rc = right.is_finite() && (c.right_closed() || !range.left_closed());
    if (auto iv = Interval::try_make(left, right, lc, rc)) out.push_back(*iv);
  }
  return HoldingSet::normalize(std::move(out));
}

inline HoldingSet box_plus_set(const HoldingSet& h, const Interval& range) {
  return box_minus_set(h.reflected(), range).reflected();
}

inline HoldingSet since_set(const HoldingSet& h1, const HoldingSet& h2, const Interval& range) {
  std::vector<Interval> out;
  if (range.contains(Rational(0)))
    for (const Interval& iv : h2.intervals()) out.push_back(iv);
  for (const Interval& i2 : h2.intervals())
    for (const Interval& i1 : h1.intervals())
      if (auto iv = since_combine(i1, i2, range)) out.push_back(*iv);
  return HoldingSet::normalize(std::move(out));
}

inline HoldingSet until_set(const HoldingSet& h1, const HoldingSet& h2, const Interval& range) {
  return since_set(h1.reflected(), h2.reflected(), range).reflected();
}

}  // namespace detail

// Holding-set evaluation of ground metric atoms against a fixed dataset, with
// per-atom memoisation (one context per rule-application round).
class EvalContext {
 public:
  explicit EvalContext(const Dataset& data) : data_(&data) {}

  const Dataset& data() const { return *data_; }

  const HoldingSet& eval(const MetricAtom& m) {
    assert(m.is_ground());
    switch (m.op()) {
      case MetricOp::Rel: {
        const HoldingSet* h = data_->find(m.relational().ground());
        return h ? *h : empty_;
      }
      case MetricOp::Top: {
        if (top_.empty()) top_.insert(Interval::whole_line());
        return top_;
      }
      case MetricOp::Bottom:
        return empty_;
      default:
        break;
    }
    std::string key = m.str();
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    HoldingSet result;
    switch (m.op()) {
      case MetricOp::DiamondMinus:
        result = detail::shift_set(eval(m.arg()), m.range());
        break;
      case MetricOp::DiamondPlus:
        result = detail::shift_set(eval(m.arg()), reflect(m.range()));
        break;
      case MetricOp::BoxMinus:
        result = detail::box_minus_set(eval(m.arg()), m.range());
        break;
      case MetricOp::BoxPlus:
        result = detail::box_plus_set(eval(m.arg()), m.range());
        break;
      case MetricOp::Since:
        result = detail::since_set(eval(m.lhs()), eval(m.rhs()), m.range());
        break;
      case MetricOp::Until:
        result = detail::until_set(eval(m.lhs()), eval(m.rhs()), m.range());
        break;
      default:
        break;
    }
    return memo_.emplace(std::move(key), std::move(result)).first->second;
  }

 private:
  const Dataset* data_;
  std::unordered_map<std::string, HoldingSet> memo_;
  HoldingSet top_;
  HoldingSet empty_;
};

inline HoldingSet eval_ground_atom(const MetricAtom& m, const Dataset& d) {
  EvalContext ctx(d);
  return ctx.eval(m);
}

inline bool entails_metric(const Dataset& d, const MetricAtom& m, const Interval& iv) {
  return eval_ground_atom(m, d).covers(iv);
}

// Peels head operators outward: the head holding on `iv` forces the nested
// relational atom on the Minkowski image of `iv`.
inline std::optional<Fact> head_project(const MetricAtom& head, const Interval& iv) {
  switch (head.op()) {
    case MetricOp::Rel:
      return Fact{head.relational().ground(), iv};
    case MetricOp::BoxMinus:
      return head_project(head.arg(), minkowski_sum(iv, reflect(head.range())));
    case MetricOp::BoxPlus:
      return head_project(head.arg(), minkowski_sum(iv, head.range()));
    default:
      return std::nullopt;  // Top heads force nothing
  }
}

}  // namespace dmtl
