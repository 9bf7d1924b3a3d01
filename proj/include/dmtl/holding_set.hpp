#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "dmtl/interval.hpp"

namespace dmtl {

struct InsertOutcome {
  enum class Kind { Absorbed, Extended, Fresh } kind;
  Interval stored;  // the interval now covering the inserted one
};

// Finite union of maximal disjoint intervals: sorted, pairwise disjoint and
// non-adjacent, hence a canonical representation of its point set.
class HoldingSet {
 public:
  HoldingSet() = default;

  static HoldingSet normalize(std::vector<Interval> raw) {
    HoldingSet h;
    if (raw.empty()) return h;
    std::sort(raw.begin(), raw.end(), [](const Interval& a, const Interval& b) {
      if (a.left() != b.left() || a.left_closed() != b.left_closed()) return starts_before(a, b);
      return b.right() < a.right();  // longer first at equal starts, for a stable sweep
    });
    Interval current = raw.front();
    for (std::size_t i = 1; i < raw.size(); ++i) {
      if (auto merged = union_if_coalescable(current, raw[i])) {
        current = *merged;
      } else {
        h.intervals_.push_back(current);
        current = raw[i];
      }
    }
    h.intervals_.push_back(current);
    return h;
  }

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  std::size_t size() const { return intervals_.size(); }

  bool operator==(const HoldingSet& o) const { return intervals_ == o.intervals_; }

  // Membership of a single point.
  bool contains(const Rational& t) const {
    for (const Interval& iv : intervals_) {
      if (iv.contains(t)) return true;
      if (Endpoint::finite(t) < iv.left()) break;
    }
    return false;
  }

  // Whole-interval coverage. Members are maximal and disjoint, so coverage
  // cannot split across two of them.
  bool covers(const Interval& q) const {
    for (const Interval& iv : intervals_) {
      if (iv.contains(q)) return true;
      if (q.left() < iv.left()) break;
    }
    return false;
  }

  // Coalescing insert, preserving the normal form.
  InsertOutcome insert(const Interval& iv) {
    std::size_t first = 0;
    while (first < intervals_.size() && !union_if_coalescable(intervals_[first], iv)) ++first;
    if (first == intervals_.size()) {
      auto pos = std::find_if(intervals_.begin(), intervals_.end(),
                              [&](const Interval& x) { return starts_before(iv, x); });
      intervals_.insert(pos, iv);
      return {InsertOutcome::Kind::Fresh, iv};
    }
    if (intervals_[first].contains(iv)) return {InsertOutcome::Kind::Absorbed, intervals_[first]};
    Interval merged = *union_if_coalescable(intervals_[first], iv);
    std::size_t last = first + 1;
    while (last < intervals_.size()) {
      auto wider = union_if_coalescable(merged, intervals_[last]);
      if (!wider) break;
      merged = *wider;
      ++last;
    }
    intervals_.erase(intervals_.begin() + static_cast<std::ptrdiff_t>(first),
                     intervals_.begin() + static_cast<std::ptrdiff_t>(last));
    intervals_.insert(intervals_.begin() + static_cast<std::ptrdiff_t>(first), merged);
    return {InsertOutcome::Kind::Extended, merged};
  }

  // Removes an interval that is stored exactly as given; false if absent.
  bool remove_exact(const Interval& iv) {
    auto it = std::find(intervals_.begin(), intervals_.end(), iv);
    if (it == intervals_.end()) return false;
    intervals_.erase(it);
    return true;
  }

  HoldingSet reflected() const {
    std::vector<Interval> out;
    out.reserve(intervals_.size());
    for (auto it = intervals_.rbegin(); it != intervals_.rend(); ++it) out.push_back(reflect(*it));
    HoldingSet h;
    h.intervals_ = std::move(out);
    return h;
  }

  // Portions at or before t / at or after t.
  HoldingSet clipped_to(const Interval& window) const {
    HoldingSet h;
    for (const Interval& iv : intervals_) {
      if (auto part = intersect(iv, window)) h.intervals_.push_back(*part);
    }
    return h;
  }

  std::optional<Endpoint> max_right() const {
    if (intervals_.empty()) return std::nullopt;
    return intervals_.back().right();
  }
  std::optional<Endpoint> min_left() const {
    if (intervals_.empty()) return std::nullopt;
    return intervals_.front().left();
  }

 private:
  std::vector<Interval> intervals_;
};

}  // namespace dmtl
