#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dmtl/ast.hpp"
#include "dmtl/dataset.hpp"
#include "dmtl/reasoner.hpp"

namespace dmtl {

// Pointwise truth table over the grid of integers and half-integers inside an
// integer window. Quantifiers of the metric semantics are evaluated literally
// over grid points; for integer-endpoint inputs the grid is fine enough to
// decide any derived interval inside the window.
class GridInterpretation {
 public:
  GridInterpretation(long lo, long hi) : lo_(lo), hi_(hi) {
    if (lo >= hi) throw std::invalid_argument("grid window must be non-degenerate");
  }

  static GridInterpretation load(const Dataset& d, long lo, long hi) {
    GridInterpretation g(lo, hi);
    for (const Fact& f : d.facts()) {
      if (!f.interval.left().is_finite() || !f.interval.right().is_finite() ||
          !f.interval.left().value().is_integer() || !f.interval.right().value().is_integer())
        throw std::invalid_argument("grid oracle requires integer endpoints: " + f.str());
      auto& row = g.row(f.atom);
      for (std::size_t i = 0; i < g.point_count(); ++i)
        if (f.interval.contains(g.point(i))) row[i] = 1;
    }
    return g;
  }

  long window_lo() const { return lo_; }
  long window_hi() const { return hi_; }
  std::size_t point_count() const { return static_cast<std::size_t>(hi_ - lo_) * 2 + 1; }
  Rational point(std::size_t index) const {
    return Rational(lo_) + Rational(static_cast<long>(index), 2);
  }
  std::optional<std::size_t> index_of(const Rational& t) const {
    Rational doubled = (t - Rational(lo_)) * Rational(2);
    if (!doubled.is_integer()) return std::nullopt;
    long i = doubled.to_long();
    if (i < 0 || i >= static_cast<long>(point_count())) return std::nullopt;
    return static_cast<std::size_t>(i);
  }

  bool truth(const GroundAtom& atom, std::size_t index) const {
    auto it = truth_.find(atom);
    return it != truth_.end() && it->second[index] != 0;
  }

  // Literal Table-1 evaluation of a ground metric atom at a grid point.
  bool holds(const MetricAtom& m, const Rational& t) const {
    auto index = index_of(t);
    if (!index) throw std::invalid_argument("not a grid point: " + t.str());
    std::unordered_map<std::string, std::vector<char>> memo;
    return eval_vector(m, memo)[*index] != 0;
  }

  // Truth at every grid point in one evaluation pass.
  std::vector<char> eval_all(const MetricAtom& m) const {
    std::unordered_map<std::string, std::vector<char>> memo;
    return eval_vector(m, memo);
  }

  // One application of the immediate consequence operator, grounded over the
  // active domain of the program and the stored atoms.
  GridInterpretation step(const Program& p, std::size_t enumeration_limit = 1000000) const {
    GridInterpretation next = *this;
    std::vector<std::string> domain;
    {
      std::set<std::string> constants = p.constants();
      for (const auto& [atom, row] : truth_)
        for (const std::string& c : atom.args) constants.insert(c);
      domain.assign(constants.begin(), constants.end());
    }
    std::unordered_map<std::string, std::vector<char>> memo;
    for (const Rule& rule : p.rules) {
      std::vector<std::string> vars;
      {
        std::set<std::string> var_set = rule.head.variables();
        for (const MetricAtom& b : rule.body)
          for (const std::string& v : b.variables()) var_set.insert(v);
        vars.assign(var_set.begin(), var_set.end());
      }
      double combos = 1;
      for (std::size_t i = 0; i < vars.size(); ++i) combos *= static_cast<double>(domain.size());
      if (combos > static_cast<double>(enumeration_limit))
        throw EnumerationLimitError("grid oracle grounding exceeded the enumeration limit");
      if (!vars.empty() && domain.empty()) continue;
      std::vector<std::size_t> pick(vars.size(), 0);
      while (true) {
        Substitution subst;
        for (std::size_t i = 0; i < vars.size(); ++i) subst.mapping[vars[i]] = domain[pick[i]];
        apply_ground_rule(rule, subst, memo, next);
        std::size_t i = 0;
        for (; i < vars.size(); ++i) {
          if (++pick[i] < domain.size()) break;
          pick[i] = 0;
        }
        if (i == vars.size() || vars.empty()) break;
      }
    }
    return next;
  }

  struct Mismatch {
    GroundAtom atom;
    Rational t;
    bool engine = false;
    bool oracle = false;
    std::string str() const {
      return atom.str() + " at " + t.str() + ": engine=" + (engine ? "true" : "false") +
             " oracle=" + (oracle ? "true" : "false");
    }
  };

  // Points in the safe region where the engine dataset and the grid disagree.
  std::vector<Mismatch> compare(const Dataset& engine, const Interval& safe_region) const {
    std::set<GroundAtom> atoms;
    for (const auto& [atom, row] : truth_) atoms.insert(atom);
    for (const auto& [atom, holding] : engine.index()) atoms.insert(atom);
    std::vector<Mismatch> out;
    for (const GroundAtom& atom : atoms) {
      for (std::size_t i = 0; i < point_count(); ++i) {
        Rational t = point(i);
        if (!safe_region.contains(t)) continue;
        bool oracle_truth = truth(atom, i);
        bool engine_truth = engine.entails(atom, Interval::punctual(t));
        if (oracle_truth != engine_truth) out.push_back({atom, t, engine_truth, oracle_truth});
      }
    }
    return out;
  }

  std::set<GroundAtom> atoms() const {
    std::set<GroundAtom> out;
    for (const auto& [atom, row] : truth_) out.insert(atom);
    return out;
  }

  void set_truth(const GroundAtom& atom, std::size_t index, bool value) {
    row(atom)[index] = value ? 1 : 0;
  }

  bool operator==(const GridInterpretation& o) const {
    return lo_ == o.lo_ && hi_ == o.hi_ && truth_ == o.truth_;
  }

 private:
  // Indices j whose offset from i can satisfy gap-in-range; callers still do
  // the exact membership test. Ranges are non-negative, so past witnesses sit
  // at or before i and future ones at or after.
  struct IndexRange {
    long lo, hi;
    struct Iter {
      long v;
      long operator*() const { return v; }
      Iter& operator++() { ++v; return *this; }
      bool operator!=(const Iter& o) const { return v != o.v; }
    };
    Iter begin() const { return {lo}; }
    Iter end() const { return {hi + 1}; }
  };

  IndexRange witness_indices(std::size_t i, bool past, const Interval& range) const {
    long n = static_cast<long>(point_count());
    long anchor = static_cast<long>(i);
    long near = (range.left().value() * Rational(2)).ceil_long();
    long lo, hi;
    if (range.right().is_finite()) {
      long far = (range.right().value() * Rational(2)).floor_long();
      lo = past ? anchor - far : anchor + near;
      hi = past ? anchor - near : anchor + far;
    } else {
      lo = past ? 0 : anchor + near;
      hi = past ? anchor - near : n - 1;
    }
    lo = std::max(lo, 0L);
    hi = std::min(hi, n - 1);
    if (hi < lo) hi = lo - 1;
    return {lo, hi};
  }

  // --- Cell model -----------------------------------------------------------
  // Even cell 2j is the grid point j; odd cell 2j+1 is the open segment
  // between points j and j+1. Truth vectors over grid points determine
  // segment truth: an integer-endpoint union is constant on each open unit
  // interval, whose value the half-integer representative carries.
  std::size_t cell_count() const { return 2 * point_count() - 1; }

  bool cell_truth(const std::vector<char>& v, std::size_t c) const {
    if (c % 2 == 0) return v[c / 2] != 0;
    std::size_t j = (c - 1) / 2;
    return v[j % 2 == 1 ? j : j + 1] != 0;
  }

  struct Window {
    std::optional<Rational> lo, hi;  // nullopt: unbounded on that side
    bool lo_closed = false, hi_closed = false;
  };

  Window quantifier_window(std::size_t i, bool past, const Interval& range) const {
    Rational t = point(i);
    Window w;
    const Rational& a = range.left().value();
    if (past) {
      w.hi = t - a;
      w.hi_closed = range.left_closed();
      if (range.right().is_finite()) {
        w.lo = t - range.right().value();
        w.lo_closed = range.right_closed();
      }
    } else {
      w.lo = t + a;
      w.lo_closed = range.left_closed();
      if (range.right().is_finite()) {
        w.hi = t + range.right().value();
        w.hi_closed = range.right_closed();
      }
    }
    return w;
  }

  bool cell_in_window(const Window& w, long c) const {
    if (c % 2 == 0) {
      Rational p = point(static_cast<std::size_t>(c / 2));
      if (w.lo && (p < *w.lo || (p == *w.lo && !w.lo_closed))) return false;
      if (w.hi && (p > *w.hi || (p == *w.hi && !w.hi_closed))) return false;
      return true;
    }
    // Open segment (p_j, p_{j+1}): a window with grid-aligned endpoints either
    // misses it or contains it whole, so overlap is containment.
    Rational left = point(static_cast<std::size_t>((c - 1) / 2));
    Rational right = point(static_cast<std::size_t>((c + 1) / 2));
    if (w.lo && !(*w.lo < right)) return false;
    if (w.hi && !(*w.hi > left)) return false;
    return true;
  }

  // Candidate cells for a quantifier anchored at point i: the point-index
  // bounds widened by one cell on each side.
  IndexRange cell_candidates(std::size_t i, bool past, const Interval& range) const {
    IndexRange points = witness_indices(i, past, range);
    long lo = 2 * points.lo - 1;
    long hi = 2 * points.hi + 1;
    long last = static_cast<long>(cell_count()) - 1;
    lo = std::max(lo, 0L);
    hi = std::min(hi, last);
    if (hi < lo) hi = lo - 1;
    return {lo, hi};
  }

  std::vector<char>& row(const GroundAtom& atom) {
    auto it = truth_.find(atom);
    if (it == truth_.end())
      it = truth_.emplace(atom, std::vector<char>(point_count(), 0)).first;
    return it->second;
  }

  // Truth vector of a ground metric atom, one entry per grid point, with the
  // Table-1 quantifiers ranging over grid points in the window.
  const std::vector<char>& eval_vector(const MetricAtom& m,
                                       std::unordered_map<std::string, std::vector<char>>& memo) const {
    std::string key = m.str();
    auto found = memo.find(key);
    if (found != memo.end()) return found->second;
    std::size_t n = point_count();
    std::vector<char> out(n, 0);
    switch (m.op()) {
      case MetricOp::Top:
        std::fill(out.begin(), out.end(), 1);
        break;
      case MetricOp::Bottom:
        break;
      case MetricOp::Rel: {
        auto it = truth_.find(m.relational().ground());
        if (it != truth_.end()) out = it->second;
        break;
      }
      case MetricOp::DiamondMinus:
      case MetricOp::DiamondPlus: {
        const std::vector<char>& arg = eval_vector(m.arg(), memo);
        bool past = m.op() == MetricOp::DiamondMinus;
        for (std::size_t i = 0; i < n; ++i) {
          Window w = quantifier_window(i, past, m.range());
          for (long c : cell_candidates(i, past, m.range())) {
            if (cell_in_window(w, c) && cell_truth(arg, static_cast<std::size_t>(c))) {
              out[i] = 1;
              break;
            }
          }
        }
        break;
      }
      case MetricOp::BoxMinus:
      case MetricOp::BoxPlus: {
        const std::vector<char>& arg = eval_vector(m.arg(), memo);
        bool past = m.op() == MetricOp::BoxMinus;
        for (std::size_t i = 0; i < n; ++i) {
          Rational t = point(i);
          // Points outside the window are false, so a quantifier window that
          // sticks out of the grid can never be satisfied throughout.
          bool protrudes =
              !m.range().right().is_finite() ||
              (past ? t - m.range().right().value() < Rational(lo_)
                    : Rational(hi_) < t + m.range().right().value());
          bool all = !protrudes;
          if (all) {
            Window w = quantifier_window(i, past, m.range());
            for (long c : cell_candidates(i, past, m.range())) {
              if (cell_in_window(w, c) && !cell_truth(arg, static_cast<std::size_t>(c))) {
                all = false;
                break;
              }
            }
          }
          out[i] = all ? 1 : 0;
        }
        break;
      }
      case MetricOp::Since:
      case MetricOp::Until: {
        const std::vector<char>& lhs = eval_vector(m.lhs(), memo);
        const std::vector<char>& rhs = eval_vector(m.rhs(), memo);
        bool past = m.op() == MetricOp::Since;
        for (std::size_t i = 0; i < n; ++i) {
          Window w = quantifier_window(i, past, m.range());
          long anchor_cell = static_cast<long>(2 * i);
          for (long c : cell_candidates(i, past, m.range())) {
            if (!cell_in_window(w, c) || !cell_truth(rhs, static_cast<std::size_t>(c))) continue;
            // All cells strictly between the witness and the anchor must hold
            // the left operand; a segment witness includes its own cell (the
            // open tail between t' and the segment edge stays in the cell).
            long from, to;  // inclusive cell range to check
            if (past) {
              from = c % 2 == 1 ? c : c + 1;
              to = anchor_cell - 1;
            } else {
              from = anchor_cell + 1;
              to = c % 2 == 1 ? c : c - 1;
            }
            bool filled = true;
            for (long k = from; k <= to && filled; ++k)
              if (!cell_truth(lhs, static_cast<std::size_t>(k))) filled = false;
            if (filled) {
              out[i] = 1;
              break;
            }
          }
        }
        break;
      }
    }
    return memo.emplace(std::move(key), std::move(out)).first->second;
  }

  // Marks the head's relational consequence for every body-true cell: truth on
  // the open segments between grid points forces head truth of its own (a box
  // head with an open fractional range projects a segment where no grid point
  // of the body does).
  void apply_ground_rule(const Rule& rule, const Substitution& subst,
                         std::unordered_map<std::string, std::vector<char>>& memo,
                         GridInterpretation& next) const {
    std::size_t n = point_count();
    std::vector<char> body(n, 1);
    for (const MetricAtom& b : rule.body) {
      const std::vector<char>& v = eval_vector(subst.apply(b), memo);
      for (std::size_t i = 0; i < n; ++i) body[i] = body[i] && v[i];
    }
    MetricAtom head = subst.apply(rule.head);
    for (std::size_t c = 0; c < cell_count(); ++c) {
      if (!cell_truth(body, c)) continue;
      Anchor anchor;
      if (c % 2 == 0) {
        anchor.lo = anchor.hi = point(c / 2);
        anchor.point = true;
      } else {
        anchor.lo = point((c - 1) / 2);
        anchor.hi = point((c + 1) / 2);
        anchor.point = false;
      }
      mark_head(head, anchor, next);
    }
  }

  // A point [t,t] or an open segment (lo,hi) of forced head truth.
  struct Anchor {
    Rational lo, hi;
    bool point = true;
  };

  void mark_head(const MetricAtom& head, const Anchor& anchor, GridInterpretation& next) const {
    switch (head.op()) {
      case MetricOp::Rel: {
        const GroundAtom atom = head.relational().ground();
        if (anchor.point) {
          auto index = next.index_of(anchor.lo);
          if (index) next.row(atom)[*index] = 1;
        } else {
          // A forced open segment marks the half-integer carrying its unit
          // interval; the total forced set has integer endpoints, so that
          // representative is itself forced.
          Rational rep = segment_representative(anchor.lo, anchor.hi);
          auto index = next.index_of(rep);
          if (index) next.row(atom)[*index] = 1;
        }
        return;
      }
      case MetricOp::BoxMinus:
      case MetricOp::BoxPlus: {
        bool past = head.op() == MetricOp::BoxMinus;
        const Interval& range = head.range();
        // Forced set of this level: anchor (+/-) range, Minkowski-style.
        Window forced;
        if (past) {
          if (range.right().is_finite()) {
            forced.lo = anchor.lo - range.right().value();
            forced.lo_closed = anchor.point && range.right_closed();
          }
          forced.hi = anchor.hi - range.left().value();
          forced.hi_closed = anchor.point && range.left_closed();
        } else {
          forced.lo = anchor.lo + range.left().value();
          forced.lo_closed = anchor.point && range.left_closed();
          if (range.right().is_finite()) {
            forced.hi = anchor.hi + range.right().value();
            forced.hi_closed = anchor.point && range.right_closed();
          }
        }
        for (long c : window_cells(forced)) {
          if (!cell_in_window(forced, c)) continue;
          Anchor inner;
          if (c % 2 == 0) {
            inner.lo = inner.hi = point(static_cast<std::size_t>(c / 2));
            inner.point = true;
          } else {
            inner.lo = point(static_cast<std::size_t>((c - 1) / 2));
            inner.hi = point(static_cast<std::size_t>((c + 1) / 2));
            inner.point = false;
          }
          mark_head(head.arg(), inner, next);
        }
        return;
      }
      default:
        return;  // Top heads force nothing
    }
  }

  Rational segment_representative(const Rational& lo, const Rational& hi) const {
    // The open segment (lo, hi) sits inside one unit interval (n, n+1); its
    // value is carried by n + 1/2, which is lo or hi depending on alignment.
    return lo.is_integer() ? hi : lo;
  }

  // Conservative cell range covering a window, clamped to the grid.
  IndexRange window_cells(const Window& w) const {
    long last = static_cast<long>(cell_count()) - 1;
    long lo_cell = 0, hi_cell = last;
    if (w.lo) {
      Rational offset = (*w.lo - Rational(lo_)) * Rational(2);
      lo_cell = std::max(0L, 2 * offset.floor_long() - 1);
    }
    if (w.hi) {
      Rational offset = (*w.hi - Rational(lo_)) * Rational(2);
      hi_cell = std::min(last, 2 * offset.ceil_long() + 1);
    }
    if (hi_cell < lo_cell) hi_cell = lo_cell - 1;
    return {lo_cell, hi_cell};
  }

  long lo_, hi_;
  std::map<GroundAtom, std::vector<char>> truth_;
};

// Maximum distance one immediate-consequence step can move information:
// deepest body reach plus head shift, maximised over rules. Nullopt when some
// range is unbounded.
inline std::optional<Rational> program_reach(const Program& p) {
  struct Walk {
    static std::optional<Rational> atom(const MetricAtom& m) {
      switch (m.op()) {
        case MetricOp::Top:
        case MetricOp::Bottom:
        case MetricOp::Rel:
          return Rational(0);
        case MetricOp::Since:
        case MetricOp::Until: {
          auto l = atom(m.lhs());
          auto r = atom(m.rhs());
          if (!l || !r) return std::nullopt;
          auto own = range_reach(m.range());
          if (!own) return std::nullopt;
          return *own + std::max(*l, *r);
        }
        default: {
          auto inner = atom(m.arg());
          auto own = range_reach(m.range());
          if (!inner || !own) return std::nullopt;
          return *own + *inner;
        }
      }
    }
    static std::optional<Rational> range_reach(const Interval& range) {
      if (!range.right().is_finite()) return std::nullopt;
      return range.right().value();
    }
  };
  Rational best(0);
  for (const Rule& r : p.rules) {
    Rational body(0);
    for (const MetricAtom& b : r.body) {
      auto reach = Walk::atom(b);
      if (!reach) return std::nullopt;
      body = std::max(body, *reach);
    }
    auto head = Walk::atom(r.head);
    if (!head) return std::nullopt;
    Rational total = body + *head;
    best = std::max(best, total);
  }
  return best;
}

// Window shrunk on both sides by k times the per-step reach; nullopt when the
// program has unbounded ranges or the window is too small.
inline std::optional<Interval> safe_region(const Program& p, long window_lo, long window_hi,
                                           std::size_t steps) {
  auto reach = program_reach(p);
  if (!reach) return std::nullopt;
  Rational margin = *reach * Rational(static_cast<long>(steps));
  Rational lo = Rational(window_lo) + margin;
  Rational hi = Rational(window_hi) - margin;
  if (hi < lo) return std::nullopt;
  return Interval::closed(lo, hi);
}

}  // namespace dmtl
