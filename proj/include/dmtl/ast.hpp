#pragma once

#include <cassert>
#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dmtl/interval.hpp"

namespace dmtl {

struct Term {
  enum class Kind { Variable, Constant } kind;
  std::string name;

  static Term variable(std::string n) { return {Kind::Variable, std::move(n)}; }
  static Term constant(std::string n) { return {Kind::Constant, std::move(n)}; }
  bool is_variable() const { return kind == Kind::Variable; }
  auto operator<=>(const Term&) const = default;
};

// Ground relational atom, the dataset index key.
struct GroundAtom {
  std::string predicate;
  std::vector<std::string> args;

  auto operator<=>(const GroundAtom&) const = default;
  std::string str() const {
    if (args.empty()) return predicate;
    std::string s = predicate + "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) s += ',';
      s += args[i];
    }
    s += ')';
    return s;
  }
};

struct RelationalAtom {
  std::string predicate;
  std::vector<Term> terms;

  auto operator<=>(const RelationalAtom&) const = default;

  bool is_ground() const {
    for (const Term& t : terms)
      if (t.is_variable()) return false;
    return true;
  }
  GroundAtom ground() const {
    assert(is_ground());
    GroundAtom g{predicate, {}};
    g.args.reserve(terms.size());
    for (const Term& t : terms) g.args.push_back(t.name);
    return g;
  }
};

enum class MetricOp {
  Top,
  Bottom,
  Rel,
  DiamondMinus,
  DiamondPlus,
  BoxMinus,
  BoxPlus,
  Since,
  Until,
};

inline bool is_past_op(MetricOp op) {
  return op == MetricOp::DiamondMinus || op == MetricOp::BoxMinus || op == MetricOp::Since;
}
inline bool is_future_op(MetricOp op) {
  return op == MetricOp::DiamondPlus || op == MetricOp::BoxPlus || op == MetricOp::Until;
}

// Metric atom over the grammar
//   M := Top | Bottom | P(s) | <op>[range] M | M Since[range] M | M Until[range] M.
class MetricAtom {
 public:
  static MetricAtom top() { return MetricAtom(MetricOp::Top); }
  static MetricAtom bottom() { return MetricAtom(MetricOp::Bottom); }
  static MetricAtom rel(RelationalAtom a) {
    MetricAtom m(MetricOp::Rel);
    m.rel_ = std::move(a);
    return m;
  }
  static MetricAtom unary(MetricOp op, Interval range, MetricAtom arg) {
    assert(op == MetricOp::DiamondMinus || op == MetricOp::DiamondPlus ||
           op == MetricOp::BoxMinus || op == MetricOp::BoxPlus);
    MetricAtom m(op);
    m.range_ = std::move(range);
    m.args_.push_back(std::move(arg));
    return m;
  }
  static MetricAtom binary(MetricOp op, Interval range, MetricAtom lhs, MetricAtom rhs) {
    assert(op == MetricOp::Since || op == MetricOp::Until);
    MetricAtom m(op);
    m.range_ = std::move(range);
    m.args_.push_back(std::move(lhs));
    m.args_.push_back(std::move(rhs));
    return m;
  }

  MetricOp op() const { return op_; }
  const Interval& range() const {
    assert(range_.has_value());
    return *range_;
  }
  const RelationalAtom& relational() const {
    assert(op_ == MetricOp::Rel);
    return *rel_;
  }
  const MetricAtom& arg() const {
    assert(args_.size() == 1);
    return args_[0];
  }
  const MetricAtom& lhs() const {
    assert(args_.size() == 2);
    return args_[0];
  }
  const MetricAtom& rhs() const {
    assert(args_.size() == 2);
    return args_[1];
  }

  bool operator==(const MetricAtom& o) const {
    return op_ == o.op_ && range_ == o.range_ && rel_ == o.rel_ && args_ == o.args_;
  }

  bool is_ground() const {
    if (op_ == MetricOp::Rel) return rel_->is_ground();
    for (const MetricAtom& a : args_)
      if (!a.is_ground()) return false;
    return true;
  }

  // Visits every relational atom; `in_since_until_lhs` is sticky below a left
  // operand of Since/Until.
  void visit_relational(const std::function<void(const RelationalAtom&, bool)>& fn,
                        bool in_since_until_lhs = false) const {
    switch (op_) {
      case MetricOp::Rel:
        fn(*rel_, in_since_until_lhs);
        return;
      case MetricOp::Top:
      case MetricOp::Bottom:
        return;
      case MetricOp::Since:
      case MetricOp::Until:
        args_[0].visit_relational(fn, true);
        args_[1].visit_relational(fn, in_since_until_lhs);
        return;
      default:
        args_[0].visit_relational(fn, in_since_until_lhs);
        return;
    }
  }

  void visit_ops(const std::function<void(MetricOp)>& fn) const {
    fn(op_);
    for (const MetricAtom& a : args_) a.visit_ops(fn);
  }

  std::set<std::string> variables() const {
    std::set<std::string> vars;
    visit_relational([&](const RelationalAtom& a, bool) {
      for (const Term& t : a.terms)
        if (t.is_variable()) vars.insert(t.name);
    });
    return vars;
  }

  std::string str() const {
    switch (op_) {
      case MetricOp::Top: return "Top";
      case MetricOp::Bottom: return "Bottom";
      case MetricOp::Rel: {
        if (rel_->terms.empty()) return rel_->predicate;
        std::string s = rel_->predicate + "(";
        for (std::size_t i = 0; i < rel_->terms.size(); ++i) {
          if (i) s += ',';
          const Term& t = rel_->terms[i];
          s += t.is_variable() ? t.name : '"' + t.name + '"';
        }
        return s + ")";
      }
      case MetricOp::Since:
      case MetricOp::Until: {
        std::string s = operand_str(args_[0]);
        s += op_ == MetricOp::Since ? " Since" : " Until";
        s += range_->str();
        s += ' ';
        s += operand_str(args_[1]);
        return s;
      }
      default: {
        std::string s = op_keyword(op_);
        s += range_->str();
        s += ' ';
        s += operand_str(args_[0]);
        return s;
      }
    }
  }

  static const char* op_keyword(MetricOp op) {
    switch (op) {
      case MetricOp::DiamondMinus: return "Diamondminus";
      case MetricOp::DiamondPlus: return "Diamondplus";
      case MetricOp::BoxMinus: return "Boxminus";
      case MetricOp::BoxPlus: return "Boxplus";
      case MetricOp::Since: return "Since";
      case MetricOp::Until: return "Until";
      default: return "";
    }
  }

 private:
  explicit MetricAtom(MetricOp op) : op_(op) {}

  // Since/Until operands that are themselves infix chains need parentheses.
  static std::string operand_str(const MetricAtom& a) {
    if (a.op_ == MetricOp::Since || a.op_ == MetricOp::Until) return "(" + a.str() + ")";
    return a.str();
  }

  MetricOp op_;
  std::optional<Interval> range_;
  std::optional<RelationalAtom> rel_;
  std::vector<MetricAtom> args_;
};

struct Rule {
  MetricAtom head = MetricAtom::top();
  std::vector<MetricAtom> body;
  std::string name;  // r1, r2, ... in program order

  std::string str() const {
    std::string s = head.str() + " :- ";
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (i) s += ", ";
      s += body[i].str();
    }
    return s + ".";
  }
};

struct Program {
  std::vector<Rule> rules;
  std::map<std::string, std::size_t> arities;

  std::string str() const {
    std::string s;
    for (const Rule& r : rules) s += r.str() + "\n";
    return s;
  }

  std::set<std::string> predicates() const {
    std::set<std::string> out;
    for (const auto& [p, a] : arities) out.insert(p);
    return out;
  }

  std::set<std::string> constants() const {
    std::set<std::string> out;
    for (const Rule& r : rules) {
      auto collect = [&](const RelationalAtom& a, bool) {
        for (const Term& t : a.terms)
          if (!t.is_variable()) out.insert(t.name);
      };
      r.head.visit_relational(collect);
      for (const MetricAtom& b : r.body) b.visit_relational(collect);
    }
    return out;
  }
};

// The unique relational atom nested inside a head (head grammar:
// Top | P(s) | Boxminus M' | Boxplus M'); nullptr for Top heads.
inline const RelationalAtom* head_relational(const MetricAtom& head) {
  const MetricAtom* cur = &head;
  while (cur->op() == MetricOp::BoxMinus || cur->op() == MetricOp::BoxPlus) cur = &cur->arg();
  if (cur->op() == MetricOp::Rel) return &cur->relational();
  return nullptr;
}

struct SafetyReport {
  bool ok = true;
  std::vector<std::string> unbound;  // head variables with no admissible body occurrence
};

// A rule is safe when every head variable occurs in the body outside every
// left operand of Since/Until.
inline SafetyReport check_safety(const Rule& r) {
  std::set<std::string> bound;
  for (const MetricAtom& b : r.body) {
    b.visit_relational([&](const RelationalAtom& a, bool in_lhs) {
      if (in_lhs) return;
      for (const Term& t : a.terms)
        if (t.is_variable()) bound.insert(t.name);
    });
  }
  SafetyReport report;
  for (const std::string& v : r.head.variables()) {
    if (!bound.count(v)) {
      report.ok = false;
      report.unbound.push_back(v);
    }
  }
  return report;
}

enum class Propagation { Forward, Backward, Both, Neither };

struct PropagationFlags {
  bool forward = false;
  bool backward = false;
};

inline PropagationFlags propagation_flags(const Rule& r) {
  bool top_bottom = false;
  bool body_past_only = true, body_future_only = true;
  bool head_future_only = true, head_past_only = true;
  auto scan = [&](const MetricAtom& m, bool in_head) {
    m.visit_ops([&](MetricOp op) {
      if (op == MetricOp::Top || op == MetricOp::Bottom) top_bottom = true;
      if (in_head) {
        if (is_past_op(op)) head_future_only = false;
        if (is_future_op(op)) head_past_only = false;
      } else {
        if (is_future_op(op)) body_past_only = false;
        if (is_past_op(op)) body_future_only = false;
      }
    });
  };
  scan(r.head, true);
  for (const MetricAtom& b : r.body) scan(b, false);
  PropagationFlags f;
  f.forward = !top_bottom && body_past_only && head_future_only;
  f.backward = !top_bottom && body_future_only && head_past_only;
  return f;
}

inline Propagation classify_propagation(const Rule& r) {
  PropagationFlags f = propagation_flags(r);
  if (f.forward && f.backward) return Propagation::Both;
  if (f.forward) return Propagation::Forward;
  if (f.backward) return Propagation::Backward;
  return Propagation::Neither;
}

inline bool is_forward_propagating(const Program& p) {
  for (const Rule& r : p.rules)
    if (!propagation_flags(r).forward) return false;
  return true;
}
inline bool is_backward_propagating(const Program& p) {
  for (const Rule& r : p.rules)
    if (!propagation_flags(r).backward) return false;
  return true;
}

}  // namespace dmtl
