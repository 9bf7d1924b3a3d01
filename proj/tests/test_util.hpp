#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dmtl/dmtl.hpp"

namespace dmtl::testutil {

inline Interval iv(const std::string& text) {
  auto parsed = Interval::parse(text);
  if (!parsed) throw std::invalid_argument("bad interval literal: " + text);
  return *parsed;
}

inline Rational rat(const std::string& text) {
  auto parsed = Rational::parse(text);
  if (!parsed) throw std::invalid_argument("bad rational literal: " + text);
  return *parsed;
}

inline GroundAtom ga(std::string pred, std::vector<std::string> args) {
  return GroundAtom{std::move(pred), std::move(args)};
}

// Deterministic source of small random values.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  long below(long n) { return static_cast<long>(engine_() % static_cast<std::uint64_t>(n)); }
  bool chance(long percent) { return below(100) < percent; }
  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

struct GenOptions {
  std::size_t max_rules = 6;
  std::size_t max_predicates = 3;
  std::size_t max_arity = 2;
  long max_range = 3;          // operator-range right endpoints
  std::size_t max_body = 3;
  std::size_t max_facts = 20;
  long window_lo = 0;
  long window_hi = 10;
  std::size_t max_constants = 4;
  bool allow_since_until = true;
  bool forward_only = false;   // restrict to past bodies / future heads
};

// Integer-endpoint operator range within [0, max_range].
inline Interval random_range(Rng& rng, long max_range) {
  long a = rng.below(max_range + 1);
  long b = a + rng.below(max_range - a + 1);
  bool lc = true, rc = true;
  if (a < b) {
    lc = rng.chance(75);
    rc = rng.chance(75);
    if (!lc && !rc && b - a == 0) lc = true;
  }
  return Interval(Endpoint::finite(Rational(a)), Endpoint::finite(Rational(b)), lc, rc);
}

inline Interval random_fact_interval(Rng& rng, long lo, long hi) {
  long a = lo + rng.below(hi - lo + 1);
  long b = a + rng.below(hi - a + 1);
  if (a == b) return Interval::punctual(Rational(a));
  bool lc = rng.chance(80), rc = rng.chance(80);
  return Interval(Endpoint::finite(Rational(a)), Endpoint::finite(Rational(b)), lc, rc);
}

struct Vocabulary {
  std::vector<PredicateSchema> predicates;  // fixed arities
  std::vector<std::string> constants;
  std::vector<std::string> variables{"x", "y", "z"};
};

inline Vocabulary random_vocabulary(Rng& rng, const GenOptions& opt) {
  Vocabulary v;
  std::size_t npreds = 1 + static_cast<std::size_t>(rng.below(static_cast<long>(opt.max_predicates)));
  for (std::size_t i = 0; i < npreds; ++i)
    v.predicates.push_back({"P" + std::to_string(i),
                            1 + static_cast<std::size_t>(rng.below(static_cast<long>(opt.max_arity)))});
  std::size_t nconsts = 2 + static_cast<std::size_t>(rng.below(static_cast<long>(opt.max_constants - 1)));
  for (std::size_t i = 0; i < nconsts; ++i) v.constants.push_back(std::string(1, static_cast<char>('a' + i)));
  return v;
}

inline RelationalAtom random_relational(Rng& rng, const Vocabulary& v) {
  const PredicateSchema& schema = v.predicates[static_cast<std::size_t>(rng.below(static_cast<long>(v.predicates.size())))];
  RelationalAtom atom{schema.name, {}};
  for (std::size_t i = 0; i < schema.arity; ++i) {
    if (rng.chance(20))
      atom.terms.push_back(Term::constant(v.constants[static_cast<std::size_t>(rng.below(static_cast<long>(v.constants.size())))]));
    else
      atom.terms.push_back(Term::variable(v.variables[static_cast<std::size_t>(rng.below(static_cast<long>(v.variables.size())))]));
  }
  return atom;
}

inline MetricAtom random_body_atom(Rng& rng, const Vocabulary& v, const GenOptions& opt) {
  long roll = rng.below(100);
  auto leaf = [&] { return MetricAtom::rel(random_relational(rng, v)); };
  if (!opt.forward_only && roll < 5) return MetricAtom::top();
  if (roll < 45) return leaf();
  if (roll < 85 || !opt.allow_since_until) {
    MetricOp op;
    if (opt.forward_only) {
      op = rng.chance(50) ? MetricOp::DiamondMinus : MetricOp::BoxMinus;
    } else {
      static const MetricOp kOps[] = {MetricOp::DiamondMinus, MetricOp::DiamondPlus,
                                      MetricOp::BoxMinus, MetricOp::BoxPlus};
      op = kOps[rng.below(4)];
    }
    MetricAtom inner = rng.chance(15) ? random_body_atom(rng, v, opt) : leaf();
    return MetricAtom::unary(op, random_range(rng, opt.max_range), std::move(inner));
  }
  MetricOp op = opt.forward_only ? MetricOp::Since
                                 : (rng.chance(50) ? MetricOp::Since : MetricOp::Until);
  return MetricAtom::binary(op, random_range(rng, opt.max_range), leaf(), leaf());
}

// Builds a safe rule: the head only uses variables bound outside Since/Until
// left operands; if none are available the head is ground.
inline Rule random_rule(Rng& rng, const Vocabulary& v, const GenOptions& opt) {
  Rule rule;
  std::size_t body_size = 1 + static_cast<std::size_t>(rng.below(static_cast<long>(opt.max_body)));
  for (std::size_t i = 0; i < body_size; ++i) rule.body.push_back(random_body_atom(rng, v, opt));

  std::set<std::string> allowed;
  for (const MetricAtom& b : rule.body) {
    b.visit_relational([&](const RelationalAtom& a, bool in_lhs) {
      if (in_lhs) return;
      for (const Term& t : a.terms)
        if (t.is_variable()) allowed.insert(t.name);
    });
  }
  const PredicateSchema& schema = v.predicates[static_cast<std::size_t>(rng.below(static_cast<long>(v.predicates.size())))];
  RelationalAtom head_atom{schema.name, {}};
  std::vector<std::string> pool(allowed.begin(), allowed.end());
  for (std::size_t i = 0; i < schema.arity; ++i) {
    if (!pool.empty() && rng.chance(75))
      head_atom.terms.push_back(Term::variable(pool[static_cast<std::size_t>(rng.below(static_cast<long>(pool.size())))]));
    else
      head_atom.terms.push_back(Term::constant(v.constants[static_cast<std::size_t>(rng.below(static_cast<long>(v.constants.size())))]));
  }
  MetricAtom head = MetricAtom::rel(std::move(head_atom));
  if (rng.chance(40)) {
    MetricOp op = opt.forward_only ? MetricOp::BoxPlus
                                   : (rng.chance(50) ? MetricOp::BoxPlus : MetricOp::BoxMinus);
    head = MetricAtom::unary(op, random_range(rng, opt.max_range), std::move(head));
  }
  rule.head = std::move(head);
  return rule;
}

inline Program random_program(Rng& rng, const Vocabulary& v, const GenOptions& opt) {
  Program p;
  std::size_t nrules = 1 + static_cast<std::size_t>(rng.below(static_cast<long>(opt.max_rules)));
  for (std::size_t i = 0; i < nrules; ++i) {
    Rule r = random_rule(rng, v, opt);
    r.name = "r" + std::to_string(i + 1);
    p.rules.push_back(std::move(r));
  }
  for (const Rule& r : p.rules) {
    auto record = [&](const RelationalAtom& a, bool) { p.arities.emplace(a.predicate, a.terms.size()); };
    r.head.visit_relational(record);
    for (const MetricAtom& b : r.body) b.visit_relational(record);
  }
  return p;
}

inline Dataset random_dataset(Rng& rng, const Vocabulary& v, const GenOptions& opt) {
  Dataset d;
  std::size_t nfacts = 1 + static_cast<std::size_t>(rng.below(static_cast<long>(opt.max_facts)));
  for (std::size_t i = 0; i < nfacts; ++i) {
    const PredicateSchema& schema = v.predicates[static_cast<std::size_t>(rng.below(static_cast<long>(v.predicates.size())))];
    GroundAtom atom{schema.name, {}};
    for (std::size_t a = 0; a < schema.arity; ++a)
      atom.args.push_back(v.constants[static_cast<std::size_t>(rng.below(static_cast<long>(v.constants.size())))]);
    d.insert({std::move(atom), random_fact_interval(rng, opt.window_lo, opt.window_hi)});
  }
  return d;
}

// D' after exactly k iterations; once a fixpoint is reached the store no
// longer changes, so the last snapshot stands in for later ones.
inline const Dataset& snapshot_at(const MaterialiseResult& result, std::size_t k) {
  if (result.snapshots.empty()) return result.dataset;
  std::size_t index = std::min(k, result.snapshots.size()) - 1;
  return result.snapshots[index];
}

}  // namespace dmtl::testutil
