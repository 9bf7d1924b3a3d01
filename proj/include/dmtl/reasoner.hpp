#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dmtl/ast.hpp"
#include "dmtl/dataset.hpp"
#include "dmtl/evaluation.hpp"

namespace dmtl {

// Total assignment of active-domain constants to a rule's variables.
struct Substitution {
  std::map<std::string, std::string> mapping;

  const std::string* lookup(const std::string& var) const {
    auto it = mapping.find(var);
    return it == mapping.end() ? nullptr : &it->second;
  }

  RelationalAtom apply(const RelationalAtom& a) const {
    RelationalAtom out{a.predicate, {}};
    out.terms.reserve(a.terms.size());
    for (const Term& t : a.terms) {
      if (t.is_variable()) {
        const std::string* c = lookup(t.name);
        out.terms.push_back(c ? Term::constant(*c) : t);
      } else {
        out.terms.push_back(t);
      }
    }
    return out;
  }

  MetricAtom apply(const MetricAtom& m) const {
    switch (m.op()) {
      case MetricOp::Top:
      case MetricOp::Bottom:
        return m;
      case MetricOp::Rel:
        return MetricAtom::rel(apply(m.relational()));
      case MetricOp::Since:
      case MetricOp::Until:
        return MetricAtom::binary(m.op(), m.range(), apply(m.lhs()), apply(m.rhs()));
      default:
        return MetricAtom::unary(m.op(), m.range(), apply(m.arg()));
    }
  }
};

// One element of ins(r, D): per body atom, the ground atom and one maximal
// interval of its holding set.
struct RuleInstance {
  std::size_t rule_index = 0;
  Substitution subst;
  std::vector<std::pair<MetricAtom, Interval>> conjuncts;

  std::string key(const std::string& rule_name) const {
    std::string s = rule_name;
    for (const auto& [atom, iv] : conjuncts) {
      s += '|';
      s += atom.str();
      s += '@';
      s += iv.str();
    }
    return s;
  }
};

struct EnumerationLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IterationStats {
  std::size_t iteration = 0;
  std::size_t instances_enumerated = 0;
  std::size_t instances_applied = 0;
  std::size_t facts_derived = 0;
  std::size_t absorbed = 0;
  std::size_t extended = 0;
  std::size_t fresh = 0;
  std::size_t stored_facts = 0;
  double wall_ms = 0.0;
};

struct DerivationStats {
  std::vector<IterationStats> iterations;
  std::size_t peak_stored_facts = 0;

  std::size_t total_enumerated() const {
    std::size_t n = 0;
    for (const auto& it : iterations) n += it.instances_enumerated;
    return n;
  }
  std::size_t total_applied() const {
    std::size_t n = 0;
    for (const auto& it : iterations) n += it.instances_applied;
    return n;
  }
  std::size_t total_derived() const {
    std::size_t n = 0;
    for (const auto& it : iterations) n += it.facts_derived;
    return n;
  }

  static const char* csv_header() {
    return "iteration,enumerated,applied,derived,absorbed,extended,fresh,stored_facts,wall_ms";
  }

  void write_csv(std::ostream& os) const {
    os << csv_header() << '\n';
    for (const auto& it : iterations) {
      os << it.iteration << ',' << it.instances_enumerated << ',' << it.instances_applied << ','
         << it.facts_derived << ',' << it.absorbed << ',' << it.extended << ',' << it.fresh << ','
         << it.stored_facts << ',' << it.wall_ms << '\n';
    }
  }
};

struct PruneEvent {
  std::size_t iteration = 0;
  std::string rule;
  enum class Reason { NonRecursiveFragment, UnsatisfiableBodyAtom, StablePrefix, StableSuffix } reason;
  std::optional<Endpoint> bound;  // t_r for the prefix/suffix checks

  std::string describe() const {
    std::string why;
    switch (reason) {
      case Reason::NonRecursiveFragment: why = "non-recursive fragment complete"; break;
      case Reason::UnsatisfiableBodyAtom: why = "unsatisfiable non-recursive body atom"; break;
      case Reason::StablePrefix: why = "timeline stable up to t_r=" + bound->str(); break;
      case Reason::StableSuffix: why = "timeline stable from t_r=" + bound->str(); break;
    }
    return "iteration " + std::to_string(iteration) + ": removed " + rule + " (" + why + ")";
  }
};

struct ReasonerOptions {
  std::size_t enumeration_limit = 1000000;
  bool check_invariants = false;   // verify D' ++ N = D' ++ Delta at each loop head
  bool detect_repeats = false;     // record applied-instance keys across the run
  bool capture_iterations = false; // keep a snapshot of D' after every iteration
  std::function<void(const std::string&)> explain;  // pruning log sink
  std::set<std::string> never_prune;                // rule names exempt from pruning
};

struct MaterialiseResult {
  Dataset dataset;
  DerivationStats stats;
  bool reached_fixpoint = false;
  std::size_t iterations_run = 0;
  std::size_t repeated_instances = 0;
  std::size_t invariant_violations = 0;
  std::vector<Dataset> snapshots;                       // when capture_iterations
  std::vector<std::set<std::string>> applied_rules;     // rule names applied per iteration
  std::optional<std::size_t> flag_flip_iteration;       // optimised strategy only
  std::vector<PruneEvent> prune_events;                 // optimised strategy only
};

namespace detail {

// Per-round join index: tuples per predicate plus per-position buckets.
class JoinIndex {
 public:
  explicit JoinIndex(const Dataset& d) {
    for (const auto& [atom, holding] : d.index()) {
      Entry& e = entries_[atom.predicate];
      if (e.by_position.size() < atom.args.size()) e.by_position.resize(atom.args.size());
      e.tuples.push_back(&atom);
      for (std::size_t i = 0; i < atom.args.size(); ++i)
        e.by_position[i][atom.args[i]].push_back(&atom);
    }
  }

  std::size_t tuple_count(const std::string& pred) const {
    auto it = entries_.find(pred);
    return it == entries_.end() ? 0 : it->second.tuples.size();
  }

  // Enumerates tuples of `a`'s predicate consistent with the bound terms.
  template <typename Fn>
  void match(const RelationalAtom& a, const Substitution& subst, Fn&& fn) const {
    auto it = entries_.find(a.predicate);
    if (it == entries_.end()) return;
    const Entry& e = it->second;
    // Probe the first position bound to a constant, if any.
    const std::vector<const GroundAtom*>* candidates = &e.tuples;
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
      const std::string* value = a.terms[i].is_variable() ? subst.lookup(a.terms[i].name)
                                                          : &a.terms[i].name;
      if (value != nullptr && i < e.by_position.size()) {
        auto bucket = e.by_position[i].find(*value);
        if (bucket == e.by_position[i].end()) return;
        candidates = &bucket->second;
        break;
      }
    }
    for (const GroundAtom* tuple : *candidates) {
      if (tuple->args.size() != a.terms.size()) continue;
      if (consistent(a, subst, *tuple)) fn(*tuple);
    }
  }

  static bool consistent(const RelationalAtom& a, const Substitution& subst,
                         const GroundAtom& tuple) {
    std::map<std::string, std::string> local;
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
      const Term& t = a.terms[i];
      if (!t.is_variable()) {
        if (t.name != tuple.args[i]) return false;
        continue;
      }
      const std::string* bound = subst.lookup(t.name);
      if (bound != nullptr) {
        if (*bound != tuple.args[i]) return false;
        continue;
      }
      auto [it, fresh] = local.emplace(t.name, tuple.args[i]);
      if (!fresh && it->second != tuple.args[i]) return false;
    }
    return true;
  }

 private:
  struct Entry {
    std::vector<const GroundAtom*> tuples;
    std::vector<std::unordered_map<std::string, std::vector<const GroundAtom*>>> by_position;
  };
  std::unordered_map<std::string, Entry> entries_;
};

// Relational atoms of a body atom that any model must satisfy somewhere for
// the atom's holding set to be non-empty: everything reachable without
// entering a Since/Until left operand.
inline void required_relational(const MetricAtom& m, std::vector<const RelationalAtom*>& out) {
  switch (m.op()) {
    case MetricOp::Rel: out.push_back(&m.relational()); return;
    case MetricOp::Top:
    case MetricOp::Bottom: return;
    case MetricOp::Since:
    case MetricOp::Until: required_relational(m.rhs(), out); return;
    default: required_relational(m.arg(), out); return;
  }
}

struct JoinPlan {
  std::vector<const RelationalAtom*> join_atoms;   // drive the join
  std::vector<std::string> enumerated_vars;        // bound by active-domain enumeration
};

inline JoinPlan make_join_plan(const Rule& rule, const JoinIndex& index) {
  JoinPlan plan;
  for (const MetricAtom& b : rule.body) required_relational(b, plan.join_atoms);
  // Cheapest predicate first; later atoms are matched with bindings in place.
  std::stable_sort(plan.join_atoms.begin(), plan.join_atoms.end(),
                   [&](const RelationalAtom* a, const RelationalAtom* b) {
                     return index.tuple_count(a->predicate) < index.tuple_count(b->predicate);
                   });
  std::set<std::string> joined;
  for (const RelationalAtom* a : plan.join_atoms)
    for (const Term& t : a->terms)
      if (t.is_variable()) joined.insert(t.name);
  std::set<std::string> all;
  for (const MetricAtom& b : rule.body)
    for (const std::string& v : b.variables()) all.insert(v);
  for (const std::string& v : all)
    if (!joined.count(v)) plan.enumerated_vars.push_back(v);
  return plan;
}

template <typename Fn>
void enumerate_free(const JoinPlan& plan, const std::vector<std::string>& domain,
                    Substitution& subst, std::size_t var_index, std::size_t limit,
                    std::size_t& produced, Fn&& fn) {
  if (var_index == plan.enumerated_vars.size()) {
    if (++produced > limit)
      throw EnumerationLimitError(
          "active-domain enumeration of Since/Until left-operand variables exceeded the limit");
    fn(subst);
    return;
  }
  const std::string& var = plan.enumerated_vars[var_index];
  for (const std::string& c : domain) {
    subst.mapping[var] = c;
    enumerate_free(plan, domain, subst, var_index + 1, limit, produced, fn);
  }
  subst.mapping.erase(var);
}

template <typename Fn>
void join_rec(const JoinPlan& plan, const JoinIndex& index, const std::vector<std::string>& domain,
              std::size_t atom_index, Substitution& subst, std::size_t limit,
              std::size_t& produced, Fn&& fn) {
  if (atom_index == plan.join_atoms.size()) {
    enumerate_free(plan, domain, subst, 0, limit, produced, fn);
    return;
  }
  const RelationalAtom& atom = *plan.join_atoms[atom_index];
  index.match(atom, subst, [&](const GroundAtom& tuple) {
    std::vector<std::string> added;
    for (std::size_t i = 0; i < atom.terms.size(); ++i) {
      const Term& t = atom.terms[i];
      if (t.is_variable() && subst.lookup(t.name) == nullptr) {
        subst.mapping.emplace(t.name, tuple.args[i]);
        added.push_back(t.name);
      }
    }
    join_rec(plan, index, domain, atom_index + 1, subst, limit, produced, fn);
    for (const std::string& v : added) subst.mapping.erase(v);
  });
}

}  // namespace detail

// Active domain: constants of the program and dataset.
inline std::vector<std::string> active_domain(const Program& p, const Dataset& d) {
  std::set<std::string> all = p.constants();
  for (const std::string& c : d.constants()) all.insert(c);
  return std::vector<std::string>(all.begin(), all.end());
}

// Yields every substitution over the active domain whose join atoms match the
// dataset; callers filter on holding-set emptiness afterwards. Variables that
// occur only in Since/Until left operands range over the whole active domain.
template <typename Fn>
void for_each_substitution(const Rule& rule, const detail::JoinIndex& index,
                           const std::vector<std::string>& domain, std::size_t limit, Fn&& fn) {
  detail::JoinPlan plan = detail::make_join_plan(rule, index);
  Substitution subst;
  std::size_t produced = 0;
  detail::join_rec(plan, index, domain, 0, subst, limit, produced, fn);
}

inline std::vector<Substitution> ground_substitutions(const Rule& rule, const Program& p,
                                                      const Dataset& d,
                                                      std::size_t limit = 1000000) {
  detail::JoinIndex index(d);
  std::vector<std::string> domain = active_domain(p, d);
  std::vector<Substitution> out;
  EvalContext ctx(d);
  for_each_substitution(rule, index, domain, limit, [&](const Substitution& s) {
    for (const MetricAtom& b : rule.body)
      if (ctx.eval(s.apply(b)).empty()) return;
    out.push_back(s);
  });
  return out;
}

namespace detail {

struct StepSink {
  IterationStats* stats = nullptr;
  Dataset* derived = nullptr;
  std::set<std::string>* rules_applied = nullptr;
  std::unordered_set<std::string>* seen_instances = nullptr;  // non-repetition instrumentation
  std::size_t* repeats = nullptr;
};

// One round of rule application. With `delta` and `previous` present this is
// the semi-naive one-step operator: only instances with some conjunct not
// entailed by the previous partial materialisation are applied. An atom whose
// ground subatoms are all untouched by `delta` holds exactly as it did in
// `previous`, which the skip heuristics below exploit.
inline void apply_rules_once(const Program& program, const std::vector<std::size_t>& active,
                             const Dataset& data, const Dataset* delta, const Dataset* previous,
                             const ReasonerOptions& options, const StepSink& sink) {
  JoinIndex index(data);
  std::vector<std::string> domain = active_domain(program, data);
  EvalContext full(data);

  std::optional<EvalContext> reduced;
  std::set<std::string> delta_predicates;
  if (delta != nullptr) {
    reduced.emplace(*previous);
    delta_predicates = delta->predicates();
  }

  for (std::size_t rule_index : active) {
    const Rule& rule = program.rules[rule_index];
    if (delta != nullptr) {
      // A rule none of whose body predicates changed cannot pass the filter.
      bool touched = false;
      for (const MetricAtom& b : rule.body) {
        b.visit_relational([&](const RelationalAtom& a, bool) {
          touched = touched || delta_predicates.count(a.predicate) > 0;
        });
        if (touched) break;
      }
      if (!touched) continue;
    }

    for_each_substitution(
        rule, index, domain, options.enumeration_limit, [&](const Substitution& subst) {
          std::vector<MetricAtom> ground_body;
          ground_body.reserve(rule.body.size());
          for (const MetricAtom& b : rule.body) ground_body.push_back(subst.apply(b));

          if (delta != nullptr) {
            // If no ground relational subatom is in Delta, every holding set
            // matches the reduced store and the filter rejects everything.
            bool touched = false;
            for (const MetricAtom& g : ground_body) {
              g.visit_relational([&](const RelationalAtom& a, bool) {
                touched = touched || delta->find(a.ground()) != nullptr;
              });
              if (touched) break;
            }
            if (!touched) return;
          }

          std::vector<const HoldingSet*> holdings;
          holdings.reserve(ground_body.size());
          for (const MetricAtom& g : ground_body) {
            const HoldingSet& h = full.eval(g);
            if (h.empty()) return;
            holdings.push_back(&h);
          }

          // Cartesian product over the maximal intervals of every conjunct.
          std::vector<std::size_t> pick(ground_body.size(), 0);
          while (true) {
            if (sink.stats) ++sink.stats->instances_enumerated;

            bool kept = true;
            if (delta != nullptr) {
              kept = false;
              for (std::size_t i = 0; i < pick.size() && !kept; ++i) {
                const Interval& iv = holdings[i]->intervals()[pick[i]];
                if (!reduced->eval(ground_body[i]).covers(iv)) kept = true;
              }
            }

            if (kept) {
              std::optional<Interval> meet = holdings[0]->intervals()[pick[0]];
              for (std::size_t i = 1; i < pick.size() && meet; ++i)
                meet = intersect(*meet, holdings[i]->intervals()[pick[i]]);
              if (meet) {
                if (sink.stats) ++sink.stats->instances_applied;
                if (sink.rules_applied) sink.rules_applied->insert(rule.name);
                if (sink.seen_instances != nullptr) {
                  RuleInstance inst{rule_index, subst, {}};
                  for (std::size_t i = 0; i < pick.size(); ++i)
                    inst.conjuncts.emplace_back(ground_body[i], holdings[i]->intervals()[pick[i]]);
                  if (!sink.seen_instances->insert(inst.key(rule.name)).second && sink.repeats)
                    ++*sink.repeats;
                }
                if (auto fact = head_project(subst.apply(rule.head), *meet)) {
                  if (sink.stats) ++sink.stats->facts_derived;
                  if (sink.derived) sink.derived->insert(*fact);
                }
              }
            }

            // Advance the product counter.
            std::size_t i = 0;
            for (; i < pick.size(); ++i) {
              if (++pick[i] < holdings[i]->size()) break;
              pick[i] = 0;
            }
            if (i == pick.size()) break;
          }
        });
  }
}

inline std::vector<std::size_t> all_rule_indices(const Program& p) {
  std::vector<std::size_t> out(p.rules.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  return out;
}

}  // namespace detail

// ins(r, D): one instance per substitution and per choice of maximal intervals.
inline std::vector<RuleInstance> instances(const Rule& rule, std::size_t rule_index,
                                           const Program& p, const Dataset& d,
                                           std::size_t limit = 1000000) {
  std::vector<RuleInstance> out;
  EvalContext ctx(d);
  for (const Substitution& subst : ground_substitutions(rule, p, d, limit)) {
    std::vector<MetricAtom> ground_body;
    std::vector<const HoldingSet*> holdings;
    for (const MetricAtom& b : rule.body) {
      ground_body.push_back(subst.apply(b));
      holdings.push_back(&ctx.eval(ground_body.back()));
    }
    std::vector<std::size_t> pick(ground_body.size(), 0);
    while (true) {
      RuleInstance inst{rule_index, subst, {}};
      for (std::size_t i = 0; i < pick.size(); ++i)
        inst.conjuncts.emplace_back(ground_body[i], holdings[i]->intervals()[pick[i]]);
      out.push_back(std::move(inst));
      std::size_t i = 0;
      for (; i < pick.size(); ++i) {
        if (++pick[i] < holdings[i]->size()) break;
        pick[i] = 0;
      }
      if (i == pick.size()) break;
    }
  }
  return out;
}

// ins(r, D, Delta): the subset of ins(r, D) with some conjunct not entailed by
// the store holding D's facts minus Delta's facts (plain stored-fact difference).
inline std::vector<RuleInstance> instances_relative(const Rule& rule, std::size_t rule_index,
                                                    const Program& p, const Dataset& d,
                                                    const Dataset& delta,
                                                    std::size_t limit = 1000000) {
  Dataset reduced_store = d;
  for (const Fact& f : delta.facts()) {
    if (!reduced_store.remove_stored(f.atom, f.interval))
      throw std::logic_error("delta fact " + f.str() + " is not stored in the current dataset");
  }
  EvalContext reduced(reduced_store);
  std::vector<RuleInstance> out;
  for (RuleInstance& inst : instances(rule, rule_index, p, d, limit)) {
    bool kept = false;
    for (const auto& [atom, iv] : inst.conjuncts) {
      if (!reduced.eval(atom).covers(iv)) {
        kept = true;
        break;
      }
    }
    if (kept) out.push_back(std::move(inst));
  }
  return out;
}

// der(r, D): head projections of instances with a non-empty body intersection.
inline std::vector<Fact> derive_rule(const Rule& rule, const Program& p, const Dataset& d,
                                     std::size_t limit = 1000000) {
  std::vector<Fact> out;
  for (const RuleInstance& inst : instances(rule, 0, p, d, limit)) {
    std::optional<Interval> meet = inst.conjuncts[0].second;
    for (std::size_t i = 1; i < inst.conjuncts.size() && meet; ++i)
      meet = intersect(*meet, inst.conjuncts[i].second);
    if (!meet) continue;
    if (auto fact = head_project(inst.subst.apply(rule.head), *meet)) {
      if (std::find(out.begin(), out.end(), *fact) == out.end()) out.push_back(*fact);
    }
  }
  return out;
}

// Pi[D], as a coalesced dataset.
inline Dataset apply_program(const Program& p, const Dataset& d, std::size_t limit = 1000000) {
  Dataset derived;
  ReasonerOptions options;
  options.enumeration_limit = limit;
  detail::StepSink sink;
  sink.derived = &derived;
  detail::apply_rules_once(p, detail::all_rule_indices(p), d, nullptr, nullptr, options, sink);
  return derived;
}

// SemiNaive(Pi, D, Delta), as a coalesced dataset: instances with some
// conjunct not entailed by the store holding D's facts minus Delta's facts.
inline Dataset apply_program_relative(const Program& p, const Dataset& d, const Dataset& delta,
                                      std::size_t limit = 1000000) {
  Dataset reduced_store = d;
  for (const Fact& f : delta.facts()) {
    if (!reduced_store.remove_stored(f.atom, f.interval))
      throw std::logic_error("delta fact " + f.str() + " is not stored in the current dataset");
  }
  Dataset derived;
  ReasonerOptions options;
  options.enumeration_limit = limit;
  detail::StepSink sink;
  sink.derived = &derived;
  detail::apply_rules_once(p, detail::all_rule_indices(p), d, &delta, &reduced_store, options,
                           sink);
  return derived;
}

// Procedure-2 delta: the stored facts of C that entail some fact of N not
// already entailed by the previous materialisation.
inline Dataset delta_update(const Dataset& coalesced, const Dataset& fresh,
                            const Dataset& previous) {
  Dataset novel = fresh.semantic_diff(previous);
  Dataset delta;
  for (const Fact& f : novel.facts()) {
    const HoldingSet* h = coalesced.find(f.atom);
    if (h == nullptr) continue;
    for (const Interval& iv : h->intervals()) {
      if (iv.contains(f.interval)) {
        delta.insert({f.atom, iv});
        break;
      }
    }
  }
  return delta;
}

namespace detail {

inline void start_iteration(DerivationStats& stats, std::size_t iteration) {
  stats.iterations.emplace_back();
  stats.iterations.back().iteration = iteration;
}

inline void merge_with_stats(Dataset& target, const Dataset& fresh, IterationStats& stats) {
  for (const Fact& f : fresh.facts()) {
    switch (target.insert(f).kind) {
      case InsertOutcome::Kind::Absorbed: ++stats.absorbed; break;
      case InsertOutcome::Kind::Extended: ++stats.extended; break;
      case InsertOutcome::Kind::Fresh: ++stats.fresh; break;
    }
  }
}

inline double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace detail

// Procedure 1: derive, coalesce, stop when the store no longer changes.
inline MaterialiseResult naive_materialise(const Program& p, Dataset d,
                                           std::size_t max_iterations,
                                           const ReasonerOptions& options = {}) {
  MaterialiseResult result;
  std::unordered_set<std::string> seen;
  for (std::size_t iteration = 1; iteration <= max_iterations; ++iteration) {
    auto start = std::chrono::steady_clock::now();
    detail::start_iteration(result.stats, iteration);
    IterationStats& iter = result.stats.iterations.back();
    result.applied_rules.emplace_back();

    Dataset derived;
    detail::StepSink sink;
    sink.stats = &iter;
    sink.derived = &derived;
    sink.rules_applied = &result.applied_rules.back();
    if (options.detect_repeats) {
      sink.seen_instances = &seen;
      sink.repeats = &result.repeated_instances;
    }
    detail::apply_rules_once(p, detail::all_rule_indices(p), d, nullptr, nullptr, options, sink);

    Dataset coalesced = d;
    detail::merge_with_stats(coalesced, derived, iter);
    iter.stored_facts = coalesced.fact_count();
    result.stats.peak_stored_facts = std::max(result.stats.peak_stored_facts, iter.stored_facts);
    iter.wall_ms = detail::elapsed_ms(start);
    result.iterations_run = iteration;

    if (coalesced == d) {
      result.reached_fixpoint = true;
      if (options.capture_iterations) result.snapshots.push_back(coalesced);
      break;
    }
    d = std::move(coalesced);
    if (options.capture_iterations) result.snapshots.push_back(d);
  }
  result.dataset = std::move(d);
  return result;
}

// Procedure 2: one-step semi-naive application restricted to instances that
// involve new information, then coalescing, then the delta update; stops when
// the delta is empty. The first round applies every instance (Delta starts as
// D); later rounds keep an instance only when some conjunct is not entailed
// by the previous partial materialisation, which makes the non-repetition
// property immediate: an applied instance's conjuncts are entailed by every
// later store.
inline MaterialiseResult seminaive_materialise(const Program& p, Dataset d,
                                               std::size_t max_iterations,
                                               const ReasonerOptions& options = {}) {
  MaterialiseResult result;
  std::unordered_set<std::string> seen;
  Dataset previous;  // partial materialisation of the round before
  Dataset delta = d;
  Dataset last_fresh;  // N of the previous iteration, for the invariant check
  for (std::size_t iteration = 1; iteration <= max_iterations; ++iteration) {
    auto start = std::chrono::steady_clock::now();
    if (options.check_invariants) {
      if (!(coalesce_merge(d, last_fresh) == coalesce_merge(d, delta)))
        ++result.invariant_violations;
    }
    detail::start_iteration(result.stats, iteration);
    IterationStats& iter = result.stats.iterations.back();
    result.applied_rules.emplace_back();

    Dataset fresh;
    detail::StepSink sink;
    sink.stats = &iter;
    sink.derived = &fresh;
    sink.rules_applied = &result.applied_rules.back();
    if (options.detect_repeats) {
      sink.seen_instances = &seen;
      sink.repeats = &result.repeated_instances;
    }
    detail::apply_rules_once(p, detail::all_rule_indices(p), d,
                             iteration == 1 ? nullptr : &delta,
                             iteration == 1 ? nullptr : &previous, options, sink);

    Dataset coalesced = d;
    detail::merge_with_stats(coalesced, fresh, iter);
    iter.stored_facts = coalesced.fact_count();
    result.stats.peak_stored_facts = std::max(result.stats.peak_stored_facts, iter.stored_facts);

    delta = delta_update(coalesced, fresh, d);
    last_fresh = std::move(fresh);
    iter.wall_ms = detail::elapsed_ms(start);
    result.iterations_run = iteration;

    if (delta.empty()) {
      result.reached_fixpoint = true;
      if (options.capture_iterations) result.snapshots.push_back(d);
      break;
    }
    previous = std::move(d);
    d = std::move(coalesced);
    if (options.capture_iterations) result.snapshots.push_back(d);
  }
  result.dataset = std::move(d);
  return result;
}

}  // namespace dmtl
