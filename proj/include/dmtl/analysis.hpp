#pragma once

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dmtl/ast.hpp"
#include "dmtl/dataset.hpp"
#include "dmtl/evaluation.hpp"
#include "dmtl/reasoner.hpp"

namespace dmtl {

struct DependencyGraph {
  std::vector<std::string> vertices;                       // sorted predicate names
  std::set<std::pair<std::string, std::string>> edges;     // (body predicate, head predicate)
};

inline DependencyGraph dependency_graph(const Program& p) {
  DependencyGraph g;
  std::set<std::string> verts;
  for (const auto& [pred, arity] : p.arities) verts.insert(pred);
  for (const Rule& r : p.rules) {
    const RelationalAtom* head = head_relational(r.head);
    if (head == nullptr) continue;
    std::set<std::string> body_preds;
    for (const MetricAtom& b : r.body)
      b.visit_relational([&](const RelationalAtom& a, bool) { body_preds.insert(a.predicate); });
    for (const std::string& q : body_preds) g.edges.emplace(q, head->predicate);
  }
  g.vertices.assign(verts.begin(), verts.end());
  return g;
}

// Predicates reachable along a path containing a cycle: members of a cyclic
// strongly connected component, plus everything reachable from one.
inline std::set<std::string> recursive_predicates(const Program& p) {
  DependencyGraph g = dependency_graph(p);
  std::map<std::string, std::vector<std::string>> succ;
  for (const auto& [from, to] : g.edges) succ[from].push_back(to);

  // Tarjan SCC, iterative.
  std::map<std::string, int> index, low;
  std::map<std::string, bool> on_stack;
  std::vector<std::string> stack;
  std::vector<std::vector<std::string>> components;
  int counter = 0;

  struct Frame {
    std::string vertex;
    std::size_t next_child = 0;
  };
  for (const std::string& start : g.vertices) {
    if (index.count(start)) continue;
    std::vector<Frame> frames{{start, 0}};
    index[start] = low[start] = counter++;
    stack.push_back(start);
    on_stack[start] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      const auto& children = succ[f.vertex];
      if (f.next_child < children.size()) {
        const std::string& child = children[f.next_child++];
        if (!index.count(child)) {
          index[child] = low[child] = counter++;
          stack.push_back(child);
          on_stack[child] = true;
          frames.push_back({child, 0});
        } else if (on_stack[child]) {
          low[f.vertex] = std::min(low[f.vertex], index[child]);
        }
      } else {
        if (low[f.vertex] == index[f.vertex]) {
          components.emplace_back();
          while (true) {
            std::string v = stack.back();
            stack.pop_back();
            on_stack[v] = false;
            components.back().push_back(v);
            if (v == f.vertex) break;
          }
        }
        std::string finished = f.vertex;
        frames.pop_back();
        if (!frames.empty())
          low[frames.back().vertex] = std::min(low[frames.back().vertex], low[finished]);
      }
    }
  }

  std::set<std::string> cyclic;
  std::set<std::pair<std::string, std::string>> edge_set = g.edges;
  for (const auto& component : components) {
    if (component.size() > 1) {
      cyclic.insert(component.begin(), component.end());
    } else {
      const std::string& v = component.front();
      if (edge_set.count({v, v})) cyclic.insert(v);
    }
  }

  // Forward closure from the cyclic seeds.
  std::set<std::string> recursive = cyclic;
  std::vector<std::string> frontier(cyclic.begin(), cyclic.end());
  while (!frontier.empty()) {
    std::string v = frontier.back();
    frontier.pop_back();
    for (const std::string& w : succ[v])
      if (recursive.insert(w).second) frontier.push_back(w);
  }
  return recursive;
}

inline bool atom_is_recursive(const MetricAtom& m, const std::set<std::string>& recursive) {
  bool any = false;
  m.visit_relational([&](const RelationalAtom& a, bool) {
    any = any || recursive.count(a.predicate) > 0;
  });
  return any;
}

struct FragmentInfo {
  std::set<std::string> recursive;                          // recursive predicates
  std::vector<std::size_t> recursive_rules;                 // rules with recursive head atoms
  std::vector<std::size_t> non_recursive_rules;
  std::vector<std::vector<MetricAtom>> non_recursive_body;  // S_r, indexed by rule
};

inline FragmentInfo split_fragments(const Program& p) {
  FragmentInfo info;
  info.recursive = recursive_predicates(p);
  info.non_recursive_body.resize(p.rules.size());
  for (std::size_t i = 0; i < p.rules.size(); ++i) {
    const Rule& r = p.rules[i];
    if (atom_is_recursive(r.head, info.recursive))
      info.recursive_rules.push_back(i);
    else
      info.non_recursive_rules.push_back(i);
    for (const MetricAtom& b : r.body)
      if (!atom_is_recursive(b, info.recursive)) info.non_recursive_body[i].push_back(b);
  }
  return info;
}

// Line-7 check: both stores entail the same facts over non-recursive
// predicates (structural equality of the normalised restrictions).
inline bool non_recursive_fixpoint_reached(const Dataset& previous, const Dataset& coalesced,
                                           const FragmentInfo& info) {
  return previous.restricted_excluding(info.recursive) ==
         coalesced.restricted_excluding(info.recursive);
}

namespace detail {

// Enumerates substitutions for a single body atom and reports whether any
// grounding has a non-empty holding set.
inline bool atom_satisfiable(const MetricAtom& atom, const Dataset& d, const JoinIndex& index,
                             const std::vector<std::string>& domain, std::size_t limit) {
  Rule probe;
  probe.body.push_back(atom);
  bool found = false;
  EvalContext ctx(d);
  try {
    for_each_substitution(probe, index, domain, limit, [&](const Substitution& s) {
      if (found) return;
      if (!ctx.eval(s.apply(atom)).empty()) found = true;
    });
  } catch (const EnumerationLimitError&) {
    return true;  // give up conservatively: treat as satisfiable, rule stays
  }
  return found;
}

// Max right endpoint (forward) or min left endpoint (backward) over all
// groundings' holding sets; nullopt when nothing holds.
inline std::optional<Endpoint> atom_extreme(const MetricAtom& atom, bool forward,
                                            const Dataset& d, const JoinIndex& index,
                                            const std::vector<std::string>& domain,
                                            std::size_t limit) {
  Rule probe;
  probe.body.push_back(atom);
  std::optional<Endpoint> best;
  EvalContext ctx(d);
  for_each_substitution(probe, index, domain, limit, [&](const Substitution& s) {
    const HoldingSet& h = ctx.eval(s.apply(atom));
    if (h.empty()) return;
    Endpoint e = forward ? *h.max_right() : *h.min_left();
    if (!best || (forward ? *best < e : e < *best)) best = e;
  });
  return best;
}

}  // namespace detail

// Line-9/10 pruning: a recursive rule dies when some non-recursive body atom
// has an empty holding set under every substitution.
inline std::vector<std::size_t> prune_unsatisfiable(const Program& p,
                                                    const std::vector<std::size_t>& active,
                                                    const Dataset& d, const FragmentInfo& info,
                                                    std::size_t limit,
                                                    std::vector<std::size_t>* removed = nullptr) {
  detail::JoinIndex index(d);
  std::vector<std::string> domain = active_domain(p, d);
  std::vector<std::size_t> kept;
  for (std::size_t rule_index : active) {
    bool alive = true;
    for (const MetricAtom& atom : info.non_recursive_body[rule_index]) {
      if (!detail::atom_satisfiable(atom, d, index, domain, limit)) {
        alive = false;
        break;
      }
    }
    if (alive)
      kept.push_back(rule_index);
    else if (removed)
      removed->push_back(rule_index);
  }
  return kept;
}

struct BoundedPruneOutcome {
  std::vector<std::size_t> kept;
  std::vector<std::pair<std::size_t, Endpoint>> removed;  // rule index with its t_r
};

// Lines 11-15 for forward-propagating programs (mirrored for backward ones):
// per rule, bound the last time point its non-recursive body atoms can hold;
// drop the rule once two consecutive materialisations coincide up to there.
inline BoundedPruneOutcome prune_bounded(const Program& p, const std::vector<std::size_t>& active,
                                         const Dataset& previous, const Dataset& coalesced,
                                         const FragmentInfo& info, bool forward,
                                         std::size_t limit) {
  BoundedPruneOutcome out;
  detail::JoinIndex index(previous);
  std::vector<std::string> domain = active_domain(p, previous);
  for (std::size_t rule_index : active) {
    const auto& atoms = info.non_recursive_body[rule_index];
    if (atoms.empty()) {  // empty min is +inf: never prunable by this check
      out.kept.push_back(rule_index);
      continue;
    }
    std::optional<Endpoint> bound;  // min over atoms of t_max (max of t_min backward)
    bool unbounded = false;
    for (const MetricAtom& atom : atoms) {
      std::optional<Endpoint> extreme;
      try {
        extreme = detail::atom_extreme(atom, forward, previous, index, domain, limit);
      } catch (const EnumerationLimitError&) {
        extreme.reset();
      }
      if (!extreme) {  // nothing holds (or gave up): keep conservatively
        unbounded = true;
        break;
      }
      if (!extreme->is_finite()) {
        unbounded = true;
        break;
      }
      if (!bound || (forward ? *extreme < *bound : *bound < *extreme)) bound = extreme;
    }
    if (unbounded || !bound) {
      out.kept.push_back(rule_index);
      continue;
    }
    Interval window = forward ? Interval::at_most(bound->value())
                              : Interval::at_least(bound->value());
    if (previous.clipped_to(window) == coalesced.clipped_to(window))
      out.removed.emplace_back(rule_index, *bound);
    else
      out.kept.push_back(rule_index);
  }
  return out;
}

// Procedure 3: semi-naive materialisation that discards rules once they can no
// longer derive anything new.
inline MaterialiseResult optimised_materialise(const Program& p, Dataset d,
                                               std::size_t max_iterations,
                                               const ReasonerOptions& options = {}) {
  MaterialiseResult result;
  std::unordered_set<std::string> seen;
  FragmentInfo fragments = split_fragments(p);
  std::vector<std::size_t> active = detail::all_rule_indices(p);
  bool flag = false;
  Dataset previous;
  Dataset delta = d;
  Dataset last_fresh;

  auto note = [&](PruneEvent event) {
    if (options.explain) options.explain(event.describe());
    result.prune_events.push_back(std::move(event));
  };
  auto is_protected = [&](std::size_t rule_index) {
    return options.never_prune.count(p.rules[rule_index].name) > 0;
  };

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
    detail::apply_rules_once(p, active, d, iteration == 1 ? nullptr : &delta,
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

    if (!flag && non_recursive_fixpoint_reached(d, coalesced, fragments)) {
      flag = true;
      result.flag_flip_iteration = iteration;
      // Keep only the recursive fragment.
      std::vector<std::size_t> recursive_active;
      for (std::size_t rule_index : active) {
        bool is_recursive =
            std::find(fragments.recursive_rules.begin(), fragments.recursive_rules.end(),
                      rule_index) != fragments.recursive_rules.end();
        if (is_recursive || is_protected(rule_index)) {
          recursive_active.push_back(rule_index);
        } else {
          note({iteration, p.rules[rule_index].name, PruneEvent::Reason::NonRecursiveFragment,
                std::nullopt});
        }
      }
      std::vector<std::size_t> removed;
      active = prune_unsatisfiable(p, recursive_active, d, fragments, options.enumeration_limit,
                                   &removed);
      for (std::size_t rule_index : removed) {
        if (is_protected(rule_index)) {
          active.push_back(rule_index);
        } else {
          note({iteration, p.rules[rule_index].name, PruneEvent::Reason::UnsatisfiableBodyAtom,
                std::nullopt});
        }
      }
      std::sort(active.begin(), active.end());
    }

    if (flag && !active.empty()) {
      Program view;  // propagation direction of the active program only
      view.arities = p.arities;
      for (std::size_t rule_index : active) view.rules.push_back(p.rules[rule_index]);
      bool forward = is_forward_propagating(view);
      bool backward = !forward && is_backward_propagating(view);
      if (forward || backward) {
        BoundedPruneOutcome outcome = prune_bounded(p, active, d, coalesced, fragments, forward,
                                                    options.enumeration_limit);
        std::vector<std::size_t> kept = std::move(outcome.kept);
        for (auto& [rule_index, bound] : outcome.removed) {
          if (is_protected(rule_index)) {
            kept.push_back(rule_index);
          } else {
            note({iteration, p.rules[rule_index].name,
                  forward ? PruneEvent::Reason::StablePrefix : PruneEvent::Reason::StableSuffix,
                  bound});
          }
        }
        std::sort(kept.begin(), kept.end());
        active = std::move(kept);
      }
    }

    previous = std::move(d);
    d = std::move(coalesced);
    if (options.capture_iterations) result.snapshots.push_back(d);
  }
  result.dataset = std::move(d);
  return result;
}

}  // namespace dmtl
