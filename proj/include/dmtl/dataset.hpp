#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dmtl/ast.hpp"
#include "dmtl/holding_set.hpp"

namespace dmtl {

struct Fact {
  GroundAtom atom;
  Interval interval;

  bool operator==(const Fact& o) const { return atom == o.atom && interval == o.interval; }
  std::string str() const { return atom.str() + "@" + interval.str(); }
};

// Coalesced temporal fact store: one normalised holding set per ground atom,
// so stored intervals are always subset-maximal.
class Dataset {
 public:
  Dataset() = default;

  InsertOutcome insert(const Fact& f) {
    HoldingSet& h = index_[f.atom];
    std::size_t before = h.size();
    InsertOutcome out = h.insert(f.interval);
    stored_ += h.size();
    stored_ -= before;
    return out;
  }

  const HoldingSet* find(const GroundAtom& atom) const {
    auto it = index_.find(atom);
    return it == index_.end() ? nullptr : &it->second;
  }

  bool entails(const GroundAtom& atom, const Interval& iv) const {
    const HoldingSet* h = find(atom);
    return h && h->covers(iv);
  }
  bool entails(const Fact& f) const { return entails(f.atom, f.interval); }

  void merge_from(const Dataset& other) {
    for (const auto& [atom, holding] : other.index_)
      for (const Interval& iv : holding.intervals()) insert({atom, iv});
  }

  // Stored facts of *this not entailed by `other`.
  Dataset semantic_diff(const Dataset& other) const {
    Dataset out;
    for (const auto& [atom, holding] : index_) {
      for (const Interval& iv : holding.intervals())
        if (!other.entails(atom, iv)) out.insert({atom, iv});
    }
    return out;
  }

  // Removes a fact stored exactly as given (same maximal interval).
  bool remove_stored(const GroundAtom& atom, const Interval& iv) {
    auto it = index_.find(atom);
    if (it == index_.end() || !it->second.remove_exact(iv)) return false;
    --stored_;
    if (it->second.empty()) index_.erase(it);
    return true;
  }

  bool operator==(const Dataset& o) const { return index_ == o.index_; }

  bool empty() const { return index_.empty(); }
  std::size_t fact_count() const { return stored_; }
  std::size_t atom_count() const { return index_.size(); }

  const std::map<GroundAtom, HoldingSet>& index() const { return index_; }

  std::vector<Fact> facts() const {
    std::vector<Fact> out;
    out.reserve(stored_);
    for (const auto& [atom, holding] : index_)
      for (const Interval& iv : holding.intervals()) out.push_back({atom, iv});
    return out;
  }

  std::set<std::string> predicates() const {
    std::set<std::string> out;
    for (const auto& [atom, holding] : index_) out.insert(atom.predicate);
    return out;
  }

  std::set<std::string> constants() const {
    std::set<std::string> out;
    for (const auto& [atom, holding] : index_)
      for (const std::string& c : atom.args) out.insert(c);
    return out;
  }

  std::map<std::string, std::size_t> arities() const {
    std::map<std::string, std::size_t> out;
    for (const auto& [atom, holding] : index_) out.emplace(atom.predicate, atom.args.size());
    return out;
  }

  Dataset restricted_excluding(const std::set<std::string>& predicates) const {
    Dataset out;
    for (const auto& [atom, holding] : index_) {
      if (predicates.count(atom.predicate)) continue;
      out.stored_ += holding.size();
      out.index_.emplace(atom, holding);
    }
    return out;
  }

  // Portions of every holding set inside `window`.
  Dataset clipped_to(const Interval& window) const {
    Dataset out;
    for (const auto& [atom, holding] : index_) {
      HoldingSet clipped = holding.clipped_to(window);
      if (!clipped.empty()) {
        out.stored_ += clipped.size();
        out.index_.emplace(atom, std::move(clipped));
      }
    }
    return out;
  }

  // Canonical text: one fact per line, atoms in index order, then by start.
  void save(std::ostream& os) const {
    for (const auto& [atom, holding] : index_)
      for (const Interval& iv : holding.intervals()) os << atom.str() << '@' << iv.str() << '\n';
  }

 private:
  std::map<GroundAtom, HoldingSet> index_;
  std::size_t stored_ = 0;
};

inline Dataset coalesce_merge(const Dataset& a, const Dataset& b) {
  Dataset out = a;
  out.merge_from(b);
  return out;
}

}  // namespace dmtl
