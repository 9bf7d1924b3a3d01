#pragma once

#include <cstdint>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmtl/dataset.hpp"

namespace dmtl {

struct PredicateSchema {
  std::string name;
  std::size_t arity = 1;
};

// LUBM-style synthetic data: relational tuples over a constant pool with
// randomly assigned integer intervals on a bounded timeline.
struct GeneratorSpec {
  std::vector<PredicateSchema> predicates;
  std::size_t constant_count = 0;
  std::size_t fact_count = 0;
  long min_length = 0;
  long max_length = 0;
  long span_lo = 0;
  long span_hi = 0;

  void validate() const {
    if (predicates.empty()) throw std::invalid_argument("generator: no predicate schemas");
    for (const PredicateSchema& p : predicates)
      if (p.name.empty()) throw std::invalid_argument("generator: empty predicate name");
    if (constant_count == 0) throw std::invalid_argument("generator: constant count must be positive");
    if (fact_count == 0) throw std::invalid_argument("generator: fact count must be positive");
    if (min_length < 0 || max_length < min_length)
      throw std::invalid_argument("generator: interval length bounds out of order");
    if (span_hi - span_lo < max_length)
      throw std::invalid_argument("generator: timeline span shorter than the maximum length");
  }
};

// Deterministic under (spec, seed): facts are emitted in generation order.
inline std::vector<Fact> generate_facts(const GeneratorSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  auto pick = [&rng](std::uint64_t n) { return static_cast<long>(rng() % n); };
  std::vector<Fact> out;
  out.reserve(spec.fact_count);
  for (std::size_t i = 0; i < spec.fact_count; ++i) {
    const PredicateSchema& schema =
        spec.predicates[static_cast<std::size_t>(pick(spec.predicates.size()))];
    GroundAtom atom{schema.name, {}};
    for (std::size_t a = 0; a < schema.arity; ++a)
      atom.args.push_back("c" + std::to_string(pick(spec.constant_count)));
    long length = spec.min_length + pick(static_cast<std::uint64_t>(spec.max_length -
                                                                    spec.min_length + 1));
    long start = spec.span_lo +
                 pick(static_cast<std::uint64_t>(spec.span_hi - spec.span_lo - length + 1));
    out.push_back({std::move(atom), Interval::closed(Rational(start), Rational(start + length))});
  }
  return out;
}

inline void write_facts(std::ostream& os, const std::vector<Fact>& facts) {
  for (const Fact& f : facts) os << f.str() << '\n';
}

inline Dataset dataset_from(const std::vector<Fact>& facts) {
  Dataset d;
  for (const Fact& f : facts) d.insert(f);
  return d;
}

}  // namespace dmtl
