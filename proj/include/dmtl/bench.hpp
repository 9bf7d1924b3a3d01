#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dmtl/analysis.hpp"
#include "dmtl/dataset.hpp"
#include "dmtl/reasoner.hpp"

namespace dmtl {

enum class Strategy { Naive, Seminaive, Optimised };

inline const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Naive: return "naive";
    case Strategy::Seminaive: return "seminaive";
    default: return "optimised";
  }
}

inline std::optional<Strategy> parse_strategy(const std::string& name) {
  if (name == "naive") return Strategy::Naive;
  if (name == "seminaive") return Strategy::Seminaive;
  if (name == "optimised" || name == "optimized") return Strategy::Optimised;
  return std::nullopt;
}

inline MaterialiseResult materialise(Strategy strategy, const Program& p, Dataset d,
                                     std::size_t max_iterations,
                                     const ReasonerOptions& options = {}) {
  switch (strategy) {
    case Strategy::Naive: return naive_materialise(p, std::move(d), max_iterations, options);
    case Strategy::Seminaive:
      return seminaive_materialise(p, std::move(d), max_iterations, options);
    default: return optimised_materialise(p, std::move(d), max_iterations, options);
  }
}

struct BenchCell {
  std::string dataset_label;
  std::size_t constants = 0;
  std::size_t facts = 0;
  Strategy strategy = Strategy::Naive;
  MaterialiseResult result;
};

inline BenchCell run_bench_cell(std::string label, std::size_t constants, std::size_t facts,
                                Strategy strategy, const Program& p, const Dataset& d,
                                std::size_t max_iterations) {
  BenchCell cell{std::move(label), constants, facts, strategy, {}};
  cell.result = materialise(strategy, p, d, max_iterations);
  return cell;
}

// One row per (cell, iteration). `cumulative_applied` accumulates within the
// cell; `peak_stored_facts` is the cell-wide maximum, repeated on each row.
inline const char* bench_csv_header() {
  return "dataset,constants,facts,strategy,iteration,wall_ms,enumerated,applied,"
         "cumulative_applied,derived,stored_facts,peak_stored_facts";
}

inline void write_bench_csv(std::ostream& os, const std::vector<BenchCell>& cells) {
  os << bench_csv_header() << '\n';
  for (const BenchCell& cell : cells) {
    std::size_t cumulative = 0;
    for (const IterationStats& it : cell.result.stats.iterations) {
      cumulative += it.instances_applied;
      os << cell.dataset_label << ',' << cell.constants << ',' << cell.facts << ','
         << strategy_name(cell.strategy) << ',' << it.iteration << ',' << it.wall_ms << ','
         << it.instances_enumerated << ',' << it.instances_applied << ',' << cumulative << ','
         << it.facts_derived << ',' << it.stored_facts << ','
         << cell.result.stats.peak_stored_facts << '\n';
    }
  }
}

}  // namespace dmtl
