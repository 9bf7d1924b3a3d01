// Command-line front end: materialise, query, generate, bench, oracle-check.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dmtl/dmtl.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDisagreement = 1;
constexpr int kExitInvalid = 2;  // parse/validation/config errors
constexpr int kExitIo = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return buffer.str();
}

void spill(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
  if (!out) throw IoError("cannot write " + path);
}

struct CommonInputs {
  std::string program_path;
  std::string dataset_path;
  std::string strategy_name = "seminaive";
  std::size_t max_iters = 100;
};

struct LoadedInputs {
  dmtl::Program program;
  dmtl::Dataset dataset;
  dmtl::Strategy strategy;
};

LoadedInputs load_inputs(const CommonInputs& cfg, bool explain, std::ostream& diag) {
  auto strategy = dmtl::parse_strategy(cfg.strategy_name);
  if (!strategy)
    throw std::invalid_argument("unknown strategy '" + cfg.strategy_name +
                                "' (naive|seminaive|optimised)");
  dmtl::ParsedProgram parsed = dmtl::parse_program(slurp(cfg.program_path));
  for (const std::string& w : parsed.warnings) diag << "warning: " << w << '\n';
  dmtl::Dataset data = dmtl::parse_dataset(slurp(cfg.dataset_path));
  // Arities must agree across the program/dataset pair.
  for (const auto& [pred, arity] : data.arities()) {
    auto it = parsed.program.arities.find(pred);
    if (it != parsed.program.arities.end() && it->second != arity)
      throw std::invalid_argument("predicate '" + pred + "' has arity " + std::to_string(arity) +
                                  " in the dataset but " + std::to_string(it->second) +
                                  " in the program");
  }
  (void)explain;
  return {std::move(parsed.program), std::move(data), *strategy};
}

nlohmann::json summary_json(const std::string& strategy, const dmtl::MaterialiseResult& result) {
  nlohmann::json j;
  j["strategy"] = strategy;
  j["iterations_run"] = result.iterations_run;
  j["reached_fixpoint"] = result.reached_fixpoint;
  j["stored_facts"] = result.dataset.fact_count();
  j["peak_stored_facts"] = result.stats.peak_stored_facts;
  j["instances_enumerated"] = result.stats.total_enumerated();
  j["instances_applied"] = result.stats.total_applied();
  j["facts_derived"] = result.stats.total_derived();
  if (result.flag_flip_iteration) j["flag_flip_iteration"] = *result.flag_flip_iteration;
  nlohmann::json pruned = nlohmann::json::array();
  for (const dmtl::PruneEvent& e : result.prune_events) pruned.push_back(e.describe());
  j["pruned_rules"] = pruned;
  return j;
}

int cmd_materialise(const CommonInputs& common, const std::string& output_path,
                    const std::string& stats_base, bool explain_pruning, bool check_invariants) {
  LoadedInputs in = load_inputs(common, explain_pruning, std::cerr);
  dmtl::ReasonerOptions options;
  options.check_invariants = check_invariants;
  if (explain_pruning)
    options.explain = [](const std::string& line) { std::cerr << "pruning: " << line << '\n'; };
  dmtl::MaterialiseResult result =
      dmtl::materialise(in.strategy, in.program, in.dataset, common.max_iters, options);

  std::ostringstream dataset_text;
  result.dataset.save(dataset_text);
  if (output_path.empty() || output_path == "-")
    std::cout << dataset_text.str();
  else
    spill(output_path, dataset_text.str());

  if (!stats_base.empty()) {
    std::ostringstream csv;
    result.stats.write_csv(csv);
    spill(stats_base + ".csv", csv.str());
    spill(stats_base + ".json", summary_json(common.strategy_name, result).dump(2) + "\n");
  }
  std::cerr << "iterations=" << result.iterations_run
            << " fixpoint=" << (result.reached_fixpoint ? "true" : "false")
            << " stored_facts=" << result.dataset.fact_count() << '\n';
  return kExitOk;
}

int cmd_query(const CommonInputs& common, const std::string& fact_text) {
  LoadedInputs in = load_inputs(common, false, std::cerr);
  dmtl::Fact fact = dmtl::parse_fact(fact_text);
  dmtl::MaterialiseResult result =
      dmtl::materialise(in.strategy, in.program, in.dataset, common.max_iters);
  bool entailed = result.dataset.entails(fact);
  std::cout << (entailed ? "entailed" : "not-entailed") << '\n';
  if (!entailed && !result.reached_fixpoint)
    std::cout << "bounded: fixpoint not reached within " << common.max_iters
              << " iterations; the fact may still be entailed\n";
  return kExitOk;
}

dmtl::GeneratorSpec parse_generator_spec(const std::string& predicates, std::size_t constants,
                                         std::size_t facts, long min_len, long max_len,
                                         long span_lo, long span_hi) {
  dmtl::GeneratorSpec spec;
  std::stringstream ss(predicates);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto slash = item.find('/');
    if (slash == std::string::npos || slash == 0)
      throw std::invalid_argument("predicate schema must look like Name/arity: " + item);
    dmtl::PredicateSchema schema;
    schema.name = item.substr(0, slash);
    schema.arity = static_cast<std::size_t>(std::stoul(item.substr(slash + 1)));
    spec.predicates.push_back(std::move(schema));
  }
  spec.constant_count = constants;
  spec.fact_count = facts;
  spec.min_length = min_len;
  spec.max_length = max_len;
  spec.span_lo = span_lo;
  spec.span_hi = span_hi;
  spec.validate();
  return spec;
}

int cmd_generate(const dmtl::GeneratorSpec& spec, std::uint64_t seed,
                 const std::string& output_path) {
  std::vector<dmtl::Fact> facts = dmtl::generate_facts(spec, seed);
  std::ostringstream text;
  dmtl::write_facts(text, facts);
  if (output_path.empty() || output_path == "-")
    std::cout << text.str();
  else
    spill(output_path, text.str());
  return kExitOk;
}

int cmd_bench(const std::string& program_path, const std::string& predicates,
              const std::vector<std::size_t>& constant_sweep, std::size_t facts,
              const std::string& strategies_text, std::size_t max_iters, std::uint64_t seed,
              long min_len, long max_len, long span_lo, long span_hi,
              const std::string& output_path) {
  dmtl::ParsedProgram parsed = dmtl::parse_program(slurp(program_path));
  std::vector<dmtl::Strategy> strategies;
  {
    std::stringstream ss(strategies_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto s = dmtl::parse_strategy(item);
      if (!s) throw std::invalid_argument("unknown strategy '" + item + "'");
      strategies.push_back(*s);
    }
    if (strategies.empty()) throw std::invalid_argument("no strategies selected");
  }
  std::string schema_text = predicates;
  if (schema_text.empty()) {
    // Default: predicates that never occur in a rule head.
    std::set<std::string> heads;
    for (const dmtl::Rule& r : parsed.program.rules)
      if (const dmtl::RelationalAtom* h = dmtl::head_relational(r.head))
        heads.insert(h->predicate);
    for (const auto& [pred, arity] : parsed.program.arities) {
      if (heads.count(pred)) continue;
      if (!schema_text.empty()) schema_text += ',';
      schema_text += pred + "/" + std::to_string(arity);
    }
    if (schema_text.empty())
      throw std::invalid_argument("no body-only predicates to generate; pass --predicates");
  }

  std::vector<dmtl::BenchCell> cells;
  for (std::size_t i = 0; i < constant_sweep.size(); ++i) {
    dmtl::GeneratorSpec spec = parse_generator_spec(schema_text, constant_sweep[i], facts,
                                                    min_len, max_len, span_lo, span_hi);
    dmtl::Dataset data = dmtl::dataset_from(dmtl::generate_facts(spec, seed + i));
    std::string label = "D" + std::to_string(i + 1);
    for (dmtl::Strategy strategy : strategies) {
      std::cerr << "bench: " << label << " constants=" << constant_sweep[i]
                << " strategy=" << dmtl::strategy_name(strategy) << '\n';
      cells.push_back(dmtl::run_bench_cell(label, constant_sweep[i], facts, strategy,
                                           parsed.program, data, max_iters));
    }
  }
  std::ostringstream csv;
  dmtl::write_bench_csv(csv, cells);
  if (output_path.empty() || output_path == "-")
    std::cout << csv.str();
  else
    spill(output_path, csv.str());
  return kExitOk;
}

int cmd_oracle_check(const CommonInputs& common, long window_lo, long window_hi) {
  LoadedInputs in = load_inputs(common, false, std::cerr);
  auto safe = dmtl::safe_region(in.program, window_lo, window_hi, common.max_iters);
  if (!safe)
    throw std::invalid_argument(
        "no usable safe region: widen the window or drop unbounded operator ranges");
  dmtl::GridInterpretation grid =
      dmtl::GridInterpretation::load(in.dataset, window_lo, window_hi);
  for (std::size_t k = 0; k < common.max_iters; ++k) grid = grid.step(in.program);
  dmtl::MaterialiseResult result =
      dmtl::materialise(in.strategy, in.program, in.dataset, common.max_iters);
  auto mismatches = grid.compare(result.dataset, *safe);
  std::cout << "window=[" << window_lo << "," << window_hi << "] safe_region=" << safe->str()
            << " iterations=" << common.max_iters << '\n';
  for (const auto& m : mismatches) std::cout << "mismatch: " << m.str() << '\n';
  std::cout << (mismatches.empty() ? "agreement" : "disagreement") << '\n';
  return mismatches.empty() ? kExitOk : kExitDisagreement;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DatalogMTL materialisation engine and benchmark harness"};
  app.require_subcommand(1);

  CommonInputs common;
  std::string output_path;
  std::string stats_base;
  bool explain_pruning = false;
  bool check_invariants = false;
  std::string fact_text;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* cmd, bool need_dataset = true) {
    cmd->add_option("-p,--program", common.program_path, "program file")->required();
    if (need_dataset)
      cmd->add_option("-d,--dataset", common.dataset_path, "dataset file")->required();
    cmd->add_option("--strategy", common.strategy_name, "naive|seminaive|optimised");
    cmd->add_option("--max-iters", common.max_iters, "materialisation step bound");
  };

  CLI::App* materialise = app.add_subcommand("materialise", "materialise a dataset");
  add_common(materialise);
  materialise->add_option("-o,--output", output_path, "output dataset file ('-' for stdout)");
  materialise->add_option("--stats-out", stats_base,
                          "write per-iteration stats to <base>.csv and a summary to <base>.json");
  materialise->add_flag("--explain-pruning", explain_pruning,
                        "log one line per rule removed by the optimised strategy");
  materialise->add_flag("--check-invariants", check_invariants,
                        "verify internal invariants every iteration (slow)");

  CLI::App* query = app.add_subcommand("query", "bounded fact entailment");
  add_common(query);
  query->add_option("fact", fact_text, "fact to check, e.g. R5(c2)@[2,2]")->required();

  std::string predicates;
  std::size_t gen_constants = 10, gen_facts = 100;
  long min_len = 0, max_len = 2, span_lo = 0, span_hi = 100;
  CLI::App* generate = app.add_subcommand("generate", "generate a synthetic dataset");
  generate->add_option("--predicates", predicates, "schemas, e.g. Req/2,Cap/1")->required();
  generate->add_option("--constants", gen_constants, "constant pool size");
  generate->add_option("--facts", gen_facts, "number of facts to emit");
  generate->add_option("--min-len", min_len, "minimum interval length");
  generate->add_option("--max-len", max_len, "maximum interval length");
  generate->add_option("--span-lo", span_lo, "timeline start");
  generate->add_option("--span-hi", span_hi, "timeline end");
  generate->add_option("--seed", seed, "random seed");
  generate->add_option("-o,--output", output_path, "output file ('-' for stdout)");

  std::vector<std::size_t> constant_sweep{100};
  std::string strategies_text = "naive,seminaive,optimised";
  CLI::App* bench = app.add_subcommand("bench", "benchmark strategies on generated datasets");
  bench->add_option("-p,--program", common.program_path, "program file")->required();
  bench->add_option("--predicates", predicates, "schemas to generate (default: body-only)");
  bench->add_option("--constants", constant_sweep, "constant-count sweep")->delimiter(',');
  bench->add_option("--facts", gen_facts, "facts per generated dataset");
  bench->add_option("--strategies", strategies_text, "comma-separated strategy list");
  bench->add_option("--max-iters", common.max_iters, "iterations per cell");
  bench->add_option("--seed", seed, "random seed");
  bench->add_option("--min-len", min_len, "minimum interval length");
  bench->add_option("--max-len", max_len, "maximum interval length");
  bench->add_option("--span-lo", span_lo, "timeline start");
  bench->add_option("--span-hi", span_hi, "timeline end");
  bench->add_option("-o,--output", output_path, "CSV output ('-' for stdout)");

  long window_lo = -50, window_hi = 50;
  CLI::App* oracle = app.add_subcommand("oracle-check",
                                        "compare the engine against the pointwise grid oracle");
  oracle->group("");  // hidden
  add_common(oracle);
  oracle->add_option("--window-lo", window_lo, "grid window start (integer)");
  oracle->add_option("--window-hi", window_hi, "grid window end (integer)");

  try {
    app.parse(argc, argv);
    if (materialise->parsed())
      return cmd_materialise(common, output_path, stats_base, explain_pruning, check_invariants);
    if (query->parsed()) return cmd_query(common, fact_text);
    if (generate->parsed())
      return cmd_generate(parse_generator_spec(predicates, gen_constants, gen_facts, min_len,
                                               max_len, span_lo, span_hi),
                          seed, output_path);
    if (bench->parsed())
      return cmd_bench(common.program_path, predicates, constant_sweep, gen_facts,
                       strategies_text, common.max_iters, seed, min_len, max_len, span_lo,
                       span_hi, output_path);
    if (oracle->parsed()) return cmd_oracle_check(common, window_lo, window_hi);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const dmtl::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitOk;
}
