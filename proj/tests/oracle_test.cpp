#include "dmtl/oracle.hpp"

#include <gtest/gtest.h>

#include "dmtl/parse.hpp"
#include "test_util.hpp"

namespace dmtl {
namespace {

using testutil::ga;
using testutil::iv;
using testutil::rat;

struct RunningExample {
  Program program;
  Dataset data;

  RunningExample() {
    program = parse_program(
                  "R1(x,y) :- Diamondminus[1,1] R1(x,y).\n"
                  "Boxplus[1,1] R5(y) :- R2(x,y), Boxplus[1,2] R3(y,z).\n"
                  "R4(x) :- Diamondminus[0,1] R5(x).\n"
                  "R6(y) :- R5(y), Boxminus[0,2] R4(y), R1(x,y).\n")
                  .program;
    data = parse_dataset("R1(c1,c2)@[0,1]\nR2(c1,c2)@[1,2]\nR3(c2,c3)@[2,3]\nR5(c2)@[0,1]");
  }
};

const RunningExample& ex() {
  static const RunningExample instance;
  return instance;
}

TEST(Oracle, LoadsFactsOntoTheGrid) {
  GridInterpretation g = GridInterpretation::load(ex().data, 0, 10);
  GroundAtom r1 = ga("R1", {"c1", "c2"});
  EXPECT_TRUE(g.holds(MetricAtom::rel(RelationalAtom{"R1", {Term::constant("c1"), Term::constant("c2")}}), rat("0")));
  EXPECT_TRUE(g.truth(r1, *g.index_of(rat("1/2"))));
  EXPECT_TRUE(g.truth(r1, *g.index_of(rat("1"))));
  EXPECT_FALSE(g.truth(r1, *g.index_of(rat("3/2"))));

  GridInterpretation empty = GridInterpretation::load(Dataset{}, 0, 10);
  EXPECT_TRUE(empty.atoms().empty());

  GridInterpretation open = GridInterpretation::load(parse_dataset("P(a)@(1,2)"), 0, 10);
  GroundAtom p = ga("P", {"a"});
  EXPECT_FALSE(open.truth(p, *open.index_of(rat("1"))));
  EXPECT_TRUE(open.truth(p, *open.index_of(rat("3/2"))));
  EXPECT_FALSE(open.truth(p, *open.index_of(rat("2"))));
}

TEST(Oracle, RejectsNonIntegerEndpoints) {
  EXPECT_THROW(GridInterpretation::load(parse_dataset("P(a)@[1/2,1]"), 0, 10),
               std::invalid_argument);
  EXPECT_THROW(GridInterpretation::load(parse_dataset("P(a)@(-inf,1]"), 0, 10),
               std::invalid_argument);
}

TEST(Oracle, PointwiseBoxSemantics) {
  GridInterpretation g = GridInterpretation::load(ex().data, 0, 10);
  MetricAtom box = MetricAtom::unary(
      MetricOp::BoxPlus, iv("[1,2]"),
      MetricAtom::rel(RelationalAtom{"R3", {Term::constant("c2"), Term::constant("c3")}}));
  EXPECT_TRUE(g.holds(box, rat("1")));
  EXPECT_FALSE(g.holds(box, rat("3/2")));
  EXPECT_TRUE(g.holds(MetricAtom::top(), rat("5")));
  EXPECT_FALSE(g.holds(MetricAtom::bottom(), rat("5")));
}

TEST(Oracle, StepAgreesWithOneNaiveRound) {
  GridInterpretation g = GridInterpretation::load(ex().data, 0, 20);
  GridInterpretation stepped = g.step(ex().program);
  auto naive1 = naive_materialise(ex().program, ex().data, 1);
  auto mismatches = stepped.compare(naive1.dataset, iv("[0,10]"));
  EXPECT_TRUE(mismatches.empty());

  GridInterpretation same = g.step(Program{});
  EXPECT_TRUE(same == g);
}

TEST(Oracle, ThreeStepsMatchTheEngineOnTheSafeRegion) {
  GridInterpretation g = GridInterpretation::load(ex().data, 0, 20);
  for (int k = 0; k < 3; ++k) g = g.step(ex().program);
  auto naive3 = naive_materialise(ex().program, ex().data, 3);
  auto mismatches = g.compare(naive3.dataset, iv("[0,8]"));
  EXPECT_TRUE(mismatches.empty()) << (mismatches.empty() ? "" : mismatches[0].str());
}

TEST(Oracle, StepIsInflationaryAndMonotone) {
  GridInterpretation g = GridInterpretation::load(ex().data, 0, 12);
  GridInterpretation stepped = g.step(ex().program);
  for (const GroundAtom& atom : g.atoms())
    for (std::size_t i = 0; i < g.point_count(); ++i)
      if (g.truth(atom, i)) {
        EXPECT_TRUE(stepped.truth(atom, i));
      }

  // Monotone: a larger start yields a larger step image.
  Dataset bigger = ex().data;
  bigger.insert({ga("R5", {"c2"}), iv("[4,5]")});
  GridInterpretation g2 = GridInterpretation::load(bigger, 0, 12).step(ex().program);
  for (const GroundAtom& atom : stepped.atoms())
    for (std::size_t i = 0; i < stepped.point_count(); ++i)
      if (stepped.truth(atom, i)) {
        EXPECT_TRUE(g2.truth(atom, i)) << atom.str() << " " << i;
      }
}

TEST(Oracle, CompareFindsInjectedBugs) {
  GridInterpretation g = GridInterpretation::load(ex().data, 0, 10);
  // Engine dataset with a deliberately wrong boundary.
  Dataset broken = ex().data;
  broken.insert({ga("R1", {"c1", "c2"}), iv("(1,3/2]")});
  auto mismatches = g.compare(broken, iv("[0,5]"));
  ASSERT_FALSE(mismatches.empty());
  EXPECT_EQ(mismatches[0].atom, ga("R1", {"c1", "c2"}));
  EXPECT_EQ(mismatches[0].t, rat("3/2"));
  EXPECT_TRUE(mismatches[0].engine);
  EXPECT_FALSE(mismatches[0].oracle);

  // And the mirror image: the oracle knows something the engine misses.
  GridInterpretation tweaked = g;
  tweaked.set_truth(ga("R9", {"c1"}), *g.index_of(rat("2")), true);
  auto missing = tweaked.compare(ex().data, iv("[0,5]"));
  ASSERT_FALSE(missing.empty());
  EXPECT_EQ(missing[0].atom, ga("R9", {"c1"}));
  EXPECT_FALSE(missing[0].engine);
  EXPECT_TRUE(missing[0].oracle);
}

TEST(Oracle, ProgramReachAndSafeRegion) {
  auto reach = program_reach(ex().program);
  ASSERT_TRUE(reach.has_value());
  // r2: body Boxplus[1,2] reaches 2, head Boxplus[1,1] shifts 1.
  EXPECT_EQ(*reach, Rational(3));

  auto safe = safe_region(ex().program, 0, 30, 3);
  ASSERT_TRUE(safe.has_value());
  EXPECT_EQ(*safe, iv("[9,21]"));

  EXPECT_FALSE(safe_region(ex().program, 0, 10, 5).has_value());

  Program unbounded = parse_program("P(x) :- Diamondminus[0,+inf) Q(x).").program;
  EXPECT_FALSE(program_reach(unbounded).has_value());
  EXPECT_FALSE(safe_region(unbounded, 0, 100, 1).has_value());
}

TEST(Oracle, KFoldStepsMatchNaiveKIterations) {
  ReasonerOptions capture;
  capture.capture_iterations = true;
  auto run = naive_materialise(ex().program, ex().data, 4, capture);
  GridInterpretation g = GridInterpretation::load(ex().data, -20, 30);
  for (std::size_t k = 1; k <= 4; ++k) {
    g = g.step(ex().program);
    auto safe = safe_region(ex().program, -20, 30, k);
    ASSERT_TRUE(safe.has_value());
    auto mismatches = g.compare(run.snapshots[k - 1], *safe);
    EXPECT_TRUE(mismatches.empty())
        << "k=" << k << " first=" << (mismatches.empty() ? "" : mismatches[0].str());
  }
}

}  // namespace
}  // namespace dmtl
