#include "dmtl/evaluation.hpp"

#include <gtest/gtest.h>

#include <array>

#include "dmtl/oracle.hpp"
#include "dmtl/parse.hpp"
#include "test_util.hpp"

namespace dmtl {
namespace {

using testutil::ga;
using testutil::iv;
using testutil::rat;
using testutil::Rng;

MetricAtom rel(const std::string& pred, std::vector<std::string> args) {
  RelationalAtom atom{pred, {}};
  for (auto& a : args) atom.terms.push_back(Term::constant(std::move(a)));
  return MetricAtom::rel(std::move(atom));
}

HoldingSet holding(std::vector<const char*> intervals) {
  std::vector<Interval> raw;
  for (const char* text : intervals) raw.push_back(iv(text));
  return HoldingSet::normalize(std::move(raw));
}

const Dataset& running_example() {
  static const Dataset d = parse_dataset(
      "R1(c1,c2)@[0,1]\nR2(c1,c2)@[1,2]\nR3(c2,c3)@[2,3]\nR5(c2)@[0,1]");
  return d;
}

TEST(Evaluation, DiamondMinusShiftsForward) {
  auto h = eval_ground_atom(
      MetricAtom::unary(MetricOp::DiamondMinus, iv("[1,1]"), rel("R1", {"c1", "c2"})),
      running_example());
  EXPECT_EQ(h, holding({"[1,2]"}));
}

TEST(Evaluation, BoxPlusNeedsTheWholeWindow) {
  auto h = eval_ground_atom(
      MetricAtom::unary(MetricOp::BoxPlus, iv("[1,2]"), rel("R3", {"c2", "c3"})),
      running_example());
  EXPECT_EQ(h, holding({"[1,1]"}));
}

TEST(Evaluation, DiamondMinusMergesAdjacentImages) {
  auto h = eval_ground_atom(
      MetricAtom::unary(MetricOp::DiamondMinus, iv("[0,1]"), rel("R5", {"c2"})),
      running_example());
  EXPECT_EQ(h, holding({"[0,2]"}));
}

TEST(Evaluation, PunctualZeroRangeIsIdentity) {
  Dataset d = parse_dataset("P(a)@[0,1]\nP(a)@(3,5]");
  for (MetricOp op : {MetricOp::DiamondMinus, MetricOp::DiamondPlus, MetricOp::BoxMinus,
                      MetricOp::BoxPlus}) {
    auto h = eval_ground_atom(MetricAtom::unary(op, iv("[0,0]"), rel("P", {"a"})), d);
    EXPECT_EQ(h, holding({"[0,1]", "(3,5]"}));
  }
}

TEST(Evaluation, BoxMinusDropsShortComponents) {
  Dataset d = parse_dataset("P(a)@[0,1]\nP(a)@[3,9]");
  auto h = eval_ground_atom(MetricAtom::unary(MetricOp::BoxMinus, iv("[0,2]"), rel("P", {"a"})), d);
  EXPECT_EQ(h, holding({"[5,9]"}));
}

TEST(Evaluation, TopAndBottom) {
  EXPECT_EQ(eval_ground_atom(MetricAtom::top(), Dataset{}), holding({"(-inf,+inf)"}));
  EXPECT_TRUE(eval_ground_atom(MetricAtom::bottom(), running_example()).empty());
  // Unbounded diamond over a fact reaches the whole future.
  Dataset d = parse_dataset("P(a)@[2,3]");
  auto h = eval_ground_atom(
      MetricAtom::unary(MetricOp::DiamondMinus, iv("[0,+inf)"), rel("P", {"a"})), d);
  EXPECT_EQ(h, holding({"[2,+inf)"}));
}

TEST(Evaluation, SinceCombineExamples) {
  // 0 in the range: the vacuous witness contributes all of i2.
  auto vac = since_combine(iv("[9,10]"), iv("[5,6]"), iv("[0,1]"));
  ASSERT_TRUE(vac);
  EXPECT_TRUE(vac->contains(iv("[5,6]")));

  EXPECT_EQ(since_combine(iv("(1,4)"), iv("[0,1]"), iv("[1,2]")), iv("[2,3]"));

  // No admissible witness: i2 far left of i1 with a positive range.
  EXPECT_EQ(since_combine(iv("(10,12)"), iv("[0,1]"), iv("[1,2]")), std::nullopt);
}

TEST(Evaluation, UntilCombineExamples) {
  EXPECT_EQ(until_combine(iv("(1,4)"), iv("[4,5]"), iv("[1,2]")), iv("[2,3]"));
  auto vac = until_combine(iv("(8,9)"), iv("[5,6]"), iv("[0,2]"));
  ASSERT_TRUE(vac);
  EXPECT_TRUE(vac->contains(iv("[5,6]")));
  // Mirror of the since example under t -> -t.
  auto s = since_combine(iv("(1,4)"), iv("[0,1]"), iv("[1,2]"));
  auto u = until_combine(reflect(iv("(1,4)")), reflect(iv("[0,1]")), iv("[1,2]"));
  ASSERT_TRUE(s && u);
  EXPECT_EQ(reflect(*u), *s);
}

TEST(Evaluation, SinceLeftOperandMayBeTouchedFromTheLeft) {
  // t' = 1 is the left endpoint of a left-open i1; only (t',t) must fit.
  Dataset d = parse_dataset("A(a)@(1,4)\nB(a)@[0,1]");
  auto h = eval_ground_atom(
      MetricAtom::binary(MetricOp::Since, iv("[1,2]"), rel("A", {"a"}), rel("B", {"a"})), d);
  EXPECT_EQ(h, holding({"[2,3]"}));
}

TEST(Evaluation, EntailsMetricExamples) {
  MetricAtom box_r3 = MetricAtom::unary(MetricOp::BoxPlus, iv("[1,2]"), rel("R3", {"c2", "c3"}));
  EXPECT_TRUE(entails_metric(running_example(), box_r3, iv("[1,1]")));
  EXPECT_FALSE(entails_metric(running_example(), box_r3, iv("[0,1]")));
  EXPECT_TRUE(entails_metric(Dataset{}, MetricAtom::top(), iv("(-inf,+inf)")));
}

TEST(Evaluation, HeadProjectionExamples) {
  MetricAtom boxed_r5 = MetricAtom::unary(MetricOp::BoxPlus, iv("[1,1]"), rel("R5", {"c2"}));
  auto f1 = head_project(boxed_r5, iv("[1,1]"));
  ASSERT_TRUE(f1);
  EXPECT_EQ(f1->str(), "R5(c2)@[2,2]");

  auto f2 = head_project(rel("R4", {"c2"}), iv("[0,2]"));
  ASSERT_TRUE(f2);
  EXPECT_EQ(f2->str(), "R4(c2)@[0,2]");

  MetricAtom boxminus_p = MetricAtom::unary(MetricOp::BoxMinus, iv("[0,2]"), rel("P", {"a"}));
  auto f3 = head_project(boxminus_p, iv("[5,6]"));
  ASSERT_TRUE(f3);
  EXPECT_EQ(f3->str(), "P(a)@[3,6]");

  EXPECT_FALSE(head_project(MetricAtom::top(), iv("[0,1]")));
}

TEST(Evaluation, MemoisationReturnsConsistentResults) {
  EvalContext ctx(running_example());
  MetricAtom m = MetricAtom::unary(MetricOp::DiamondMinus, iv("[0,1]"), rel("R5", {"c2"}));
  const HoldingSet& first = ctx.eval(m);
  const HoldingSet& second = ctx.eval(m);
  EXPECT_EQ(&first, &second);
  EXPECT_EQ(first, holding({"[0,2]"}));
}

// Randomised ground atoms against the pointwise grid oracle.
class OperatorVsGrid : public ::testing::Test {
 protected:
  void check(const MetricAtom& atom, const Dataset& d, long span_lo, long span_hi) {
    const long margin = 8;  // deepest generated reach is 2 ranges of 3, plus slack
    GridInterpretation grid =
        GridInterpretation::load(d, span_lo - 2 * margin, span_hi + 2 * margin);
    HoldingSet h = eval_ground_atom(atom, d);
    std::vector<char> oracle = grid.eval_all(atom);
    for (long halves = (span_lo - margin) * 2; halves <= (span_hi + margin) * 2; ++halves) {
      Rational t(halves, 2);
      bool engine = h.contains(t);
      bool pointwise = oracle[*grid.index_of(t)] != 0;
      ASSERT_EQ(engine, pointwise) << atom.str() << " at " << t.str() << "\n over " << render(d);
    }
  }

  Dataset random_ground_dataset(Rng& rng, const std::vector<std::string>& preds, long lo,
                                long hi) {
    Dataset d;
    int n = 1 + static_cast<int>(rng.below(5));
    for (int i = 0; i < n; ++i) {
      const std::string& p = preds[static_cast<std::size_t>(rng.below(static_cast<long>(preds.size())))];
      d.insert({ga(p, {"a"}), testutil::random_fact_interval(rng, lo, hi)});
    }
    return d;
  }
};

TEST_F(OperatorVsGrid, UnaryOperatorsAgreeWithTheOracle) {
  Rng rng(801);
  for (int round = 0; round < 600; ++round) {
    Dataset d = random_ground_dataset(rng, {"A"}, 0, 8);
    MetricOp op = std::array{MetricOp::DiamondMinus, MetricOp::DiamondPlus, MetricOp::BoxMinus,
                             MetricOp::BoxPlus}[rng.below(4)];
    MetricAtom atom = MetricAtom::unary(op, testutil::random_range(rng, 3), rel("A", {"a"}));
    check(atom, d, 0, 8);
  }
}

TEST_F(OperatorVsGrid, NestedOperatorsAgreeWithTheOracle) {
  Rng rng(802);
  for (int round = 0; round < 300; ++round) {
    Dataset d = random_ground_dataset(rng, {"A", "B"}, 0, 8);
    MetricOp inner_op = std::array{MetricOp::DiamondMinus, MetricOp::DiamondPlus,
                                   MetricOp::BoxMinus, MetricOp::BoxPlus}[rng.below(4)];
    MetricOp outer_op = std::array{MetricOp::DiamondMinus, MetricOp::DiamondPlus,
                                   MetricOp::BoxMinus, MetricOp::BoxPlus}[rng.below(4)];
    MetricAtom atom = MetricAtom::unary(
        outer_op, testutil::random_range(rng, 3),
        MetricAtom::unary(inner_op, testutil::random_range(rng, 3), rel("A", {"a"})));
    check(atom, d, 0, 8);
  }
}

TEST_F(OperatorVsGrid, SinceUntilAgreeWithTheOracle) {
  Rng rng(803);
  for (int round = 0; round < 600; ++round) {
    Dataset d = random_ground_dataset(rng, {"A", "B"}, 0, 8);
    MetricOp op = rng.chance(50) ? MetricOp::Since : MetricOp::Until;
    MetricAtom atom = MetricAtom::binary(op, testutil::random_range(rng, 3), rel("A", {"a"}),
                                         rel("B", {"a"}));
    check(atom, d, 0, 8);
  }
}

TEST(Evaluation, MonotonicityUnderDatasetGrowth) {
  Rng rng(804);
  testutil::GenOptions opt;
  for (int round = 0; round < 300; ++round) {
    testutil::Vocabulary vocab = testutil::random_vocabulary(rng, opt);
    Dataset small = testutil::random_dataset(rng, vocab, opt);
    Dataset big = coalesce_merge(small, testutil::random_dataset(rng, vocab, opt));
    MetricAtom atom = testutil::random_body_atom(rng, vocab, opt);
    Substitution subst;
    for (const std::string& v : atom.variables()) subst.mapping[v] = vocab.constants[0];
    MetricAtom ground = subst.apply(atom);
    HoldingSet h_small = eval_ground_atom(ground, small);
    HoldingSet h_big = eval_ground_atom(ground, big);
    for (const Interval& piece : h_small.intervals())
      EXPECT_TRUE(h_big.covers(piece)) << ground.str() << " piece " << piece.str();
  }
}

TEST(Evaluation, BoxIsContainedInDiamond) {
  Rng rng(805);
  for (int round = 0; round < 400; ++round) {
    Dataset d;
    int n = 1 + static_cast<int>(rng.below(4));
    for (int i = 0; i < n; ++i) d.insert({ga("A", {"a"}), testutil::random_fact_interval(rng, 0, 8)});
    Interval range = testutil::random_range(rng, 3);
    for (bool past : {true, false}) {
      MetricAtom box = MetricAtom::unary(past ? MetricOp::BoxMinus : MetricOp::BoxPlus, range,
                                         rel("A", {"a"}));
      MetricAtom diamond = MetricAtom::unary(
          past ? MetricOp::DiamondMinus : MetricOp::DiamondPlus, range, rel("A", {"a"}));
      HoldingSet boxed = eval_ground_atom(box, d);
      HoldingSet shone = eval_ground_atom(diamond, d);
      for (const Interval& piece : boxed.intervals()) EXPECT_TRUE(shone.covers(piece));
    }
  }
}

TEST(Evaluation, ZeroInRangeMakesSinceUntilCoverTheRightOperand) {
  Rng rng(806);
  for (int round = 0; round < 400; ++round) {
    Dataset d;
    int n = 1 + static_cast<int>(rng.below(4));
    for (int i = 0; i < n; ++i) d.insert({ga("A", {"a"}), testutil::random_fact_interval(rng, 0, 8)});
    int m = 1 + static_cast<int>(rng.below(4));
    for (int i = 0; i < m; ++i) d.insert({ga("B", {"a"}), testutil::random_fact_interval(rng, 0, 8)});
    long hi = rng.below(4);
    Interval range(Endpoint::finite(Rational(0)), Endpoint::finite(Rational(hi)), true,
                   hi == 0 ? true : rng.chance(60));
    HoldingSet rhs = eval_ground_atom(rel("B", {"a"}), d);
    for (MetricOp op : {MetricOp::Since, MetricOp::Until}) {
      HoldingSet combined =
          eval_ground_atom(MetricAtom::binary(op, range, rel("A", {"a"}), rel("B", {"a"})), d);
      for (const Interval& piece : rhs.intervals()) EXPECT_TRUE(combined.covers(piece));
    }
  }
}

}  // namespace
}  // namespace dmtl
