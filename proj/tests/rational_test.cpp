#include "dmtl/rational.hpp"

#include <gtest/gtest.h>

namespace dmtl {
namespace {

TEST(Rational, ParsesIntegerDecimalAndFraction) {
  EXPECT_EQ(Rational::parse("5")->str(), "5");
  EXPECT_EQ(Rational::parse("-3")->str(), "-3");
  EXPECT_EQ(Rational::parse("2.75")->str(), "11/4");
  EXPECT_EQ(Rational::parse("11/4")->str(), "11/4");
  EXPECT_EQ(Rational::parse("+7")->str(), "7");
  EXPECT_EQ(Rational::parse("-0.5")->str(), "-1/2");
}

TEST(Rational, RejectsMalformedText) {
  EXPECT_FALSE(Rational::parse(""));
  EXPECT_FALSE(Rational::parse("abc"));
  EXPECT_FALSE(Rational::parse("1.2.3"));
  EXPECT_FALSE(Rational::parse("1/"));
  EXPECT_FALSE(Rational::parse("/4"));
  EXPECT_FALSE(Rational::parse("1/0"));
  EXPECT_FALSE(Rational::parse("1.-3"));
  EXPECT_FALSE(Rational::parse("--3"));
}

TEST(Rational, CanonicalisesToLowestTerms) {
  EXPECT_EQ(Rational(2, 4), Rational(1, 2));
  EXPECT_EQ(Rational(-2, 4).str(), "-1/2");
  EXPECT_EQ(Rational(6, 3).str(), "2");
  EXPECT_EQ(Rational::parse("10/4"), Rational::parse("2.5"));
  EXPECT_TRUE(Rational(8, 2).is_integer());
  EXPECT_FALSE(Rational(1, 3).is_integer());
}

TEST(Rational, OrderingAndArithmeticAreExact) {
  Rational third(1, 3);
  Rational sum = third + third + third;
  EXPECT_EQ(sum, Rational(1));
  EXPECT_LT(Rational(1, 3), Rational(1, 2));
  EXPECT_GT(Rational(0), Rational(-1, 1000000));
  EXPECT_EQ(Rational(3, 2) - Rational(1, 2), Rational(1));
  EXPECT_EQ(-Rational(5, 2) + Rational(5, 2), Rational(0));
  EXPECT_EQ(Rational(7, 2) * Rational(2), Rational(7));
}

TEST(Rational, RepeatedShiftsDoNotDrift) {
  Rational t(1, 10);  // 0.1 is inexact in binary floating point
  Rational step(1, 10);
  for (int i = 0; i < 1000; ++i) t = t + step;
  EXPECT_EQ(t, Rational(1001, 10));
}

TEST(Rational, FloorCeilHelpers) {
  EXPECT_EQ(Rational(7, 2).floor_long(), 3);
  EXPECT_EQ(Rational(7, 2).ceil_long(), 4);
  EXPECT_EQ(Rational(-7, 2).floor_long(), -4);
  EXPECT_EQ(Rational(-7, 2).ceil_long(), -3);
  EXPECT_EQ(Rational(4).floor_long(), 4);
  EXPECT_EQ(Rational(4).ceil_long(), 4);
}

}  // namespace
}  // namespace dmtl
