#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "hcantor/return_rigidity.hpp"

using namespace hcantor;
using fixtures::q;

TEST(Rational, ParsesFractionsIntegersAndDecimals) {
  EXPECT_EQ(parse_rational("1/3"), q(1, 3));
  EXPECT_EQ(parse_rational("-2/6"), q(-1, 3));
  EXPECT_EQ(parse_rational("7"), q(7));
  EXPECT_EQ(parse_rational(" 0.125 "), q(1, 8));
  EXPECT_EQ(parse_rational("-3e-2"), q(-3, 100));
  EXPECT_EQ(parse_rational("2.5E1"), q(25));
  EXPECT_EQ(parse_rational("1e3"), q(1000));
}

TEST(Rational, RejectsMalformedText) {
  for (const char* bad : {"", "1/0", "abc", "1.2.3", "1/", "/2", "--1", "1e", "inf"}) {
    try {
      parse_rational(bad);
      ADD_FAILURE() << "accepted '" << bad << "'";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::parse) << bad;
    }
  }
}

TEST(Rational, DecimalReadingOfDoubles) {
  EXPECT_EQ(decimal_rational(0.3), q(3, 10));
  EXPECT_EQ(decimal_rational(-1.25), q(-5, 4));
  EXPECT_NE(exact_rational(0.3), q(3, 10));
  EXPECT_EQ(exact_rational(0.375), q(3, 8));
}

TEST(Rational, PrintsLowestTerms) {
  EXPECT_EQ(to_string(q(2, 6)), "1/3");
  EXPECT_EQ(to_string(q(-4, 2)), "-2");
  EXPECT_EQ(to_string(q(0)), "0");
}

TEST(Rational, ShortestDecimalRoundTrips) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int n = 0; n < 2000; ++n) {
    const double x = u(gen);
    EXPECT_EQ(std::stod(shortest_decimal(x)), x);
  }
  EXPECT_EQ(shortest_decimal(0.1), "0.1");
}

TEST(Interval, RequiresStrictOrder) {
  EXPECT_THROW(Interval<Rational>(q(1), q(1)), Error);
  EXPECT_THROW(Interval<double>(0.5, 0.25), Error);
  const auto iv = span(q(2, 3), q(1, 3));
  EXPECT_EQ(iv.lo, q(1, 3));
  EXPECT_EQ(iv.length(), q(1, 3));
}

TEST(Interval, WithinIsExactForRationalsAndSlackForDoubles) {
  const Interval<Rational> outer(q(0), q(1, 3));
  EXPECT_TRUE(within(outer, q(1, 3)));
  EXPECT_FALSE(within(outer, q(1, 3) + q(1, 1000000000000LL)));
  const Interval<double> od(0.0, 1.0 / 3.0);
  EXPECT_TRUE(within(od, 1.0 / 3.0 + 1e-13));
  EXPECT_FALSE(within(od, 1.0 / 3.0 + 1e-9));
}

TEST(Interval, SameIntervalToleranceIsRelativeWithUnitFloor) {
  EXPECT_TRUE(same_interval(Interval<double>(0.1, 0.2), Interval<double>(0.1 + 5e-10, 0.2)));
  EXPECT_FALSE(same_interval(Interval<double>(0.1, 0.2), Interval<double>(0.1 + 5e-9, 0.2)));
}

TEST(AffineMap, MatchingSendsEndpointsByOrientation) {
  const Interval<Rational> from(q(1, 9), q(2, 9)), to(q(1, 3), q(2, 3));
  const auto up = AffineMap<Rational>::matching(from, to, 1);
  EXPECT_EQ(up(from.lo), to.lo);
  EXPECT_EQ(up(from.hi), to.hi);
  const auto down = AffineMap<Rational>::matching(from, to, -1);
  EXPECT_EQ(down(from.lo), to.hi);
  EXPECT_EQ(down(from.hi), to.lo);
  EXPECT_EQ(down.orientation(), -1);
  EXPECT_EQ(down.inverse(down(q(5, 27))), q(5, 27));
  const auto comp = up.after(down);
  EXPECT_EQ(comp(q(1, 7)), up(down(q(1, 7))));
}

TEST(Word, ParsePrintAndOrder) {
  EXPECT_TRUE(Word::parse("").empty());
  EXPECT_TRUE(Word::parse("-").empty());
  const Word w = Word::parse("2-1-12");
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w[2], 12);
  EXPECT_EQ(w.to_string(), "2-1-12");
  EXPECT_THROW(Word::parse("1--2"), Error);
  EXPECT_THROW(Word::parse("1-a"), Error);
  EXPECT_EQ((Word{1, 2} + Word{3}).to_string(), "1-2-3");
  EXPECT_TRUE((Word{1, 2, 1}).starts_with(Word{1, 2}));
  EXPECT_FALSE((Word{1, 2}).valid_for(1));
  EXPECT_LT(Word{1}, (Word{1, 1}));
}

TEST(Triple, ParsesBracketsEmptyWordsAndSigns) {
  const Triple a = Triple::parse("1,1,,-");
  EXPECT_EQ(a.i, 1);
  EXPECT_EQ(a.j, 1);
  EXPECT_EQ(a.p(), 0u);
  EXPECT_EQ(a.sign, -1);
  EXPECT_EQ(Triple::parse("1,1,[],+").sign, 1);
  EXPECT_EQ(Triple::parse("2,1,[1-2],+1").theta, (Word{1, 2}));
  EXPECT_EQ(Triple::parse("1,1,0,-1"), a);
  EXPECT_EQ(Triple::parse(a.to_string()), a);
  EXPECT_THROW(Triple::parse("1,1,+"), Error);
  EXPECT_THROW(Triple::parse("1,1,,x"), Error);
}
