#include "coxcheck/belief.hpp"
#include "coxcheck/errors.hpp"
#include "coxcheck/structure_io.hpp"

#include <gtest/gtest.h>

using namespace coxcheck;

namespace {

Rational q(long n, long d = 1) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

BeliefStructure uniform2() { return parse_structure("domain: a b\ngenerate probability a=1/2 b=1/2\n"); }

}  // namespace

TEST(Rational, ParsesFractionsAndDecimalsExactly) {
  EXPECT_EQ(parse_rational("0.25"), q(1, 4));
  EXPECT_EQ(parse_rational("2/6"), q(1, 3));
  EXPECT_EQ(parse_rational("-1.5e-2"), q(-3, 200));
  EXPECT_EQ(to_string(q(4, 2)), "2");
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_rational("abc"), std::invalid_argument);
}

TEST(Rational, ConvergentRespectsDenominatorCap) {
  EXPECT_EQ(nearest_convergent(1.0L / 3.0L, 1000), q(1, 3));
  EXPECT_EQ(nearest_convergent(3.14159265358979L, 7), q(22, 7));
}

TEST(Event, SetAlgebra) {
  Domain d({"a", "b", "c"});
  Event ab = d.event({"a", "b"}), bc = d.event({"b", "c"});
  EXPECT_EQ(d.format(ab & bc), "{b}");
  EXPECT_EQ(d.format(ab | bc), "{a b c}");
  EXPECT_EQ(d.format(ab - bc), "{a}");
  EXPECT_EQ(d.format(ab.complement()), "{c}");
  EXPECT_TRUE((ab & bc).subset_of(ab));
  EXPECT_THROW(d.event({"z"}), std::invalid_argument);
}

TEST(BeliefCore, UniformTwoAtomValue) {
  auto b = uniform2();
  const Domain& d = b.domain();
  EXPECT_EQ(b.bel(d.event({"a"})), q(1, 2));
  EXPECT_EQ(b.bel(d.event({"a"}), d.full_event()), q(1, 2));
}

TEST(BeliefCore, WholeContextHasTopValue) {
  auto b = parse_structure("domain: a b c\ngenerate probability a=1/6 b=1/3 c=1/2\n");
  const Domain& d = b.domain();
  for (std::uint64_t m = 1; m < 8; ++m) {
    Event u = Event::from_mask(m, 3);
    EXPECT_EQ(b.bel(d.full_event(), u), q(1));
    EXPECT_EQ(b.bel(u, u), q(1));
  }
}

TEST(BeliefCore, DisjointEventCanonicalizesToEmpty) {
  auto b = uniform2();
  const Domain& d = b.domain();
  EXPECT_EQ(b.bel(d.event({"a"}), d.event({"b"})), q(0));
  EXPECT_EQ(b.bel(d.event({"a"}), d.event({"b"})), b.bel(d.empty_event(), d.event({"b"})));
}

TEST(BeliefCore, EmptyContextThrows) {
  auto b = uniform2();
  EXPECT_THROW(b.bel(b.domain().full_event(), b.domain().empty_event()), std::domain_error);
}

TEST(BeliefCore, ConflictingLinesAreAParseError) {
  const char* text =
      "domain: a b\ngenerate probability a=1/2 b=1/2\n"
      "bel {a} | * = 1/3\nbel {a} | * = 2/3\n";
  EXPECT_THROW(parse_structure(text), ParseError);
}

TEST(BeliefCore, MissingEntryListsThePair) {
  std::string text = "domain: a b\n";
  for (const char* line : {"bel {} | {a} = 0", "bel {a} | {a} = 1", "bel {} | {b} = 0", "bel {b} | {b} = 1",
                           "bel {} | * = 0", "bel {b} | * = 1/2", "bel * | * = 1"})
    text += std::string(line) + "\n";
  try {
    parse_structure(text);
    FAIL() << "expected IncompleteTableError";
  } catch (const IncompleteTableError& e) {
    ASSERT_EQ(e.missing().size(), 1u);
    EXPECT_NE(e.missing()[0].find("{a}"), std::string::npos);
    EXPECT_NE(e.missing()[0].find("{a b}"), std::string::npos);
  }
}

TEST(BeliefCore, DecimalLiteralsAreExact) {
  auto b = parse_structure("domain: a b\ngenerate probability a=0.25 b=0.75\n");
  EXPECT_EQ(b.bel(b.domain().event({"a"})), q(1, 4));
}

TEST(BeliefCore, BoundsDirective) {
  auto b = parse_structure("domain: a b\nbounds: 1 2\ngenerate probability a=1/3 b=2/3\n");
  EXPECT_EQ(b.bounds().lo, q(1));
  EXPECT_EQ(b.bounds().hi, q(2));
  EXPECT_EQ(b.bel(b.domain().event({"a"})), q(4, 3));
  EXPECT_EQ(b.bel(b.domain().empty_event(), b.domain().event({"a"})), q(1));
}

TEST(BeliefCore, RoundTripIsIdentity) {
  auto b = parse_structure("domain: a b c\ngenerate distorted k=2 a=1/6 b=1/3 c=1/2\n");
  auto again = parse_structure(serialize(b));
  EXPECT_TRUE(b.same_values(again));
  auto expanded = parse_structure(serialize(b, true));
  EXPECT_TRUE(expanded.is_table());
  EXPECT_TRUE(b.same_values(expanded));
  EXPECT_EQ(serialize(expanded, true), serialize(parse_structure(serialize(expanded, true)), true));
}

TEST(Attained, Examples) {
  EXPECT_EQ(attained(uniform2(), ValueKind::unconditional), (std::vector<Rational>{q(0), q(1, 2), q(1)}));
  auto b = parse_structure("domain: a b\ngenerate probability a=1/3 b=2/3\n");
  EXPECT_EQ(attained(b, ValueKind::conditional), (std::vector<Rational>{q(0), q(1, 3), q(2, 3), q(1)}));
  auto one = parse_structure("domain: a\ngenerate probability a=1\n");
  EXPECT_EQ(attained(one, ValueKind::conditional), (std::vector<Rational>{q(0), q(1)}));
}

TEST(Chains, OneAtomHasTwoChains) {
  auto one = parse_structure("domain: a\ngenerate probability a=1\n");
  EXPECT_EQ(chains(one).size(), 2u);
}

TEST(Chains, TwoAtomsMatchBruteForce) {
  auto b = parse_structure("domain: a b\ngenerate probability a=1/3 b=2/3\n");
  auto all = chains(b);
  std::size_t brute = 0;
  for (std::uint64_t u1 = 0; u1 < 4; ++u1)
    for (std::uint64_t u2 = 0; u2 < 4; ++u2)
      for (std::uint64_t u3 = 1; u3 < 4; ++u3)
        for (std::uint64_t u4 = 0; u4 < 4; ++u4)
          if ((u2 & ~u1) == 0 && (u3 & ~u2) == 0 && (u4 & ~u3) == 0) ++brute;
  EXPECT_EQ(brute, 16u);
  EXPECT_EQ(all.size(), brute);
  for (const auto& c : all) {
    EXPECT_TRUE(c.u4.subset_of(c.u3));
    EXPECT_TRUE(c.u3.subset_of(c.u2));
    EXPECT_TRUE(c.u2.subset_of(c.u1));
    EXPECT_FALSE(c.u3.empty());
    EXPECT_EQ(c.u_c, c.x * c.y * c.z);
  }
}

TEST(Chains, SampledStreamIsSeeded) {
  Domain d({"a", "b", "c", "d", "e", "f", "g"});
  std::vector<Rational> w(7, q(1, 7));
  auto b = BeliefStructure::from_measure(d, w);
  ChainOptions o;
  o.sample_budget = 50;
  o.seed = 3;
  auto first = chains(b, o), second = chains(b, o);
  ASSERT_EQ(first.size(), 50u);
  for (std::size_t i = 0; i < first.size(); ++i) EXPECT_EQ(first[i].u4, second[i].u4);
}

TEST(Orbits, CountMatchesEnumeration) {
  std::vector<std::size_t> sizes{2, 1};
  std::size_t visited = 0;
  for_each_nested(sizes, 3, [&](const std::vector<Counts>&) {
    ++visited;
    return true;
  });
  EXPECT_EQ(static_cast<double>(visited), nested_orbit_count(sizes, 3));
  EXPECT_THROW(for_each_nested(sizes, 3, [](const std::vector<Counts>&) { return true; }, 2), BudgetExceeded);
}

TEST(BeliefCore, MaterializeAgreesWithMeasure) {
  Domain d({"a", "b", "c"});
  auto m = BeliefStructure::from_measure(d, {q(1, 2), q(1, 4), q(1, 4)}, 2);
  auto t = m.materialize();
  EXPECT_TRUE(t.is_table());
  EXPECT_TRUE(m.same_values(t));
  EXPECT_EQ(t.bel(d.event({"a"})), q(1, 4));
}

TEST(BeliefCore, AffineRelabelMapsBounds) {
  auto b = uniform2().affine(q(1, 2), q(1, 4));
  EXPECT_EQ(b.bounds().lo, q(1, 4));
  EXPECT_EQ(b.bounds().hi, q(3, 4));
  EXPECT_EQ(b.bel(b.domain().event({"a"})), q(1, 2));
}
