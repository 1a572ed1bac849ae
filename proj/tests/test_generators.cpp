#include "coxcheck/errors.hpp"
#include "coxcheck/generators.hpp"
#include "coxcheck/structure_io.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace coxcheck;

namespace {

Rational q(long n, long d = 1) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

std::vector<Rational> grid(std::initializer_list<const char*> values) {
  std::vector<Rational> out;
  for (const char* v : values) out.push_back(parse_rational(v));
  return out;
}

std::string strip_comments(const std::string& text) {
  std::istringstream in(text);
  std::string out;
  for (std::string line; std::getline(in, line);)
    if (line.empty() || line[0] != '#') out += line + "\n";
  return out;
}

}  // namespace

TEST(Generators, ProbabilityRejectsBadWeights) {
  Domain d({"a", "b"});
  EXPECT_THROW(gen_probability(d, {q(1, 2), q(1, 3)}), std::invalid_argument);
  EXPECT_THROW(gen_probability(d, {q(0), q(1)}), std::invalid_argument);
  EXPECT_THROW(gen_probability(d, {q(1)}), std::invalid_argument);
  EXPECT_THROW(gen_distorted(d, {q(1, 2), q(1, 2)}, 0), std::invalid_argument);
}

TEST(Generators, DistortedIsPowerOfProbability) {
  Domain d({"a", "b", "c"});
  std::vector<Rational> w{q(1, 6), q(1, 3), q(1, 2)};
  auto p = gen_probability(d, w), k3 = gen_distorted(d, w, 3);
  for (std::uint64_t u = 1; u < 8; ++u)
    for (std::uint64_t v = 0; v < 8; ++v) {
      Event ue = Event::from_mask(u, 3), ve = Event::from_mask(v, 3);
      Rational x = p.bel(ve, ue);
      EXPECT_EQ(k3.bel(ve, ue), x * x * x);
    }
}

TEST(CoinExtend, EmbeddingPreservesValues) {
  Domain d({"a", "b"});
  auto ext = coin_extend(d, {q(1, 3), q(2, 3)}, 2);
  EXPECT_EQ(ext.extended.atom_count(), 8u);
  EXPECT_EQ(ext.extended.domain().atom(0), "a.00");
  for (std::uint64_t u = 1; u < 4; ++u)
    for (std::uint64_t v = 0; v < 4; ++v) {
      Event ue = Event::from_mask(u, 2), ve = Event::from_mask(v, 2);
      EXPECT_EQ(ext.extended.bel(ext.embed(ve), ext.embed(ue)), ext.base.bel(ve, ue));
    }
  auto dirs = ext.directives();
  ASSERT_EQ(dirs.size(), 2u);
  EXPECT_EQ(dirs[0].base_atom, "a");
  EXPECT_EQ(dirs[0].image.size(), 4u);
}

TEST(CoinExtend, GapShrinks) {
  Domain d({"a", "b"});
  Rational prev = par5_gap(gen_probability(d, {q(1, 2), q(1, 2)}), ValueKind::unconditional);
  for (unsigned n = 1; n <= 3; ++n) {
    auto ext = coin_extend(d, {q(1, 2), q(1, 2)}, n);
    Rational gap = par5_gap(ext.extended, ValueKind::unconditional);
    EXPECT_LE(gap, prev);
    prev = gap;
  }
}

TEST(CoinExtend, CapIsEnforced) {
  Domain d({"a", "b"});
  EXPECT_THROW(coin_extend(d, {q(1, 2), q(1, 2)}, 14), BudgetExceeded);
  EXPECT_THROW(coin_extend(d, {q(1, 2), q(1, 2)}, 0), std::invalid_argument);
}

TEST(CoinExtend, WitnessCarriesOver) {
  Domain d({"a", "b", "c"});
  auto ext = coin_extend(d, {q(1, 6), q(1, 3), q(1, 2)}, 1);
  EXPECT_EQ(decide(ext.base).kind, IsomorphismVerdict::Kind::witness);
  EXPECT_EQ(decide(ext.extended).kind, IsomorphismVerdict::Kind::witness);
}

TEST(CoinFamily, MembersAndEvidence) {
  auto fam = coin_family(3);
  ASSERT_EQ(fam.members.size(), 3u);
  EXPECT_EQ(fam.members[0].atom_count(), 2u);
  EXPECT_EQ(fam.members[2].atom_count(), 8u);
  EXPECT_EQ(fam.members[1].domain().atom(3), "c11");
  EXPECT_TRUE(fam.evidence.uniform);
  EXPECT_THROW(coin_family(0), std::invalid_argument);
}

TEST(SearchMin, TwoAtomsExhaust) {
  auto s = search_min_counterexample(2, grid({"0", "1/2", "1"}));
  EXPECT_TRUE(s.exhausted());
  EXPECT_EQ(s.candidates, s.isomorphic + s.unknown);
}

TEST(SearchMin, ThreeAtomsReproduceShippedFixture) {
  auto g = grid({"0", "1/4", "1/2", "3/4", "1"});
  auto s = search_min_counterexample(3, g);
  ASSERT_TRUE(s.hit);
  ASSERT_TRUE(s.certificate);
  auto again = search_min_counterexample(3, g);
  EXPECT_EQ(serialize(*s.hit, true), serialize(*again.hit, true));
  std::string shipped = read_file(std::string(COXCHECK_FIXTURE_DIR) + "/min_counterexample.bel");
  EXPECT_EQ(serialize(*s.hit, true), strip_comments(shipped));
  EXPECT_TRUE(recheck(*s.hit, *s.certificate).valid);
}

TEST(SearchMin, HitSatisfiesMinAndComplement) {
  auto s = search_min_counterexample(3, grid({"0", "1/4", "1/2", "3/4", "1"}));
  ASSERT_TRUE(s.hit);
  auto ns = extract_negation(*s.hit);
  auto cs = extract_combination(*s.hit);
  ASSERT_TRUE(std::holds_alternative<NegationForm>(ns));
  ASSERT_TRUE(std::holds_alternative<CombinationForm>(cs));
  for (const auto& [x, v] : std::get<NegationForm>(ns).table()) EXPECT_EQ(v, 1 - x);
  for (const auto& [k, v] : std::get<CombinationForm>(cs).table()) EXPECT_EQ(v, std::min(k.first, k.second));
}

TEST(SearchMin, RejectsBadGrids) {
  EXPECT_THROW(search_min_counterexample(3, grid({"0", "1/4", "1"})), std::invalid_argument);
  EXPECT_THROW(search_min_counterexample(3, grid({"1/4", "3/4"})), std::invalid_argument);
  EXPECT_THROW(search_min_counterexample(5, grid({"0", "1"})), std::invalid_argument);
}
