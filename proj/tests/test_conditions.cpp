#include "coxcheck/conditions.hpp"
#include "coxcheck/errors.hpp"
#include "coxcheck/generators.hpp"
#include "coxcheck/isomorphism.hpp"
#include "coxcheck/structure_io.hpp"

#include <gtest/gtest.h>

using namespace coxcheck;

namespace {

Rational q(long n, long d = 1) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

BeliefStructure prob(std::vector<std::string> atoms, std::vector<Rational> w) {
  return gen_probability(Domain(std::move(atoms)), w);
}

BeliefStructure one_atom() { return prob({"a"}, {q(1)}); }

BeliefStructure fixture(const std::string& name) {
  return parse_structure(read_file(std::string(COXCHECK_FIXTURE_DIR) + "/" + name));
}

}  // namespace

TEST(Bounds, ProbabilityPasses) {
  auto r = check_bounds(prob({"a", "b", "c"}, {q(1, 2), q(1, 4), q(1, 4)}));
  EXPECT_TRUE(r.passes());
  EXPECT_GT(r.pairs_checked, 0u);
}

TEST(Bounds, ValueAboveRangeFailsWithWitness) {
  TableBuilder t(prob({"a", "b"}, {q(1, 2), q(1, 2)}).materialize());
  const Domain& d = t.domain();
  t.set(d.event({"a"}), d.full_event(), q(3, 2), true);
  auto r = check_bounds(t.build());
  EXPECT_FALSE(r.range_ok);
  ASSERT_TRUE(r.range_witness);
  EXPECT_EQ(r.range_witness->v, d.event({"a"}));
  EXPECT_EQ(r.range_witness->u, d.full_event());
  EXPECT_EQ(r.range_witness->value, q(3, 2));
}

TEST(Bounds, WrongEndpointFails) {
  TableBuilder t(prob({"a", "b"}, {q(1, 2), q(1, 2)}).materialize());
  const Domain& d = t.domain();
  t.set(d.event({"a"}), d.event({"a"}), q(1, 2), true);
  auto r = check_bounds(t.build());
  EXPECT_FALSE(r.endpoints_ok);
  ASSERT_TRUE(r.endpoint_witness);
  EXPECT_EQ(r.endpoint_witness->u, d.event({"a"}));
}

TEST(Bounds, IntervalFixturePasses) {
  auto b = fixture("interval.bel");
  EXPECT_EQ(b.bounds().lo, q(1));
  EXPECT_EQ(b.bounds().hi, q(2));
  EXPECT_TRUE(check_bounds(b).passes());
}

TEST(Bounds, LargeMeasureUsesClosedForm) {
  auto b = coin_domain(12);
  auto r = check_bounds(b);
  EXPECT_TRUE(r.passes());
  EXPECT_TRUE(r.closed_form);
}

TEST(Gap, TwoCoinUniform) {
  auto b = coin_domain(2);
  EXPECT_EQ(attained(b, ValueKind::conditional),
            (std::vector<Rational>{q(0), q(1, 4), q(1, 3), q(1, 2), q(2, 3), q(3, 4), q(1)}));
  EXPECT_EQ(par5_gap(b), q(1, 8));
}

TEST(Gap, OneAtom) { EXPECT_EQ(par5_gap(one_atom()), q(1, 2)); }

TEST(Gap, IntervalBoundsScaleTheGap) {
  auto b = prob({"a", "b"}, {q(1, 2), q(1, 2)});
  EXPECT_EQ(par5_gap(b), q(1, 4));
  EXPECT_EQ(par5_gap(b.affine(q(2), q(1))), q(1, 2));
}

TEST(Triples, TopTargetPassesWithWholeDomain) {
  auto b = prob({"a", "b", "c"}, {q(1, 3), q(1, 3), q(1, 3)});
  auto r = par5_triples(b, DensityProbe{q(1), q(1), q(1), q(1, 100)});
  EXPECT_TRUE(r.pass);
  ASSERT_TRUE(r.chain);
  EXPECT_EQ(r.distance, 0);
  EXPECT_EQ(r.chain->x, q(1));
  EXPECT_EQ(r.chain->y, q(1));
  EXPECT_EQ(r.chain->z, q(1));
}

TEST(Triples, OneAtomMissesOneHalf) {
  auto r = par5_triples(one_atom(), DensityProbe{q(1, 2), q(1, 2), q(1, 2), q(1, 4)});
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.distance, q(1, 2));
}

TEST(Triples, SixteenAtomsHalvingChain) {
  auto r = par5_triples(coin_domain(4), DensityProbe{q(1, 2), q(1, 2), q(1, 2), q(1, 8)});
  EXPECT_TRUE(r.pass);
  ASSERT_TRUE(r.chain);
  const auto& c = *r.chain;
  EXPECT_EQ(c.x, q(1, 2));
  EXPECT_EQ(c.y, q(1, 2));
  EXPECT_EQ(c.z, q(1, 2));
  EXPECT_EQ(c.u2.count() * 2, c.u1.count());
  EXPECT_EQ(c.u3.count() * 2, c.u2.count());
  EXPECT_EQ(c.u4.count() * 2, c.u3.count());
  auto explicit_chain = make_chain(coin_domain(4), Event::from_mask(0xFFFF, 16), Event::from_mask(0xFF, 16),
                                   Event::from_mask(0xF, 16), Event::from_mask(0x3, 16));
  EXPECT_EQ(explicit_chain.x, q(1, 2));
  EXPECT_EQ(explicit_chain.y, q(1, 2));
  EXPECT_EQ(explicit_chain.z, q(1, 2));
}

TEST(Family, OneAtomFailsAtOneHalf) {
  auto r = par5_family({one_atom()}, 3, q(1, 4));
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.failures, 0u);
  // Bel(U3|U2) = 1 whenever U3 is nonempty, so targets with y = 0 are the farthest.
  EXPECT_EQ(r.worst_distance, 1.0);
  EXPECT_EQ(r.worst_target[1], q(0));
  EXPECT_FALSE(par5_triples(one_atom(), DensityProbe{q(1, 2), q(1), q(1), q(1, 4)}).pass);
}

TEST(Family, EmptyGridIsVacuous) {
  auto r = par5_family({one_atom()}, 0, q(1, 4));
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.vacuous);
  EXPECT_EQ(r.targets, 0u);
}

TEST(Family, SmallCoinFamilyCoarseGrid) {
  // Closest chain to (1/2, 0, 0) on 32 atoms is 32 ⊇ 8 ⊇ 2 ⊇ 1, exactly 1/4 away; "within" is strict.
  auto boundary = par5_family(coin_family(5).members, 3, q(1, 4));
  EXPECT_FALSE(boundary.pass);
  EXPECT_EQ(boundary.worst_distance, 0.25);
  auto fam = coin_family(6);
  auto r = par5_family(fam.members, 3, q(1, 4));
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.targets, 27u);
  EXPECT_EQ(r.cloud_sizes.size(), 6u);
}

TEST(Family, SerialAndParallelAgree) {
  auto fam = coin_family(5);
  FamilyDensityOptions serial;
  serial.parallel = false;
  auto a = par5_family(fam.members, 6, q(1, 10));
  auto b = par5_family(fam.members, 6, q(1, 10), serial);
  EXPECT_EQ(a.pass, b.pass);
  EXPECT_EQ(a.failures, b.failures);
  EXPECT_EQ(a.worst_target, b.worst_target);
  EXPECT_EQ(a.worst_distance, b.worst_distance);
}

TEST(ChainConsistency, ProbabilityPasses) {
  EXPECT_TRUE(chain_consistency(prob({"a", "b", "c"}, {q(1, 6), q(1, 3), q(1, 2)})).passes());
  auto r = chain_consistency(coin_domain(3));
  EXPECT_TRUE(r.passes());
  EXPECT_FALSE(r.vacuous);
  EXPECT_GT(r.interior_instances, 0u);
}

TEST(ChainConsistency, OneAtomIsVacuous) {
  auto r = chain_consistency(one_atom());
  EXPECT_TRUE(r.passes());
  EXPECT_TRUE(r.vacuous);
}

TEST(ChainConsistency, ForgedFixtureGivesCertificate) {
  auto b = fixture("chain_forged.bel");
  auto r = chain_consistency(b);
  ASSERT_EQ(r.outcome, ChainConsistencyReport::Outcome::certificate);
  ASSERT_TRUE(r.certificate);
  const auto& c = *r.certificate;
  EXPECT_EQ(c.yz.x, c.y);
  EXPECT_EQ(c.yz.y, c.z);
  EXPECT_EQ(c.x_yz.x, c.x);
  EXPECT_EQ(c.x_yz.y, c.yz.result);
  EXPECT_EQ(c.xy.x, c.x);
  EXPECT_EQ(c.xy.y, c.y);
  EXPECT_EQ(c.xy_z.x, c.xy.result);
  EXPECT_EQ(c.xy_z.y, c.z);
  EXPECT_NE(c.x_yz.result, c.xy_z.result);
  auto re = recheck(b, RefutationCertificate{c});
  EXPECT_TRUE(re.valid) << re.reason;
}

TEST(ChainConsistency, CatalogProductPasses) {
  auto f = extract_combination(prob({"a", "b", "c"}, {q(1, 4), q(1, 4), q(1, 2)}));
  auto r = chain_consistency(std::get<CombinationForm>(f));
  EXPECT_TRUE(r.passes());
  EXPECT_GT(r.instances, 0u);
}

TEST(NegationIdentity, ProbabilityPasses) {
  auto r = bel_level_negation(prob({"a", "b", "c"}, {q(1, 6), q(1, 3), q(1, 2)}));
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.untestable.empty());
}

TEST(NegationIdentity, FailsAtOneThird) {
  auto b = prob({"a", "b"}, {q(1, 3), q(2, 3)});
  auto s = NegationForm::tabular({{q(0), q(1)}, {q(1, 3), q(2, 3)}, {q(2, 3), q(1, 2)}, {q(1), q(0)}});
  auto r = bel_level_negation(b, s);
  EXPECT_FALSE(r.pass);
  ASSERT_TRUE(r.failing_y);
  EXPECT_EQ(*r.failing_y, q(1, 3));
  EXPECT_EQ(r.s_y, q(2, 3));
  EXPECT_EQ(r.s_s_y, q(1, 2));
}

TEST(NegationIdentity, GapIsUntestable) {
  auto b = prob({"a", "b"}, {q(1, 3), q(2, 3)});
  auto s = NegationForm::tabular({{q(0), q(1)}, {q(1, 3), q(2, 3)}, {q(1), q(0)}});
  auto r = bel_level_negation(b, s);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.untestable, (std::vector<Rational>{q(1, 3), q(2, 3)}));
  EXPECT_EQ(r.checked, 2u);
}

TEST(NegationIdentity, A1ConflictIsAPrecondition) {
  EXPECT_THROW(bel_level_negation(fixture("a1_conflict.bel")), PreconditionError);
}

TEST(Uniformity, CoinFamilyIsUniform) {
  auto fam = coin_family(5);
  EXPECT_TRUE(fam.evidence.uniform) << fam.evidence.conflict;
  for (const auto& [x, v] : fam.evidence.s_table) EXPECT_EQ(v, 1 - x);
  for (const auto& [k, v] : fam.evidence.f_table) EXPECT_EQ(v, k.first * k.second);
}

TEST(Uniformity, DifferentNegationsConflict) {
  auto p = prob({"a", "b"}, {q(1, 4), q(3, 4)});
  auto d = gen_distorted(Domain({"a", "b"}), {q(1, 2), q(1, 2)}, 2);
  auto ev = build_uniformity({p, d});
  EXPECT_FALSE(ev.uniform);
  EXPECT_NE(ev.conflict.find("S(1/4)"), std::string::npos) << ev.conflict;
}

TEST(Uniformity, ClosedFormMembersChecked) {
  ExtractionOptions small;
  small.cap = 1000;
  auto ev = build_uniformity({coin_domain(2), coin_domain(9)}, small);
  EXPECT_TRUE(ev.uniform) << ev.conflict;
  EXPECT_EQ(ev.closed_form_members, (std::vector<std::size_t>{1}));
  auto bad = build_uniformity({coin_domain(2), gen_distorted(coin_domain(9).domain(), coin_domain(9).weights(), 2)},
                              small);
  EXPECT_FALSE(bad.uniform);
}
