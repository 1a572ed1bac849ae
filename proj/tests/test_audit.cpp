#include "coxcheck/audit.hpp"
#include "coxcheck/errors.hpp"
#include "coxcheck/generators.hpp"
#include "coxcheck/report.hpp"
#include "coxcheck/structure_io.hpp"

#include <gtest/gtest.h>

using namespace coxcheck;

namespace {

Rational q(long n, long d = 1) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

StructureDocument fixture_doc(const std::string& name) {
  return parse_document(read_file(std::string(COXCHECK_FIXTURE_DIR) + "/" + name));
}

BeliefStructure fixture(const std::string& name) { return fixture_doc(name).structure; }

Verdict verdict_of(const AuditReport& r, const std::string& name) {
  const auto* h = r.find(name);
  EXPECT_NE(h, nullptr) << name;
  return h ? h->verdict : Verdict::untestable;
}

}  // namespace

TEST(Audit, Theorem1ReportsPar5Gap) {
  auto r = audit(fixture("prob_1_3.bel"), 1);
  for (const char* name : {"A1", "A2", "Par1", "Par2", "Par3", "Par4"}) EXPECT_EQ(verdict_of(r, name), Verdict::pass);
  ASSERT_NE(r.find("Par5"), nullptr);
  EXPECT_EQ(r.find("Par5")->verdict, Verdict::fail);
  EXPECT_EQ(r.find("Par5")->witness, "unsatisfiable on finite domain, gap = 1/6 > 0");
  EXPECT_EQ(r.overall(), Verdict::fail);
}

TEST(Audit, Theorem1FlagsA1Conflict) {
  auto r = audit(fixture("a1_conflict.bel"), 1);
  EXPECT_EQ(verdict_of(r, "A1"), Verdict::fail);
  EXPECT_EQ(verdict_of(r, "Par3"), Verdict::untestable);
  EXPECT_FALSE(r.find("A1")->witness.empty());
}

TEST(Audit, Theorem2ProbabilityIsNotACounterexample) {
  auto r = audit(fixture("prob_1_3.bel"), 2);
  ASSERT_NE(r.find("not-isomorphic"), nullptr);
  EXPECT_EQ(r.find("not-isomorphic")->verdict, Verdict::fail);
  EXPECT_EQ(r.find("not-isomorphic")->witness, "structure is isomorphic, not a counterexample");
  EXPECT_EQ(verdict_of(r, "S-linear-complement"), Verdict::pass);
  EXPECT_EQ(verdict_of(r, "S-smoothness"), Verdict::untestable);
}

TEST(Audit, Theorem2MinFixture) {
  auto r = audit(fixture("min_counterexample.bel"), 2);
  EXPECT_EQ(verdict_of(r, "not-isomorphic"), Verdict::pass);
  for (const char* name : {"A1", "A2", "range", "S-linear-complement", "F-nondecreasing", "F-commutative", "F-zero",
                           "F-unit"})
    EXPECT_EQ(verdict_of(r, name), Verdict::pass) << name;
  EXPECT_EQ(verdict_of(r, "F-strict"), Verdict::fail);
}

TEST(Audit, Theorem2IntervalBoundsFailRange) {
  auto r = audit(fixture("interval.bel"), 2);
  EXPECT_EQ(verdict_of(r, "range"), Verdict::fail);
}

TEST(Audit, Theorem3CoinExtension) {
  auto ext = fixture_doc("coins_ext.bel");
  AuditInputs in;
  in.extension = ext.structure;
  in.embedding = ext.embeddings;
  auto r = audit(fixture("coins_base.bel"), 3, in);
  EXPECT_EQ(r.overall(), Verdict::pass);
  for (const char* name : {"extends", "A1+", "A2+", "Par1+", "Par2+", "Par3+", "Par4+", "gap-shrinkage"})
    EXPECT_EQ(verdict_of(r, name), Verdict::pass) << name;
  EXPECT_FALSE(r.notes.empty());
}

TEST(Audit, Theorem3BadEmbeddingFails) {
  auto ext = fixture_doc("coins_ext.bel");
  AuditInputs in;
  in.extension = ext.structure;
  in.embedding = ext.embeddings;
  std::swap(in.embedding[0].image, in.embedding[1].image);
  auto r = audit(fixture("coins_base.bel"), 3, in);
  EXPECT_EQ(verdict_of(r, "extends"), Verdict::fail);
  in.embedding.pop_back();
  EXPECT_EQ(verdict_of(audit(fixture("coins_base.bel"), 3, in), "extends"), Verdict::fail);
}

TEST(Audit, MissingInputsArePreconditions) {
  auto b = fixture("uniform2.bel");
  EXPECT_THROW(audit(b, 3), PreconditionError);
  EXPECT_THROW(audit(b, 4), PreconditionError);
  EXPECT_THROW(audit(b, 5), std::invalid_argument);
}

TEST(Audit, Theorem4SmallCoinFamily) {
  AuditInputs in;
  in.family = coin_family(6).members;
  in.family_grid = 3;
  in.family_epsilon = q(1, 4);
  auto r = audit(in.family.front(), 4, in);
  for (const char* name : {"uniform-S", "uniform-F", "Par1", "Par2", "Par3", "Par4", "Par5'"})
    EXPECT_EQ(verdict_of(r, name), Verdict::pass) << name;
}

TEST(Audit, Theorem4NonUniformFamily) {
  AuditInputs in;
  in.family = {gen_probability(Domain({"a", "b"}), {q(1, 4), q(3, 4)}),
               gen_distorted(Domain({"a", "b"}), {q(1, 2), q(1, 2)}, 2)};
  in.family_grid = 2;
  auto r = audit(in.family.front(), 4, in);
  EXPECT_EQ(verdict_of(r, "uniform-S"), Verdict::fail);
  EXPECT_EQ(r.overall(), Verdict::fail);
}

TEST(Report, VerdictJsonForWitness) {
  auto b = fixture("distorted_k2.bel");
  DecideOptions o;
  auto j = verdict_json(b.domain(), decide(b, o), o);
  EXPECT_EQ(j["kind"], "Witness");
  EXPECT_EQ(j["weights"]["a"], "1/3");
  EXPECT_EQ(j["weights"]["b"], "2/3");
  ASSERT_TRUE(j.contains("g-graph"));
  EXPECT_EQ(j["g-graph"][1][0], "1/9");
  EXPECT_EQ(j["g-graph"][1][1], "1/3");
  EXPECT_EQ(j["budget"]["seed"], 0);
  EXPECT_FALSE(j.contains("certificate"));
}

TEST(Report, VerdictJsonForRefutation) {
  auto b = fixture("min_counterexample.bel");
  DecideOptions o;
  auto j = verdict_json(b.domain(), decide(b, o), o);
  EXPECT_EQ(j["kind"], "Refutation");
  EXPECT_EQ(j["certificate"]["type"], "order-conflict");
  EXPECT_GE(j["certificate"]["cycle"].size(), 2u);
  EXPECT_FALSE(j.contains("weights"));
}

TEST(Report, ResidualJsonFields) {
  auto r = check_functional_equation(NegationForm::catalog(NegationForm::Catalog::linear_complement),
                                     EquationId::quotient, 10);
  auto j = residual_json(r);
  for (const char* key : {"equation", "grid", "residual", "witness", "coverage"}) EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["equation"], "EQ3.5");
  EXPECT_EQ(j["residual"], "0");
  EXPECT_LT(j["coverage"].get<double>(), 1.0);
}

TEST(Report, AuditJsonFields) {
  auto r = audit(fixture("prob_1_3.bel"), 1);
  auto j = audit_json(r);
  EXPECT_EQ(j["theorem"], 1);
  ASSERT_EQ(j["hypotheses"].size(), r.hypotheses.size());
  for (const auto& h : j["hypotheses"]) {
    EXPECT_TRUE(h.contains("name"));
    EXPECT_TRUE(h.contains("verdict"));
    EXPECT_TRUE(h.contains("witness"));
  }
  EXPECT_EQ(j["verdict"], "fail");
  EXPECT_NE(audit_text(r).find("Par5: fail"), std::string::npos);
}
