#include "cli.hpp"
#include "coxcheck/conditions.hpp"
#include "coxcheck/errors.hpp"
#include "coxcheck/generators.hpp"
#include "coxcheck/isomorphism.hpp"
#include "coxcheck/multiplicative.hpp"
#include "coxcheck/structure_io.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace coxcheck;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int id;
  std::string title;
  double limit_s;
  std::function<std::string()> body;  // returns a one-line summary, throws Failure
};

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

std::string fixture(const std::string& name) { return std::string(COXCHECK_FIXTURE_DIR) + "/" + name; }

BeliefStructure load(const std::string& name) { return parse_structure(read_file(fixture(name))); }

Domain letters(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
  return Domain(names);
}

struct FixtureCase {
  const char* file;
  int check;
  int decide;
  const char* verdict;
};

const FixtureCase kFixtures[] = {
    {"uniform2.bel", 0, 0, "Witness"},         {"prob_1_3.bel", 0, 0, "Witness"},
    {"distorted_k2.bel", 0, 0, "Witness"},     {"interval.bel", 0, 0, "Witness"},
    {"coins_base.bel", 0, 0, "Witness"},       {"coins_ext.bel", 0, 0, "Witness"},
    {"a1_conflict.bel", 1, 1, "Refutation"},   {"chain_forged.bel", 1, 1, "Refutation"},
    {"min_counterexample.bel", 0, 1, "Refutation"},
};

std::string probability_sweep() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<long> part(1, 20);
  std::size_t pairs = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
    std::vector<long> raw(n);
    long total = 0;
    for (auto& r : raw) total += (r = part(rng));
    std::vector<Rational> w;
    for (long r : raw) w.push_back(canonical(Rational(r, total)));
    auto b = gen_probability(letters(n), w);
    const std::string tag = "trial " + std::to_string(trial);

    auto bounds = check_bounds(b);
    expect(bounds.passes(), tag + ": bounds");
    pairs += bounds.pairs_checked;
    auto s = extract_negation(b);
    expect(std::holds_alternative<NegationForm>(s), tag + ": A1 conflict");
    for (const auto& [x, v] : std::get<NegationForm>(s).table()) expect(v == 1 - x, tag + ": S != 1-x");
    auto f = extract_combination(b);
    expect(std::holds_alternative<CombinationForm>(f), tag + ": A2 conflict");
    for (const auto& [k, v] : std::get<CombinationForm>(f).table()) expect(v == k.first * k.second, tag + ": F != xy");
    expect(chain_consistency(b).passes(), tag + ": chain consistency");
    expect(bel_level_negation(b).pass, tag + ": negation identity");
    auto d = decide(b);
    expect(d.kind == IsomorphismVerdict::Kind::witness, tag + ": not Witness");
    expect(d.witness->exact && *d.witness->exact == w, tag + ": weights not recovered exactly");
  }
  return "100 structures, " + std::to_string(pairs) + " pairs, exact recovery";
}

std::string nontrivial_rescaling() {
  auto b = gen_distorted(letters(2), {Rational(1, 3), Rational(2, 3)}, 2);
  auto d = decide(b);
  expect(d.kind == IsomorphismVerdict::Kind::witness, "decide did not return Witness");
  auto g = d.rescaling ? *d.rescaling : rescaling_from_witness(b, *d.witness->exact);
  long double worst = 0;
  for (const auto& [v, gv] : g.graph) {
    long double err = std::fabs(to_long_double(gv) - std::sqrt(to_long_double(v)));
    worst = std::max(worst, err);
  }
  expect(!g.graph.empty(), "empty rescaling graph");
  expect(worst < 1e-9L, "max |g(v) - sqrt v| = " + std::to_string(static_cast<double>(worst)));
  std::ostringstream s;
  s << g.graph.size() << " attained points, max |g(v) - sqrt v| = " << static_cast<double>(worst);
  return s.str();
}

std::string counterexample_pipeline() {
  const std::string text = read_file(fixture("min_counterexample.bel"));
  expect(text.find("generated by: coxcheck search-min") != std::string::npos, "fixture parameters not recorded");
  auto b = parse_structure(text);
  auto s = extract_negation(b);
  expect(std::holds_alternative<NegationForm>(s), "A1 extraction conflict");
  for (const auto& [x, v] : std::get<NegationForm>(s).table()) expect(v == 1 - x, "S != 1-x at " + to_string(x));
  auto f = extract_combination(b);
  expect(std::holds_alternative<CombinationForm>(f), "A2 extraction conflict");
  std::size_t entries = 0;
  for (const auto& [k, v] : std::get<CombinationForm>(f).table()) {
    expect(v == std::min(k.first, k.second), "F != min at " + to_string(k.first) + ", " + to_string(k.second));
    ++entries;
  }
  auto d = decide(b);
  expect(d.kind == IsomorphismVerdict::Kind::refutation, "decide did not return Refutation");
  auto re = recheck(b, *d.certificate);
  expect(re.valid, "certificate recheck: " + re.reason);
  expect(text.find("--atoms 3") != std::string::npos, "fixture is not the n=3 hit");
  return "hit at n=3, S=1-x on " + std::to_string(std::get<NegationForm>(s).table().size()) + " values, F=min on " +
         std::to_string(entries) + " entries, " + std::string(d.certificate->kind()) + " certificate rechecks";
}

std::string par4_discrimination() {
  auto mn = check_monotonicity(CombinationForm::catalog(CombinationForm::Catalog::minimum));
  expect(!mn.strict && mn.strict_violation, "minimum not flagged");
  const auto& v = *mn.strict_violation;
  expect(v.lo < v.hi && v.value_lo == v.value_hi && v.fixed > 0, "minimum witness is not a strict-increase failure");
  for (auto c : {CombinationForm::Catalog::product, CombinationForm::Catalog::hamacher})
    expect(check_monotonicity(CombinationForm::catalog(c)).passes(), "catalog form fails Par4");
  return "minimum fails: F(" + to_string(v.lo) + ", " + to_string(v.fixed) + ") = F(" + to_string(v.hi) + ", " +
         to_string(v.fixed) + ") = " + to_string(v.value_lo) + "; product and hamacher pass";
}

std::string functional_equations() {
  std::size_t skipped = 0;
  for (auto c : {CombinationForm::Catalog::product, CombinationForm::Catalog::minimum}) {
    auto r = check_functional_equation(CombinationForm::catalog(c), EquationId::associativity, 20);
    expect(r.residual == 0 && r.evaluated == 8000, "EQ1 residual on " + CombinationForm::catalog(c).name());
  }
  auto s = NegationForm::catalog(NegationForm::Catalog::linear_complement);
  for (auto id : {EquationId::involution, EquationId::quotient, EquationId::symmetric}) {
    auto r = check_functional_equation(s, id, 100);
    expect(r.residual == 0, std::string(equation_name(id)) + " residual " + to_string(r.residual));
    expect(r.evaluated + r.zero_denominator + r.undefined == r.total, "coverage counts inconsistent");
    skipped += r.zero_denominator;
  }
  return "EQ1 on 20^3 for product and minimum, EQ3/EQ3.5/EQSYM on 100 points, " + std::to_string(skipped) +
         " zero-denominator points skipped";
}

std::string multiplicative_representation() {
  MultiplicativeOptions o;
  o.tolerance = 1e-9L;
  o.residual_grid = 50;
  auto rep = multiplicative_rep(CombinationForm::catalog(CombinationForm::Catalog::hamacher), o);
  expect(rep.residual() < 1e-6L, "residual " + std::to_string(static_cast<double>(rep.residual())));
  const long double p = std::log(2.0L);  // gauge: closed(1/2)^p = 1/2
  long double worst = 0;
  for (int k = 1; k <= 50; ++k) {
    long double x = static_cast<long double>(k) / 50;
    long double closed = std::pow(std::exp(-(1 - x) / x), p);
    worst = std::max(worst, std::fabs(rep(x) - closed));
  }
  expect(worst < 1e-6L, "closed-form disagreement " + std::to_string(static_cast<double>(worst)));
  bool rejected = false;
  try {
    multiplicative_rep(CombinationForm::catalog(CombinationForm::Catalog::minimum));
  } catch (const PreconditionError&) {
    rejected = true;
  }
  expect(rejected, "minimum accepted");
  std::ostringstream s;
  s << "hamacher residual " << static_cast<double>(rep.residual()) << ", closed-form error "
    << static_cast<double>(worst) << "; minimum rejected";
  return s.str();
}

std::string density_behavior() {
  std::vector<BeliefStructure> generated;
  for (const auto& f : kFixtures) generated.push_back(load(f.file));
  generated.push_back(gen_distorted(letters(3), {Rational(1, 6), Rational(1, 3), Rational(1, 2)}, 3));
  for (const auto& b : generated) expect(par5_gap(b) > 0, "gap is zero");

  for (unsigned n = 1; n <= 6; ++n) {
    Rational bound(1, 1L << (n + 1));
    for (std::size_t atoms : {1u, 2u}) {
      std::vector<Rational> w(atoms, Rational(1, static_cast<long>(atoms)));
      auto ext = coin_extend(letters(atoms), w, n);
      Rational gap = par5_gap(ext.extended, ValueKind::unconditional);
      expect(gap > 0 && gap <= bound, "coin gap " + to_string(gap) + " for n = " + std::to_string(n));
    }
  }

  auto family = coin_family(12);
  auto r = par5_family(family.members, 11, Rational(1, 20));
  expect(r.pass, "par5_family fails, worst distance " + std::to_string(r.worst_distance));
  std::ostringstream s;
  s << generated.size() << " gaps positive, coin gaps within 2^-(n+1) for n=1..6, coin_family(12) covers "
    << r.targets << " targets, worst distance " << r.worst_distance;
  return s.str();
}

std::string gauge_invariance() {
  std::size_t witnesses = 0;
  for (const auto& f : kFixtures) {
    auto b = load(f.file);
    auto moved = b.affine(Rational(1, 2), Rational(1, 4));
    auto image = [](const Rational& v) { return Rational(v / 2 + Rational(1, 4)); };
    expect(moved.bounds().lo == image(b.bounds().lo) && moved.bounds().hi == image(b.bounds().hi),
           std::string(f.file) + ": bounds not rescaled");
    auto x = decide(b), y = decide(moved);
    expect(x.kind == y.kind, std::string(f.file) + ": verdict kind changed");
    if (x.kind == IsomorphismVerdict::Kind::witness) {
      expect(x.witness->exact && y.witness->exact && *x.witness->exact == *y.witness->exact,
             std::string(f.file) + ": witness weights changed");
      ++witnesses;
    }
  }
  return std::to_string(std::size(kFixtures)) + " fixtures, " + std::to_string(witnesses) +
         " witnesses with identical weights";
}

std::string cli_contract() {
  auto dir = fs::temp_directory_path() / "coxcheck_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::size_t runs = 0;
  for (const auto& f : kFixtures) {
    for (const char* cmd : {"check", "decide"}) {
      const int expected = std::string(cmd) == "check" ? f.check : f.decide;
      auto json_path = (dir / (std::string(f.file) + "." + cmd + ".json")).string();
      std::ostringstream out, err;
      int code = cli::run({cmd, fixture(f.file), "--json", json_path}, out, err);
      const std::string tag = std::string(cmd) + " " + f.file;
      expect(code == expected, tag + ": exit " + std::to_string(code) + ", expected " + std::to_string(expected));
      auto j = nlohmann::json::parse(read_file(json_path));
      expect(j["exit_code"] == code, tag + ": JSON exit code");
      expect(out.str().find("exit " + std::to_string(code)) != std::string::npos, tag + ": text exit line");
      if (std::string(cmd) == "decide") {
        expect(j["verdict"] == f.verdict, tag + ": JSON verdict");
        expect(out.str().find(std::string("decide: ") + f.verdict) != std::string::npos, tag + ": text verdict");
      } else {
        for (const auto& c : j["checks"]) {
          if (c["name"] == "par5 gap") continue;
          auto line = c["name"].get<std::string>() + ": " + c["verdict"].get<std::string>();
          expect(out.str().find(line) != std::string::npos, tag + ": text lacks " + line);
        }
      }
      ++runs;
    }
  }
  fs::remove_all(dir);
  return std::to_string(runs) + " runs, exit codes and JSON verdicts agree";
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "probability soundness sweep", 60, probability_sweep},
      {2, "nontrivial rescaling", 5, nontrivial_rescaling},
      {3, "counterexample pipeline", 10, counterexample_pipeline},
      {4, "Par4 discrimination", 1, par4_discrimination},
      {5, "functional equations", 10, functional_equations},
      {6, "multiplicative representation", 10, multiplicative_representation},
      {7, "density behavior", 300, density_behavior},
      {8, "gauge invariance", 30, gauge_invariance},
      {9, "CLI contract", 30, cli_contract},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    std::string summary;
    bool ok = true;
    try {
      summary = c.body();
    } catch (const std::exception& e) {
      ok = false;
      summary = e.what();
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && seconds > c.limit_s) {
      ok = false;
      summary += " (over the " + std::to_string(static_cast<int>(c.limit_s)) + " s budget)";
    }
    std::printf("criterion %d %-30s %s  %.2fs  %s\n", c.id, c.title.c_str(), ok ? "PASS" : "FAIL", seconds,
                summary.c_str());
    std::fflush(stdout);
    failed += !ok;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
