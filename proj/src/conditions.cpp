#include "coxcheck/conditions.hpp"

#include "coxcheck/errors.hpp"
#include "coxcheck/kernels.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace coxcheck {

namespace {

bool nonzero(const Counts& c) {
  return std::any_of(c.begin(), c.end(), [](auto v) { return v != 0; });
}

Rational scaled(const Rational& v, const Bounds& b) {
  Rational r = (v - b.lo) / (b.hi - b.lo);
  r.canonicalize();
  return r;
}

Rational unscaled(const Rational& s, const Bounds& b) { return Rational(b.lo + (b.hi - b.lo) * s); }

std::optional<Rational> exact_root(const Rational& s, unsigned k) {
  if (k == 1) return s;
  if (sgn(s) < 0) return std::nullopt;
  mpz_class num, den;
  if (!mpz_root(num.get_mpz_t(), s.get_num_mpz_t(), k)) return std::nullopt;
  if (!mpz_root(den.get_mpz_t(), s.get_den_mpz_t(), k)) return std::nullopt;
  return Rational(num, den);
}

}  // namespace

BoundsReport check_bounds(const BeliefStructure& b, double cap) {
  BoundsReport r;
  if (!b.is_table() && nested_orbit_count(b, 2) > cap) {
    r.closed_form = true;
    return r;
  }
  const Bounds& bd = b.bounds();
  for_each_nested(
      b, 2,
      [&](const std::vector<Counts>& lv) {
        const Counts& u = lv[0];
        const Counts& v = lv[1];
        if (!nonzero(u)) return true;
        ++r.pairs_checked;
        Rational value = b.bel_counts(v, u);
        auto witness = [&] { return PairWitness{b.representative(v), b.representative(u), value}; };
        if (r.range_ok && (value < bd.lo || value > bd.hi)) {
          r.range_ok = false;
          r.range_witness = witness();
        }
        bool is_empty = !nonzero(v);
        bool is_full = v == u;
        if (r.endpoints_ok && ((is_empty && value != bd.lo) || (is_full && value != bd.hi))) {
          r.endpoints_ok = false;
          r.endpoint_witness = witness();
        }
        return true;
      },
      cap);
  return r;
}

Rational par5_gap(const BeliefStructure& b, ValueKind kind) {
  auto values = attained(b, kind);
  values.push_back(b.bounds().lo);
  values.push_back(b.bounds().hi);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  Rational widest(0);
  for (std::size_t i = 0; i + 1 < values.size(); ++i) widest = std::max(widest, Rational(values[i + 1] - values[i]));
  Rational gap = widest / 2;
  gap.canonicalize();
  return gap;
}

namespace {

// Draws a nested chain of count vectors, one class at a time; rejects U3 = ∅.
class ChainSampler {
 public:
  ChainSampler(const BeliefStructure& b, std::uint64_t seed) : b_(b), rng_(seed) {}

  std::vector<Counts> next() {
    const auto& orbits = b_.orbits();
    std::vector<Counts> lv(4, Counts(orbits.size(), 0));
    do {
      for (std::size_t c = 0; c < orbits.size(); ++c) {
        std::uint32_t hi = static_cast<std::uint32_t>(orbits[c].size());
        for (int j = 0; j < 4; ++j) {
          hi = std::uniform_int_distribution<std::uint32_t>(0, hi)(rng_);
          lv[static_cast<std::size_t>(j)][c] = hi;
        }
      }
    } while (!nonzero(lv[2]));
    return lv;
  }

 private:
  const BeliefStructure& b_;
  std::mt19937_64 rng_;
};

// Visits orbit chains with U3 ≠ ∅, exhaustively or by sampling. Returns whether exhaustive.
template <class Visit>
bool visit_chains(const BeliefStructure& b, const TripleSearchOptions& o, Visit&& visit) {
  if (nested_orbit_count(b, 4) <= o.exhaustive_cap) {
    for_each_nested(
        b, 4,
        [&](const std::vector<Counts>& lv) {
          if (!nonzero(lv[2])) return true;
          return visit(lv);
        },
        o.exhaustive_cap);
    return true;
  }
  ChainSampler sampler(b, o.seed);
  for (std::size_t i = 0; i < o.sample_budget; ++i)
    if (!visit(sampler.next())) break;
  return false;
}

std::array<Rational, 3> chain_values(const BeliefStructure& b, const std::vector<Counts>& lv) {
  return {b.bel_counts(lv[3], lv[2]), b.bel_counts(lv[2], lv[1]), b.bel_counts(lv[1], lv[0])};
}

ChainQuadruple chain_from_counts(const BeliefStructure& b, const std::vector<Counts>& lv) {
  return make_chain(b, b.representative(lv[0]), b.representative(lv[1]), b.representative(lv[2]),
                    b.representative(lv[3]));
}

}  // namespace

TripleSearchReport par5_triples(const BeliefStructure& b, const DensityProbe& probe, TripleSearchOptions options) {
  if (sgn(probe.epsilon) <= 0) throw std::invalid_argument("density probe needs epsilon > 0");
  const Bounds& bd = b.bounds();
  const std::array<Rational, 3> target{unscaled(probe.alpha, bd), unscaled(probe.beta, bd), unscaled(probe.gamma, bd)};
  TripleSearchReport r;
  std::optional<std::vector<Counts>> best;
  r.exhaustive = visit_chains(b, options, [&](const std::vector<Counts>& lv) {
    ++r.examined;
    auto v = chain_values(b, lv);
    Rational d(0);
    for (std::size_t k = 0; k < 3; ++k) d = std::max(d, Rational(abs(v[k] - target[k])));
    if (!best || d < r.distance) {
      best = lv;
      r.distance = d;
    }
    return sgn(r.distance) != 0;
  });
  if (best) {
    r.chain = chain_from_counts(b, *best);
    r.pass = r.distance < probe.epsilon;
  }
  return r;
}

namespace {

struct MemberCloud {
  std::vector<kernels::Triple> points;
  std::vector<std::vector<Counts>> chains;
  bool exhaustive = true;
};

MemberCloud build_cloud(const BeliefStructure& b, const TripleSearchOptions& o) {
  MemberCloud cloud;
  std::set<kernels::Triple> seen;
  const Bounds& bd = b.bounds();
  cloud.exhaustive = visit_chains(b, o, [&](const std::vector<Counts>& lv) {
    auto v = chain_values(b, lv);
    kernels::Triple t{scaled(v[0], bd).get_d(), scaled(v[1], bd).get_d(), scaled(v[2], bd).get_d()};
    if (seen.insert(t).second) {
      cloud.points.push_back(t);
      cloud.chains.push_back(lv);
    }
    return true;
  });
  return cloud;
}

}  // namespace

FamilyDensityReport par5_family(const std::vector<BeliefStructure>& members, std::size_t n, const Rational& epsilon,
                                FamilyDensityOptions options) {
  if (members.empty()) throw PreconditionError("par5_family needs a nonempty family");
  if (sgn(epsilon) <= 0) throw std::invalid_argument("density probe needs epsilon > 0");
  FamilyDensityReport r;
  const auto grid = uniform_grid(Bounds{}, n);
  if (grid.empty()) {
    r.vacuous = true;
    return r;
  }

  auto build = [&](std::size_t i) {
    TripleSearchOptions o = options.search;
    o.seed = options.search.seed + i;
    return build_cloud(members[i], o);
  };
  auto clouds = options.parallel ? kernels::map_parallel<MemberCloud>(members.size(), build)
                                 : kernels::map_serial<MemberCloud>(members.size(), build);

  std::vector<kernels::Triple> cloud;
  std::vector<std::pair<std::size_t, std::size_t>> owner;
  std::set<kernels::Triple> merged;
  for (std::size_t m = 0; m < clouds.size(); ++m) {
    r.cloud_sizes.push_back(clouds[m].points.size());
    r.exhaustive = r.exhaustive && clouds[m].exhaustive;
    for (std::size_t j = 0; j < clouds[m].points.size(); ++j) {
      if (!merged.insert(clouds[m].points[j]).second) continue;
      cloud.push_back(clouds[m].points[j]);
      owner.emplace_back(m, j);
    }
  }

  std::vector<std::array<Rational, 3>> exact_targets;
  std::vector<kernels::Triple> targets;
  for (const auto& a : grid)
    for (const auto& b : grid)
      for (const auto& c : grid) {
        exact_targets.push_back({a, b, c});
        targets.push_back({a.get_d(), b.get_d(), c.get_d()});
      }
  r.targets = targets.size();
  const kernels::SortedCloud sorted(cloud);
  auto nearest = kernels::nearest_sorted(targets, sorted, options.parallel);

  auto exact_distance = [&](std::size_t t, std::size_t idx) {
    auto [m, j] = owner[idx];
    const auto& b = members[m];
    auto v = chain_values(b, clouds[m].chains[j]);
    Rational d(0);
    for (std::size_t k = 0; k < 3; ++k) d = std::max(d, Rational(abs(scaled(v[k], b.bounds()) - exact_targets[t][k])));
    return d;
  };
  const double eps = epsilon.get_d();
  const double slack = 1e-12;

  std::optional<std::size_t> worst;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const auto& nt = nearest[t];
    bool ok = false;
    if (nt.index < cloud.size() && nt.distance < eps + slack) {
      ok = exact_distance(t, nt.index) < epsilon;
      for (std::size_t j = 0; !ok && j < cloud.size(); ++j)
        if (kernels::chebyshev(targets[t], cloud[j]) < eps + slack) ok = exact_distance(t, j) < epsilon;
    }
    if (!ok) ++r.failures;
    if (!worst || nt.distance > r.worst_distance) {
      worst = t;
      r.worst_distance = static_cast<double>(nt.distance);
    }
  }
  r.pass = r.failures == 0;
  if (worst) {
    r.worst_target = exact_targets[*worst];
    std::size_t idx = nearest[*worst].index;
    if (idx < cloud.size()) {
      auto [m, j] = owner[idx];
      r.worst_member = m;
      r.worst_chain = chain_from_counts(members[m], clouds[m].chains[j]);
    }
  }
  return r;
}

ChainConsistencyReport chain_consistency(const CombinationForm& f) {
  ChainConsistencyReport r;
  const Bounds& bd = f.interval();
  // second argument -> (first argument -> value)
  std::map<Rational, std::map<Rational, Rational>> by_second;
  for (const auto& [k, v] : f.table()) by_second[k.second].emplace(k.first, v);
  auto witness = [&](const Rational& a, const Rational& b) {
    auto it = f.provenance().find(CombinationForm::Key{a, b});
    if (it != f.provenance().end()) return it->second;
    return TripleWitness{{}, {}, {}, a, b, *f(a, b)};
  };
  auto interior = [&](const Rational& v) { return v > bd.lo && v < bd.hi; };
  for (const auto& [key, w] : f.table()) {
    const Rational& y = key.first;
    const Rational& z = key.second;
    auto a_it = by_second.find(w);
    auto b_it = by_second.find(y);
    if (a_it == by_second.end() || b_it == by_second.end()) continue;
    for (const auto& [x, lhs] : a_it->second) {
      auto v_it = b_it->second.find(x);
      if (v_it == b_it->second.end()) continue;
      auto rhs = f(v_it->second, z);
      if (!rhs) continue;
      ++r.instances;
      if (interior(x) && interior(y) && interior(z)) ++r.interior_instances;
      if (lhs != *rhs && !r.certificate) {
        r.outcome = ChainConsistencyReport::Outcome::certificate;
        r.certificate = ChainCertificate{x, y, z, witness(y, z), witness(x, w), witness(x, y), witness(v_it->second, z)};
      }
    }
  }
  r.vacuous = r.interior_instances == 0;
  return r;
}

ChainConsistencyReport chain_consistency(const BeliefStructure& b, ExtractionOptions options) {
  CombinationExtraction ex;
  try {
    ex = extract_combination(b, options);
  } catch (const BudgetExceeded&) {
    if (b.is_table()) throw;
    ChainConsistencyReport r;
    r.closed_form = true;
    return r;
  }
  if (auto* c = std::get_if<CombinationConflict>(&ex)) {
    ChainConsistencyReport r;
    r.outcome = ChainConsistencyReport::Outcome::extraction_conflict;
    r.conflict = *c;
    return r;
  }
  return chain_consistency(std::get<CombinationForm>(ex));
}

NegationIdentityReport bel_level_negation(const BeliefStructure& b, const NegationForm& s) {
  NegationIdentityReport r;
  for (const auto& y : attained(b, ValueKind::conditional)) {
    auto sy = s(y);
    std::optional<Rational> ssy;
    if (sy) ssy = s(*sy);
    if (!ssy) {
      r.untestable.push_back(y);
      continue;
    }
    ++r.checked;
    if (*ssy != y && r.pass) {
      r.pass = false;
      r.failing_y = y;
      r.s_y = *sy;
      r.s_s_y = *ssy;
    }
  }
  return r;
}

NegationIdentityReport bel_level_negation(const BeliefStructure& b, ExtractionOptions options) {
  auto ex = extract_negation(b, options);
  if (std::holds_alternative<NegationConflict>(ex))
    throw PreconditionError("A1 fails: S is not single-valued on this structure");
  return bel_level_negation(b, std::get<NegationForm>(ex));
}

UniformityEvidence build_uniformity(const std::vector<BeliefStructure>& members, ExtractionOptions options) {
  UniformityEvidence ev;
  auto fail = [&](std::string msg) {
    if (ev.uniform) ev.conflict = std::move(msg);
    ev.uniform = false;
  };
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& b = members[i];
    NegationExtraction ns;
    CombinationExtraction cs;
    try {
      ns = extract_negation(b, options);
      cs = extract_combination(b, options);
    } catch (const BudgetExceeded&) {
      if (b.is_table()) throw;
      ev.closed_form_members.push_back(i);
      continue;
    }
    if (std::holds_alternative<NegationConflict>(ns)) {
      fail("member " + std::to_string(i) + ": S is not single-valued");
      continue;
    }
    if (std::holds_alternative<CombinationConflict>(cs)) {
      fail("member " + std::to_string(i) + ": F is not single-valued");
      continue;
    }
    for (const auto& [x, v] : std::get<NegationForm>(ns).table()) {
      ++ev.entries_checked;
      auto [it, fresh] = ev.s_table.emplace(x, v);
      if (!fresh && it->second != v)
        fail("S(" + to_string(x) + ") is " + to_string(it->second) + " on an earlier member but " + to_string(v) +
             " on member " + std::to_string(i));
    }
    for (const auto& [k, v] : std::get<CombinationForm>(cs).table()) {
      ++ev.entries_checked;
      auto [it, fresh] = ev.f_table.emplace(k, v);
      if (!fresh && it->second != v)
        fail("F(" + to_string(k.first) + "," + to_string(k.second) + ") is " + to_string(it->second) +
             " on an earlier member but " + to_string(v) + " on member " + std::to_string(i));
    }
  }
  for (std::size_t i : ev.closed_form_members) {
    const auto& b = members[i];
    const Bounds& bd = b.bounds();
    const unsigned k = b.exponent();
    for (const auto& [x, v] : ev.s_table) {
      if (x < bd.lo || x > bd.hi) continue;
      auto r = exact_root(scaled(x, bd), k);
      if (!r) continue;
      ++ev.entries_checked;
      Rational expect = unscaled(power(Rational(1 - *r), k), bd);
      if (expect != v)
        fail("closed-form S of member " + std::to_string(i) + " gives " + to_string(expect) + " at " + to_string(x) +
             ", merged table has " + to_string(v));
    }
    for (const auto& [key, v] : ev.f_table) {
      if (key.first < bd.lo || key.first > bd.hi || key.second < bd.lo || key.second > bd.hi) continue;
      ++ev.entries_checked;
      Rational expect = unscaled(Rational(scaled(key.first, bd) * scaled(key.second, bd)), bd);
      if (expect != v)
        fail("closed-form F of member " + std::to_string(i) + " gives " + to_string(expect) + " at (" +
             to_string(key.first) + "," + to_string(key.second) + "), merged table has " + to_string(v));
    }
  }
  return ev;
}

}  // namespace coxcheck
