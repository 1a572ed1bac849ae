#include "coxcheck/isomorphism.hpp"

#include "coxcheck/errors.hpp"
#include "coxcheck/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <random>

namespace coxcheck {

std::string RefutationCertificate::kind() const {
  switch (data.index()) {
    case 0: return "A1-conflict";
    case 1: return "A2-conflict";
    case 2: return "chain-associativity";
    default: return "order-conflict";
  }
}

std::string_view verdict_name(IsomorphismVerdict::Kind k) {
  switch (k) {
    case IsomorphismVerdict::Kind::witness: return "Witness";
    case IsomorphismVerdict::Kind::refutation: return "Refutation";
    case IsomorphismVerdict::Kind::unknown: return "Unknown";
  }
  return "?";
}

// ---------------------------------------------------------------------------------------
// certificate re-checking

namespace {

struct Checker {
  const BeliefStructure& b;
  std::string reason;

  bool fail(std::string why) {
    if (reason.empty()) reason = std::move(why);
    return false;
  }

  bool event_ok(const Event& e) { return e.universe() == b.atom_count() || fail("event has the wrong universe"); }

  bool pair(const PairWitness& p) {
    if (!event_ok(p.v) || !event_ok(p.u)) return false;
    if (p.u.empty()) return fail("conditioning event is empty");
    if (!p.v.subset_of(p.u)) return fail("pair witness is not nested");
    if (b.bel(p.v, p.u) != p.value) return fail("pair witness value does not match the structure");
    return true;
  }

  bool triple(const TripleWitness& t) {
    if (!event_ok(t.v) || !event_ok(t.v_prime) || !event_ok(t.u)) return false;
    if (t.u.empty()) return fail("triple witness has an empty context");
    Event vu = t.v & t.u;
    if (vu.empty()) return fail("triple witness has V ∩ U = ∅");
    if (b.bel(t.v_prime, vu) != t.x) return fail("Bel(V'|V∩U) does not match");
    if (b.bel(t.v, t.u) != t.y) return fail("Bel(V|U) does not match");
    if (b.bel(t.v & t.v_prime, t.u) != t.result) return fail("Bel(V∩V'|U) does not match");
    return true;
  }

  bool link(const OrderLink& l) {
    if (!event_ok(l.lo) || !event_ok(l.hi)) return false;
    if (l.source == OrderLink::Source::inclusion) {
      if (!l.lo.subset_of(l.hi) || l.lo == l.hi) return fail("inclusion link is not a strict inclusion");
      return true;
    }
    if (!event_ok(l.context) || !event_ok(l.from_lo) || !event_ok(l.from_hi)) return false;
    if (l.context.empty()) return fail("link context is empty");
    if (!l.from_lo.subset_of(l.context) || !l.from_hi.subset_of(l.context))
      return fail("compared events are not inside the context");
    Rational a = b.bel(l.from_lo, l.context);
    Rational c = b.bel(l.from_hi, l.context);
    if (l.strict ? !(a < c) : !(a <= c)) return fail("context comparison does not hold");
    if (l.normalized) {
      if (l.lo != l.from_lo - l.from_hi || l.hi != l.from_hi - l.from_lo) return fail("overlap removal is wrong");
    } else if (l.lo != l.from_lo || l.hi != l.from_hi) {
      return fail("link endpoints differ from the compared events");
    }
    return true;
  }
};

}  // namespace

RecheckResult recheck(const BeliefStructure& b, const RefutationCertificate& certificate) {
  Checker c{b, {}};
  bool ok = std::visit(
      [&](const auto& d) -> bool {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, NegationConflict>) {
          if (!c.pair(d.first) || !c.pair(d.first_complement) || !c.pair(d.second) || !c.pair(d.second_complement))
            return false;
          if (d.first_complement.u != d.first.u || d.first_complement.v != d.first.u - d.first.v ||
              d.second_complement.u != d.second.u || d.second_complement.v != d.second.u - d.second.v)
            return c.fail("complement witness is not U ∖ V");
          if (d.first.value != d.second.value) return c.fail("conflicting pairs have different values");
          if (d.first_complement.value == d.second_complement.value) return c.fail("complement values agree");
          return true;
        } else if constexpr (std::is_same_v<T, CombinationConflict>) {
          if (!c.triple(d.first) || !c.triple(d.second)) return false;
          if (d.first.x != d.second.x || d.first.y != d.second.y) return c.fail("triples have different arguments");
          if (d.first.result == d.second.result) return c.fail("triple results agree");
          return true;
        } else if constexpr (std::is_same_v<T, ChainCertificate>) {
          if (!c.triple(d.yz) || !c.triple(d.x_yz) || !c.triple(d.xy) || !c.triple(d.xy_z)) return false;
          if (d.yz.x != d.y || d.yz.y != d.z) return c.fail("F(y,z) instance has the wrong arguments");
          if (d.x_yz.x != d.x || d.x_yz.y != d.yz.result) return c.fail("F(x,F(y,z)) instance has the wrong arguments");
          if (d.xy.x != d.x || d.xy.y != d.y) return c.fail("F(x,y) instance has the wrong arguments");
          if (d.xy_z.x != d.xy.result || d.xy_z.y != d.z) return c.fail("F(F(x,y),z) instance has the wrong arguments");
          if (d.x_yz.result == d.xy_z.result) return c.fail("both bracketings agree");
          return true;
        } else {
          if (d.cycle.empty()) return c.fail("empty cycle");
          bool strict = false;
          for (std::size_t i = 0; i < d.cycle.size(); ++i) {
            if (!c.link(d.cycle[i])) return false;
            if (d.cycle[i].hi != d.cycle[(i + 1) % d.cycle.size()].lo) return c.fail("cycle links do not connect");
            strict = strict || d.cycle[i].strict || d.cycle[i].source == OrderLink::Source::inclusion;
          }
          if (!strict) return c.fail("cycle has no strict link");
          return true;
        }
      },
      certificate.data);
  return RecheckResult{ok, ok ? std::string() : c.reason};
}

// ---------------------------------------------------------------------------------------
// order conflicts on dense tables

namespace {

constexpr std::size_t kMaxDenseAtoms = 10;

struct Dense {
  std::size_t n = 0;
  std::uint32_t count = 0;  // 2^n
  std::vector<Rational> values;
  std::vector<int> rank;  // rank[u * count + v] for v ⊆ u ≠ ∅

  int at(std::uint32_t v, std::uint32_t u) const { return rank[static_cast<std::size_t>(u) * count + v]; }
  Event event(std::uint32_t m) const { return Event::from_mask(m, n); }
};

Dense make_dense(const BeliefStructure& b) {
  Dense d;
  d.n = b.atom_count();
  d.count = 1u << d.n;
  d.rank.assign(static_cast<std::size_t>(d.count) * d.count, -1);
  std::vector<std::pair<std::size_t, Rational>> cells;
  for (std::uint32_t u = 1; u < d.count; ++u) {
    Event eu = d.event(u);
    for (std::uint32_t v = u;; v = (v - 1) & u) {
      cells.emplace_back(static_cast<std::size_t>(u) * d.count + v, b.bel(d.event(v), eu));
      if (v == 0) break;
    }
  }
  for (const auto& c : cells) d.values.push_back(c.second);
  std::sort(d.values.begin(), d.values.end());
  d.values.erase(std::unique(d.values.begin(), d.values.end()), d.values.end());
  for (const auto& c : cells)
    d.rank[c.first] = static_cast<int>(std::lower_bound(d.values.begin(), d.values.end(), c.second) - d.values.begin());
  return d;
}

// Link stating Bel(x|u) ≤ Bel(y|u) with the overlap removed.
OrderLink context_link(const Dense& d, std::uint32_t u, std::uint32_t x, std::uint32_t y, bool normalized) {
  OrderLink l;
  l.source = OrderLink::Source::context;
  l.context = d.event(u);
  l.from_lo = d.event(x);
  l.from_hi = d.event(y);
  l.strict = d.at(x, u) < d.at(y, u);
  l.normalized = normalized;
  l.lo = normalized ? d.event(x & ~y) : l.from_lo;
  l.hi = normalized ? d.event(y & ~x) : l.from_hi;
  return l;
}

std::optional<OrderConflict> sign_consistency(const Dense& d) {
  std::vector<std::uint32_t> t1(d.count, 0);
  std::uint32_t p = 1;
  std::vector<std::uint32_t> pow3(d.n);
  for (std::size_t i = 0; i < d.n; ++i, p *= 3) pow3[i] = p;
  for (std::uint32_t m = 1; m < d.count; ++m) {
    std::uint32_t low = static_cast<std::uint32_t>(__builtin_ctz(m));
    t1[m] = t1[m & (m - 1)] + pow3[low];
  }
  struct Seen {
    std::int8_t sign = 2;
    std::uint32_t u = 0, a = 0, b = 0;
  };
  std::vector<Seen> seen(static_cast<std::size_t>(p));
  for (std::uint32_t u = 1; u < d.count; ++u) {
    for (std::uint32_t a = u;; a = (a - 1) & u) {
      for (std::uint32_t b = u;; b = (b - 1) & u) {
        if (a != b) {
          std::uint32_t pp = a & ~b, qq = b & ~a;
          std::uint32_t code = t1[pp] + 2 * t1[qq];
          int ra = d.at(a, u), rb = d.at(b, u);
          std::int8_t s = static_cast<std::int8_t>((ra > rb) - (ra < rb));
          Seen& e = seen[code];
          if (e.sign == 2) {
            e = Seen{s, u, a, b};
          } else if (e.sign != s) {
            // orient both observations as links between P = a∖b and Q = b∖a
            struct Obs {
              std::int8_t s;
              std::uint32_t u, a, b;
            };
            Obs o1{e.sign, e.u, e.a, e.b}, o2{s, u, a, b};
            if (o2.s < 0) std::swap(o1, o2);
            // now o1.s < 0 or {o1, o2} = {0, +}
            OrderConflict oc;
            if (o1.s < 0) {
              oc.cycle.push_back(context_link(d, o1.u, o1.a, o1.b, true));  // P < Q
              oc.cycle.push_back(context_link(d, o2.u, o2.b, o2.a, true));  // Q ≤ P
            } else {
              if (o1.s > 0) std::swap(o1, o2);
              oc.cycle.push_back(context_link(d, o1.u, o1.a, o1.b, true));  // P ≤ Q (equal)
              oc.cycle.push_back(context_link(d, o2.u, o2.b, o2.a, true));  // Q < P
            }
            return oc;
          }
        }
        if (b == 0) break;
      }
      if (a == 0) break;
    }
  }
  return std::nullopt;
}

struct Edge {
  std::uint32_t from, to;
  bool strict;
  bool inclusion;
  bool normalized;
  std::uint32_t u, x, y;  // context comparison Bel(x|u) ≤ Bel(y|u)
};

std::vector<int> strong_components(std::uint32_t nodes, const std::vector<std::vector<std::uint32_t>>& adj,
                                   const std::vector<Edge>& edges) {
  std::vector<int> index(nodes, -1), low(nodes, 0), comp(nodes, -1);
  std::vector<bool> on_stack(nodes, false);
  std::vector<std::uint32_t> stack;
  int counter = 0, comps = 0;
  struct Frame {
    std::uint32_t node;
    std::size_t next;
  };
  for (std::uint32_t root = 0; root < nodes; ++root) {
    if (index[root] >= 0) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next < adj[f.node].size()) {
        std::uint32_t w = edges[adj[f.node][f.next++]].to;
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.node] = std::min(low[f.node], index[w]);
        }
        continue;
      }
      std::uint32_t v = f.node;
      if (low[v] == index[v]) {
        while (true) {
          std::uint32_t w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = comps;
          if (w == v) break;
        }
        ++comps;
      }
      call.pop_back();
      if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[v]);
    }
  }
  return comp;
}

OrderLink edge_link(const Dense& d, const Edge& e) {
  if (e.inclusion) {
    OrderLink l;
    l.source = OrderLink::Source::inclusion;
    l.lo = d.event(e.from);
    l.hi = d.event(e.to);
    l.strict = true;
    return l;
  }
  return context_link(d, e.u, e.x, e.y, e.normalized);
}

std::optional<OrderConflict> order_cycles(const Dense& d, bool with_normalized) {
  std::vector<Edge> edges;
  std::vector<std::uint32_t> subsets;
  for (std::uint32_t u = 1; u < d.count; ++u) {
    subsets.clear();
    for (std::uint32_t v = u;; v = (v - 1) & u) {
      subsets.push_back(v);
      if (v == 0) break;
    }
    std::sort(subsets.begin(), subsets.end(), [&](std::uint32_t a, std::uint32_t b) {
      int ra = d.at(a, u), rb = d.at(b, u);
      return ra != rb ? ra < rb : a < b;
    });
    for (std::size_t i = 0; i + 1 < subsets.size(); ++i) {
      std::uint32_t x = subsets[i], y = subsets[i + 1];
      bool equal = d.at(x, u) == d.at(y, u);
      edges.push_back({x, y, !equal, false, false, u, x, y});
      if (equal) edges.push_back({y, x, false, false, false, u, y, x});
      if (with_normalized && (x & y) != 0) {
        edges.push_back({x & ~y, y & ~x, !equal, false, true, u, x, y});
        if (equal) edges.push_back({y & ~x, x & ~y, false, false, true, u, y, x});
      }
    }
  }
  for (std::uint32_t s = 0; s < d.count; ++s)
    for (std::size_t i = 0; i < d.n; ++i)
      if (!(s & (1u << i))) edges.push_back({s, s | (1u << i), true, true, false, 0, 0, 0});

  std::vector<std::vector<std::uint32_t>> adj(d.count);
  for (std::uint32_t e = 0; e < edges.size(); ++e) adj[edges[e].from].push_back(e);
  auto comp = strong_components(d.count, adj, edges);

  for (std::uint32_t e = 0; e < edges.size(); ++e) {
    const Edge& se = edges[e];
    if (!se.strict || comp[se.from] != comp[se.to]) continue;
    // shortest path se.to -> se.from inside the component
    std::vector<std::int64_t> via(d.count, -1);
    std::deque<std::uint32_t> queue{se.to};
    std::vector<bool> seen(d.count, false);
    seen[se.to] = true;
    while (!queue.empty() && !seen[se.from]) {
      std::uint32_t v = queue.front();
      queue.pop_front();
      for (std::uint32_t ei : adj[v]) {
        std::uint32_t w = edges[ei].to;
        if (seen[w] || comp[w] != comp[se.from]) continue;
        seen[w] = true;
        via[w] = ei;
        queue.push_back(w);
      }
    }
    OrderConflict oc;
    oc.cycle.push_back(edge_link(d, se));
    std::vector<OrderLink> path;
    for (std::uint32_t v = se.from; v != se.to; v = edges[static_cast<std::size_t>(via[v])].from)
      path.push_back(edge_link(d, edges[static_cast<std::size_t>(via[v])]));
    std::reverse(path.begin(), path.end());
    oc.cycle.insert(oc.cycle.end(), path.begin(), path.end());
    return oc;
  }
  return std::nullopt;
}

}  // namespace

RefutationReport refutation_search(const BeliefStructure& b, RefutationOptions options) {
  RefutationReport r;
  try {
    auto ns = extract_negation(b, options.extraction);
    if (auto* c = std::get_if<NegationConflict>(&ns)) {
      r.certificate = RefutationCertificate{*c};
      return r;
    }
  } catch (const BudgetExceeded&) {
    r.skipped.push_back("A1");
  }
  try {
    auto cs = extract_combination(b, options.extraction);
    if (auto* c = std::get_if<CombinationConflict>(&cs)) {
      r.certificate = RefutationCertificate{*c};
      return r;
    }
    auto chain = chain_consistency(std::get<CombinationForm>(cs));
    if (chain.certificate) {
      r.certificate = RefutationCertificate{*chain.certificate};
      return r;
    }
  } catch (const BudgetExceeded&) {
    r.skipped.push_back("A2");
    r.skipped.push_back("chain-associativity");
  }
  if (options.depth < 1) return r;
  if (b.atom_count() > kMaxDenseAtoms) {
    r.skipped.push_back("order-conflict");
    return r;
  }
  Dense d = make_dense(b);
  if (auto oc = sign_consistency(d)) {
    r.certificate = RefutationCertificate{std::move(*oc)};
    return r;
  }
  if (options.depth >= 2) {
    if (auto oc = order_cycles(d, options.depth >= 3)) r.certificate = RefutationCertificate{std::move(*oc)};
  }
  return r;
}

// ---------------------------------------------------------------------------------------
// witness verification

namespace {

template <class W>
struct Classes {
  std::vector<std::vector<std::size_t>> members;
  std::vector<W> weight;
  bool orbit_aligned = true;
};

template <class W>
Classes<W> refine(const BeliefStructure& b, const std::vector<W>& w) {
  Classes<W> c;
  for (const auto& orbit : b.orbits()) {
    std::map<W, std::vector<std::size_t>> split;
    for (auto a : orbit) split[w[a]].push_back(a);
    if (split.size() > 1) c.orbit_aligned = false;
    for (auto& [weight, atoms] : split) {
      c.members.push_back(atoms);
      c.weight.push_back(weight);
    }
  }
  return c;
}

template <class W>
Event class_event(const BeliefStructure& b, const Classes<W>& c, const Counts& counts) {
  Event e(b.atom_count());
  for (std::size_t k = 0; k < counts.size(); ++k)
    for (std::uint32_t j = 0; j < counts[k]; ++j) e.insert(c.members[k][j]);
  return e;
}

// fn(value, bel(u), bel(v), ratio, v, u) over every pair V ⊆ U ≠ ∅ up to class symmetry.
template <class W, class Fn>
void visit_pairs(const BeliefStructure& b, const Classes<W>& c, Fn&& fn) {
  std::vector<std::size_t> sizes;
  for (const auto& m : c.members) sizes.push_back(m.size());
  const Event full = b.domain().full_event();
  Counts full_counts(sizes.size());
  for (std::size_t k = 0; k < sizes.size(); ++k) full_counts[k] = static_cast<std::uint32_t>(sizes[k]);
  for_each_nested(sizes, 2, [&](const std::vector<Counts>& lv) {
    const Counts& u = lv[0];
    const Counts& v = lv[1];
    W mu_u{0}, mu_v{0};
    for (std::size_t k = 0; k < u.size(); ++k) {
      mu_u += c.weight[k] * static_cast<long>(u[k]);
      mu_v += c.weight[k] * static_cast<long>(v[k]);
    }
    if (mu_u == W{0}) return true;
    Rational value, bu, bv;
    if (c.orbit_aligned) {
      value = b.bel_counts(v, u);
      bu = b.bel_counts(u, full_counts);
      bv = b.bel_counts(v, full_counts);
    } else {
      Event ev = class_event(b, c, v), eu = class_event(b, c, u);
      value = b.bel(ev, eu);
      bu = b.bel(eu, full);
      bv = b.bel(ev, full);
    }
    W ratio = mu_v / mu_u;
    return fn(value, bu, bv, ratio, v, u);
  });
}

template <class W>
void check_weights(const BeliefStructure& b, const std::vector<W>& w, const W& tolerance) {
  if (w.size() != b.atom_count()) throw std::invalid_argument("weight count does not match the domain");
  W sum{0};
  for (const auto& x : w) {
    if (!(x > W{0})) throw std::invalid_argument("witness weights must be strictly positive");
    sum += x;
  }
  W diff = sum - W{1};
  if (diff < W{0}) diff = -diff;
  if (diff > tolerance) throw std::invalid_argument("witness weights must sum to 1");
}

template <class W>
struct Entry {
  W lo, hi;
  Counts v, u;
};

}  // namespace

WitnessCheck verify_witness(const BeliefStructure& b, const std::vector<Rational>& raw) {
  const auto weights = canonical(raw);
  check_weights<Rational>(b, weights, Rational(0));
  auto classes = refine(b, weights);
  WitnessCheck r;
  std::map<Rational, Entry<Rational>> g;
  auto pw = [&](const Rational& value, const Counts& v, const Counts& u) {
    return PairWitness{class_event(b, classes, v), class_event(b, classes, u), value};
  };
  visit_pairs(b, classes, [&](const Rational& value, const Rational&, const Rational&, const Rational& ratio,
                              const Counts& v, const Counts& u) {
    ++r.pairs_checked;
    auto [it, fresh] = g.try_emplace(value, Entry<Rational>{ratio, ratio, v, u});
    if (!fresh && it->second.lo != ratio) {
      r.failed = "single-valued";
      r.detail = "value " + to_string(value) + " maps to ratios " + to_string(it->second.lo) + " and " + to_string(ratio);
      r.first = pw(value, it->second.v, it->second.u);
      r.second = pw(value, v, u);
      return false;
    }
    return true;
  });
  if (!r.failed.empty()) return r;
  for (auto it = g.begin(); it != g.end() && std::next(it) != g.end(); ++it) {
    auto nx = std::next(it);
    if (!(it->second.lo < nx->second.lo)) {
      r.failed = "strictly-increasing";
      r.detail = "values " + to_string(it->first) + " < " + to_string(nx->first) + " map to ratios " +
                 to_string(it->second.lo) + " and " + to_string(nx->second.lo);
      r.first = pw(it->first, it->second.v, it->second.u);
      r.second = pw(nx->first, nx->second.v, nx->second.u);
      return r;
    }
  }
  const Bounds& bd = b.bounds();
  auto lo = g.find(bd.lo), hi = g.find(bd.hi);
  if (lo == g.end() || hi == g.end() || lo->second.lo != 0 || hi->second.lo != 1) {
    r.failed = "endpoints";
    r.detail = "g(e) must be 0 and g(E) must be 1";
    return r;
  }
  visit_pairs(b, classes, [&](const Rational& value, const Rational& bu, const Rational& bv, const Rational&,
                              const Counts& v, const Counts& u) {
    if (g.at(value).lo * g.at(bu).lo != g.at(bv).lo) {
      r.failed = "product-rule";
      r.detail = "g(Bel(V|U))·g(Bel(U)) != g(Bel(V))";
      r.first = pw(value, v, u);
      return false;
    }
    return true;
  });
  r.pass = r.failed.empty();
  return r;
}

WitnessCheck verify_witness(const BeliefStructure& b, const std::vector<long double>& weights, long double tolerance) {
  check_weights<long double>(b, weights, std::max(tolerance, 1e-15L));
  auto classes = refine(b, weights);
  WitnessCheck r;
  std::map<Rational, Entry<long double>> g;
  auto pw = [&](const Rational& value, const Counts& v, const Counts& u) {
    return PairWitness{class_event(b, classes, v), class_event(b, classes, u), value};
  };
  visit_pairs(b, classes, [&](const Rational& value, const Rational&, const Rational&, long double ratio,
                              const Counts& v, const Counts& u) {
    ++r.pairs_checked;
    auto [it, fresh] = g.try_emplace(value, Entry<long double>{ratio, ratio, v, u});
    if (!fresh) {
      it->second.lo = std::min(it->second.lo, ratio);
      it->second.hi = std::max(it->second.hi, ratio);
      if (it->second.hi - it->second.lo > tolerance) {
        r.failed = "single-valued";
        r.detail = "value " + to_string(value) + " maps to ratios spread beyond the tolerance";
        r.first = pw(value, it->second.v, it->second.u);
        r.second = pw(value, v, u);
        return false;
      }
    }
    return true;
  });
  if (!r.failed.empty()) return r;
  for (auto it = g.begin(); it != g.end() && std::next(it) != g.end(); ++it) {
    auto nx = std::next(it);
    if (!(nx->second.lo - it->second.hi > tolerance)) {
      r.failed = "strictly-increasing";
      r.detail = "values " + to_string(it->first) + " < " + to_string(nx->first) + " are not separated in ratio";
      r.first = pw(it->first, it->second.v, it->second.u);
      r.second = pw(nx->first, nx->second.v, nx->second.u);
      return r;
    }
  }
  const Bounds& bd = b.bounds();
  auto lo = g.find(bd.lo), hi = g.find(bd.hi);
  if (lo == g.end() || hi == g.end() || std::fabs(lo->second.hi) > tolerance ||
      std::fabs(hi->second.lo - 1.0L) > tolerance) {
    r.failed = "endpoints";
    r.detail = "g(e) must be 0 and g(E) must be 1";
    return r;
  }
  auto mid = [&](const Rational& v) {
    const auto& e = g.at(v);
    return (e.lo + e.hi) / 2;
  };
  visit_pairs(b, classes, [&](const Rational& value, const Rational& bu, const Rational& bv, long double,
                              const Counts& v, const Counts& u) {
    if (std::fabs(mid(value) * mid(bu) - mid(bv)) > 4 * tolerance) {
      r.failed = "product-rule";
      r.detail = "g(Bel(V|U))·g(Bel(U)) differs from g(Bel(V)) beyond the tolerance";
      r.first = pw(value, v, u);
      return false;
    }
    return true;
  });
  r.pass = r.failed.empty();
  return r;
}

long double RescalingMap::operator()(long double v) const {
  const auto& gr = numeric_graph;
  if (gr.empty()) return 0;
  if (v <= gr.front().first) return gr.front().second;
  if (v >= gr.back().first) return gr.back().second;
  auto it = std::lower_bound(gr.begin(), gr.end(), v, [](const auto& p, long double x) { return p.first < x; });
  if (it->first == v) return it->second;
  auto pv = std::prev(it);
  return pv->second + (it->second - pv->second) * (v - pv->first) / (it->first - pv->first);
}

RescalingMap rescaling_from_witness(const BeliefStructure& b, const std::vector<Rational>& raw) {
  const auto weights = canonical(raw);
  auto check = verify_witness(b, weights);
  if (!check.pass) throw PreconditionError("witness fails (" + check.failed + "): " + check.detail);
  auto classes = refine(b, weights);
  std::map<Rational, Rational> g;
  visit_pairs(b, classes, [&](const Rational& value, const Rational&, const Rational&, const Rational& ratio,
                              const Counts&, const Counts&) {
    g.emplace(value, ratio);
    return true;
  });
  RescalingMap m;
  m.bounds = b.bounds();
  for (const auto& [v, r] : g) {
    m.graph.emplace_back(v, r);
    m.numeric_graph.emplace_back(to_long_double(v), to_long_double(r));
  }
  return m;
}

RescalingMap rescaling_from_witness(const BeliefStructure& b, const std::vector<long double>& weights,
                                    long double tolerance) {
  auto check = verify_witness(b, weights, tolerance);
  if (!check.pass) throw PreconditionError("witness fails (" + check.failed + "): " + check.detail);
  auto classes = refine(b, weights);
  std::map<Rational, std::pair<long double, std::size_t>> g;
  visit_pairs(b, classes, [&](const Rational& value, const Rational&, const Rational&, long double ratio,
                              const Counts&, const Counts&) {
    auto& e = g[value];
    e.first += ratio;
    ++e.second;
    return true;
  });
  RescalingMap m;
  m.bounds = b.bounds();
  for (const auto& [v, e] : g) m.numeric_graph.emplace_back(to_long_double(v), e.first / static_cast<long double>(e.second));
  return m;
}

// ---------------------------------------------------------------------------------------
// decide

namespace {

struct Attempt {
  std::optional<ProbabilityWitness> witness;
  std::size_t iterations = 0;
  long double violation = 0;
};

// Rounds float weights to small-denominator rationals and verifies exactly, then numerically.
std::optional<ProbabilityWitness> finish(const BeliefStructure& b, const std::vector<long double>& w,
                                         const DecideOptions& o) {
  long double sum = 0;
  for (auto x : w) {
    if (!(x > 0) || !std::isfinite(x)) return std::nullopt;
    sum += x;
  }
  std::vector<long double> normalized(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) normalized[i] = w[i] / sum;
  for (std::uint64_t cap = 10; cap <= o.max_denominator; cap *= 10) {
    std::vector<Rational> q;
    Rational total(0);
    bool positive = true;
    for (auto x : normalized) {
      q.push_back(nearest_convergent(x, cap));
      positive = positive && sgn(q.back()) > 0;
      total += q.back();
    }
    if (!positive) continue;
    for (auto& x : q) {
      x /= total;
      x.canonicalize();
    }
    if (verify_witness(b, q).pass) {
      ProbabilityWitness pw;
      pw.numeric.reserve(q.size());
      for (const auto& x : q) pw.numeric.push_back(to_long_double(x));
      pw.exact = std::move(q);
      return pw;
    }
  }
  if (verify_witness(b, normalized, o.tolerance).pass) {
    ProbabilityWitness pw;
    pw.numeric = normalized;
    pw.numerically_verified = true;
    return pw;
  }
  return std::nullopt;
}

// Weights read off the unconditional singleton values, up to one power.
std::optional<ProbabilityWitness> calibrated(const BeliefStructure& b, const DecideOptions& o) {
  const std::size_t n = b.atom_count();
  const Bounds& bd = b.bounds();
  const Event full = b.domain().full_event();
  std::vector<Rational> s(n);
  for (const auto& orbit : b.orbits()) {
    Event e(n);
    e.insert(orbit.front());
    Rational v = (b.bel(e, full) - bd.lo) / (bd.hi - bd.lo);
    v.canonicalize();
    for (auto a : orbit) s[a] = v;
  }
  for (const auto& x : s)
    if (sgn(x) <= 0) return std::nullopt;
  auto exact_candidate = [&](std::vector<Rational> w) -> std::optional<ProbabilityWitness> {
    if (!verify_witness(b, w).pass) return std::nullopt;
    ProbabilityWitness pw;
    for (const auto& x : w) pw.numeric.push_back(to_long_double(x));
    pw.exact = std::move(w);
    return pw;
  };
  Rational total = std::accumulate(s.begin(), s.end(), Rational(0));
  if (total == 1)
    if (auto pw = exact_candidate(s)) return pw;
  // singleton masses sum to 1 after one common power
  std::vector<long double> sl(n);
  bool interior = n >= 2;
  for (std::size_t i = 0; i < n; ++i) {
    sl[i] = to_long_double(s[i]);
    interior = interior && sl[i] < 1;
  }
  if (interior && total != 1) {
    auto excess = [&](long double p) {
      long double t = 0;
      for (auto x : sl) t += std::pow(x, p);
      return t - 1;
    };
    long double lo = 1e-9L, hi = 1.0L;
    while (excess(hi) > 0 && hi < 1e6L) hi *= 2;
    if (excess(lo) >= 0 && excess(hi) <= 0) {
      for (int it = 0; it < 200; ++it) {
        long double mid = (lo + hi) / 2;
        (excess(mid) > 0 ? lo : hi) = mid;
      }
      long double p = (lo + hi) / 2;
      std::vector<long double> wl(n);
      for (std::size_t i = 0; i < n; ++i) wl[i] = std::pow(sl[i], p);
      if (auto pw = finish(b, wl, o)) return pw;
    }
  }
  std::vector<Rational> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = s[i] / total;
    w[i].canonicalize();
  }
  return exact_candidate(std::move(w));
}

// Penalty over value groups: spread inside a group and order violations between neighbours.
class Descent {
 public:
  Descent(const Dense& d, const DecideOptions& o) : d_(d), o_(o) {
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> by_rank(d.values.size());
    for (std::uint32_t u = 1; u < d.count; ++u)
      for (std::uint32_t v = u;; v = (v - 1) & u) {
        by_rank[static_cast<std::size_t>(d.at(v, u))].emplace_back(v, u);
        if (v == 0) break;
      }
    for (auto& g : by_rank)
      if (!g.empty()) groups_.push_back(std::move(g));
  }

  Attempt run(std::uint64_t sub_seed, bool uniform_start, const BeliefStructure& b) const {
    const std::size_t n = d_.n;
    std::vector<long double> theta(n, 0.0L);
    if (!uniform_start) {
      std::mt19937_64 rng(sub_seed);
      std::normal_distribution<double> normal(0.0, 1.0);
      for (auto& t : theta) t = normal(rng);
    }
    Attempt a;
    std::vector<long double> grad(n), trial(n);
    long double loss = evaluate(theta, &grad);
    long double step = 1.0L;
    for (; a.iterations < o_.budget && loss > 1e-26L; ++a.iterations) {
      long double g2 = 0;
      for (auto g : grad) g2 += g * g;
      if (g2 == 0) break;
      bool moved = false;
      while (step > 1e-18L) {
        for (std::size_t i = 0; i < n; ++i) trial[i] = theta[i] - step * grad[i];
        long double tl = evaluate(trial, nullptr);
        if (tl <= loss - 1e-4L * step * g2) {
          theta = trial;
          loss = evaluate(theta, &grad);
          step *= 2;
          moved = true;
          break;
        }
        step /= 2;
      }
      if (!moved) break;
    }
    a.violation = loss;
    try {
      a.witness = finish(b, softmax(theta), o_);
    } catch (const std::exception&) {
      a.witness.reset();
    }
    return a;
  }

 private:
  static std::vector<long double> softmax(const std::vector<long double>& theta) {
    long double m = *std::max_element(theta.begin(), theta.end());
    std::vector<long double> w(theta.size());
    long double s = 0;
    for (std::size_t i = 0; i < theta.size(); ++i) s += (w[i] = std::exp(theta[i] - m));
    for (auto& x : w) x /= s;
    return w;
  }

  long double evaluate(const std::vector<long double>& theta, std::vector<long double>* grad) const {
    const std::size_t n = d_.n;
    auto w = softmax(theta);
    std::vector<long double> mu(d_.count, 0.0L), gmu(d_.count, 0.0L);
    for (std::uint32_t m = 1; m < d_.count; ++m) mu[m] = mu[m & (m - 1)] + w[static_cast<std::size_t>(__builtin_ctz(m))];
    auto ratio = [&](const std::pair<std::uint32_t, std::uint32_t>& p) { return mu[p.first] / mu[p.second]; };
    auto push = [&](const std::pair<std::uint32_t, std::uint32_t>& p, long double dl) {
      if (!grad) return;
      gmu[p.first] += dl / mu[p.second];
      gmu[p.second] -= dl * mu[p.first] / (mu[p.second] * mu[p.second]);
    };
    long double loss = 0;
    std::vector<long double> lo(groups_.size()), hi(groups_.size());
    std::vector<std::size_t> arg_lo(groups_.size()), arg_hi(groups_.size());
    for (std::size_t k = 0; k < groups_.size(); ++k) {
      const auto& g = groups_[k];
      long double mean = 0;
      lo[k] = INFINITY;
      hi[k] = -INFINITY;
      for (std::size_t j = 0; j < g.size(); ++j) {
        long double r = ratio(g[j]);
        mean += r;
        if (r < lo[k]) lo[k] = r, arg_lo[k] = j;
        if (r > hi[k]) hi[k] = r, arg_hi[k] = j;
      }
      mean /= static_cast<long double>(g.size());
      for (const auto& p : g) {
        long double dev = ratio(p) - mean;
        loss += dev * dev;
        push(p, 2 * dev);
      }
    }
    for (std::size_t k = 0; k + 1 < groups_.size(); ++k) {
      long double h = hi[k] - lo[k + 1] + o_.margin;
      if (h <= 0) continue;
      loss += h * h;
      push(groups_[k][arg_hi[k]], 2 * h);
      push(groups_[k + 1][arg_lo[k + 1]], -2 * h);
    }
    if (grad) {
      std::vector<long double> gw(n, 0.0L);
      for (std::uint32_t m = 1; m < d_.count; ++m)
        for (std::size_t i = 0; i < n; ++i)
          if (m & (1u << i)) gw[i] += gmu[m];
      long double dot = 0;
      for (std::size_t i = 0; i < n; ++i) dot += w[i] * gw[i];
      for (std::size_t i = 0; i < n; ++i) (*grad)[i] = w[i] * (gw[i] - dot);
    }
    return loss;
  }

  const Dense& d_;
  const DecideOptions& o_;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> groups_;
};

}  // namespace

IsomorphismVerdict decide(const BeliefStructure& b, DecideOptions options) {
  IsomorphismVerdict v;
  auto finish_witness = [&](ProbabilityWitness pw, std::string method) {
    v.kind = IsomorphismVerdict::Kind::witness;
    v.method = std::move(method);
    try {
      v.rescaling = pw.exact ? rescaling_from_witness(b, *pw.exact)
                             : rescaling_from_witness(b, pw.numeric, options.tolerance);
    } catch (const std::exception&) {
      v.rescaling.reset();
    }
    v.witness = std::move(pw);
    return v;
  };
  try {
    auto ref = refutation_search(b, options.refutation);
    v.skipped = ref.skipped;
    if (ref.certificate) {
      v.kind = IsomorphismVerdict::Kind::refutation;
      v.certificate = std::move(ref.certificate);
      return v;
    }
    if (auto pw = calibrated(b, options)) return finish_witness(std::move(*pw), "calibrated");
  } catch (const BudgetExceeded& e) {
    v.kind = IsomorphismVerdict::Kind::unknown;
    v.unknown = UnknownReport{0, 0, 0, std::string("enumeration budget exceeded: ") + e.what()};
    return v;
  }

  UnknownReport unknown;
  if (b.atom_count() > kMaxDenseAtoms) {
    unknown.reason = "descent is limited to " + std::to_string(kMaxDenseAtoms) + " atoms";
    v.unknown = unknown;
    return v;
  }
  Dense d = make_dense(b);
  Descent descent(d, options);
  auto run = [&](std::size_t i) {
    std::uint64_t sub = options.seed * 0x9E3779B97F4A7C15ULL + i + 1;
    return descent.run(sub, i == 0, b);
  };
  auto attempts = options.parallel ? kernels::map_parallel<Attempt>(options.restarts, run)
                                   : kernels::map_serial<Attempt>(options.restarts, run);
  unknown.best_violation = INFINITY;
  for (auto& a : attempts) {
    ++unknown.restarts;
    unknown.iterations += a.iterations;
    unknown.best_violation = std::min(unknown.best_violation, a.violation);
    if (a.witness) return finish_witness(std::move(*a.witness), "descent");
  }
  unknown.reason = "no verified witness within " + std::to_string(options.restarts) + " restarts of " +
                   std::to_string(options.budget) + " iterations";
  v.unknown = unknown;
  return v;
}

}  // namespace coxcheck
