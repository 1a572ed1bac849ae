#include "coxcheck/forms.hpp"

#include "coxcheck/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace coxcheck {

std::string_view smoothness_name(Smoothness s) {
  switch (s) {
    case Smoothness::continuous: return "C0";
    case Smoothness::differentiable: return "C1";
    case Smoothness::twice_differentiable: return "C2";
    case Smoothness::infinitely_differentiable: return "Cinf";
  }
  return "?";
}

NegationForm NegationForm::catalog(Catalog c) {
  NegationForm s;
  s.catalog_ = c;
  return s;
}

NegationForm NegationForm::tabular(std::map<Rational, Rational> table, Bounds interval) {
  NegationForm s;
  for (auto& [x, v] : table) s.table_.emplace(canonical(x), canonical(v));
  s.interval_ = Bounds{canonical(interval.lo), canonical(interval.hi)};
  return s;
}

std::optional<Rational> NegationForm::operator()(const Rational& x) const {
  if (catalog_) return Rational(1 - x);
  auto it = table_.find(x);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

std::string NegationForm::name() const {
  if (catalog_) return "linear-complement";
  return "tabular(" + std::to_string(table_.size()) + ")";
}

Smoothness NegationForm::smoothness() const {
  if (!catalog_) throw std::logic_error("smoothness of a tabular form is not defined");
  return Smoothness::infinitely_differentiable;
}

CombinationForm CombinationForm::catalog(Catalog c) {
  CombinationForm f;
  f.catalog_ = c;
  return f;
}

CombinationForm CombinationForm::tabular(std::map<Key, Rational> table, Bounds interval) {
  CombinationForm f;
  for (auto& [k, v] : table) f.table_.emplace(Key{canonical(k.first), canonical(k.second)}, canonical(v));
  f.interval_ = Bounds{canonical(interval.lo), canonical(interval.hi)};
  return f;
}

std::optional<Rational> CombinationForm::operator()(const Rational& x, const Rational& y) const {
  if (!catalog_) {
    auto it = table_.find(Key{x, y});
    if (it == table_.end()) return std::nullopt;
    return it->second;
  }
  switch (*catalog_) {
    case Catalog::product: return Rational(x * y);
    case Catalog::minimum: return x < y ? x : y;
    case Catalog::hamacher: {
      Rational xy = x * y;
      Rational den = x + y - xy;
      if (sgn(den) == 0) {
        if (sgn(x) == 0 && sgn(y) == 0) return Rational(0);
        return std::nullopt;
      }
      Rational r = xy / den;
      r.canonicalize();
      return r;
    }
  }
  return std::nullopt;
}

long double CombinationForm::eval(long double x, long double y) const {
  if (!catalog_) throw std::logic_error("floating evaluation needs a catalog form");
  switch (*catalog_) {
    case Catalog::product: return x * y;
    case Catalog::minimum: return std::min(x, y);
    case Catalog::hamacher: {
      long double den = x + y - x * y;
      return den == 0 ? 0.0L : x * y / den;
    }
  }
  return 0;
}

std::string CombinationForm::name() const {
  if (!catalog_) return "tabular(" + std::to_string(table_.size()) + ")";
  switch (*catalog_) {
    case Catalog::product: return "product";
    case Catalog::minimum: return "minimum";
    case Catalog::hamacher: return "hamacher";
  }
  return "?";
}

Smoothness CombinationForm::smoothness() const {
  if (!catalog_) throw std::logic_error("smoothness of a tabular form is not defined");
  switch (*catalog_) {
    case Catalog::product: return Smoothness::infinitely_differentiable;
    case Catalog::minimum: return Smoothness::continuous;
    case Catalog::hamacher: return Smoothness::infinitely_differentiable;
  }
  return Smoothness::continuous;
}

std::optional<NegationForm> negation_from_name(std::string_view name) {
  if (name == "linear-complement") return NegationForm::catalog(NegationForm::Catalog::linear_complement);
  return std::nullopt;
}

std::optional<CombinationForm> combination_from_name(std::string_view name) {
  if (name == "product") return CombinationForm::catalog(CombinationForm::Catalog::product);
  if (name == "minimum") return CombinationForm::catalog(CombinationForm::Catalog::minimum);
  if (name == "hamacher") return CombinationForm::catalog(CombinationForm::Catalog::hamacher);
  return std::nullopt;
}

namespace {

bool nonzero(const Counts& c) {
  return std::any_of(c.begin(), c.end(), [](auto v) { return v != 0; });
}

Counts minus(const Counts& a, const Counts& b) {
  Counts r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

}  // namespace

NegationExtraction extract_negation(const BeliefStructure& b, ExtractionOptions options) {
  struct Entry {
    Rational image;
    Counts v, u;
  };
  std::map<Rational, Entry> seen;
  std::optional<NegationConflict> conflict;
  auto witness = [&](const Counts& v, const Counts& u, const Rational& value) {
    return PairWitness{b.representative(v), b.representative(u), value};
  };
  for_each_nested(
      b, 2,
      [&](const std::vector<Counts>& lv) {
        const Counts& u = lv[0];
        const Counts& v = lv[1];
        if (!nonzero(u)) return true;
        Rational x = b.bel_counts(v, u);
        Counts rest = minus(u, v);
        Rational s = b.bel_counts(rest, u);
        auto [it, fresh] = seen.try_emplace(x, Entry{s, v, u});
        if (!fresh && it->second.image != s) {
          const Entry& e = it->second;
          Event ev = b.representative(e.v), eu = b.representative(e.u);
          Event nv = b.representative(v), nu = b.representative(u);
          conflict = NegationConflict{PairWitness{ev, eu, x}, PairWitness{eu - ev, eu, e.image},
                                      PairWitness{nv, nu, x}, PairWitness{nu - nv, nu, s}};
          return false;
        }
        return true;
      },
      options.cap);
  if (conflict) return *conflict;
  std::map<Rational, Rational> table;
  std::map<Rational, PairWitness> provenance;
  for (auto& [x, e] : seen) {
    table.emplace(x, e.image);
    provenance.emplace(x, witness(e.v, e.u, x));
  }
  NegationForm s = NegationForm::tabular(std::move(table), b.bounds());
  s.set_provenance(std::move(provenance));
  return s;
}

CombinationExtraction extract_combination(const BeliefStructure& b, ExtractionOptions options) {
  struct Entry {
    Rational result;
    Counts u, a, bb;
  };
  std::map<CombinationForm::Key, Entry> seen;
  auto triple = [&](const Counts& u, const Counts& a, const Counts& bb, const Rational& x, const Rational& y,
                    const Rational& r) {
    return TripleWitness{b.representative(a), b.representative(bb), b.representative(u), x, y, r};
  };
  std::optional<CombinationConflict> conflict;
  for_each_nested(
      b, 3,
      [&](const std::vector<Counts>& lv) {
        const Counts& u = lv[0];
        const Counts& a = lv[1];
        const Counts& bb = lv[2];
        if (!nonzero(a)) return true;
        Rational x = b.bel_counts(bb, a);
        Rational y = b.bel_counts(a, u);
        Rational r = b.bel_counts(bb, u);
        CombinationForm::Key key{x, y};
        auto [it, fresh] = seen.try_emplace(key, Entry{r, u, a, bb});
        if (!fresh && it->second.result != r) {
          const Entry& e = it->second;
          conflict = CombinationConflict{triple(e.u, e.a, e.bb, x, y, e.result), triple(u, a, bb, x, y, r)};
          return false;
        }
        return true;
      },
      options.cap);
  if (conflict) return *conflict;
  std::map<CombinationForm::Key, Rational> table;
  std::map<CombinationForm::Key, TripleWitness> provenance;
  for (auto& [k, e] : seen) {
    table.emplace(k, e.result);
    provenance.emplace(k, triple(e.u, e.a, e.bb, k.first, k.second, e.result));
  }
  CombinationForm f = CombinationForm::tabular(std::move(table), b.bounds());
  f.set_provenance(std::move(provenance));
  return f;
}

std::vector<Rational> uniform_grid(const Bounds& interval, std::size_t n) {
  std::vector<Rational> g;
  if (n == 0) return g;
  if (n == 1) return {interval.lo};
  g.reserve(n);
  Rational width = interval.hi - interval.lo;
  for (std::size_t k = 0; k < n; ++k) {
    Rational p = interval.lo + width * Rational(static_cast<long>(k), static_cast<long>(n - 1));
    p.canonicalize();
    g.push_back(p);
  }
  return g;
}

namespace {

// Compares one consecutive pair of a 1-D section. `increasing` fixes the required direction.
void compare_pair(MonotonicityReport& r, bool increasing, bool strict_applies, int coordinate,
                  const Rational& fixed, const Rational& lo, const Rational& hi, const Rational& vlo,
                  const Rational& vhi) {
  ++r.comparisons;
  int c = cmp(vlo, vhi);
  if (!increasing) c = -c;
  MonotoneViolation v{coordinate, fixed, lo, hi, vlo, vhi};
  if (c > 0 && r.weak) {
    r.weak = false;
    r.weak_violation = v;
  }
  if (strict_applies && c >= 0 && r.strict) {
    r.strict = false;
    r.strict_violation = v;
  }
}

void note_jump(MonotonicityReport& r, const Rational& a, const Rational& b) {
  Rational d = abs(a - b);
  if (d > r.observed_jump) r.observed_jump = d;
}

}  // namespace

MonotonicityReport check_monotonicity(const NegationForm& s, MonotonicityOptions options) {
  MonotonicityReport r;
  if (s.is_tabular()) {
    const auto& t = s.table();
    for (auto it = t.begin(); it != t.end() && std::next(it) != t.end(); ++it) {
      auto nx = std::next(it);
      compare_pair(r, false, true, 0, Rational(0), it->first, nx->first, it->second, nx->second);
    }
    r.continuity = Continuity::untestable;
    return r;
  }
  std::size_t n = std::max<std::size_t>(options.grid, 1);
  auto grid = uniform_grid(s.interval(), n + 1);
  std::vector<Rational> vals;
  vals.reserve(grid.size());
  for (const auto& p : grid) vals.push_back(*s(p));
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    compare_pair(r, false, true, 0, Rational(0), grid[i], grid[i + 1], vals[i], vals[i + 1]);
    note_jump(r, vals[i], vals[i + 1]);
  }
  r.jump_bound = options.jump_bound ? *options.jump_bound
                                    : Rational(2 * (s.interval().hi - s.interval().lo) / static_cast<long>(n));
  r.continuity = r.observed_jump <= r.jump_bound ? Continuity::holds : Continuity::violated;
  return r;
}

MonotonicityReport check_monotonicity(const CombinationForm& f, MonotonicityOptions options) {
  MonotonicityReport r;
  const Rational& lo = f.interval().lo;
  if (f.is_tabular()) {
    // sections along each coordinate through the attained arguments
    std::map<Rational, std::vector<std::pair<Rational, Rational>>> by_second, by_first;
    for (const auto& [k, v] : f.table()) {
      by_second[k.second].emplace_back(k.first, v);
      by_first[k.first].emplace_back(k.second, v);
    }
    auto scan = [&](const auto& groups, int coordinate) {
      for (const auto& [fixed, pts] : groups) {
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
          bool strict_applies = fixed > lo && pts[i].first > lo;
          compare_pair(r, true, strict_applies, coordinate, fixed, pts[i].first, pts[i + 1].first, pts[i].second,
                       pts[i + 1].second);
        }
      }
    };
    scan(by_second, 0);
    scan(by_first, 1);
    r.continuity = Continuity::untestable;
    return r;
  }
  std::size_t n = std::max<std::size_t>(options.grid, 1);
  auto grid = uniform_grid(f.interval(), n + 1);
  const std::size_t m = grid.size();
  std::vector<Rational> vals(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) vals[i * m + j] = *f(grid[i], grid[j]);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i + 1 < m; ++i) {
      bool strict_applies = i >= 1 && j >= 1;
      compare_pair(r, true, strict_applies, 0, grid[j], grid[i], grid[i + 1], vals[i * m + j], vals[(i + 1) * m + j]);
      note_jump(r, vals[i * m + j], vals[(i + 1) * m + j]);
      compare_pair(r, true, strict_applies, 1, grid[j], grid[i], grid[i + 1], vals[j * m + i], vals[j * m + i + 1]);
      note_jump(r, vals[j * m + i], vals[j * m + i + 1]);
    }
  r.jump_bound = options.jump_bound ? *options.jump_bound
                                    : Rational(2 * (f.interval().hi - f.interval().lo) / static_cast<long>(n));
  r.continuity = r.observed_jump <= r.jump_bound ? Continuity::holds : Continuity::violated;
  return r;
}

std::string_view equation_name(EquationId id) {
  switch (id) {
    case EquationId::associativity: return "EQ1";
    case EquationId::involution: return "EQ3";
    case EquationId::quotient: return "EQ3.5";
    case EquationId::symmetric: return "EQSYM";
  }
  return "?";
}

std::optional<EquationId> parse_equation(std::string_view name) {
  for (auto id : {EquationId::associativity, EquationId::involution, EquationId::quotient, EquationId::symmetric})
    if (equation_name(id) == name) return id;
  return std::nullopt;
}

namespace {

using Point = kernels::PointResult<Rational>;

Point evaluated(const Rational& a, const Rational& b) { return Point{kernels::PointStatus::evaluated, abs(a - b)}; }
Point undefined() { return Point{kernels::PointStatus::undefined, Rational(0)}; }
Point zero_den() { return Point{kernels::PointStatus::zero_denominator, Rational(0)}; }

template <class Eval>
ResidualReport run_grid(EquationId eq, std::size_t n, const std::vector<Rational>& pts, int arity, bool partial,
                        bool parallel, Eval&& eval) {
  ResidualReport r;
  r.equation = eq;
  r.grid = n;
  r.partial = partial;
  const std::size_t m = pts.size();
  std::size_t total = 1;
  for (int i = 0; i < arity; ++i) total *= m;
  if (m == 0) total = 0;
  r.total = total;
  auto split = [&](std::size_t idx) {
    std::array<std::size_t, 3> ix{};
    for (int i = arity - 1; i >= 0; --i) {
      ix[static_cast<std::size_t>(i)] = idx % m;
      idx /= m;
    }
    return ix;
  };
  auto point = [&](std::size_t idx) { return eval(split(idx)); };
  auto red = parallel ? kernels::reduce_grid_parallel<Rational>(total, point)
                      : kernels::reduce_grid_serial<Rational>(total, point);
  r.evaluated = red.evaluated;
  r.zero_denominator = red.zero_denominator;
  r.undefined = red.undefined;
  if (!red.argmax)
    throw EmptyEvaluation("no grid point of " + std::string(equation_name(eq)) + " could be evaluated (" +
                          std::to_string(total) + " points)");
  r.residual = red.max;
  auto ix = split(*red.argmax);
  for (int i = 0; i < arity; ++i) r.witness.push_back(pts[ix[static_cast<std::size_t>(i)]]);
  return r;
}

}  // namespace

ResidualReport check_functional_equation(const CombinationForm& f, EquationId eq, std::size_t n,
                                         EquationOptions options) {
  if (eq != EquationId::associativity)
    throw std::invalid_argument(std::string(equation_name(eq)) + " constrains S, not F");
  std::vector<Rational> pts;
  if (f.is_tabular() && options.table_points) {
    std::set<Rational> s;
    for (const auto& [k, v] : f.table()) {
      s.insert(k.first);
      s.insert(k.second);
    }
    pts.assign(s.begin(), s.end());
  } else {
    pts = uniform_grid(f.interval(), n);
  }
  return run_grid(eq, n, pts, 3, f.is_tabular(), options.parallel, [&](const std::array<std::size_t, 3>& ix) {
    const Rational &x = pts[ix[0]], &y = pts[ix[1]], &z = pts[ix[2]];
    auto yz = f(y, z);
    auto xy = f(x, y);
    if (!yz || !xy) return undefined();
    auto lhs = f(x, *yz);
    auto rhs = f(*xy, z);
    if (!lhs || !rhs) return undefined();
    return evaluated(*lhs, *rhs);
  });
}

ResidualReport check_functional_equation(const NegationForm& s, EquationId eq, std::size_t n,
                                         EquationOptions options) {
  if (eq == EquationId::associativity) throw std::invalid_argument("EQ1 constrains F, not S");
  std::vector<Rational> pts;
  if (s.is_tabular() && options.table_points) {
    for (const auto& [k, v] : s.table()) pts.push_back(k);
  } else {
    pts = uniform_grid(s.interval(), n);
  }
  const bool partial = s.is_tabular();
  switch (eq) {
    case EquationId::involution:
      return run_grid(eq, n, pts, 1, partial, options.parallel, [&](const std::array<std::size_t, 3>& ix) {
        const Rational& y = pts[ix[0]];
        auto sy = s(y);
        if (!sy) return undefined();
        auto ssy = s(*sy);
        if (!ssy) return undefined();
        return evaluated(*ssy, y);
      });
    case EquationId::quotient:
      return run_grid(eq, n, pts, 2, partial, options.parallel, [&](const std::array<std::size_t, 3>& ix) {
        const Rational &x = pts[ix[0]], &y = pts[ix[1]];
        if (sgn(y) == 0) return zero_den();
        auto sx = s(x);
        if (!sx) return undefined();
        if (sgn(*sx) == 0) return zero_den();
        auto a = s(Rational(x / y));
        auto sy = s(y);
        if (!a || !sy) return undefined();
        auto b = s(Rational(*sy / *sx));
        if (!b) return undefined();
        return evaluated(y * *a, *sx * *b);
      });
    case EquationId::symmetric:
      return run_grid(eq, n, pts, 2, partial, options.parallel, [&](const std::array<std::size_t, 3>& ix) {
        const Rational &x = pts[ix[0]], &y = pts[ix[1]];
        if (sgn(x) == 0 || sgn(y) == 0) return zero_den();
        auto sx = s(x);
        auto sy = s(y);
        if (!sx || !sy) return undefined();
        auto a = s(Rational(*sx / y));
        auto b = s(Rational(*sy / x));
        if (!a || !b) return undefined();
        return evaluated(y * *a, x * *b);
      });
    case EquationId::associativity: break;
  }
  throw std::invalid_argument("unknown equation");
}

}  // namespace coxcheck
