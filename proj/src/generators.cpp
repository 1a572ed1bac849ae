#include "coxcheck/generators.hpp"

#include "coxcheck/errors.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace coxcheck {

namespace {

void validate_weights(const Domain& domain, const std::vector<Rational>& weights) {
  if (weights.size() != domain.size()) throw std::invalid_argument("one weight per atom is required");
  Rational sum(0);
  for (const auto& w : weights) {
    if (sgn(w) <= 0) throw std::invalid_argument("weights must be strictly positive");
    sum += w;
  }
  if (sum != 1) throw std::invalid_argument("weights must sum to 1 (got " + to_string(sum) + ")");
}

std::string bits(std::size_t value, unsigned width) {
  std::string s(width, '0');
  for (unsigned i = 0; i < width; ++i)
    if (value & (std::size_t{1} << (width - 1 - i))) s[i] = '1';
  return s;
}

}  // namespace

BeliefStructure gen_probability(const Domain& domain, const std::vector<Rational>& weights) {
  return gen_distorted(domain, weights, 1);
}

BeliefStructure gen_distorted(const Domain& domain, const std::vector<Rational>& raw, unsigned k) {
  if (k < 1) throw std::invalid_argument("distortion exponent must be at least 1");
  auto weights = canonical(raw);
  validate_weights(domain, weights);
  return BeliefStructure::from_measure(domain, weights, k);
}

// ---------------------------------------------------------------------------------------

namespace {

struct Cell {
  int var = -1;  // -1: fixed
  bool complemented = false;
  int fixed = 0;  // grid index when var == -1
};

class MinSearch {
 public:
  MinSearch(std::size_t n, std::vector<Rational> grid, const CounterexampleOptions& o)
      : n_(n), count_(1u << n), grid_(std::move(grid)), options_(o) {
    zero_ = index_of(Rational(0));
    one_ = index_of(Rational(1));
    for (std::size_t i = 0; i < grid_.size(); ++i) complement_.push_back(index_of(Rational(1 - grid_[i])));
    for (std::size_t i = 0; i < grid_.size(); ++i)
      if (!o.regular || (i != zero_ && i != one_)) allowed_.push_back(static_cast<int>(i));
    build_cells();
    build_constraints();
    build_permutations();
  }

  CounterexampleSearch run() {
    values_.assign(vars_.size(), -1);
    descend(0);
    return result_;
  }

 private:
  std::size_t index_of(const Rational& x) const {
    auto it = std::find(grid_.begin(), grid_.end(), x);
    return static_cast<std::size_t>(it - grid_.begin());
  }

  Cell& cell(std::uint32_t v, std::uint32_t u) { return cells_[static_cast<std::size_t>(u) * count_ + v]; }
  const Cell& cell(std::uint32_t v, std::uint32_t u) const { return cells_[static_cast<std::size_t>(u) * count_ + v]; }

  void build_cells() {
    cells_.assign(static_cast<std::size_t>(count_) * count_, Cell{});
    std::vector<std::uint32_t> contexts;
    for (std::uint32_t u = 1; u < count_; ++u) contexts.push_back(u);
    std::stable_sort(contexts.begin(), contexts.end(),
                     [](std::uint32_t a, std::uint32_t b) { return __builtin_popcount(a) < __builtin_popcount(b); });
    for (std::uint32_t u : contexts) {
      for (std::uint32_t v = 0; v <= u; ++v) {
        if ((v & ~u) != 0) continue;
        Cell& c = cell(v, u);
        if (v == 0) {
          c.fixed = static_cast<int>(zero_);
        } else if (v == u) {
          c.fixed = static_cast<int>(one_);
        } else if (c.var < 0 && !c.complemented) {
          c.var = static_cast<int>(vars_.size());
          Cell& comp = cell(u & ~v, u);
          comp.var = c.var;
          comp.complemented = true;
          vars_.emplace_back(v, u);
        }
      }
    }
  }

  int value(const Cell& c) const {
    if (c.var < 0) return c.fixed;
    int x = values_[static_cast<std::size_t>(c.var)];
    return c.complemented ? static_cast<int>(complement_[static_cast<std::size_t>(x)]) : x;
  }

  struct Constraint {
    std::uint32_t b, a, u;  // Bel(b|u) = min(Bel(b|a), Bel(a|u))
  };

  void build_constraints() {
    by_var_.assign(vars_.size(), {});
    for (std::uint32_t u = 1; u < count_; ++u)
      for (std::uint32_t a = (u - 1) & u; a != 0; a = (a - 1) & u)
        for (std::uint32_t b = (a - 1) & a; b != 0; b = (b - 1) & a) {
          int last = std::max({cell(b, u).var, cell(b, a).var, cell(a, u).var});
          by_var_[static_cast<std::size_t>(last)].push_back({b, a, u});
        }
  }

  bool holds(const Constraint& c) const {
    const Rational& lhs = grid_[static_cast<std::size_t>(value(cell(c.b, c.u)))];
    const Rational& x = grid_[static_cast<std::size_t>(value(cell(c.b, c.a)))];
    const Rational& y = grid_[static_cast<std::size_t>(value(cell(c.a, c.u)))];
    return lhs == std::min(x, y);
  }

  void build_permutations() {
    std::vector<std::size_t> p(n_);
    std::iota(p.begin(), p.end(), 0);
    do {
      std::vector<std::uint32_t> map(count_);
      for (std::uint32_t m = 0; m < count_; ++m) {
        std::uint32_t r = 0;
        for (std::size_t i = 0; i < n_; ++i)
          if (m & (1u << i)) r |= 1u << p[i];
        map[m] = r;
      }
      perms_.push_back(std::move(map));
    } while (std::next_permutation(p.begin(), p.end()));
  }

  // Assignment in variable order after relabeling atoms by `perm`.
  bool canonical() const {
    for (std::size_t k = 1; k < perms_.size(); ++k) {
      const auto& pm = perms_[k];
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        auto [v, u] = vars_[i];
        int mine = values_[i];
        int theirs = value(cell(pm[v], pm[u]));
        if (theirs < mine) return false;
        if (theirs > mine) break;
      }
    }
    return true;
  }

  BeliefStructure build() const {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n_; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
    Domain domain(names);
    TableBuilder tb(domain);
    for (std::uint32_t u = 1; u < count_; ++u)
      for (std::uint32_t v = u;; v = (v - 1) & u) {
        tb.set(Event::from_mask(v, n_), Event::from_mask(u, n_), grid_[static_cast<std::size_t>(value(cell(v, u)))]);
        if (v == 0) break;
      }
    return tb.build();
  }

  void evaluate() {
    if (!canonical()) {
      ++result_.symmetric_skipped;
      return;
    }
    ++result_.candidates;
    BeliefStructure b = build();
    auto ref = refutation_search(b, options_.decide.refutation);
    if (ref.certificate) {
      result_.hit = b;
      result_.certificate = ref.certificate;
      return;
    }
    auto verdict = decide(b, options_.decide);
    switch (verdict.kind) {
      case IsomorphismVerdict::Kind::refutation:
        result_.hit = b;
        result_.certificate = verdict.certificate;
        return;
      case IsomorphismVerdict::Kind::witness: ++result_.isomorphic; return;
      case IsomorphismVerdict::Kind::unknown: ++result_.unknown; return;
    }
  }

  void descend(std::size_t k) {
    if (result_.hit) return;
    if (k == vars_.size()) {
      evaluate();
      return;
    }
    for (int x : allowed_) {
      values_[k] = x;
      bool ok = true;
      for (const auto& c : by_var_[k])
        if (!holds(c)) {
          ok = false;
          break;
        }
      if (ok) descend(k + 1);
      if (result_.hit) return;
    }
    values_[k] = -1;
  }

  std::size_t n_;
  std::uint32_t count_;
  std::vector<Rational> grid_;
  const CounterexampleOptions& options_;
  std::size_t zero_ = 0, one_ = 0;
  std::vector<std::size_t> complement_;
  std::vector<int> allowed_;
  std::vector<Cell> cells_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> vars_;
  std::vector<std::vector<Constraint>> by_var_;
  std::vector<std::vector<std::uint32_t>> perms_;
  std::vector<int> values_;
  CounterexampleSearch result_;
};

}  // namespace

CounterexampleSearch search_min_counterexample(std::size_t n, const std::vector<Rational>& grid,
                                               CounterexampleOptions options) {
  if (n < 1 || n > 4) throw std::invalid_argument("counterexample search supports 1 to 4 atoms");
  std::set<Rational> g(grid.begin(), grid.end());
  if (!g.count(Rational(0)) || !g.count(Rational(1))) throw std::invalid_argument("grid must contain 0 and 1");
  for (const auto& x : g) {
    if (x < 0 || x > 1) throw std::invalid_argument("grid values must lie in [0,1]");
    if (!g.count(Rational(1 - x))) throw std::invalid_argument("grid is not closed under x -> 1-x: " + to_string(x));
  }
  MinSearch search(n, std::vector<Rational>(g.begin(), g.end()), options);
  return search.run();
}

// ---------------------------------------------------------------------------------------

Event ExtendedStructure::embed(const Event& v) const {
  Event out(extended.atom_count());
  for (auto a : v.members()) out = out | embedding.at(a);
  return out;
}

std::vector<EmbedDirective> ExtendedStructure::directives() const {
  std::vector<EmbedDirective> out;
  for (std::size_t i = 0; i < embedding.size(); ++i) {
    EmbedDirective d{base.domain().atom(i), {}};
    for (auto a : embedding[i].members()) d.image.push_back(extended.domain().atom(a));
    out.push_back(std::move(d));
  }
  return out;
}

ExtendedStructure coin_extend(const Domain& domain, const std::vector<Rational>& raw, unsigned coins) {
  if (coins < 1) throw std::invalid_argument("at least one coin is required");
  const auto weights = canonical(raw);
  validate_weights(domain, weights);
  if (coins >= 14 || domain.size() * (std::size_t{1} << coins) > kMaxExtendedAtoms)
    throw BudgetExceeded("extension with " + std::to_string(coins) + " coins exceeds " +
                         std::to_string(kMaxExtendedAtoms) + " atoms");
  const std::size_t outcomes = std::size_t{1} << coins;
  std::vector<std::string> names;
  std::vector<Rational> ext_weights;
  std::vector<Event> embedding;
  const std::size_t total = domain.size() * outcomes;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    Event image(total);
    for (std::size_t c = 0; c < outcomes; ++c) {
      image.insert(names.size());
      names.push_back(domain.atom(i) + "." + bits(c, coins));
      Rational w = weights[i] / static_cast<long>(outcomes);
      w.canonicalize();
      ext_weights.push_back(w);
    }
    embedding.push_back(std::move(image));
  }
  return ExtendedStructure{gen_probability(domain, weights), gen_probability(Domain(names), ext_weights),
                           std::move(embedding)};
}

BeliefStructure coin_domain(unsigned n) {
  if (n < 1 || n > 12) throw std::invalid_argument("coin domains need 1 to 12 coins");
  const std::size_t size = std::size_t{1} << n;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < size; ++c) names.push_back("c" + bits(c, n));
  return gen_probability(Domain(names), std::vector<Rational>(size, Rational(1, static_cast<long>(size))));
}

DomainFamily coin_family(unsigned n_max) {
  if (n_max < 1 || n_max > 12) throw std::invalid_argument("coin family needs 1 <= n_max <= 12");
  DomainFamily f;
  for (unsigned n = 1; n <= n_max; ++n) f.members.push_back(coin_domain(n));
  ExtractionOptions extraction;
  extraction.cap = 2e5;
  f.evidence = build_uniformity(f.members, extraction);
  return f;
}

}  // namespace coxcheck
