#include "coxcheck/belief.hpp"

#include "coxcheck/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

namespace coxcheck {

struct BeliefStructure::Data {
  Domain domain;
  Bounds bounds;
  std::vector<Rational> table;  // 3^n cells, indexed by ternary (U, V) membership digits
  std::vector<Rational> weights;
  unsigned exponent = 0;
  std::vector<std::vector<std::size_t>> orbits;
  std::vector<Rational> orbit_weight;
  std::vector<std::uint64_t> pow3;
};

namespace {

std::vector<std::uint64_t> powers_of_three(std::size_t n) {
  std::vector<std::uint64_t> p(n + 1, 1);
  for (std::size_t i = 1; i <= n; ++i) p[i] = p[i - 1] * 3;
  return p;
}

std::uint64_t ternary_index(std::uint64_t v, std::uint64_t u, const std::vector<std::uint64_t>& pow3) {
  std::uint64_t idx = 0;
  std::uint64_t bits = u;
  while (bits) {
    auto i = static_cast<std::size_t>(__builtin_ctzll(bits));
    idx += (1 + ((v >> i) & 1U)) * pow3[i];
    bits &= bits - 1;
  }
  return idx;
}

void check_bounds_order(const Bounds& b) {
  if (!(b.lo < b.hi)) throw std::invalid_argument("bounds require lo < hi");
}

}  // namespace

BeliefStructure::BeliefStructure(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

BeliefStructure BeliefStructure::from_measure(Domain domain, std::vector<Rational> weights,
                                              unsigned exponent, Bounds bounds) {
  if (weights.size() != domain.size())
    throw std::invalid_argument("weight count does not match domain size");
  if (exponent == 0) throw std::invalid_argument("distortion exponent must be >= 1");
  weights = canonical(std::move(weights));
  bounds = Bounds{canonical(bounds.lo), canonical(bounds.hi)};
  check_bounds_order(bounds);
  Rational total = 0;
  for (const auto& w : weights) {
    if (w <= 0) throw std::invalid_argument("atom weights must be strictly positive");
    total += w;
  }
  for (auto& w : weights) w /= total;

  auto d = std::make_shared<Data>();
  d->domain = std::move(domain);
  d->bounds = std::move(bounds);
  d->weights = std::move(weights);
  d->exponent = exponent;
  std::map<Rational, std::size_t> class_of;
  for (std::size_t i = 0; i < d->weights.size(); ++i) {
    auto [it, fresh] = class_of.emplace(d->weights[i], d->orbits.size());
    if (fresh) {
      d->orbits.emplace_back();
      d->orbit_weight.push_back(d->weights[i]);
    }
    d->orbits[it->second].push_back(i);
  }
  return BeliefStructure(std::move(d));
}

const Domain& BeliefStructure::domain() const { return data_->domain; }
const Bounds& BeliefStructure::bounds() const { return data_->bounds; }
bool BeliefStructure::is_table() const { return data_->exponent == 0; }
const std::vector<Rational>& BeliefStructure::weights() const { return data_->weights; }
unsigned BeliefStructure::exponent() const { return data_->exponent; }
const std::vector<std::vector<std::size_t>>& BeliefStructure::orbits() const { return data_->orbits; }

Rational BeliefStructure::bel(const Event& v, const Event& u) const {
  if (u.universe() != atom_count() || v.universe() != atom_count())
    throw std::invalid_argument("event does not belong to this domain");
  if (u.empty()) throw std::domain_error("Bel(V|U) is undefined for U = {}");
  if (is_table()) return data_->table[ternary_index(v.mask() & u.mask(), u.mask(), data_->pow3)];
  Rational num = 0, den = 0;
  for (auto i : u.members()) {
    den += data_->weights[i];
    if (v.contains(i)) num += data_->weights[i];
  }
  Rational ratio = num / den;
  return data_->bounds.lo + (data_->bounds.hi - data_->bounds.lo) * power(ratio, data_->exponent);
}

Rational BeliefStructure::bel(const Event& u) const { return bel(u, domain().full_event()); }

Rational BeliefStructure::bel_counts(const Counts& v, const Counts& u) const {
  const auto& d = *data_;
  if (is_table()) {
    std::uint64_t vm = 0, um = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (u[i]) um |= std::uint64_t{1} << i;
      if (v[i]) vm |= std::uint64_t{1} << i;
    }
    if (um == 0) throw std::domain_error("Bel(V|U) is undefined for U = {}");
    return d.table[ternary_index(vm & um, um, d.pow3)];
  }
  Rational num = 0, den = 0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u[k]) den += d.orbit_weight[k] * u[k];
    if (v[k]) num += d.orbit_weight[k] * v[k];
  }
  if (den == 0) throw std::domain_error("Bel(V|U) is undefined for U = {}");
  Rational ratio = num / den;
  if (d.exponent == 1 && d.bounds.lo == 0 && d.bounds.hi == 1) return ratio;
  return d.bounds.lo + (d.bounds.hi - d.bounds.lo) * power(ratio, d.exponent);
}

Event BeliefStructure::representative(const Counts& counts) const {
  Event e(atom_count());
  const auto& orbits = data_->orbits;
  for (std::size_t k = 0; k < orbits.size(); ++k)
    for (std::uint32_t j = 0; j < counts[k]; ++j) e.insert(orbits[k][j]);
  return e;
}

Counts BeliefStructure::full_counts() const {
  Counts c;
  for (const auto& o : data_->orbits) c.push_back(static_cast<std::uint32_t>(o.size()));
  return c;
}

Counts BeliefStructure::counts_of(const Event& e) const {
  Counts c;
  for (const auto& o : data_->orbits) {
    std::uint32_t n = 0;
    for (auto a : o) n += e.contains(a) ? 1U : 0U;
    c.push_back(n);
  }
  return c;
}

BeliefStructure BeliefStructure::materialize() const {
  if (is_table()) return *this;
  if (atom_count() > kMaxTableAtoms)
    throw BudgetExceeded("cannot materialize a table over " + std::to_string(atom_count()) + " atoms");
  TableBuilder builder(domain(), bounds());
  const std::size_t n = atom_count();
  for (std::uint64_t u = 1; u < (std::uint64_t{1} << n); ++u) {
    Event ue = Event::from_mask(u, n);
    for (std::uint64_t v = u;; v = (v - 1) & u) {
      Event ve = Event::from_mask(v, n);
      builder.set(ve, ue, bel(ve, ue));
      if (v == 0) break;
    }
  }
  return builder.build();
}

BeliefStructure BeliefStructure::relabel(const std::function<Rational(const Rational&)>& map,
                                         Bounds new_bounds) const {
  check_bounds_order(new_bounds);
  BeliefStructure base = materialize();
  auto d = std::make_shared<Data>(*base.data_);
  d->bounds = std::move(new_bounds);
  for (auto& cell : d->table) cell = map(cell);
  return BeliefStructure(std::move(d));
}

BeliefStructure BeliefStructure::affine(const Rational& scale, const Rational& offset) const {
  if (scale <= 0) throw std::invalid_argument("affine relabeling needs a positive scale");
  Bounds nb{scale * bounds().lo + offset, scale * bounds().hi + offset};
  if (is_table()) return relabel([&](const Rational& v) { return Rational(scale * v + offset); }, nb);
  auto d = std::make_shared<Data>(*data_);
  d->bounds = std::move(nb);
  return BeliefStructure(std::move(d));
}

bool BeliefStructure::same_values(const BeliefStructure& other) const {
  if (!(domain() == other.domain()) || !(bounds() == other.bounds())) return false;
  if (!is_table() && !other.is_table() && exponent() == other.exponent() && weights() == other.weights())
    return true;
  if (atom_count() > kMaxTableAtoms) return false;
  const std::size_t n = atom_count();
  for (std::uint64_t u = 1; u < (std::uint64_t{1} << n); ++u) {
    Event ue = Event::from_mask(u, n);
    for (std::uint64_t v = u;; v = (v - 1) & u) {
      Event ve = Event::from_mask(v, n);
      if (bel(ve, ue) != other.bel(ve, ue)) return false;
      if (v == 0) break;
    }
  }
  return true;
}

TableBuilder::TableBuilder(Domain domain, Bounds bounds)
    : domain_(std::move(domain)), bounds_{canonical(bounds.lo), canonical(bounds.hi)} {
  if (domain_.size() > BeliefStructure::kMaxTableAtoms)
    throw BudgetExceeded("explicit tables are limited to " +
                         std::to_string(BeliefStructure::kMaxTableAtoms) + " atoms");
  pow3_ = powers_of_three(domain_.size());
  cells_.resize(pow3_.back());
}

TableBuilder::TableBuilder(const BeliefStructure& base) : TableBuilder(base.domain(), base.bounds()) {
  BeliefStructure t = base.materialize();
  const std::size_t n = domain_.size();
  for (std::uint64_t u = 1; u < (std::uint64_t{1} << n); ++u) {
    Event ue = Event::from_mask(u, n);
    for (std::uint64_t v = u;; v = (v - 1) & u) {
      Event ve = Event::from_mask(v, n);
      set(ve, ue, t.bel(ve, ue));
      if (v == 0) break;
    }
  }
}

std::size_t TableBuilder::index(const Event& v, const Event& u) const {
  if (u.empty()) throw std::domain_error("Bel(V|U) is undefined for U = {}");
  return static_cast<std::size_t>(ternary_index(v.mask() & u.mask(), u.mask(), pow3_));
}

TableBuilder::SetResult TableBuilder::set(const Event& v, const Event& u, const Rational& raw, bool overwrite) {
  const Rational value = canonical(raw);
  auto& cell = cells_[index(v, u)];
  if (!cell) {
    cell = value;
    return SetResult::inserted;
  }
  if (*cell == value) return SetResult::duplicate;
  if (!overwrite) return SetResult::conflict;
  cell = value;
  return SetResult::replaced;
}

std::optional<Rational> TableBuilder::get(const Event& v, const Event& u) const { return cells_[index(v, u)]; }

std::vector<std::pair<Event, Event>> TableBuilder::missing() const {
  std::vector<std::pair<Event, Event>> out;
  const std::size_t n = domain_.size();
  for (std::uint64_t u = 1; u < (std::uint64_t{1} << n); ++u) {
    Event ue = Event::from_mask(u, n);
    for (std::uint64_t v = 0;; v = (v - u) & u) {  // ascending submasks
      Event ve = Event::from_mask(v, n);
      if (!cells_[index(ve, ue)]) out.emplace_back(ve, ue);
      if (v == u) break;
    }
  }
  return out;
}

BeliefStructure TableBuilder::build() const {
  check_bounds_order(bounds_);
  auto gaps = missing();
  if (!gaps.empty()) {
    std::vector<std::string> listed;
    for (std::size_t i = 0; i < gaps.size() && i < 8; ++i)
      listed.push_back("(" + domain_.format(gaps[i].first) + " | " + domain_.format(gaps[i].second) + ")");
    throw IncompleteTableError(std::move(listed), gaps.size());
  }
  auto d = std::make_shared<BeliefStructure::Data>();
  d->domain = domain_;
  d->bounds = bounds_;
  d->pow3 = powers_of_three(domain_.size());
  d->table.resize(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i)
    if (cells_[i]) d->table[i] = *cells_[i];
  // cells with U = ∅ (all-zero digits) are never set and never read
  for (std::size_t a = 0; a < domain_.size(); ++a) d->orbits.push_back({a});
  return BeliefStructure(std::move(d));
}

std::vector<Rational> attained(const BeliefStructure& b, ValueKind kind) {
  std::vector<Rational> values;
  if (kind == ValueKind::unconditional) {
    const Counts full = b.full_counts();
    for_each_nested(b, 1, [&](const std::vector<Counts>& lv) {
      values.push_back(b.bel_counts(lv[0], full));
      return true;
    });
  } else {
    for_each_nested(b, 2, [&](const std::vector<Counts>& lv) {
      for (auto c : lv[0])
        if (c) {
          values.push_back(b.bel_counts(lv[1], lv[0]));
          break;
        }
      return true;
    });
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

namespace {

double binomial(double n, double k) {
  double r = 1;
  for (double i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void nonincreasing_tuples(std::uint32_t max, int depth, std::vector<std::uint32_t>& cur,
                          std::vector<std::vector<std::uint32_t>>& out) {
  if (static_cast<int>(cur.size()) == depth) {
    out.push_back(cur);
    return;
  }
  std::uint32_t hi = cur.empty() ? max : cur.back();
  for (std::uint32_t t = 0; t <= hi; ++t) {
    cur.push_back(t);
    nonincreasing_tuples(max, depth, cur, out);
    cur.pop_back();
  }
}

}  // namespace

double nested_orbit_count(const std::vector<std::size_t>& class_sizes, int depth) {
  double total = 1;
  for (auto size : class_sizes) total *= binomial(static_cast<double>(size + depth), depth);
  return total;
}

double nested_orbit_count(const BeliefStructure& b, int depth) {
  std::vector<std::size_t> sizes;
  for (const auto& o : b.orbits()) sizes.push_back(o.size());
  return nested_orbit_count(sizes, depth);
}

void for_each_nested(const BeliefStructure& b, int depth,
                     const std::function<bool(const std::vector<Counts>&)>& visit, double cap) {
  std::vector<std::size_t> sizes;
  for (const auto& o : b.orbits()) sizes.push_back(o.size());
  for_each_nested(sizes, depth, visit, cap);
}

void for_each_nested(const std::vector<std::size_t>& class_sizes, int depth,
                     const std::function<bool(const std::vector<Counts>&)>& visit, double cap) {
  if (depth < 1) throw std::invalid_argument("for_each_nested: depth must be >= 1");
  double count = nested_orbit_count(class_sizes, depth);
  if (count > cap)
    throw BudgetExceeded("nested enumeration of depth " + std::to_string(depth) + " needs " +
                         std::to_string(count) + " orbit chains (cap " + std::to_string(cap) + ")");
  const std::size_t k = class_sizes.size();
  std::vector<std::vector<std::vector<std::uint32_t>>> tuples(k);
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<std::uint32_t> cur;
    nonincreasing_tuples(static_cast<std::uint32_t>(class_sizes[c]), depth, cur, tuples[c]);
  }
  std::vector<std::size_t> odo(k, 0);
  std::vector<Counts> levels(static_cast<std::size_t>(depth), Counts(k, 0));
  for (std::size_t c = 0; c < k; ++c)
    for (int j = 0; j < depth; ++j) levels[j][c] = tuples[c][0][j];
  while (true) {
    if (!visit(levels)) return;
    // odometer with the last class varying fastest
    std::size_t c = k;
    while (c > 0) {
      --c;
      if (++odo[c] < tuples[c].size()) {
        for (int j = 0; j < depth; ++j) levels[j][c] = tuples[c][odo[c]][j];
        break;
      }
      odo[c] = 0;
      for (int j = 0; j < depth; ++j) levels[j][c] = tuples[c][0][j];
      if (c == 0) return;
    }
    if (k == 0) return;
  }
}

ChainQuadruple make_chain(const BeliefStructure& b, Event u1, Event u2, Event u3, Event u4) {
  if (!u2.subset_of(u1) || !u3.subset_of(u2) || !u4.subset_of(u3))
    throw std::invalid_argument("chain events must be nested U1 ⊇ U2 ⊇ U3 ⊇ U4");
  if (u3.empty()) throw std::invalid_argument("chain requires U3 ≠ {}");
  ChainQuadruple q{std::move(u1), std::move(u2), std::move(u3), std::move(u4), {}, {}, {}, {}, {}, {}};
  q.x = b.bel(q.u4, q.u3);
  q.y = b.bel(q.u3, q.u2);
  q.z = b.bel(q.u2, q.u1);
  q.u_a = b.bel(q.u4, q.u2);
  q.u_b = b.bel(q.u3, q.u1);
  q.u_c = b.bel(q.u4, q.u1);
  return q;
}

ChainStream::ChainStream(BeliefStructure b, ChainOptions options)
    : structure_(std::move(b)), options_(options), rng_(options.seed) {
  const std::size_t n = structure_.atom_count();
  exhaustive_ = n <= options_.exhaustive_atoms && n <= 20;
  if (exhaustive_) {
    code_end_ = 1;
    for (std::size_t i = 0; i < n; ++i) code_end_ *= 5;
  }
}

std::optional<ChainQuadruple> ChainStream::next() {
  const std::size_t n = structure_.atom_count();
  std::array<Event, 4> sets{Event(n), Event(n), Event(n), Event(n)};
  if (exhaustive_) {
    // Each atom gets a depth 0..4: it belongs to U_j iff depth >= j.
    while (code_ < code_end_) {
      std::uint64_t code = code_++;
      for (auto& s : sets) s = Event(n);
      for (std::size_t i = 0; i < n; ++i) {
        auto digit = code % 5;
        code /= 5;
        for (std::uint64_t j = 0; j < digit; ++j) sets[j].insert(i);
      }
      if (sets[2].empty()) continue;
      ++emitted_;
      return make_chain(structure_, sets[0], sets[1], sets[2], sets[3]);
    }
    return std::nullopt;
  }
  if (emitted_ >= options_.sample_budget) return std::nullopt;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (true) {
    std::array<double, 4> keep{unit(rng_), unit(rng_), unit(rng_), unit(rng_)};
    for (auto& s : sets) s = Event(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        if (unit(rng_) >= keep[j]) break;
        sets[j].insert(i);
      }
    }
    if (sets[2].empty()) continue;
    ++emitted_;
    return make_chain(structure_, sets[0], sets[1], sets[2], sets[3]);
  }
}

std::vector<ChainQuadruple> chains(const BeliefStructure& b, ChainOptions options) {
  ChainStream stream(b, options);
  std::vector<ChainQuadruple> out;
  while (auto q = stream.next()) out.push_back(std::move(*q));
  return out;
}

}  // namespace coxcheck
