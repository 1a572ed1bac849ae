#pragma once

#include "coxcheck/event.hpp"
#include "coxcheck/rational.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <vector>

namespace coxcheck {

/// Interval [lo, hi] with lo < hi that belief values live in. Defaults to [0, 1].
struct Bounds {
  Rational lo{0};
  Rational hi{1};
  bool operator==(const Bounds&) const = default;
};

/// Per-orbit-class member counts. Bel is invariant under permutations inside a class, so a
/// count vector stands for every event with those counts.
using Counts = std::vector<std::uint32_t>;

/// Exact conditional belief assignment Bel(V|U) over a finite domain.
///
/// Two backings share one interface:
///  - table: an explicit value for every pair V ⊆ U ≠ ∅ (at most kMaxTableAtoms atoms);
///  - measure: Bel(V|U) = lo + (hi - lo) * (μ(V∩U)/μ(U))^k for positive atom weights μ.
/// Lookups canonicalize V to V∩U. Values are immutable after construction; copies share state.
class BeliefStructure {
 public:
  static constexpr std::size_t kMaxTableAtoms = 10;

  static BeliefStructure from_measure(Domain domain, std::vector<Rational> weights,
                                      unsigned exponent = 1, Bounds bounds = {});

  const Domain& domain() const;
  const Bounds& bounds() const;
  std::size_t atom_count() const { return domain().size(); }

  bool is_table() const;
  /// Atom weights of a measure-backed structure; empty for tables.
  const std::vector<Rational>& weights() const;
  /// Distortion exponent k of a measure-backed structure; 0 for tables.
  unsigned exponent() const;

  /// Bel(V|U). Throws std::domain_error when U = ∅.
  Rational bel(const Event& v, const Event& u) const;
  /// Bel(U) := Bel(U|W).
  Rational bel(const Event& u) const;

  /// Atoms grouped into classes of interchangeable atoms (singletons for tables).
  const std::vector<std::vector<std::size_t>>& orbits() const;
  /// Bel of any V ⊆ U with the given class counts; requires v <= u componentwise and u != 0.
  Rational bel_counts(const Counts& v, const Counts& u) const;
  /// Canonical event with the given class counts: the first c_k atoms of each class.
  Event representative(const Counts& counts) const;
  Counts full_counts() const;
  Counts counts_of(const Event& e) const;

  /// Table-backed copy with identical values. Throws BudgetExceeded above kMaxTableAtoms.
  BeliefStructure materialize() const;
  /// Applies a strictly increasing relabeling to every value; the result is table-backed
  /// unless the map is affine and the structure measure-backed.
  BeliefStructure relabel(const std::function<Rational(const Rational&)>& map, Bounds new_bounds) const;
  /// Affine relabeling v ↦ scale·v + offset (scale > 0), bounds mapped accordingly.
  BeliefStructure affine(const Rational& scale, const Rational& offset) const;

  /// Value equality on every pair (small domains) or equality of the generating measure.
  bool same_values(const BeliefStructure& other) const;

 private:
  friend class TableBuilder;
  struct Data;
  explicit BeliefStructure(std::shared_ptr<const Data> data);
  std::shared_ptr<const Data> data_;
};

/// Accumulates table entries and produces a total table-backed structure.
class TableBuilder {
 public:
  enum class SetResult { inserted, duplicate, conflict, replaced };

  explicit TableBuilder(Domain domain, Bounds bounds = {});
  /// Starts from every value of `base` (which must fit in a table).
  explicit TableBuilder(const BeliefStructure& base);

  /// Stores Bel(V∩U|U) = value. Existing different values are kept unless `overwrite`.
  SetResult set(const Event& v, const Event& u, const Rational& value, bool overwrite = false);
  std::optional<Rational> get(const Event& v, const Event& u) const;
  void set_bounds(Bounds bounds) { bounds_ = Bounds{canonical(bounds.lo), canonical(bounds.hi)}; }

  const Domain& domain() const { return domain_; }
  /// Pairs (V, U) without a value, in canonical order.
  std::vector<std::pair<Event, Event>> missing() const;
  /// Throws IncompleteTableError listing the first missing pairs.
  BeliefStructure build() const;

 private:
  std::size_t index(const Event& v, const Event& u) const;
  Domain domain_;
  Bounds bounds_;
  std::vector<std::uint64_t> pow3_;
  std::vector<std::optional<Rational>> cells_;
};

enum class ValueKind { unconditional, conditional };

/// Strictly sorted attained values Bel(V|U); `unconditional` restricts to U = W.
std::vector<Rational> attained(const BeliefStructure& b, ValueKind kind);

/// Number of chains X_1 ⊇ ... ⊇ X_depth of count vectors (X_1 unrestricted, may be ∅).
double nested_orbit_count(const BeliefStructure& b, int depth);
double nested_orbit_count(const std::vector<std::size_t>& class_sizes, int depth);

/// Visits every chain X_1 ⊇ ... ⊇ X_depth up to orbit symmetry in canonical order. The
/// callback returns false to stop early. Throws BudgetExceeded when the count exceeds `cap`.
void for_each_nested(const BeliefStructure& b, int depth,
                     const std::function<bool(const std::vector<Counts>&)>& visit,
                     double cap = 5e7);
/// Same enumeration over arbitrary class sizes.
void for_each_nested(const std::vector<std::size_t>& class_sizes, int depth,
                     const std::function<bool(const std::vector<Counts>&)>& visit, double cap = 5e7);

/// Nested events U1 ⊇ U2 ⊇ U3 ⊇ U4 (U3 ≠ ∅) with the six beliefs of the associativity argument.
struct ChainQuadruple {
  Event u1, u2, u3, u4;
  Rational x;    // Bel(U4|U3)
  Rational y;    // Bel(U3|U2)
  Rational z;    // Bel(U2|U1)
  Rational u_a;  // Bel(U4|U2)
  Rational u_b;  // Bel(U3|U1)
  Rational u_c;  // Bel(U4|U1)
};

/// Validates nesting and fills the derived values.
ChainQuadruple make_chain(const BeliefStructure& b, Event u1, Event u2, Event u3, Event u4);

struct ChainOptions {
  std::uint64_t seed = 0;
  std::size_t sample_budget = 100000;
  /// Domains up to this many atoms are enumerated exhaustively.
  std::size_t exhaustive_atoms = 5;
};

/// Cursor over chains: every quadruple exactly once in canonical order for small domains,
/// otherwise `sample_budget` seeded random quadruples. Each stream owns its cursor.
class ChainStream {
 public:
  explicit ChainStream(BeliefStructure b, ChainOptions options = {});
  std::optional<ChainQuadruple> next();
  bool exhaustive() const { return exhaustive_; }
  std::size_t emitted() const { return emitted_; }

 private:
  BeliefStructure structure_;
  ChainOptions options_;
  bool exhaustive_;
  std::uint64_t code_ = 0;
  std::uint64_t code_end_ = 0;
  std::size_t emitted_ = 0;
  std::mt19937_64 rng_;
};

std::vector<ChainQuadruple> chains(const BeliefStructure& b, ChainOptions options = {});

}  // namespace coxcheck
