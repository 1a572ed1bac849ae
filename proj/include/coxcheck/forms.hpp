#pragma once

#include "coxcheck/belief.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace coxcheck {

/// Declared differentiability of catalog forms. Not verified.
enum class Smoothness { continuous, differentiable, twice_differentiable, infinitely_differentiable };
std::string_view smoothness_name(Smoothness s);

/// Bel(V|U) = value, with V ⊆ U.
struct PairWitness {
  Event v;
  Event u;
  Rational value;
};

/// One A2 instance: Bel(V∩V'|U) = F(Bel(V'|V∩U), Bel(V|U)).
struct TripleWitness {
  Event v;
  Event v_prime;
  Event u;
  Rational x;       // Bel(V'|V∩U)
  Rational y;       // Bel(V|U)
  Rational result;  // Bel(V∩V'|U)
};

/// The negation function S of A1: tabular (partial) or the catalog linear complement x ↦ 1 - x.
class NegationForm {
 public:
  enum class Catalog { linear_complement };

  static NegationForm catalog(Catalog c);
  static NegationForm tabular(std::map<Rational, Rational> table, Bounds interval = {});

  bool is_tabular() const { return !catalog_; }
  std::optional<Catalog> catalog_kind() const { return catalog_; }
  /// S(x), or nullopt where a tabular form is undefined.
  std::optional<Rational> operator()(const Rational& x) const;
  const std::map<Rational, Rational>& table() const { return table_; }
  const Bounds& interval() const { return interval_; }
  std::string name() const;
  Smoothness smoothness() const;

  /// For extracted tables: a pair (V, U) with Bel(V|U) = x for each input x.
  const std::map<Rational, PairWitness>& provenance() const { return provenance_; }
  void set_provenance(std::map<Rational, PairWitness> p) { provenance_ = std::move(p); }

 private:
  std::optional<Catalog> catalog_;
  std::map<Rational, Rational> table_;
  std::map<Rational, PairWitness> provenance_;
  Bounds interval_;
};

/// The combination function F of A2: tabular (partial) or a catalog t-norm.
class CombinationForm {
 public:
  enum class Catalog { product, minimum, hamacher };
  using Key = std::pair<Rational, Rational>;

  static CombinationForm catalog(Catalog c);
  static CombinationForm tabular(std::map<Key, Rational> table, Bounds interval = {});

  bool is_tabular() const { return !catalog_; }
  std::optional<Catalog> catalog_kind() const { return catalog_; }
  std::optional<Rational> operator()(const Rational& x, const Rational& y) const;
  /// Floating evaluation of a catalog form; throws std::logic_error for tabular forms.
  long double eval(long double x, long double y) const;
  const std::map<Key, Rational>& table() const { return table_; }
  const Bounds& interval() const { return interval_; }
  std::string name() const;
  Smoothness smoothness() const;

  const std::map<Key, TripleWitness>& provenance() const { return provenance_; }
  void set_provenance(std::map<Key, TripleWitness> p) { provenance_ = std::move(p); }

 private:
  std::optional<Catalog> catalog_;
  std::map<Key, Rational> table_;
  std::map<Key, TripleWitness> provenance_;
  Bounds interval_;
};

/// Accepts `linear-complement`, `product`, `minimum`, `hamacher`.
std::optional<NegationForm> negation_from_name(std::string_view name);
std::optional<CombinationForm> combination_from_name(std::string_view name);

/// Two pairs with equal belief whose complements differ: A1 cannot hold.
struct NegationConflict {
  PairWitness first;
  PairWitness first_complement;
  PairWitness second;
  PairWitness second_complement;
};

/// Two A2 instances with equal arguments and different results.
struct CombinationConflict {
  TripleWitness first;
  TripleWitness second;
};

using NegationExtraction = std::variant<NegationForm, NegationConflict>;
using CombinationExtraction = std::variant<CombinationForm, CombinationConflict>;

struct ExtractionOptions {
  /// Maximum number of orbit chains to enumerate before giving up with BudgetExceeded.
  double cap = 4e6;
};

/// Tabular S from all pairs (Bel(V|U), Bel(U∖V|U)); a conflict when not single-valued.
NegationExtraction extract_negation(const BeliefStructure& b, ExtractionOptions options = {});
/// Tabular F from all nested triples U ⊇ A ⊇ B, A ≠ ∅; a conflict when not single-valued.
CombinationExtraction extract_combination(const BeliefStructure& b, ExtractionOptions options = {});

enum class Continuity { holds, violated, untestable };

struct MonotoneViolation {
  int coordinate = 0;  // varying argument (0 = first); always 0 for S
  Rational fixed;      // the other argument (unused for S)
  Rational lo, hi;     // lo < hi
  Rational value_lo, value_hi;
};

struct MonotonicityReport {
  /// S: strictly decreasing. F: strictly increasing in each coordinate on (e,E]².
  bool strict = true;
  /// S: nonincreasing. F: nondecreasing in each coordinate on [e,E]².
  bool weak = true;
  Continuity continuity = Continuity::untestable;
  std::optional<MonotoneViolation> strict_violation;
  std::optional<MonotoneViolation> weak_violation;
  Rational observed_jump;
  Rational jump_bound;
  bool symbolic = false;
  std::size_t comparisons = 0;

  bool passes() const { return strict && weak && continuity != Continuity::violated; }
};

struct MonotonicityOptions {
  /// Catalog F is probed on the (grid+1)² points lo + (hi-lo)·k/grid.
  std::size_t grid = 20;
  /// Largest allowed jump between adjacent grid points; default 2·(hi-lo)/grid.
  std::optional<Rational> jump_bound;
};

MonotonicityReport check_monotonicity(const NegationForm& s, MonotonicityOptions options = {});
MonotonicityReport check_monotonicity(const CombinationForm& f, MonotonicityOptions options = {});

enum class EquationId {
  associativity,  // EQ1   F(x,F(y,z)) = F(F(x,y),z)
  involution,     // EQ3   S(S(y)) = y
  quotient,       // EQ3.5 y·S(x/y) = S(x)·S(S(y)/S(x))
  symmetric,      // EQSYM y·S(S(x)/y) = x·S(S(y)/x)
};
std::string_view equation_name(EquationId id);
std::optional<EquationId> parse_equation(std::string_view name);

struct ResidualReport {
  EquationId equation{};
  std::size_t grid = 0;
  Rational residual;
  std::vector<Rational> witness;  // grid arguments at the (first) maximal residual
  std::size_t total = 0;
  std::size_t evaluated = 0;
  std::size_t zero_denominator = 0;
  std::size_t undefined = 0;
  bool partial = false;  // tabular form: evaluated only where defined

  double coverage() const { return total ? static_cast<double>(evaluated) / static_cast<double>(total) : 0.0; }
};

struct EquationOptions {
  bool parallel = true;
  /// Tabular forms only: use the table's own arguments instead of the uniform grid.
  bool table_points = false;
};

/// Nothing on the grid was evaluable (tabular form too sparse, or empty grid).
class EmptyEvaluation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Max |lhs - rhs| over a grid of n points per axis (lo + (hi-lo)·k/(n-1)). EQ1 needs a
/// CombinationForm, the others a NegationForm; mismatches throw std::invalid_argument.
ResidualReport check_functional_equation(const CombinationForm& f, EquationId eq, std::size_t n,
                                         EquationOptions options = {});
ResidualReport check_functional_equation(const NegationForm& s, EquationId eq, std::size_t n,
                                         EquationOptions options = {});

/// Grid used by the equation and monotonicity checks.
std::vector<Rational> uniform_grid(const Bounds& interval, std::size_t n);

}  // namespace coxcheck
