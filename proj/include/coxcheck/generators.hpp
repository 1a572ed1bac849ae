#pragma once

#include "coxcheck/belief.hpp"
#include "coxcheck/conditions.hpp"
#include "coxcheck/isomorphism.hpp"
#include "coxcheck/structure_io.hpp"

#include <optional>
#include <vector>

namespace coxcheck {

/// Bel(V|U) = μ(V∩U)/μ(U). Weights must be positive and sum to exactly 1.
BeliefStructure gen_probability(const Domain& domain, const std::vector<Rational>& weights);
/// Bel(V|U) = (μ(V∩U)/μ(U))^k, k ≥ 1.
BeliefStructure gen_distorted(const Domain& domain, const std::vector<Rational>& weights, unsigned k);

struct CounterexampleOptions {
  /// Free entries avoid e and E: only Bel(∅|U) = e and Bel(U|U) = E.
  bool regular = true;
  DecideOptions decide;
};

struct CounterexampleSearch {
  std::optional<BeliefStructure> hit;
  std::optional<RefutationCertificate> certificate;
  /// Candidates satisfying A1 (S = 1-x), A2 (F = min) and Par2, one per atom-permutation class.
  std::size_t candidates = 0;
  std::size_t isomorphic = 0;
  std::size_t unknown = 0;
  std::size_t symmetric_skipped = 0;
  bool exhausted() const { return !hit; }
};

/// Enumerates grid-valued tables in canonical order and returns the first one with a
/// Refutation verdict. Throws std::invalid_argument for n outside 1..4 or a grid that is not
/// closed under x ↦ 1-x or misses 0 or 1.
CounterexampleSearch search_min_counterexample(std::size_t n, const std::vector<Rational>& grid,
                                               CounterexampleOptions options = {});

/// Base structure over W, its product with n fair coins over W × {0,1}^n, and the embedding
/// V ↦ V × {0,1}^n (per base atom).
struct ExtendedStructure {
  BeliefStructure base;
  BeliefStructure extended;
  std::vector<Event> embedding;

  Event embed(const Event& v) const;
  /// Embedding as `embed` directives for the extended structure file.
  std::vector<EmbedDirective> directives() const;
};

inline constexpr std::size_t kMaxExtendedAtoms = std::size_t{1} << 14;

/// Extended atoms are named "<atom>.<bits>". Throws BudgetExceeded above kMaxExtendedAtoms.
ExtendedStructure coin_extend(const Domain& domain, const std::vector<Rational>& weights, unsigned coins);

struct DomainFamily {
  std::vector<BeliefStructure> members;
  UniformityEvidence evidence;
};

/// Uniform structures on {0,1}^n, n = 1..n_max (atoms "c<bits>"), with merged S/F tables.
DomainFamily coin_family(unsigned n_max);

/// Uniform structure on {0,1}^n.
BeliefStructure coin_domain(unsigned n);

}  // namespace coxcheck
