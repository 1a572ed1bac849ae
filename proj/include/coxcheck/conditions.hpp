#pragma once

#include "coxcheck/belief.hpp"
#include "coxcheck/forms.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace coxcheck {

/// Range and endpoint normalization (Par1, Par2).
struct BoundsReport {
  bool range_ok = true;      // every value in [e,E]
  bool endpoints_ok = true;  // Bel(∅|U) = e and Bel(U|U) = E
  std::optional<PairWitness> range_witness;
  std::optional<PairWitness> endpoint_witness;
  /// Measure-backed structure too large to enumerate: verdict taken from the closed form.
  bool closed_form = false;
  std::size_t pairs_checked = 0;

  bool passes() const { return range_ok && endpoints_ok; }
};

BoundsReport check_bounds(const BeliefStructure& b, double cap = 2e6);

/// Half the largest spacing of attained values ∪ {e, E}.
Rational par5_gap(const BeliefStructure& b, ValueKind kind = ValueKind::conditional);

/// Targets (α, β, γ) in [0,1], rescaled to [e,E] before comparison.
struct DensityProbe {
  Rational alpha, beta, gamma;
  Rational epsilon;
};

struct TripleSearchOptions {
  std::uint64_t seed = 0;
  /// Orbit chains are enumerated exhaustively up to this count, otherwise sampled.
  double exhaustive_cap = 250000;
  std::size_t sample_budget = 200000;
};

struct TripleSearchReport {
  bool pass = false;
  /// Witness on success, otherwise the closest chain found.
  std::optional<ChainQuadruple> chain;
  Rational distance;  // Chebyshev distance of (x, y, z) to the rescaled targets
  bool exhaustive = true;
  std::size_t examined = 0;
};

/// Looks for U1 ⊇ U2 ⊇ U3 ⊇ U4 with (Bel(U4|U3), Bel(U3|U2), Bel(U2|U1)) within ε of the
/// targets in every coordinate. Returns the closest chain (first in canonical order on ties).
TripleSearchReport par5_triples(const BeliefStructure& b, const DensityProbe& probe, TripleSearchOptions options = {});

struct FamilyDensityOptions {
  TripleSearchOptions search;
  bool parallel = true;
};

struct FamilyDensityReport {
  bool pass = true;
  bool vacuous = false;  // empty probe grid
  std::size_t targets = 0;
  std::size_t failures = 0;
  std::array<Rational, 3> worst_target;
  double worst_distance = 0;
  std::size_t worst_member = 0;
  std::optional<ChainQuadruple> worst_chain;
  std::vector<std::size_t> cloud_sizes;  // distinct normalized triples per member
  bool exhaustive = true;
};

/// For every target on the n³ grid {k/(n-1)}, some member has a chain within ε.
FamilyDensityReport par5_family(const std::vector<BeliefStructure>& members, std::size_t n, const Rational& epsilon,
                                FamilyDensityOptions options = {});

/// Four A2 instances with F(y,z) = w, F(x,w) = lhs, F(x,y) = v, F(v,z) = rhs and lhs ≠ rhs.
struct ChainCertificate {
  Rational x, y, z;
  TripleWitness yz;
  TripleWitness x_yz;
  TripleWitness xy;
  TripleWitness xy_z;
};

struct ChainConsistencyReport {
  enum class Outcome { pass, certificate, extraction_conflict };
  Outcome outcome = Outcome::pass;
  std::optional<ChainCertificate> certificate;
  std::optional<CombinationConflict> conflict;
  std::size_t instances = 0;           // attained (x,y,z) with all four lookups defined
  std::size_t interior_instances = 0;  // ... with x, y, z strictly inside (e,E)
  bool vacuous = false;                // no interior instance
  bool closed_form = false;            // measure-backed, beyond the enumeration cap

  bool passes() const { return outcome == Outcome::pass; }
};

ChainConsistencyReport chain_consistency(const BeliefStructure& b, ExtractionOptions options = {});
/// Same check on an already extracted table.
ChainConsistencyReport chain_consistency(const CombinationForm& f);

struct NegationIdentityReport {
  bool pass = true;
  std::size_t checked = 0;
  std::vector<Rational> untestable;  // attained y with S(y) or S(S(y)) undefined
  std::optional<Rational> failing_y;
  Rational s_y, s_s_y;
};

/// S(S(y)) = y at every attained conditional value. Throws PreconditionError on an A1 conflict.
NegationIdentityReport bel_level_negation(const BeliefStructure& b, ExtractionOptions options = {});
NegationIdentityReport bel_level_negation(const BeliefStructure& b, const NegationForm& s);

/// S and F tables merged across several structures.
struct UniformityEvidence {
  std::map<Rational, Rational> s_table;
  std::map<CombinationForm::Key, Rational> f_table;
  bool uniform = true;
  std::string conflict;  // description of the first disagreement
  /// Members certified from their generating measure instead of enumeration.
  std::vector<std::size_t> closed_form_members;
  std::size_t entries_checked = 0;
};

/// Merges extracted tables. Measure-backed members beyond `options.cap` are checked through
/// their closed forms against every merged entry.
UniformityEvidence build_uniformity(const std::vector<BeliefStructure>& members, ExtractionOptions options = {});

}  // namespace coxcheck
