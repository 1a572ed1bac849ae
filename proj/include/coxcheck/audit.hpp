#pragma once

#include "coxcheck/conditions.hpp"
#include "coxcheck/isomorphism.hpp"
#include "coxcheck/structure_io.hpp"

#include <optional>
#include <string>
#include <vector>

namespace coxcheck {

enum class Verdict { pass, fail, untestable };
std::string_view verdict_name(Verdict v);

struct HypothesisResult {
  std::string name;
  Verdict verdict = Verdict::pass;
  std::string witness;  // failing instance, empty on pass
  std::string note;
  bool vacuous = false;
};

struct AuditReport {
  int theorem = 1;
  std::vector<HypothesisResult> hypotheses;
  std::vector<std::string> notes;

  /// fail if any hypothesis fails, else untestable if any is untestable, else pass.
  Verdict overall() const;
  const HypothesisResult* find(std::string_view name) const;
};

struct AuditInputs {
  /// Theorem 3: the extended structure and the image of every base atom in it.
  std::optional<BeliefStructure> extension;
  std::vector<EmbedDirective> embedding;
  /// Theorem 4: the domain family.
  std::vector<BeliefStructure> family;
  std::size_t family_grid = 11;
  Rational family_epsilon{1, 20};
  FamilyDensityOptions density;
  DecideOptions decide;
  ExtractionOptions extraction;
};

/// Runs the hypothesis checks of theorem 1-4. Throws PreconditionError when theorem 3 lacks
/// an extension or theorem 4 lacks a family, std::invalid_argument for other theorem ids.
AuditReport audit(const BeliefStructure& b, int theorem, const AuditInputs& inputs = {});

/// Human-readable forms of witnesses used in reports.
std::string describe(const Domain& d, const PairWitness& w);
std::string describe(const Domain& d, const TripleWitness& w);

}  // namespace coxcheck
