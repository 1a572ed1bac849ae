#pragma once

#include "coxcheck/belief.hpp"
#include "coxcheck/conditions.hpp"
#include "coxcheck/forms.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace coxcheck {

/// μ(lo) ≤ μ(hi) (or <) for every strictly positive measure μ that represents the structure.
struct OrderLink {
  enum class Source {
    context,    // Bel(from_lo|context) ≤ Bel(from_hi|context), optionally minus the overlap
    inclusion,  // lo ⊊ hi
  };
  Source source = Source::context;
  Event lo, hi;
  bool strict = false;
  Event context;
  Event from_lo, from_hi;
  bool normalized = false;  // lo = from_lo ∖ from_hi, hi = from_hi ∖ from_lo
};

/// Cycle of links lo_0 ≤ hi_0 = lo_1 ≤ ... ≤ hi_k = lo_0 with at least one strict link.
struct OrderConflict {
  std::vector<OrderLink> cycle;
};

/// Exactly re-checkable evidence that no strictly increasing g turns Bel into a probability measure.
struct RefutationCertificate {
  std::variant<NegationConflict, CombinationConflict, ChainCertificate, OrderConflict> data;

  std::string kind() const;  // "A1-conflict", "A2-conflict", "chain-associativity", "order-conflict"
};

struct RecheckResult {
  bool valid = false;
  std::string reason;
};

/// Validates a certificate against the structure from scratch, in exact arithmetic.
RecheckResult recheck(const BeliefStructure& b, const RefutationCertificate& certificate);

struct RefutationOptions {
  /// 0: extraction and associativity; 1: + per-context sign consistency;
  /// 2: + order cycles over events; 3: + cycles through overlap-removed comparisons.
  int depth = 3;
  ExtractionOptions extraction;
};

struct RefutationReport {
  std::optional<RefutationCertificate> certificate;
  /// Stages skipped because the structure was too large for them.
  std::vector<std::string> skipped;
};

RefutationReport refutation_search(const BeliefStructure& b, RefutationOptions options = {});

struct ProbabilityWitness {
  /// Exact weights when available; `numeric` always holds the weights as floats.
  std::optional<std::vector<Rational>> exact;
  std::vector<long double> numeric;
  bool numerically_verified = false;
};

/// Strictly increasing g on attained values, extended piecewise linearly.
struct RescalingMap {
  std::vector<std::pair<Rational, Rational>> graph;  // exact witnesses
  std::vector<std::pair<long double, long double>> numeric_graph;
  Bounds bounds;

  long double operator()(long double v) const;
};

struct WitnessCheck {
  bool pass = false;
  /// First failing constraint: "single-valued", "strictly-increasing", "endpoints", "product-rule".
  std::string failed;
  std::string detail;
  std::optional<PairWitness> first;
  std::optional<PairWitness> second;
  std::size_t pairs_checked = 0;
};

/// Throws std::invalid_argument unless the weights are positive and sum to 1.
WitnessCheck verify_witness(const BeliefStructure& b, const std::vector<Rational>& weights);
/// Float weights: ratios for equal values agree within `tolerance`, ordered values are separated by more.
WitnessCheck verify_witness(const BeliefStructure& b, const std::vector<long double>& weights, long double tolerance);

/// Throws PreconditionError when verify_witness fails.
RescalingMap rescaling_from_witness(const BeliefStructure& b, const std::vector<Rational>& weights);
RescalingMap rescaling_from_witness(const BeliefStructure& b, const std::vector<long double>& weights,
                                    long double tolerance);

struct DecideOptions {
  std::size_t restarts = 8;
  std::size_t budget = 400;  // descent iterations per restart
  long double tolerance = 1e-9L;
  std::uint64_t seed = 0;
  long double margin = 1e-7L;
  std::uint64_t max_denominator = 1000000;
  bool parallel = true;
  RefutationOptions refutation;
};

struct UnknownReport {
  std::size_t restarts = 0;
  std::size_t iterations = 0;
  long double best_violation = 0;
  std::string reason;
};

struct IsomorphismVerdict {
  enum class Kind { witness, refutation, unknown };
  Kind kind = Kind::unknown;
  std::optional<ProbabilityWitness> witness;
  std::optional<RescalingMap> rescaling;
  std::optional<RefutationCertificate> certificate;
  std::optional<UnknownReport> unknown;
  /// "calibrated" or "descent" for witnesses.
  std::string method;
  std::vector<std::string> skipped;
};

std::string_view verdict_name(IsomorphismVerdict::Kind k);

IsomorphismVerdict decide(const BeliefStructure& b, DecideOptions options = {});

}  // namespace coxcheck
