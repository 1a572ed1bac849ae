#pragma once

#include "coxcheck/audit.hpp"
#include "coxcheck/conditions.hpp"
#include "coxcheck/forms.hpp"
#include "coxcheck/generators.hpp"
#include "coxcheck/isomorphism.hpp"

#include <json.hpp>

#include <string>

namespace coxcheck {

using Json = nlohmann::ordered_json;

// Rationals are written as strings ("2/3") so that reports stay exact.
Json to_json(const Rational& q);
Json to_json(const Domain& d, const PairWitness& w);
Json to_json(const Domain& d, const TripleWitness& w);
Json to_json(const Domain& d, const ChainQuadruple& c);
Json to_json(const Domain& d, const RefutationCertificate& c);

/// {equation, grid, residual, witness, coverage, ...}
Json residual_json(const ResidualReport& r);
/// {kind, weights?, g-graph?, certificate?, budget}
Json verdict_json(const Domain& d, const IsomorphismVerdict& v, const DecideOptions& options);
/// {theorem, hypotheses: [{name, verdict, witness}], verdict}
Json audit_json(const AuditReport& r);
Json bounds_json(const Domain& d, const BoundsReport& r);
Json chain_json(const Domain& d, const ChainConsistencyReport& r);
Json negation_identity_json(const NegationIdentityReport& r);
Json search_json(const Domain* d, const CounterexampleSearch& s);

std::string residual_text(const ResidualReport& r);
std::string verdict_text(const Domain& d, const IsomorphismVerdict& v);
std::string audit_text(const AuditReport& r);
std::string certificate_text(const Domain& d, const RefutationCertificate& c);

}  // namespace coxcheck
