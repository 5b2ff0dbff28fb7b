#pragma once

#include <string>

#include <json.hpp>

#include "szegolab/coefficients.hpp"
#include "szegolab/measure.hpp"
#include "szegolab/perturbation.hpp"
#include "szegolab/spectrum.hpp"
#include "szegolab/sumrules.hpp"

namespace szegolab {

// JSON wire format for base sequences:
//   {"kind": "free"|"coulomb"|"table", "alpha": .., "beta": .., "gamma": ..,
//    "error_amp": .., "error_exp": .., "error_seed": ..,
//    "table": [{"n": 1, "a": 1.0, "b": 2.0}, ...]}
// Transformed sequences have no wire format; serializing one throws
// std::invalid_argument.
nlohmann::ordered_json sequence_to_json(const CoefficientSequence& seq);
CoefficientSequence sequence_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json eigenvalues_to_json(const EigenvalueSet& set);
nlohmann::ordered_json szego_to_json(const SzegoValue& value);
nlohmann::ordered_json sumrule_to_json(const SumRuleReport& report);
nlohmann::ordered_json audit_to_json(const MinorationAudit& audit);

// CSV with header x,nu_prime,gap_hint (one row per grid point, %.17g).
std::string density_to_csv(const DensityEstimate& density);

// Stable float formatting used by every writer (%.17g round-trips doubles and
// keeps outputs byte-identical for identical inputs).
std::string format_double(double v);

const char* phase_class_name(PhaseClass c);
const char* edge_verdict_name(EdgeVerdict v);
const char* perturbation_kind_name(PerturbationKind k);
PerturbationKind perturbation_kind_from_name(const std::string& name);

}  // namespace szegolab
