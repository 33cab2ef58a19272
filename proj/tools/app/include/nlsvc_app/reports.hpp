#pragma once

#include "json.hpp"
#include "nlsvc/coefficients.hpp"
#include "nlsvc/diagnostics.hpp"
#include "nlsvc/exponents.hpp"
#include "nlsvc/operator.hpp"
#include "nlsvc/profiles.hpp"
#include "nlsvc/propagators.hpp"
#include "nlsvc/virial.hpp"

// JSON serializers found by argument-dependent lookup.
namespace nlsvc {

void to_json(nlohmann::json& j, const Violation& v);
void to_json(nlohmann::json& j, const AdmissibilityReport& r);
void to_json(nlohmann::json& j, const EquivalenceConstants& e);
void to_json(nlohmann::json& j, const ExponentTable& t);
void to_json(nlohmann::json& j, const IdentityCheck& c);
void to_json(nlohmann::json& j, const HolderReport& r);
void to_json(nlohmann::json& j, const BootstrapResult& r);
void to_json(nlohmann::json& j, const AsymptoticsReport& r);
void to_json(nlohmann::json& j, const TrajectoryMeta& m);
void to_json(nlohmann::json& j, const ConservationReport& r);
void to_json(nlohmann::json& j, const DecayFit& f);
void to_json(nlohmann::json& j, const ScatteringReport& r);
void to_json(nlohmann::json& j, const ThresholdScan& s);
void to_json(nlohmann::json& j, const CoefficientBoundReport& r);
void to_json(nlohmann::json& j, const VirialInequalityReport& r);
void to_json(nlohmann::json& j, const Decomposition& d);
void to_json(nlohmann::json& j, const OrthogonalityReport& r);

}  // namespace nlsvc
