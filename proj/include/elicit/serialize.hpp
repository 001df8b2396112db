#pragma once

#include <json.hpp>

#include "elicit/cooke.hpp"
#include "elicit/distribution.hpp"
#include "elicit/fitting.hpp"
#include "elicit/judgment.hpp"
#include "elicit/pooling.hpp"
#include "elicit/scoring.hpp"
#include "elicit/trial_model.hpp"

// JSON encodings of the engine types. Field order is fixed (ordered_json) so
// two encoders of the same value produce the same bytes. Decoders throw
// ErrorCode::validation naming the offending field.
namespace elicit::json {

using Json = nlohmann::ordered_json;

std::string render(const Json& j);  // two-space indent, trailing newline
Json parse(std::string_view text);

// Members of `j` as typed values, with errors naming `field`.
const Json& member(const Json& j, std::string_view field);
double number(const Json& j, std::string_view field);
std::string string(const Json& j, std::string_view field);
const Json* optional_member(const Json& j, std::string_view field);

Json to_json(const Support& s);
Support support_from_json(const Json& j);

Json to_json(const Distribution& d);
Distribution distribution_from_json(const Json& j);

Json to_json(const ElicitedJudgment& j);
ElicitedJudgment judgment_from_json(const Json& j);

Json to_json(const FamilyCandidate& c);
Json to_json(const FitResult& f);
FitResult fit_from_json(const Json& j);

Json to_json(const WeightVector& w);
WeightVector weights_from_json(const Json& j);

Json to_json(const cooke::CalibrationResult& r);
cooke::CalibrationResult calibration_from_json(const Json& j);

Json to_json(const cooke::SeedQuestion& q, bool include_truth = true);
cooke::SeedQuestion seed_from_json(const Json& j);

Json to_json(const cooke::Fold& f);
cooke::Fold fold_from_json(const Json& j);

Json to_json(const scoring::ScoreTable& t);
Json to_json(const scoring::ErrorCorrelationMatrix& m);

Json to_json(const trial::Parameter& p);
trial::Parameter parameter_from_json(const Json& j);
Json to_json(const trial::TrialParameters& p);
trial::TrialParameters trial_parameters_from_json(const Json& j);
Json to_json(const trial::CellProbabilities& c);
Json to_json(const trial::IntervalEstimate& e);
Json to_json(const trial::PatientSample& s);

}  // namespace elicit::json
