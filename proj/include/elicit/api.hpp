#pragma once

#include <optional>
#include <string>
#include <vector>

#include "elicit/cooke.hpp"
#include "elicit/error.hpp"
#include "elicit/scoring.hpp"
#include "elicit/serialize.hpp"
#include "elicit/store.hpp"

// Engine entry points on JSON documents. The CLI, the HTTP service and the
// Python module all go through these, so equal inputs give equal bytes.
namespace elicit::api {

using json::Json;

/// {"judgment": {...}, "family": "auto" | name, "families": [...]?} -> fit.
Json fit(const Json& body);

/// {"method": "linear" | "loglinear", "distributions": [...],
///  "weights": [...] | weight vector | absent (equal), "expert_ids": [...]?}.
Json pool(const Json& body);

cooke::CvOptions cv_options(const Json& body);
Json cm_weights(const store::SeedDataset& d, const cooke::CvOptions& options);
/// Folds document; with consensus judgments each fold also carries "shelf".
Json crossval(const store::SeedDataset& d, const cooke::CvOptions& options,
              const std::vector<ElicitedJudgment>* consensus = nullptr);

/// {"evaluands": [{"id", "distributions"}], "truths": [{"question_id", "truth", "scale"?}],
///  "options": {...}?} -> score table.
Json scores(const Json& body);
/// {"evaluands": [{"id", "medians"}], "truths": [numbers | {"truth"}]} -> matrix.
Json correlations(const Json& body);

/// Experts, then EW, CM and SHELF (when present), per question of `truths`.
struct FoldEvaluands {
  std::vector<scoring::Evaluand> evaluands;
  std::vector<scoring::QuestionTruth> truths;
};
FoldEvaluands evaluands_from_folds(const Json& folds, const store::SeedDataset& truths);
scoring::ScoreTable score_folds(const FoldEvaluands& e, const scoring::ScoreOptions& options = {});
scoring::ErrorCorrelationMatrix correlate_folds(const FoldEvaluands& e);

std::string score_table_csv(const scoring::ScoreTable& t);
std::string score_table_text(const scoring::ScoreTable& t);
std::string correlations_csv(const scoring::ErrorCorrelationMatrix& m);
std::string correlations_text(const scoring::ErrorCorrelationMatrix& m);

struct CheckOptions {
  int total = 100;
  int draws = 10000;
  double level = trial::kDefaultLevel;
  std::uint64_t seed = trial::kDefaultSeed;
};
/// Both elicitation checks plus the RT and ET sensitivities at the medians.
Json checks(const trial::TrialParameters& p, const CheckOptions& options);
Json delayed_positive(const trial::TrialParameters& p, const CheckOptions& options);
Json patient_sample(const trial::TrialParameters& p, int total);

/// Trial parameters from a session's tagged quantities: the consensus fit if
/// one exists, else the equal-weight pool of the individual fits.
trial::TrialParameters session_trial_parameters(const store::Session& s);

/// Individual (and consensus) fitted densities on a shared 512-point grid.
Json overlay(const store::Session& s, std::string_view quantity_id, int points = 512);

/// Local maxima of the density on a grid, ignoring bumps below 1% of the peak.
int density_modes(const Distribution& d, int points = 512);

/// {"code", "message", "details"?} for an engine error.
Json error_json(const Error& e);
Json error_json(ErrorCode code, const std::string& message);
int http_status(ErrorCode code);

}  // namespace elicit::api
