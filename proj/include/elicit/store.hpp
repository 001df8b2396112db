#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "elicit/cooke.hpp"
#include "elicit/fitting.hpp"
#include "elicit/serialize.hpp"

namespace elicit::store {

using json::Json;

enum class Stage {
  setup,
  training,
  background,
  individual,
  review_checks,
  group_discussion,
  consensus,
  feedback,
  closed,
};
std::string_view to_string(Stage stage);
Stage stage_from_string(std::string_view name);

/// Forward by exactly one stage. Backwards is allowed down to `individual`,
/// and only down to `consensus` once a consensus exists. `closed` is final.
bool transition_allowed(Stage from, Stage to, bool has_consensus);

struct Quantity {
  std::string quantity_id;
  std::string label;
  Support support;
  Scale scale = Scale::linear;
  std::vector<Family> families = {Family::normal, Family::lognormal, Family::beta, Family::gamma};
  // One of eta, psi, theta1, theta2, theta3 when the quantity is a trial parameter.
  std::optional<std::string> trial_parameter;
  friend bool operator==(const Quantity&, const Quantity&) = default;
};

struct SelfAssessment {
  std::vector<std::pair<std::string, int>> ratings;
  std::string strengths;
  std::string weaknesses;
  friend bool operator==(const SelfAssessment&, const SelfAssessment&) = default;
};

struct Expert {
  std::string expert_id;
  std::string name;
  SelfAssessment self_assessment;
  friend bool operator==(const Expert&, const Expert&) = default;
};

struct JudgmentRecord {
  ElicitedJudgment judgment;
  FitResult fit;
  std::optional<Family> override_family;  // expert picked a family other than the best fit
  std::string updated_at;
};

struct ConsensusRecord {
  ElicitedJudgment judgment;
  FitResult fit;
  std::string updated_at;
};

struct Note {
  std::string at;
  std::string author;
  std::string text;
  friend bool operator==(const Note&, const Note&) = default;
};

struct AuditEvent {
  std::string at;
  std::string event;
  Json detail;
  friend bool operator==(const AuditEvent&, const AuditEvent&) = default;
};

struct Session {
  std::string session_id;
  int version = 0;  // 0 until first saved
  Stage stage = Stage::setup;
  std::string created_at;
  std::vector<Quantity> quantities;
  std::vector<Expert> experts;
  std::vector<JudgmentRecord> judgments;
  std::vector<ConsensusRecord> consensus;
  std::vector<Note> notes;
  std::vector<AuditEvent> audit_log;

  const Quantity* quantity(std::string_view id) const;
  const JudgmentRecord* judgment(std::string_view expert_id, std::string_view quantity_id) const;
  const ConsensusRecord* consensus_for(std::string_view quantity_id) const;
};

/// UTC, microsecond precision: 2026-10-14T09:30:00.000001Z.
std::string rfc3339_now();
bool is_rfc3339(std::string_view s);

/// Identifiers used as path components: [A-Za-z0-9_.-], 1 to 64 chars, not
/// starting with a dot.
bool valid_id(std::string_view id);

Session new_session(std::string session_id, std::vector<Quantity> quantities,
                    std::vector<Expert> experts);
void set_stage(Session& s, Stage to);
/// Fits and stores an expert's judgment. Allowed in the individual and
/// review_checks stages. `override_family` forces that family's fit.
const JudgmentRecord& put_judgment(Session& s, ElicitedJudgment judgment,
                                   std::optional<Family> override_family = std::nullopt,
                                   const FitOptions& fit = {});
/// Fits and stores the group consensus; moves group_discussion to consensus.
const ConsensusRecord& put_consensus(Session& s, ElicitedJudgment judgment, const FitOptions& fit = {});
void add_note(Session& s, std::string author, std::string text);

/// Invariants: unique ids, judgments reference known experts and quantities,
/// consensus implies stage >= consensus, strictly increasing RFC 3339
/// timestamps, and the stage events replay from setup to the current stage.
void validate(const Session& s);
/// Stage history reconstructed from the audit log, starting at setup.
std::vector<Stage> replay_stages(const Session& s);

Json to_json(const Session& s);
Session session_from_json(const Json& j);

struct SeedDataset {
  std::string dataset_id;
  std::vector<cooke::SeedQuestion> questions;
};

enum class View { facilitator, expert };
/// The expert view drops every truth.
Json to_json(const SeedDataset& d, View view = View::facilitator);
SeedDataset dataset_from_json(const Json& j);
void validate(const SeedDataset& d);

/// Seed CSV: question_id, expert_id, min, q25, median, q75, max, truth, scale
/// (optional text). Row problems are collected and thrown together as
/// ValidationErrors with code csv, each naming its line.
SeedDataset load_seed_csv(std::istream& in, std::string dataset_id);
SeedDataset load_seed_csv(const std::filesystem::path& path);

/// Consensus CSV: question_id, min, q25, median, q75, max. Judgments carry
/// expert_id "SHELF".
std::vector<ElicitedJudgment> load_consensus_csv(std::istream& in);
std::vector<ElicitedJudgment> load_consensus_csv(const std::filesystem::path& path);

/// Directory store: <root>/sessions/<id>/v000001.json ... and
/// <root>/datasets/<id>.json. Saving publishes the next version with link(2),
/// so two writers racing from the same version cannot both win.
class Store {
 public:
  explicit Store(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  /// Writes version 1. ErrorCode::version_conflict if the session exists.
  Session create(Session s);
  /// Writes s.version + 1 after validating. ErrorCode::version_conflict when
  /// s.version is not the latest. Returns the new version.
  int save(Session& s);
  Session load(std::string_view session_id) const;
  Session load(std::string_view session_id, int version) const;
  std::vector<int> versions(std::string_view session_id) const;
  std::vector<std::string> sessions() const;

  void save_dataset(const SeedDataset& d);
  SeedDataset load_dataset(std::string_view dataset_id) const;

 private:
  std::filesystem::path session_dir(std::string_view id) const;
  std::filesystem::path root_;
};

/// Uncompressed zip archive of the given (name, contents) entries.
void write_bundle(const std::filesystem::path& path,
                  const std::vector<std::pair<std::string, std::string>>& entries);
std::string bundle_bytes(const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace elicit::store
