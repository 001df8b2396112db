#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <regex>
#include <set>
#include <string>

#include <fmt/format.h>

#include "elicit/error.hpp"
#include "elicit/store.hpp"

namespace elicit::store {
namespace {

constexpr std::string_view kStageNames[] = {"setup",           "training",  "background",
                                            "individual",      "review_checks", "group_discussion",
                                            "consensus",       "feedback",  "closed"};

int index(Stage s) { return static_cast<int>(s); }

std::string format_micros(std::int64_t micros) {
  const std::time_t secs = static_cast<std::time_t>(micros / 1000000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}.{:06d}Z", tm.tm_year + 1900, tm.tm_mon + 1,
                     tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, micros % 1000000);
}

std::int64_t parse_micros(std::string_view s) {
  std::tm tm{};
  const std::string text(s);
  tm.tm_year = std::stoi(text.substr(0, 4)) - 1900;
  tm.tm_mon = std::stoi(text.substr(5, 2)) - 1;
  tm.tm_mday = std::stoi(text.substr(8, 2));
  tm.tm_hour = std::stoi(text.substr(11, 2));
  tm.tm_min = std::stoi(text.substr(14, 2));
  tm.tm_sec = std::stoi(text.substr(17, 2));
  return static_cast<std::int64_t>(timegm(&tm)) * 1000000 + std::stoll(text.substr(20, 6));
}

// Strictly after the last audit entry, even if the wall clock stalls or steps back.
std::string next_timestamp(const Session& s) {
  const auto now = std::chrono::duration_cast<std::chrono::microseconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  std::int64_t t = now;
  if (!s.audit_log.empty()) t = std::max(t, parse_micros(s.audit_log.back().at) + 1);
  return format_micros(t);
}

void log_event(Session& s, std::string event, Json detail) {
  s.audit_log.push_back({next_timestamp(s), std::move(event), std::move(detail)});
}

const Expert* find_expert(const Session& s, std::string_view id) {
  for (const auto& e : s.experts) {
    if (e.expert_id == id) return &e;
  }
  return nullptr;
}

FitResult fit_for(const Quantity& q, const ElicitedJudgment& j, std::optional<Family> override_family,
                  const FitOptions& options) {
  std::vector<Family> families;
  for (Family f : q.families) {
    if (family_admissible(f, q.support)) families.push_back(f);
  }
  if (override_family && std::find(families.begin(), families.end(), *override_family) == families.end()) {
    if (!family_admissible(*override_family, q.support)) {
      fail(ErrorCode::validation, "family '" + std::string(to_string(*override_family)) +
                                      "' cannot represent quantity '" + q.quantity_id + "'");
    }
    families.push_back(*override_family);
  }
  FitResult fit = fit_least_squares(j, families, options);
  if (override_family && fit.family() != *override_family) {
    for (const auto& c : fit.family_candidates) {
      if (c.family == *override_family) {
        fit.distribution = c.distribution;
        fit.sse = c.sse;
      }
    }
  }
  return fit;
}

ElicitedJudgment for_quantity(ElicitedJudgment j, const Quantity& q) {
  j.quantity_id = q.quantity_id;
  j.support = q.support;
  validate(j);
  return j;
}

}  // namespace

std::string_view to_string(Stage stage) { return kStageNames[index(stage)]; }

Stage stage_from_string(std::string_view name) {
  for (int i = 0; i < 9; ++i) {
    if (kStageNames[i] == name) return static_cast<Stage>(i);
  }
  fail(ErrorCode::validation, "unknown stage '" + std::string(name) + "'");
}

bool transition_allowed(Stage from, Stage to, bool has_consensus) {
  if (from == Stage::closed) return false;
  if (index(to) == index(from) + 1) return true;
  if (index(to) >= index(from)) return false;
  const Stage floor = has_consensus ? Stage::consensus : Stage::individual;
  return index(to) >= index(floor);
}

const Quantity* Session::quantity(std::string_view id) const {
  for (const auto& q : quantities) {
    if (q.quantity_id == id) return &q;
  }
  return nullptr;
}

const JudgmentRecord* Session::judgment(std::string_view expert_id, std::string_view quantity_id) const {
  for (const auto& r : judgments) {
    if (r.judgment.expert_id == expert_id && r.judgment.quantity_id == quantity_id) return &r;
  }
  return nullptr;
}

const ConsensusRecord* Session::consensus_for(std::string_view quantity_id) const {
  for (const auto& r : consensus) {
    if (r.judgment.quantity_id == quantity_id) return &r;
  }
  return nullptr;
}

std::string rfc3339_now() {
  return format_micros(std::chrono::duration_cast<std::chrono::microseconds>(
                           std::chrono::system_clock::now().time_since_epoch())
                           .count());
}

bool is_rfc3339(std::string_view s) {
  static const std::regex re(R"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}\.\d{6}Z)");
  return std::regex_match(s.begin(), s.end(), re);
}

bool valid_id(std::string_view id) {
  static const std::regex re(R"([A-Za-z0-9_-][A-Za-z0-9_.-]{0,63})");
  return std::regex_match(id.begin(), id.end(), re);
}

Session new_session(std::string session_id, std::vector<Quantity> quantities, std::vector<Expert> experts) {
  Session s;
  s.session_id = std::move(session_id);
  s.quantities = std::move(quantities);
  s.experts = std::move(experts);
  log_event(s, "session_created", Json{{"stage", to_string(Stage::setup)}});
  s.created_at = s.audit_log.back().at;
  validate(s);
  return s;
}

void set_stage(Session& s, Stage to) {
  if (!transition_allowed(s.stage, to, !s.consensus.empty())) {
    fail(ErrorCode::validation, "cannot move session '" + s.session_id + "' from " +
                               std::string(to_string(s.stage)) + " to " + std::string(to_string(to)));
  }
  log_event(s, "stage_changed", Json{{"from", to_string(s.stage)}, {"to", to_string(to)}});
  s.stage = to;
}

const JudgmentRecord& put_judgment(Session& s, ElicitedJudgment judgment,
                                   std::optional<Family> override_family, const FitOptions& fit) {
  if (s.stage != Stage::individual && s.stage != Stage::review_checks) {
    fail(ErrorCode::stage, "individual judgments are entered in the individual or review_checks stage, not " +
                               std::string(to_string(s.stage)));
  }
  if (find_expert(s, judgment.expert_id) == nullptr) {
    fail(ErrorCode::not_found, "unknown expert '" + judgment.expert_id + "'");
  }
  const Quantity* q = s.quantity(judgment.quantity_id);
  if (q == nullptr) fail(ErrorCode::not_found, "unknown quantity '" + judgment.quantity_id + "'");
  judgment = for_quantity(std::move(judgment), *q);
  FitResult result = fit_for(*q, judgment, override_family, fit);

  log_event(s, "judgment_saved",
            Json{{"expert_id", judgment.expert_id}, {"quantity_id", judgment.quantity_id},
                 {"family", to_string(result.family())}});
  JudgmentRecord record{std::move(judgment), std::move(result), override_family, s.audit_log.back().at};
  for (auto& r : s.judgments) {
    if (r.judgment.expert_id == record.judgment.expert_id &&
        r.judgment.quantity_id == record.judgment.quantity_id) {
      r = std::move(record);
      return r;
    }
  }
  s.judgments.push_back(std::move(record));
  return s.judgments.back();
}

const ConsensusRecord& put_consensus(Session& s, ElicitedJudgment judgment, const FitOptions& fit) {
  if (s.stage != Stage::group_discussion && s.stage != Stage::consensus) {
    fail(ErrorCode::stage, "consensus is entered after group discussion, session is in " +
                               std::string(to_string(s.stage)));
  }
  const Quantity* q = s.quantity(judgment.quantity_id);
  if (q == nullptr) fail(ErrorCode::not_found, "unknown quantity '" + judgment.quantity_id + "'");
  judgment.expert_id = "RIO";
  judgment = for_quantity(std::move(judgment), *q);
  FitResult result = fit_for(*q, judgment, std::nullopt, fit);
  if (s.stage == Stage::group_discussion) set_stage(s, Stage::consensus);
  log_event(s, "consensus_saved",
            Json{{"quantity_id", judgment.quantity_id}, {"family", to_string(result.family())}});
  ConsensusRecord record{std::move(judgment), std::move(result), s.audit_log.back().at};
  for (auto& r : s.consensus) {
    if (r.judgment.quantity_id == record.judgment.quantity_id) {
      r = std::move(record);
      return r;
    }
  }
  s.consensus.push_back(std::move(record));
  return s.consensus.back();
}

void add_note(Session& s, std::string author, std::string text) {
  if (text.empty()) fail(ErrorCode::validation, "note text is empty");
  log_event(s, "note_added", Json{{"author", author}});
  s.notes.push_back({s.audit_log.back().at, std::move(author), std::move(text)});
}

std::vector<Stage> replay_stages(const Session& s) {
  std::vector<Stage> history = {Stage::setup};
  bool has_consensus = false;
  for (const auto& e : s.audit_log) {
    if (e.event == "consensus_saved") has_consensus = true;
    if (e.event != "stage_changed") continue;
    const Json* from = json::optional_member(e.detail, "from");
    const Json* to = json::optional_member(e.detail, "to");
    if (from == nullptr || to == nullptr || !from->is_string() || !to->is_string()) {
      fail(ErrorCode::validation, "stage event at " + e.at + " lacks from/to");
    }
    const Stage f = stage_from_string(from->get<std::string>());
    const Stage t = stage_from_string(to->get<std::string>());
    if (f != history.back()) {
      fail(ErrorCode::validation, "stage event at " + e.at + " starts from " + std::string(to_string(f)) +
                                      " but the session was in " + std::string(to_string(history.back())));
    }
    if (!transition_allowed(f, t, has_consensus)) {
      fail(ErrorCode::validation, "stage event at " + e.at + " moves " + std::string(to_string(f)) + " to " +
                                      std::string(to_string(t)) + ", which is not allowed");
    }
    history.push_back(t);
  }
  return history;
}

void validate(const Session& s) {
  if (!valid_id(s.session_id)) fail(ErrorCode::validation, "invalid session id '" + s.session_id + "'");
  std::set<std::string> ids;
  for (const auto& q : s.quantities) {
    if (q.quantity_id.empty() || !ids.insert(q.quantity_id).second) {
      fail(ErrorCode::validation, "quantity ids must be unique and nonempty");
    }
    if (!(q.support.lo < q.support.hi)) fail(ErrorCode::validation, "quantity '" + q.quantity_id + "' support is empty");
    if (q.families.empty()) fail(ErrorCode::validation, "quantity '" + q.quantity_id + "' lists no families");
    if (q.trial_parameter) {
      static const std::set<std::string> names = {"eta", "psi", "theta1", "theta2", "theta3"};
      if (!names.count(*q.trial_parameter)) {
        fail(ErrorCode::validation, "unknown trial parameter '" + *q.trial_parameter + "'");
      }
    }
  }
  ids.clear();
  for (const auto& e : s.experts) {
    if (e.expert_id.empty() || !ids.insert(e.expert_id).second) {
      fail(ErrorCode::validation, "expert ids must be unique and nonempty");
    }
  }
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& r : s.judgments) {
    if (find_expert(s, r.judgment.expert_id) == nullptr || s.quantity(r.judgment.quantity_id) == nullptr) {
      fail(ErrorCode::validation, "judgment references an unknown expert or quantity");
    }
    if (!pairs.insert({r.judgment.expert_id, r.judgment.quantity_id}).second) {
      fail(ErrorCode::validation, "duplicate judgment for expert '" + r.judgment.expert_id + "'");
    }
    validate(r.judgment);
  }
  ids.clear();
  for (const auto& c : s.consensus) {
    if (s.quantity(c.judgment.quantity_id) == nullptr || !ids.insert(c.judgment.quantity_id).second) {
      fail(ErrorCode::validation, "consensus records must name distinct known quantities");
    }
    validate(c.judgment);
  }
  if (!s.consensus.empty() && index(s.stage) < index(Stage::consensus)) {
    fail(ErrorCode::validation, "a consensus exists but the session is in " + std::string(to_string(s.stage)));
  }
  for (std::size_t i = 0; i < s.audit_log.size(); ++i) {
    if (!is_rfc3339(s.audit_log[i].at)) {
      fail(ErrorCode::validation, "audit timestamp '" + s.audit_log[i].at + "' is not RFC 3339 UTC");
    }
    if (i > 0 && !(s.audit_log[i].at > s.audit_log[i - 1].at)) {
      fail(ErrorCode::validation, "audit timestamps must be strictly increasing");
    }
  }
  if (replay_stages(s).back() != s.stage) {
    fail(ErrorCode::validation, "audit log does not replay to the session's stage " + std::string(to_string(s.stage)));
  }
}

}  // namespace elicit::store
