#include "elicit/api.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "elicit/error.hpp"
#include "elicit/fitting.hpp"
#include "elicit/pooling.hpp"

namespace elicit::api {
namespace {

using json::member;
using json::number;
using json::optional_member;

constexpr double kInf = std::numeric_limits<double>::infinity();

const Json& array_of(const Json& j, std::string_view field) {
  const Json& a = member(j, field);
  if (!a.is_array()) fail(ErrorCode::validation, "field '" + std::string(field) + "' must be an array");
  return a;
}

Family parse_family(const std::string& name) {
  try {
    return family_from_string(name);
  } catch (const Error&) {
    fail(ErrorCode::validation, "unknown family '" + name + "'");
  }
}

std::vector<std::string> default_ids(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(fmt::format("expert{}", i + 1));
  return ids;
}

Scale parse_scale(const Json& j) {
  const Json* s = optional_member(j, "scale");
  if (s == nullptr) return Scale::linear;
  if (!s->is_string()) fail(ErrorCode::validation, "field 'scale' must be a string");
  try {
    return scale_from_string(s->get<std::string>());
  } catch (const Error&) {
    fail(ErrorCode::validation, "field 'scale' must be 'linear' or 'log'");
  }
}

Support seed_support(Scale scale) {
  if (scale == Scale::log) return {0.0, kInf};
  return {};
}

// Grid covering the bulk of every distribution, clipped to `clip`.
std::vector<double> shared_grid(const std::vector<Distribution>& ds, int points, Support clip) {
  double lo = kInf;
  double hi = -kInf;
  for (const auto& d : ds) {
    lo = std::min(lo, d.quantile(0.001));
    hi = std::max(hi, d.quantile(0.999));
  }
  const double pad = 0.05 * (hi - lo);
  lo = std::max(lo - pad, clip.lo);
  hi = std::min(hi + pad, clip.hi);
  std::vector<double> x(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) x[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  return x;
}

std::string csv_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.6f}", v);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Json fit(const Json& body) {
  ElicitedJudgment j = json::judgment_from_json(member(body, "judgment"));
  std::vector<Family> families(std::begin(kFittableFamilies), std::end(kFittableFamilies));
  if (const Json* f = optional_member(body, "families")) {
    if (!f->is_array()) fail(ErrorCode::validation, "field 'families' must be an array");
    families.clear();
    for (const auto& name : *f) {
      if (!name.is_string()) fail(ErrorCode::validation, "field 'families' must hold family names");
      families.push_back(parse_family(name.get<std::string>()));
    }
  }
  std::string family = "auto";
  if (const Json* f = optional_member(body, "family")) {
    if (!f->is_string()) fail(ErrorCode::validation, "field 'family' must be a string");
    family = f->get<std::string>();
  }
  validate(j);
  if (family == "auto") {
    std::vector<Family> admissible;
    for (Family f : families) {
      if (family_admissible(f, j.support)) admissible.push_back(f);
    }
    return json::to_json(fit_least_squares(j, admissible));
  }
  const FamilyCandidate c = fit_family(j, parse_family(family));
  return json::to_json(FitResult{c.distribution, c.sse, {c}});
}

Json pool(const Json& body) {
  std::vector<Distribution> ds;
  for (const auto& d : array_of(body, "distributions")) ds.push_back(json::distribution_from_json(d));
  if (ds.empty()) fail(ErrorCode::validation, "pool needs at least one distribution");

  std::vector<std::string> ids = default_ids(ds.size());
  if (const Json* e = optional_member(body, "expert_ids")) {
    if (!e->is_array() || e->size() != ds.size()) {
      fail(ErrorCode::validation, "field 'expert_ids' must align with 'distributions'");
    }
    ids.clear();
    for (const auto& id : *e) {
      if (!id.is_string()) fail(ErrorCode::validation, "field 'expert_ids' must hold strings");
      ids.push_back(id.get<std::string>());
    }
  }
  WeightVector w;
  const Json* wj = optional_member(body, "weights");
  if (wj == nullptr || wj->is_null()) {
    w = equal_weights(ids);
  } else if (wj->is_array()) {
    std::vector<double> v;
    for (const auto& x : *wj) {
      if (!x.is_number()) fail(ErrorCode::validation, "field 'weights' must hold numbers");
      v.push_back(x.get<double>());
    }
    if (v.size() != ds.size()) fail(ErrorCode::validation, "field 'weights' must align with 'distributions'");
    try {
      w = custom_weights(ids, v);
    } catch (const Error& e) {
      fail(ErrorCode::validation, e.what());
    }
  } else {
    w = json::weights_from_json(*wj);
    if (w.size() != ds.size()) fail(ErrorCode::validation, "weights must align with 'distributions'");
  }

  std::string method = "linear";
  if (const Json* m = optional_member(body, "method")) {
    if (!m->is_string()) fail(ErrorCode::validation, "field 'method' must be a string");
    method = m->get<std::string>();
  }
  Distribution pooled = [&] {
    if (method == "linear") return linear_pool(ds, w);
    if (method == "loglinear") return log_linear_pool(ds, w);
    fail(ErrorCode::validation, "field 'method' must be 'linear' or 'loglinear'");
  }();
  return Json{{"method", method},
              {"weights", json::to_json(w)},
              {"pooled", json::to_json(pooled)},
              {"summary", Json{{"median", pooled.median()},
                               {"q05", pooled.quantile(0.05)},
                               {"q95", pooled.quantile(0.95)},
                               {"modes", density_modes(pooled)}}}};
}

cooke::CvOptions cv_options(const Json& body) {
  cooke::CvOptions o;
  if (const Json* a = optional_member(body, "alpha"); a && !a->is_null()) {
    if (!a->is_number()) fail(ErrorCode::validation, "field 'alpha' must be a number");
    o.alpha = a->get<double>();
  }
  if (const Json* b = optional_member(body, "optimize_alpha"); b && !b->is_null()) {
    if (!b->is_boolean()) fail(ErrorCode::validation, "field 'optimize_alpha' must be a boolean");
    o.optimize_alpha = b->get<bool>();
  }
  if (!(o.alpha >= 0.0 && o.alpha <= 1.0)) fail(ErrorCode::validation, "alpha must lie in [0, 1]");
  return o;
}

Json cm_weights(const store::SeedDataset& d, const cooke::CvOptions& options) {
  store::validate(d);
  std::vector<cooke::CalibrationResult> results;
  for (const auto& id : cooke::expert_ids(d.questions)) {
    results.push_back(cooke::assess_expert(id, d.questions, options.overshoot));
  }
  const WeightVector w = cooke::classical_weights(d.questions, options);
  Json cal = Json::array();
  for (const auto& r : results) cal.push_back(json::to_json(r));
  return Json{{"dataset_id", d.dataset_id},
              {"alpha", options.alpha},
              {"optimize_alpha", options.optimize_alpha},
              {"weights", json::to_json(w)},
              {"calibration", std::move(cal)}};
}

Json crossval(const store::SeedDataset& d, const cooke::CvOptions& options,
              const std::vector<ElicitedJudgment>* consensus) {
  store::validate(d);
  std::map<std::string, const ElicitedJudgment*> shelf;
  if (consensus != nullptr) {
    for (const auto& j : *consensus) shelf[j.quantity_id] = &j;
    for (const auto& q : d.questions) {
      if (!shelf.count(q.question_id)) {
        fail(ErrorCode::coverage, "consensus does not cover seed '" + q.question_id + "'");
      }
    }
  }
  const auto folds = cooke::leave_one_out_cv(d.questions, options);
  Json out = Json::array();
  for (std::size_t k = 0; k < folds.size(); ++k) {
    Json f = json::to_json(folds[k]);
    if (consensus != nullptr) {
      ElicitedJudgment j = *shelf.at(folds[k].question_id);
      j.support = seed_support(d.questions[k].scale);
      try {
        validate(j);
        f["shelf"] = json::to_json(
            fit_least_squares(j, cooke::admissible_families(j, options.families), options.fit));
      } catch (const Error& e) {
        throw Error(e.code(), "fold '" + folds[k].question_id + "' consensus: " + e.what());
      }
    }
    out.push_back(std::move(f));
  }
  return Json{{"dataset_id", d.dataset_id},
              {"alpha", options.alpha},
              {"optimize_alpha", options.optimize_alpha},
              {"folds", std::move(out)}};
}

Json scores(const Json& body) {
  std::vector<scoring::QuestionTruth> truths;
  for (const auto& t : array_of(body, "truths")) {
    scoring::QuestionTruth q{json::string(t, "question_id"), number(t, "truth"), parse_scale(t)};
    truths.push_back(std::move(q));
  }
  std::vector<scoring::Evaluand> evaluands;
  for (const auto& e : array_of(body, "evaluands")) {
    scoring::Evaluand ev{json::string(e, "id"), {}};
    for (const auto& d : array_of(e, "distributions")) ev.per_question.push_back(json::distribution_from_json(d));
    evaluands.push_back(std::move(ev));
  }
  scoring::ScoreOptions options;
  if (const Json* o = optional_member(body, "options")) {
    auto agg = [&](const char* field, scoring::Aggregation& out) {
      if (const Json* v = optional_member(*o, field)) {
        if (*v == "sum") out = scoring::Aggregation::sum;
        else if (*v == "mean") out = scoring::Aggregation::mean;
        else fail(ErrorCode::validation, std::string("option '") + field + "' must be 'sum' or 'mean'");
      }
    };
    agg("brier", options.brier);
    agg("logarithmic", options.logarithmic);
    agg("quadratic", options.quadratic);
    if (const Json* v = optional_member(*o, "brier_scale")) {
      if (*v == "raw") options.brier_scale = scoring::BrierScale::raw;
      else if (*v == "declared") options.brier_scale = scoring::BrierScale::declared;
      else fail(ErrorCode::validation, "option 'brier_scale' must be 'raw' or 'declared'");
    }
  }
  return json::to_json(scoring::score_table(evaluands, truths, options));
}

Json correlations(const Json& body) {
  std::vector<double> truths;
  for (const auto& t : array_of(body, "truths")) {
    if (t.is_number()) {
      truths.push_back(t.get<double>());
    } else {
      truths.push_back(number(t, "truth"));
    }
  }
  std::vector<scoring::MedianSeries> series;
  for (const auto& e : array_of(body, "evaluands")) {
    scoring::MedianSeries s{json::string(e, "id"), {}};
    for (const auto& m : array_of(e, "medians")) {
      if (!m.is_number()) fail(ErrorCode::validation, "field 'medians' must hold numbers");
      s.medians.push_back(m.get<double>());
    }
    series.push_back(std::move(s));
  }
  return json::to_json(scoring::median_error_correlations(series, truths));
}

FoldEvaluands evaluands_from_folds(const Json& folds, const store::SeedDataset& truths) {
  std::map<std::string, const Json*> by_question;
  for (const auto& f : array_of(folds, "folds")) by_question[json::string(f, "question_id")] = &f;

  FoldEvaluands out;
  std::vector<std::string> order;
  std::map<std::string, scoring::Evaluand> table;
  auto add = [&](const std::string& id, Distribution d) {
    auto it = table.find(id);
    if (it == table.end()) {
      order.push_back(id);
      it = table.emplace(id, scoring::Evaluand{id, {}}).first;
    }
    it->second.per_question.push_back(std::move(d));
  };

  for (const auto& q : truths.questions) {
    const auto it = by_question.find(q.question_id);
    if (it == by_question.end()) fail(ErrorCode::coverage, "no fold for seed '" + q.question_id + "'");
    const Json& f = *it->second;
    out.truths.push_back({q.question_id, q.truth, q.scale});
    for (const auto& e : array_of(f, "expert_fits")) {
      add(json::string(e, "expert_id"), json::distribution_from_json(member(e, "fit")));
    }
    add("EW", json::distribution_from_json(member(f, "equal_pool")));
    add("CM", json::distribution_from_json(member(f, "pooled")));
    if (const Json* s = optional_member(f, "shelf")) add("SHELF", json::distribution_from_json(*s));
  }
  // Experts first in their order of appearance; the methods last.
  std::stable_partition(order.begin(), order.end(),
                        [](const std::string& id) { return id != "EW" && id != "CM" && id != "SHELF"; });
  for (const auto& id : order) out.evaluands.push_back(std::move(table.at(id)));
  return out;
}

scoring::ScoreTable score_folds(const FoldEvaluands& e, const scoring::ScoreOptions& options) {
  return scoring::score_table(e.evaluands, e.truths, options);
}

scoring::ErrorCorrelationMatrix correlate_folds(const FoldEvaluands& e) {
  std::vector<scoring::MedianSeries> series;
  for (const auto& ev : e.evaluands) {
    scoring::MedianSeries s{ev.id, {}};
    for (const auto& d : ev.per_question) s.medians.push_back(d.median());
    series.push_back(std::move(s));
  }
  std::vector<double> truths;
  for (const auto& t : e.truths) truths.push_back(t.truth);
  return scoring::median_error_correlations(series, truths);
}

std::string score_table_csv(const scoring::ScoreTable& t) {
  std::string out = "id,brier,logarithmic,quadratic\n";
  for (const auto& r : t.rows) {
    out += fmt::format("{},{},{},{}\n", csv_field(r.id), csv_number(r.brier), csv_number(r.logarithmic),
                       csv_number(r.quadratic));
  }
  return out;
}

std::string score_table_text(const scoring::ScoreTable& t) {
  std::size_t width = 2;
  for (const auto& r : t.rows) width = std::max(width, r.id.size());
  std::string out = fmt::format("{:<{}}  {:>12}  {:>12}  {:>10}\n", "id", width, "Brier", "Logarithmic", "Quadratic");
  for (const auto& r : t.rows) {
    out += fmt::format("{:<{}}  {:>12.1f}  {:>12}  {:>10.3f}\n", r.id, width, r.brier,
                       std::isinf(r.logarithmic) ? std::string("inf") : fmt::format("{:.1f}", r.logarithmic),
                       r.quadratic);
  }
  out += fmt::format("({} questions)\n", t.question_count);
  return out;
}

std::string correlations_csv(const scoring::ErrorCorrelationMatrix& m) {
  std::string out = "id";
  for (const auto& id : m.ids) out += "," + csv_field(id);
  out += "\n";
  for (std::size_t i = 0; i < m.ids.size(); ++i) {
    out += csv_field(m.ids[i]);
    for (double v : m.matrix[i]) out += "," + csv_number(v);
    out += "\n";
  }
  return out;
}

std::string correlations_text(const scoring::ErrorCorrelationMatrix& m) {
  std::size_t width = 2;
  for (const auto& id : m.ids) width = std::max(width, id.size());
  const std::size_t cell = std::max<std::size_t>(width, 6);
  std::string out = fmt::format("{:<{}}", "", width);
  for (const auto& id : m.ids) out += fmt::format("  {:>{}}", id, cell);
  out += "\n";
  for (std::size_t i = 0; i < m.ids.size(); ++i) {
    out += fmt::format("{:<{}}", m.ids[i], width);
    for (std::size_t j = 0; j < m.ids.size(); ++j) {
      // Lower triangle, as in a published correlation table.
      out += j <= i ? fmt::format("  {:>{}.2f}", m.matrix[i][j], cell) : fmt::format("  {:>{}}", "", cell);
    }
    out += "\n";
  }
  return out;
}

Json delayed_positive(const trial::TrialParameters& p, const CheckOptions& options) {
  const auto e = trial::delayed_positive_check(p.eta, p.psi, options.draws, options.level, options.seed);
  Json j = json::to_json(e);
  j["seed"] = options.seed;
  return j;
}

Json patient_sample(const trial::TrialParameters& p, int total) {
  const auto m = trial::medians(p);
  return json::to_json(trial::patient_sample(m, total));
}

Json checks(const trial::TrialParameters& p, const CheckOptions& options) {
  const auto m = trial::medians(p);
  Json sens = Json::object();
  try {
    sens["rt"] = trial::rt_sensitivity(m.eta, m.psi);
    sens["et"] = trial::et_sensitivity(m.eta, m.psi, m.theta1, m.theta2);
  } catch (const Error&) {
    sens["rt"] = nullptr;
    sens["et"] = nullptr;
  }
  return Json{{"medians", Json{{"eta", m.eta}, {"psi", m.psi}, {"theta1", m.theta1},
                               {"theta2", m.theta2}, {"theta3", m.theta3}}},
              {"cells", json::to_json(trial::cell_probabilities(m))},
              {"sensitivity", std::move(sens)},
              {"delayed_positive", delayed_positive(p, options)},
              {"patient_sample", patient_sample(p, options.total)}};
}

namespace {

// Trial parameters are probabilities; a fit spilling outside [0, 1] is cut
// to the unit interval and renormalized on a fine grid.
Distribution on_unit_interval(const Distribution& d) {
  const Support sup = d.support();
  if (sup.lo >= 0.0 && sup.hi <= 1.0) return d;
  constexpr int n = 1024;
  std::vector<double> x(n + 1);
  std::vector<double> f(n + 1);
  for (int i = 0; i <= n; ++i) {
    x[i] = static_cast<double>(i) / n;
    const double v = d.pdf(std::clamp(x[i], 1e-12, 1.0 - 1e-12));
    f[i] = std::isfinite(v) ? v : 0.0;
  }
  return Distribution::tabulated(std::move(x), std::move(f));
}

}  // namespace

trial::TrialParameters session_trial_parameters(const store::Session& s) {
  std::map<std::string, trial::Parameter> found;
  for (const auto& q : s.quantities) {
    if (!q.trial_parameter) continue;
    if (const auto* c = s.consensus_for(q.quantity_id)) {
      found[*q.trial_parameter] = on_unit_interval(c->fit.distribution);
      continue;
    }
    std::vector<Distribution> fits;
    std::vector<std::string> ids;
    for (const auto& r : s.judgments) {
      if (r.judgment.quantity_id == q.quantity_id) {
        fits.push_back(r.fit.distribution);
        ids.push_back(r.judgment.expert_id);
      }
    }
    if (fits.size() == 1) found[*q.trial_parameter] = on_unit_interval(fits.front());
    if (fits.size() > 1) found[*q.trial_parameter] = on_unit_interval(linear_pool(fits, equal_weights(ids)));
  }
  std::vector<std::string> missing;
  for (const char* name : {"eta", "psi", "theta1", "theta2", "theta3"}) {
    if (!found.count(name)) missing.push_back(name);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    fail(ErrorCode::validation, "session has no judgments yet for trial parameter(s): " + list);
  }
  trial::TrialParameters p;
  p.eta = found.at("eta");
  p.psi = found.at("psi");
  p.theta1 = found.at("theta1");
  p.theta2 = found.at("theta2");
  p.theta3 = found.at("theta3");
  return p;
}

Json overlay(const store::Session& s, std::string_view quantity_id, int points) {
  const store::Quantity* q = s.quantity(quantity_id);
  if (q == nullptr) fail(ErrorCode::not_found, "unknown quantity '" + std::string(quantity_id) + "'");
  std::vector<Distribution> ds;
  std::vector<std::string> ids;
  for (const auto& r : s.judgments) {
    if (r.judgment.quantity_id == quantity_id) {
      ds.push_back(r.fit.distribution);
      ids.push_back(r.judgment.expert_id);
    }
  }
  const auto* consensus = s.consensus_for(quantity_id);
  if (consensus != nullptr) ds.push_back(consensus->fit.distribution);
  Json out{{"quantity_id", q->quantity_id}};
  if (ds.empty()) {
    out["x"] = Json::array();
    out["densities"] = Json::array();
    out["consensus"] = nullptr;
    return out;
  }
  const auto x = shared_grid(ds, points, q->support);
  auto curve = [&](const Distribution& d) {
    std::vector<double> f;
    f.reserve(x.size());
    for (double v : x) f.push_back(d.pdf(v));
    return f;
  };
  Json dens = Json::array();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    dens.push_back(Json{{"expert_id", ids[i]}, {"family", to_string(ds[i].family())}, {"pdf", curve(ds[i])}});
  }
  out["x"] = x;
  out["densities"] = std::move(dens);
  out["consensus"] = consensus ? Json{{"family", to_string(consensus->fit.family())},
                                      {"pdf", curve(consensus->fit.distribution)}}
                               : Json(nullptr);
  return out;
}

int density_modes(const Distribution& d, int points) {
  const double lo = d.quantile(0.001);
  const double hi = d.quantile(0.999);
  std::vector<double> f(static_cast<std::size_t>(points));
  double peak = 0.0;
  for (int i = 0; i < points; ++i) {
    f[static_cast<std::size_t>(i)] = d.pdf(lo + (hi - lo) * i / (points - 1));
    peak = std::max(peak, f[static_cast<std::size_t>(i)]);
  }
  int modes = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const bool left = i == 0 || f[i] > f[i - 1];
    // Plateaus count once, at their right end.
    const bool right = i + 1 == f.size() || f[i] > f[i + 1];
    if (left && right && f[i] >= 0.01 * peak) ++modes;
  }
  return std::max(modes, 1);
}

Json error_json(ErrorCode code, const std::string& message) {
  return Json{{"code", to_string(code)}, {"message", message}};
}

Json error_json(const Error& e) {
  Json j = error_json(e.code(), e.what());
  if (const auto* v = dynamic_cast<const ValidationErrors*>(&e)) {
    j["details"] = Json{{"problems", v->problems()}};
  } else if (const auto* f = dynamic_cast<const FitError*>(&e)) {
    j["details"] = Json{{"best_params", f->best_params()}, {"best_sse", f->best_sse()}};
  } else if (const auto* i = dynamic_cast<const IntegrationError*>(&e)) {
    j["details"] = Json{{"estimate", i->estimate()}, {"error_bound", i->error_bound()}};
  }
  return j;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::not_found: return 404;
    case ErrorCode::version_conflict:
    case ErrorCode::stage: return 409;
    case ErrorCode::unauthorized: return 401;
    case ErrorCode::internal:
    case ErrorCode::integration: return 500;
    default: return 400;
  }
}

}  // namespace elicit::api
