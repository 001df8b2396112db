#include "elicit/serialize.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "elicit/error.hpp"

namespace elicit::json {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void bad(std::string_view field, std::string_view what) {
  fail(ErrorCode::validation, "field '" + std::string(field) + "' " + std::string(what));
}

Json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::vector<double> numbers(const Json& j, std::string_view field) {
  const Json& a = member(j, field);
  if (!a.is_array()) bad(field, "must be an array of numbers");
  std::vector<double> out;
  out.reserve(a.size());
  for (const auto& v : a) {
    if (!v.is_number()) bad(field, "must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::string> strings(const Json& j, std::string_view field) {
  const Json& a = member(j, field);
  if (!a.is_array()) bad(field, "must be an array of strings");
  std::vector<std::string> out;
  for (const auto& v : a) {
    if (!v.is_string()) bad(field, "must be an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

const Json& array(const Json& j, std::string_view field) {
  const Json& a = member(j, field);
  if (!a.is_array()) bad(field, "must be an array");
  return a;
}

bool boolean(const Json& j, std::string_view field) {
  const Json& v = member(j, field);
  if (!v.is_boolean()) bad(field, "must be a boolean");
  return v.get<bool>();
}

int integer(const Json& j, std::string_view field) {
  const Json& v = member(j, field);
  if (!v.is_number_integer()) bad(field, "must be an integer");
  return v.get<int>();
}

Json params_of(const Distribution& d) {
  if (const auto* p = d.get_if<NormalParams>()) return Json{{"mean", p->mean}, {"sd", p->sd}};
  if (const auto* p = d.get_if<LogNormalParams>()) return Json{{"mu", p->mu}, {"sigma", p->sigma}};
  if (const auto* p = d.get_if<BetaParams>()) return Json{{"alpha", p->alpha}, {"beta", p->beta}};
  if (const auto* p = d.get_if<GammaParams>()) return Json{{"shape", p->shape}, {"scale", p->scale}};
  return nullptr;
}

Family family_field(const Json& j) {
  const std::string name = string(j, "family");
  try {
    return family_from_string(name);
  } catch (const Error&) {
    bad("family", "names an unknown family '" + name + "'");
  }
}

}  // namespace

std::string render(const Json& j) { return j.dump(2) + "\n"; }

Json parse(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::validation, std::string("malformed JSON: ") + e.what());
  }
}

const Json* optional_member(const Json& j, std::string_view field) {
  if (!j.is_object()) return nullptr;
  const auto it = j.find(std::string(field));
  if (it == j.end()) return nullptr;
  return &*it;
}

const Json& member(const Json& j, std::string_view field) {
  if (!j.is_object()) fail(ErrorCode::validation, "expected a JSON object holding '" + std::string(field) + "'");
  const Json* m = optional_member(j, field);
  if (m == nullptr) bad(field, "is missing");
  return *m;
}

double number(const Json& j, std::string_view field) {
  const Json& v = member(j, field);
  if (!v.is_number()) bad(field, "must be a number");
  return v.get<double>();
}

std::string string(const Json& j, std::string_view field) {
  const Json& v = member(j, field);
  if (!v.is_string()) bad(field, "must be a string");
  return v.get<std::string>();
}

Json to_json(const Support& s) {
  return Json{{"lower", number_or_null(s.lo)}, {"upper", number_or_null(s.hi)}};
}

Support support_from_json(const Json& j) {
  Support s;
  const Json& lo = member(j, "lower");
  const Json& hi = member(j, "upper");
  if (!lo.is_null()) s.lo = number(j, "lower");
  if (!hi.is_null()) s.hi = number(j, "upper");
  if (!(s.lo < s.hi)) bad("support", "needs lower < upper");
  return s;
}

Json to_json(const Distribution& d) {
  Json j;
  j["family"] = to_string(d.family());
  if (const auto* m = d.get_if<MixtureParams>()) {
    Json comps = Json::array();
    for (const auto& c : m->components) comps.push_back(Json{{"weight", c.weight}, {"dist", to_json(*c.dist)}});
    j["components"] = std::move(comps);
  } else if (const auto* t = d.get_if<TabulatedParams>()) {
    j["x"] = t->x;
    j["pdf"] = t->pdf;
  } else {
    j["params"] = params_of(d);
  }
  return j;
}

Distribution distribution_from_json(const Json& j) {
  const Family f = family_field(j);
  try {
    switch (f) {
      case Family::normal: {
        const Json& p = member(j, "params");
        return Distribution::normal(number(p, "mean"), number(p, "sd"));
      }
      case Family::lognormal: {
        const Json& p = member(j, "params");
        return Distribution::lognormal(number(p, "mu"), number(p, "sigma"));
      }
      case Family::beta: {
        const Json& p = member(j, "params");
        return Distribution::beta(number(p, "alpha"), number(p, "beta"));
      }
      case Family::gamma: {
        const Json& p = member(j, "params");
        return Distribution::gamma(number(p, "shape"), number(p, "scale"));
      }
      case Family::mixture: {
        std::vector<std::pair<double, Distribution>> comps;
        for (const auto& c : array(j, "components")) {
          comps.emplace_back(number(c, "weight"), distribution_from_json(member(c, "dist")));
        }
        return Distribution::mixture(std::move(comps));
      }
      case Family::tabulated:
        return Distribution::tabulated(numbers(j, "x"), numbers(j, "pdf"));
    }
  } catch (const Error& e) {
    // Parameter range violations are request problems, not domain faults.
    if (e.code() == ErrorCode::domain) fail(ErrorCode::validation, e.what());
    throw;
  }
  bad("family", "is not supported");
}

Json to_json(const ElicitedJudgment& j) {
  return Json{{"quantity_id", j.quantity_id}, {"expert_id", j.expert_id}, {"minimum", j.minimum},
              {"q25", j.q25},  {"median", j.median}, {"q75", j.q75},
              {"maximum", j.maximum}, {"support", to_json(j.support)}};
}

ElicitedJudgment judgment_from_json(const Json& j) {
  ElicitedJudgment out;
  if (const Json* q = optional_member(j, "quantity_id")) {
    if (!q->is_string()) bad("quantity_id", "must be a string");
    out.quantity_id = q->get<std::string>();
  }
  if (const Json* e = optional_member(j, "expert_id")) {
    if (!e->is_string()) bad("expert_id", "must be a string");
    out.expert_id = e->get<std::string>();
  }
  out.minimum = number(j, "minimum");
  out.q25 = number(j, "q25");
  out.median = number(j, "median");
  out.q75 = number(j, "q75");
  out.maximum = number(j, "maximum");
  if (const Json* s = optional_member(j, "support")) out.support = support_from_json(*s);
  return out;
}

Json to_json(const FamilyCandidate& c) {
  Json j = to_json(c.distribution);
  j["sse"] = c.sse;
  return j;
}

Json to_json(const FitResult& f) {
  Json j = to_json(f.distribution);
  j["sse"] = f.sse;
  Json cands = Json::array();
  for (const auto& c : f.family_candidates) cands.push_back(to_json(c));
  j["candidates"] = std::move(cands);
  return j;
}

FitResult fit_from_json(const Json& j) {
  FitResult f{distribution_from_json(j), number(j, "sse"), {}};
  if (const Json* c = optional_member(j, "candidates")) {
    if (!c->is_array()) bad("candidates", "must be an array");
    for (const auto& item : *c) {
      Distribution d = distribution_from_json(item);
      const Family fam = d.family();
      f.family_candidates.push_back({fam, number(item, "sse"), std::move(d)});
    }
  }
  return f;
}

Json to_json(const WeightVector& w) {
  Json j{{"expert_ids", w.expert_ids}, {"weights", w.weights}, {"provenance", to_string(w.provenance)}};
  if (w.provenance == Provenance::classical_method) {
    j["alpha"] = w.alpha;
    Json cm = Json::array();
    for (const auto& c : w.cm) {
      cm.push_back(Json{{"calibration", c.calibration}, {"information", c.information},
                        {"cutoff_passed", c.cutoff_passed}});
    }
    j["cm"] = std::move(cm);
  }
  return j;
}

WeightVector weights_from_json(const Json& j) {
  WeightVector w;
  w.expert_ids = strings(j, "expert_ids");
  w.weights = numbers(j, "weights");
  if (const Json* p = optional_member(j, "provenance")) {
    if (!p->is_string()) bad("provenance", "must be a string");
    try {
      w.provenance = provenance_from_string(p->get<std::string>());
    } catch (const Error&) {
      bad("provenance", "is unknown");
    }
  }
  if (w.provenance == Provenance::classical_method) {
    w.alpha = number(j, "alpha");
    for (const auto& c : array(j, "cm")) {
      w.cm.push_back({number(c, "calibration"), number(c, "information"), boolean(c, "cutoff_passed")});
    }
  }
  if (w.expert_ids.size() != w.weights.size()) bad("weights", "must align with expert_ids");
  try {
    validate(w);
  } catch (const Error& e) {
    fail(ErrorCode::validation, e.what());
  }
  return w;
}

Json to_json(const cooke::CalibrationResult& r) {
  return Json{{"expert_id", r.expert_id}, {"hit_counts", r.hit_counts}, {"s", r.s},
              {"p", r.p},                 {"relent", r.relent},         {"calibration", r.calibration},
              {"information", r.information}, {"q", r.q}};
}

cooke::CalibrationResult calibration_from_json(const Json& j) {
  cooke::CalibrationResult r;
  r.expert_id = string(j, "expert_id");
  const Json& hits = array(j, "hit_counts");
  const auto s = numbers(j, "s");
  const auto p = numbers(j, "p");
  if (hits.size() != cooke::kRanges || s.size() != cooke::kRanges || p.size() != cooke::kRanges) {
    bad("hit_counts", "must hold one entry per interquantile range");
  }
  for (std::size_t k = 0; k < cooke::kRanges; ++k) {
    if (!hits[k].is_number_integer()) bad("hit_counts", "must be integers");
    r.hit_counts[k] = hits[k].get<int>();
    r.s[k] = s[k];
    r.p[k] = p[k];
  }
  r.relent = number(j, "relent");
  r.calibration = number(j, "calibration");
  r.information = number(j, "information");
  r.q = integer(j, "q");
  return r;
}

Json to_json(const cooke::SeedQuestion& q, bool include_truth) {
  Json judgments = Json::array();
  for (const auto& jd : q.judgments) judgments.push_back(to_json(jd));
  Json j{{"question_id", q.question_id}, {"text", q.text}, {"scale", to_string(q.scale)}};
  if (include_truth) j["truth"] = q.truth;
  j["judgments"] = std::move(judgments);
  return j;
}

cooke::SeedQuestion seed_from_json(const Json& j) {
  cooke::SeedQuestion q;
  q.question_id = string(j, "question_id");
  if (const Json* t = optional_member(j, "text")) {
    if (!t->is_string()) bad("text", "must be a string");
    q.text = t->get<std::string>();
  }
  q.truth = number(j, "truth");
  try {
    q.scale = scale_from_string(string(j, "scale"));
  } catch (const Error&) {
    bad("scale", "must be 'linear' or 'log'");
  }
  for (const auto& item : array(j, "judgments")) q.judgments.push_back(judgment_from_json(item));
  return q;
}

Json to_json(const cooke::Fold& f) {
  Json cal = Json::array();
  for (const auto& c : f.calibration) cal.push_back(to_json(c));
  Json fits = Json::array();
  for (const auto& e : f.expert_fits) fits.push_back(Json{{"expert_id", e.expert_id}, {"fit", to_json(e.fit)}});
  return Json{{"question_id", f.question_id}, {"weights", to_json(f.weights)},
              {"calibration", std::move(cal)}, {"expert_fits", std::move(fits)},
              {"pooled", to_json(f.pooled)},  {"equal_pool", to_json(f.equal_pool)}};
}

cooke::Fold fold_from_json(const Json& j) {
  std::vector<cooke::CalibrationResult> cal;
  for (const auto& c : array(j, "calibration")) cal.push_back(calibration_from_json(c));
  std::vector<cooke::ExpertFit> fits;
  for (const auto& e : array(j, "expert_fits")) {
    fits.push_back({string(e, "expert_id"), fit_from_json(member(e, "fit"))});
  }
  return {string(j, "question_id"), weights_from_json(member(j, "weights")), std::move(cal),
          std::move(fits), distribution_from_json(member(j, "pooled")),
          distribution_from_json(member(j, "equal_pool"))};
}

Json to_json(const scoring::ScoreTable& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    rows.push_back(Json{{"id", r.id},
                        {"brier", r.brier},
                        {"logarithmic", number_or_null(r.logarithmic)},
                        {"quadratic", r.quadratic},
                        {"infinite_logarithmic", r.infinite_logarithmic}});
  }
  return Json{{"question_count", t.question_count}, {"rows", std::move(rows)}};
}

Json to_json(const scoring::ErrorCorrelationMatrix& m) {
  return Json{{"ids", m.ids}, {"matrix", m.matrix}};
}

Json to_json(const trial::Parameter& p) {
  if (const double* v = std::get_if<double>(&p)) return *v;
  return to_json(std::get<Distribution>(p));
}

trial::Parameter parameter_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_object()) {
    // A stored fit carries its distribution fields at top level.
    return distribution_from_json(j);
  }
  fail(ErrorCode::validation, "trial parameter must be a number or a distribution");
}

Json to_json(const trial::TrialParameters& p) {
  return Json{{"eta", to_json(p.eta)},       {"psi", to_json(p.psi)},
              {"theta1", to_json(p.theta1)}, {"theta2", to_json(p.theta2)},
              {"theta3", to_json(p.theta3)}};
}

trial::TrialParameters trial_parameters_from_json(const Json& j) {
  trial::TrialParameters p;
  p.eta = parameter_from_json(member(j, "eta"));
  p.psi = parameter_from_json(member(j, "psi"));
  p.theta1 = parameter_from_json(member(j, "theta1"));
  p.theta2 = parameter_from_json(member(j, "theta2"));
  p.theta3 = parameter_from_json(member(j, "theta3"));
  return p;
}

Json to_json(const trial::CellProbabilities& c) {
  return Json{{"group", c.group}, {"et_positive", c.et_positive}};
}

Json to_json(const trial::IntervalEstimate& e) {
  return Json{{"estimate", e.estimate}, {"lower", e.lower}, {"upper", e.upper},
              {"level", e.level},       {"draws", e.draws}};
}

Json to_json(const trial::PatientSample& s) {
  Json groups = Json::array();
  for (int g = 0; g < trial::kGroups; ++g) {
    const auto gi = static_cast<std::size_t>(g);
    groups.push_back(Json{{"group", trial::to_string(static_cast<trial::RtGroup>(g))},
                          {"count", s.group[gi]},
                          {"et_positive", s.et_positive[gi]}});
  }
  Json patients = Json::array();
  for (const auto& p : s.patients) {
    patients.push_back(Json{{"group", trial::to_string(p.group)}, {"et_positive", p.et_positive}});
  }
  return Json{{"total", s.total}, {"counts", s.group}, {"groups", std::move(groups)},
              {"patients", std::move(patients)}};
}

}  // namespace elicit::json
