#include "elicit/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <system_error>

#include <boost/tokenizer.hpp>
#include <fmt/format.h>
#include <zlib.h>

#include "elicit/error.hpp"

namespace elicit::store {
namespace fs = std::filesystem;

namespace {

using json::member;
using json::number;
using json::optional_member;
using json::string;

std::string opt_string(const Json& j, std::string_view field) {
  const Json* v = optional_member(j, field);
  if (v == nullptr || v->is_null()) return {};
  if (!v->is_string()) fail(ErrorCode::validation, "field '" + std::string(field) + "' must be a string");
  return v->get<std::string>();
}

const Json& array_of(const Json& j, std::string_view field) {
  const Json& a = member(j, field);
  if (!a.is_array()) fail(ErrorCode::validation, "field '" + std::string(field) + "' must be an array");
  return a;
}

Json to_json(const Quantity& q) {
  Json fams = Json::array();
  for (Family f : q.families) fams.push_back(to_string(f));
  Json j{{"quantity_id", q.quantity_id}, {"label", q.label}, {"support", json::to_json(q.support)},
         {"scale", to_string(q.scale)}, {"families", std::move(fams)}};
  j["trial_parameter"] = q.trial_parameter ? Json(*q.trial_parameter) : Json(nullptr);
  return j;
}

Quantity quantity_from_json(const Json& j) {
  Quantity q;
  q.quantity_id = string(j, "quantity_id");
  q.label = opt_string(j, "label");
  if (const Json* s = optional_member(j, "support")) q.support = json::support_from_json(*s);
  if (const Json* s = optional_member(j, "scale")) {
    if (!s->is_string()) fail(ErrorCode::validation, "field 'scale' must be a string");
    try {
      q.scale = scale_from_string(s->get<std::string>());
    } catch (const Error&) {
      fail(ErrorCode::validation, "field 'scale' must be 'linear' or 'log'");
    }
  }
  if (const Json* f = optional_member(j, "families")) {
    if (!f->is_array()) fail(ErrorCode::validation, "field 'families' must be an array");
    q.families.clear();
    for (const auto& name : *f) {
      if (!name.is_string()) fail(ErrorCode::validation, "field 'families' must hold family names");
      try {
        q.families.push_back(family_from_string(name.get<std::string>()));
      } catch (const Error&) {
        fail(ErrorCode::validation, "unknown family '" + name.get<std::string>() + "'");
      }
    }
  }
  const std::string tp = opt_string(j, "trial_parameter");
  if (!tp.empty()) q.trial_parameter = tp;
  return q;
}

Json to_json(const Expert& e) {
  Json ratings = Json::object();
  for (const auto& [k, v] : e.self_assessment.ratings) ratings[k] = v;
  return Json{{"expert_id", e.expert_id},
              {"name", e.name},
              {"self_assessment", Json{{"ratings", std::move(ratings)},
                                       {"strengths", e.self_assessment.strengths},
                                       {"weaknesses", e.self_assessment.weaknesses}}}};
}

Expert expert_from_json(const Json& j) {
  Expert e;
  e.expert_id = string(j, "expert_id");
  e.name = opt_string(j, "name");
  if (const Json* sa = optional_member(j, "self_assessment")) {
    if (const Json* r = optional_member(*sa, "ratings")) {
      if (!r->is_object()) fail(ErrorCode::validation, "field 'ratings' must be an object");
      for (const auto& [k, v] : r->items()) {
        if (!v.is_number_integer()) fail(ErrorCode::validation, "rating '" + k + "' must be an integer");
        e.self_assessment.ratings.emplace_back(k, v.get<int>());
      }
    }
    e.self_assessment.strengths = opt_string(*sa, "strengths");
    e.self_assessment.weaknesses = opt_string(*sa, "weaknesses");
  }
  return e;
}

// ---- CSV ----

using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;

std::vector<std::string> split_csv(const std::string& line) {
  Tokenizer tok(line, boost::escaped_list_separator<char>('\\', ',', '"'));
  std::vector<std::string> out;
  for (auto& cell : tok) {
    const auto b = cell.find_first_not_of(" \t");
    const auto e = cell.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::pair<int, std::vector<std::string>>> rows;  // (line number, cells)
};

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  int line_no = 0;
  std::vector<std::string> problems;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> cells;
    try {
      cells = split_csv(line);
    } catch (const boost::escaped_list_error& e) {
      problems.push_back(fmt::format("line {}: malformed CSV ({})", line_no, e.what()));
      continue;
    }
    if (t.header.empty()) {
      t.header = std::move(cells);
    } else {
      t.rows.emplace_back(line_no, std::move(cells));
    }
  }
  if (!problems.empty()) throw ValidationErrors(ErrorCode::csv, "CSV could not be parsed", problems);
  if (t.header.empty()) fail(ErrorCode::csv, "CSV is empty; a header row is required");
  return t;
}

std::map<std::string, std::size_t> column_index(const CsvTable& t, const std::vector<std::string>& required) {
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < t.header.size(); ++i) idx[t.header[i]] = i;
  std::vector<std::string> missing;
  for (const auto& c : required) {
    if (!idx.count(c)) missing.push_back(c);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw ValidationErrors(ErrorCode::csv, "CSV is missing required columns: " + list,
                           {"header: missing column(s) " + list});
  }
  return idx;
}

bool parse_double(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  const char* b = cell.data();
  const char* e = b + cell.size();
  if (*b == '+') ++b;
  const auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && ptr == e && std::isfinite(out);
}

// Reads the five judgment columns; returns false after recording problems.
bool read_five(const std::vector<std::string>& cells, const std::map<std::string, std::size_t>& idx, int line,
               ElicitedJudgment& j, std::vector<std::string>& problems) {
  static const char* names[] = {"min", "q25", "median", "q75", "max"};
  double* slots[] = {&j.minimum, &j.q25, &j.median, &j.q75, &j.maximum};
  bool ok = true;
  for (int k = 0; k < 5; ++k) {
    const std::string& cell = cells[idx.at(names[k])];
    if (!parse_double(cell, *slots[k])) {
      problems.push_back(fmt::format("line {}: column {} is not a finite number ('{}')", line, names[k], cell));
      ok = false;
    }
  }
  if (!ok) return false;
  for (int k = 0; k < 4; ++k) {
    if (!(*slots[k] < *slots[k + 1])) {
      problems.push_back(fmt::format("line {}: quantile_order: {} ({}) must be < {} ({})", line, names[k],
                                     cells[idx.at(names[k])], names[k + 1], cells[idx.at(names[k + 1])]));
      return false;
    }
  }
  return true;
}

bool width_ok(const CsvTable& t, const std::vector<std::string>& cells, int line, std::vector<std::string>& problems) {
  if (cells.size() == t.header.size()) return true;
  problems.push_back(fmt::format("line {}: expected {} cells, found {}", line, t.header.size(), cells.size()));
  return false;
}

// ---- files ----

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::not_found, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_all(int fd, const std::string& data, const fs::path& p) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(ErrorCode::internal, "write failed for " + p.string() + ": " + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

fs::path temp_name(const fs::path& dir) {
  static std::atomic<unsigned> counter{0};
  return dir / fmt::format(".tmp-{}-{}-{}", ::getpid(), counter.fetch_add(1),
                           std::chrono::steady_clock::now().time_since_epoch().count());
}

// Writes `data` to a fresh temp file and publishes it under `target` with
// link(2). Returns false if `target` already exists.
bool publish(const fs::path& target, const std::string& data) {
  const fs::path tmp = temp_name(target.parent_path());
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_EXCL, 0644);
  if (fd < 0) fail(ErrorCode::internal, "cannot create " + tmp.string() + ": " + std::strerror(errno));
  try {
    write_all(fd, data, tmp);
    if (::fsync(fd) != 0) fail(ErrorCode::internal, "fsync failed for " + tmp.string());
  } catch (...) {
    ::close(fd);
    ::unlink(tmp.c_str());
    throw;
  }
  ::close(fd);
  const int rc = ::link(tmp.c_str(), target.c_str());
  const int err = errno;
  ::unlink(tmp.c_str());
  if (rc == 0) return true;
  if (err == EEXIST) return false;
  fail(ErrorCode::internal, "cannot publish " + target.string() + ": " + std::strerror(err));
}

std::string version_file(int v) { return fmt::format("v{:06d}.json", v); }

void require_id(std::string_view id, std::string_view what) {
  if (!valid_id(id)) fail(ErrorCode::validation, fmt::format("invalid {} id '{}'", what, id));
}

// ---- zip ----

void put16(std::string& out, unsigned v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put32(std::string& out, unsigned long v) {
  put16(out, static_cast<unsigned>(v & 0xffff));
  put16(out, static_cast<unsigned>((v >> 16) & 0xffff));
}

}  // namespace

Json to_json(const Session& s) {
  Json quantities = Json::array();
  for (const auto& q : s.quantities) quantities.push_back(to_json(q));
  Json experts = Json::array();
  for (const auto& e : s.experts) experts.push_back(to_json(e));
  Json judgments = Json::array();
  for (const auto& r : s.judgments) {
    judgments.push_back(Json{{"judgment", json::to_json(r.judgment)},
                             {"fit", json::to_json(r.fit)},
                             {"override_family", r.override_family ? Json(to_string(*r.override_family)) : Json(nullptr)},
                             {"updated_at", r.updated_at}});
  }
  Json consensus = Json::array();
  for (const auto& c : s.consensus) {
    consensus.push_back(Json{{"judgment", json::to_json(c.judgment)},
                             {"fit", json::to_json(c.fit)},
                             {"updated_at", c.updated_at}});
  }
  Json notes = Json::array();
  for (const auto& n : s.notes) notes.push_back(Json{{"at", n.at}, {"author", n.author}, {"text", n.text}});
  Json log = Json::array();
  for (const auto& e : s.audit_log) log.push_back(Json{{"at", e.at}, {"event", e.event}, {"detail", e.detail}});
  return Json{{"session_id", s.session_id},     {"version", s.version},
              {"stage", to_string(s.stage)},    {"created_at", s.created_at},
              {"quantities", std::move(quantities)}, {"experts", std::move(experts)},
              {"judgments", std::move(judgments)},   {"consensus", std::move(consensus)},
              {"notes", std::move(notes)},           {"audit_log", std::move(log)}};
}

Session session_from_json(const Json& j) {
  Session s;
  s.session_id = string(j, "session_id");
  if (const Json* v = optional_member(j, "version")) {
    if (!v->is_number_integer()) fail(ErrorCode::validation, "field 'version' must be an integer");
    s.version = v->get<int>();
  }
  s.stage = stage_from_string(string(j, "stage"));
  s.created_at = string(j, "created_at");
  for (const auto& q : array_of(j, "quantities")) s.quantities.push_back(quantity_from_json(q));
  for (const auto& e : array_of(j, "experts")) s.experts.push_back(expert_from_json(e));
  for (const auto& r : array_of(j, "judgments")) {
    JudgmentRecord rec{json::judgment_from_json(member(r, "judgment")), json::fit_from_json(member(r, "fit")),
                       std::nullopt, string(r, "updated_at")};
    const std::string o = opt_string(r, "override_family");
    if (!o.empty()) rec.override_family = family_from_string(o);
    s.judgments.push_back(std::move(rec));
  }
  for (const auto& c : array_of(j, "consensus")) {
    s.consensus.push_back({json::judgment_from_json(member(c, "judgment")), json::fit_from_json(member(c, "fit")),
                           string(c, "updated_at")});
  }
  for (const auto& n : array_of(j, "notes")) s.notes.push_back({string(n, "at"), string(n, "author"), string(n, "text")});
  for (const auto& e : array_of(j, "audit_log")) {
    const Json* d = optional_member(e, "detail");
    s.audit_log.push_back({string(e, "at"), string(e, "event"), d ? *d : Json::object()});
  }
  return s;
}

Json to_json(const SeedDataset& d, View view) {
  Json qs = Json::array();
  for (const auto& q : d.questions) qs.push_back(json::to_json(q, view == View::facilitator));
  return Json{{"dataset_id", d.dataset_id}, {"questions", std::move(qs)}};
}

SeedDataset dataset_from_json(const Json& j) {
  SeedDataset d;
  d.dataset_id = string(j, "dataset_id");
  for (const auto& q : array_of(j, "questions")) d.questions.push_back(json::seed_from_json(q));
  validate(d);
  return d;
}

void validate(const SeedDataset& d) {
  require_id(d.dataset_id, "dataset");
  if (d.questions.empty()) fail(ErrorCode::validation, "dataset '" + d.dataset_id + "' has no questions");
  std::set<std::string> ids;
  for (const auto& q : d.questions) {
    if (!ids.insert(q.question_id).second) {
      fail(ErrorCode::validation, "duplicate question id '" + q.question_id + "'");
    }
    cooke::validate(q);
  }
}

SeedDataset load_seed_csv(std::istream& in, std::string dataset_id) {
  const CsvTable t = read_csv(in);
  const auto idx = column_index(t, {"question_id", "expert_id", "min", "q25", "median", "q75", "max", "truth", "scale"});
  const bool has_text = idx.count("text") > 0;

  SeedDataset d;
  d.dataset_id = std::move(dataset_id);
  std::vector<std::string> problems;
  std::map<std::string, std::size_t> question_at;
  std::map<std::string, int> first_line;
  std::set<std::pair<std::string, std::string>> seen;

  for (const auto& [line, cells] : t.rows) {
    if (!width_ok(t, cells, line, problems)) continue;
    const std::string& qid = cells[idx.at("question_id")];
    const std::string& eid = cells[idx.at("expert_id")];
    if (qid.empty() || eid.empty()) {
      problems.push_back(fmt::format("line {}: question_id and expert_id must be nonempty", line));
      continue;
    }
    if (!seen.insert({qid, eid}).second) {
      problems.push_back(fmt::format("line {}: duplicate row for question '{}' and expert '{}' (first on line {})",
                                     line, qid, eid, first_line[qid + "\x1f" + eid]));
      continue;
    }
    first_line[qid + "\x1f" + eid] = line;

    double truth = 0.0;
    bool ok = true;
    if (!parse_double(cells[idx.at("truth")], truth)) {
      problems.push_back(fmt::format("line {}: column truth is not a finite number ('{}')", line,
                                     cells[idx.at("truth")]));
      ok = false;
    }
    Scale scale = Scale::linear;
    try {
      scale = scale_from_string(cells[idx.at("scale")]);
    } catch (const Error&) {
      problems.push_back(fmt::format("line {}: scale must be 'linear' or 'log', not '{}'", line,
                                     cells[idx.at("scale")]));
      ok = false;
    }
    ElicitedJudgment j;
    j.quantity_id = qid;
    j.expert_id = eid;
    if (!read_five(cells, idx, line, j, problems)) ok = false;
    if (!ok) continue;
    if (scale == Scale::log) {
      j.support = Support{0.0, std::numeric_limits<double>::infinity()};
      if (!(j.minimum > 0.0) || !(truth > 0.0)) {
        problems.push_back(fmt::format("line {}: log-scale rows need positive values and truth", line));
        continue;
      }
    }

    auto it = question_at.find(qid);
    if (it == question_at.end()) {
      cooke::SeedQuestion q;
      q.question_id = qid;
      q.text = has_text ? cells[idx.at("text")] : std::string();
      q.truth = truth;
      q.scale = scale;
      question_at[qid] = d.questions.size();
      d.questions.push_back(std::move(q));
      it = question_at.find(qid);
    }
    cooke::SeedQuestion& q = d.questions[it->second];
    if (q.truth != truth || q.scale != scale) {
      problems.push_back(fmt::format("line {}: question '{}' has a different truth or scale than its earlier rows",
                                     line, qid));
      continue;
    }
    q.judgments.push_back(std::move(j));
  }
  if (!problems.empty()) {
    std::string msg = fmt::format("seed CSV has {} invalid row(s): {}", problems.size(), problems.front());
    throw ValidationErrors(ErrorCode::csv, msg, problems);
  }
  validate(d);
  return d;
}

SeedDataset load_seed_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::not_found, "cannot open seed CSV " + path.string());
  std::string id = path.stem().string();
  if (!valid_id(id)) id = "dataset";
  return load_seed_csv(in, id);
}

std::vector<ElicitedJudgment> load_consensus_csv(std::istream& in) {
  const CsvTable t = read_csv(in);
  const auto idx = column_index(t, {"question_id", "min", "q25", "median", "q75", "max"});
  std::vector<ElicitedJudgment> out;
  std::vector<std::string> problems;
  std::set<std::string> seen;
  for (const auto& [line, cells] : t.rows) {
    if (!width_ok(t, cells, line, problems)) continue;
    ElicitedJudgment j;
    j.quantity_id = cells[idx.at("question_id")];
    j.expert_id = "SHELF";
    if (!seen.insert(j.quantity_id).second) {
      problems.push_back(fmt::format("line {}: duplicate consensus for question '{}'", line, j.quantity_id));
      continue;
    }
    if (read_five(cells, idx, line, j, problems)) out.push_back(std::move(j));
  }
  if (!problems.empty()) {
    throw ValidationErrors(ErrorCode::csv,
                           fmt::format("consensus CSV has {} invalid row(s): {}", problems.size(), problems.front()),
                           problems);
  }
  return out;
}

std::vector<ElicitedJudgment> load_consensus_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::not_found, "cannot open consensus CSV " + path.string());
  return load_consensus_csv(in);
}

Store::Store(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_ / "sessions");
  fs::create_directories(root_ / "datasets");
}

fs::path Store::session_dir(std::string_view id) const {
  require_id(id, "session");
  return root_ / "sessions" / std::string(id);
}

Session Store::create(Session s) {
  s.version = 0;
  validate(s);
  const fs::path dir = session_dir(s.session_id);
  std::error_code ec;
  if (!fs::create_directory(dir, ec)) {
    if (ec) fail(ErrorCode::internal, "cannot create " + dir.string() + ": " + ec.message());
    fail(ErrorCode::version_conflict, "session '" + s.session_id + "' already exists");
  }
  s.version = 1;
  if (!publish(dir / version_file(1), json::render(to_json(s)))) {
    fail(ErrorCode::version_conflict, "session '" + s.session_id + "' already exists");
  }
  return s;
}

int Store::save(Session& s) {
  validate(s);
  const fs::path dir = session_dir(s.session_id);
  const auto existing = versions(s.session_id);
  if (existing.empty()) fail(ErrorCode::not_found, "unknown session '" + s.session_id + "'");
  if (s.version != existing.back()) {
    fail(ErrorCode::version_conflict, fmt::format("session '{}' is at version {}, save was based on version {}",
                                                  s.session_id, existing.back(), s.version));
  }
  Session next = s;
  next.version = s.version + 1;
  if (!publish(dir / version_file(next.version), json::render(to_json(next)))) {
    fail(ErrorCode::version_conflict,
         fmt::format("session '{}' version {} was written concurrently", s.session_id, next.version));
  }
  s.version = next.version;
  return s.version;
}

std::vector<int> Store::versions(std::string_view session_id) const {
  const fs::path dir = session_dir(session_id);
  std::vector<int> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() == 12 && name[0] == 'v' && name.substr(7) == ".json") {
      int v = 0;
      const auto [p, err] = std::from_chars(name.data() + 1, name.data() + 7, v);
      if (err == std::errc() && p == name.data() + 7) out.push_back(v);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Session Store::load(std::string_view session_id) const {
  const auto v = versions(session_id);
  if (v.empty()) fail(ErrorCode::not_found, "unknown session '" + std::string(session_id) + "'");
  return load(session_id, v.back());
}

Session Store::load(std::string_view session_id, int version) const {
  const fs::path p = session_dir(session_id) / version_file(version);
  std::error_code ec;
  if (!fs::exists(p, ec)) {
    fail(ErrorCode::not_found, fmt::format("session '{}' has no version {}", session_id, version));
  }
  Session s = session_from_json(json::parse(read_file(p)));
  s.version = version;
  return s;
}

std::vector<std::string> Store::sessions() const {
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(root_ / "sessions")) {
    if (entry.is_directory()) out.push_back(entry.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void Store::save_dataset(const SeedDataset& d) {
  validate(d);
  const fs::path target = root_ / "datasets" / (d.dataset_id + ".json");
  const fs::path tmp = temp_name(target.parent_path());
  {
    std::ofstream out(tmp, std::ios::binary);
    out << json::render(to_json(d));
    if (!out) fail(ErrorCode::internal, "cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

SeedDataset Store::load_dataset(std::string_view dataset_id) const {
  require_id(dataset_id, "dataset");
  const fs::path p = root_ / "datasets" / (std::string(dataset_id) + ".json");
  std::error_code ec;
  if (!fs::exists(p, ec)) fail(ErrorCode::not_found, "unknown dataset '" + std::string(dataset_id) + "'");
  return dataset_from_json(json::parse(read_file(p)));
}

std::string bundle_bytes(const std::vector<std::pair<std::string, std::string>>& entries) {
  // Stored (method 0) entries, DOS date fixed at 1980-01-01 so bundles are reproducible.
  constexpr unsigned kDosDate = (0u << 9) | (1u << 5) | 1u;
  std::string out;
  std::string central;
  for (const auto& [name, data] : entries) {
    if (name.empty() || name.size() > 0xffff || data.size() > 0xffffffffu) {
      fail(ErrorCode::validation, "bundle entry '" + name + "' cannot be stored");
    }
    const unsigned long crc =
        crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size()));
    const auto offset = static_cast<unsigned long>(out.size());
    put32(out, 0x04034b50);
    put16(out, 20);
    put16(out, 0x0800);  // UTF-8 names
    put16(out, 0);
    put16(out, 0);
    put16(out, kDosDate);
    put32(out, crc);
    put32(out, data.size());
    put32(out, data.size());
    put16(out, static_cast<unsigned>(name.size()));
    put16(out, 0);
    out += name;
    out += data;

    put32(central, 0x02014b50);
    put16(central, 20);
    put16(central, 20);
    put16(central, 0x0800);
    put16(central, 0);
    put16(central, 0);
    put16(central, kDosDate);
    put32(central, crc);
    put32(central, data.size());
    put32(central, data.size());
    put16(central, static_cast<unsigned>(name.size()));
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put32(central, 0);
    put32(central, offset);
    central += name;
  }
  const auto central_offset = static_cast<unsigned long>(out.size());
  out += central;
  put32(out, 0x06054b50);
  put16(out, 0);
  put16(out, 0);
  put16(out, static_cast<unsigned>(entries.size()));
  put16(out, static_cast<unsigned>(entries.size()));
  put32(out, central.size());
  put32(out, central_offset);
  put16(out, 0);
  return out;
}

void write_bundle(const fs::path& path, const std::vector<std::pair<std::string, std::string>>& entries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::internal, "cannot write bundle " + path.string());
  out << bundle_bytes(entries);
  if (!out) fail(ErrorCode::internal, "cannot write bundle " + path.string());
}

}  // namespace elicit::store
