// elicit: batch analysis and the HTTP service.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "elicit/api.hpp"
#include "elicit/error.hpp"
#include "elicit/service.hpp"
#include "elicit/store.hpp"

namespace {

using elicit::ErrorCode;
using elicit::json::Json;
namespace api = elicit::api;
namespace store = elicit::store;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) elicit::fail(ErrorCode::not_found, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  f << text;
  if (!f) elicit::fail(ErrorCode::internal, "cannot write " + out);
}

int exit_code(ErrorCode code) {
  return code == ErrorCode::internal || code == ErrorCode::integration ? 1 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expert elicitation engine: fitting, pooling, Classical Method weights, scoring."};
  app.require_subcommand(1);

  std::string out;

  // fit
  auto* fit = app.add_subcommand("fit", "fit distributions to a five-point judgment");
  std::string judgment_file;
  std::optional<double> vmin, vq25, vmed, vq75, vmax, lower, upper;
  std::string family = "auto";
  fit->add_option("--judgment", judgment_file, "JSON judgment file");
  fit->add_option("--min", vmin);
  fit->add_option("--q25", vq25);
  fit->add_option("--median", vmed);
  fit->add_option("--q75", vq75);
  fit->add_option("--max", vmax);
  fit->add_option("--lower", lower, "support lower bound");
  fit->add_option("--upper", upper, "support upper bound");
  fit->add_option("--family", family, "auto, normal, lognormal, beta or gamma")->capture_default_str();
  fit->add_option("--out", out);

  // pool
  auto* pool = app.add_subcommand("pool", "linear or log-linear pool of distributions");
  std::string pool_input;
  std::string method;
  pool->add_option("--input", pool_input, "JSON with distributions, weights, method")->required();
  pool->add_option("--method", method, "overrides the input's method");
  pool->add_option("--out", out);

  // cm-weights and crossval
  std::string seeds;
  double alpha = elicit::cooke::kDefaultAlpha;
  bool optimize = false;
  auto* cmw = app.add_subcommand("cm-weights", "Classical Method weights from seed questions");
  cmw->add_option("--seeds", seeds, "seed CSV")->required();
  cmw->add_option("--alpha", alpha, "calibration cutoff")->capture_default_str();
  cmw->add_flag("--optimize-alpha", optimize, "choose the cutoff maximizing the pooled score");
  cmw->add_option("--out", out);

  auto* cv = app.add_subcommand("crossval", "leave-one-out cross-validation over the seeds");
  std::string consensus;
  cv->add_option("--seeds", seeds, "seed CSV")->required();
  cv->add_option("--alpha", alpha, "calibration cutoff")->capture_default_str();
  cv->add_flag("--optimize-alpha", optimize, "choose the cutoff maximizing the pooled score");
  cv->add_option("--consensus", consensus, "SHELF consensus CSV to score alongside");
  cv->add_option("--out", out);

  // score and correlations
  std::string folds;
  std::string truths;
  std::string json_out;
  std::string brier_scale = "raw";
  auto* score = app.add_subcommand("score", "score table from cross-validation folds");
  score->add_option("--folds", folds, "folds JSON from crossval")->required();
  score->add_option("--truths", truths, "seed CSV holding the truths")->required();
  score->add_option("--out", out, "CSV output");
  score->add_option("--json", json_out, "also write the table as JSON");
  score->add_option("--brier-scale", brier_scale, "raw or declared")->check(CLI::IsMember({"raw", "declared"}));

  auto* corr = app.add_subcommand("correlations", "correlations of median errors from folds");
  corr->add_option("--folds", folds, "folds JSON from crossval")->required();
  corr->add_option("--truths", truths, "seed CSV holding the truths")->required();
  corr->add_option("--out", out, "CSV output");
  corr->add_option("--json", json_out, "also write the matrix as JSON");

  // checks
  auto* checks = app.add_subcommand("checks", "trial-model elicitation checks");
  std::string params;
  api::CheckOptions check;
  checks->add_option("--params", params, "JSON with eta, psi, theta1..3 (numbers or distributions)")->required();
  checks->add_option("--total", check.total)->capture_default_str();
  checks->add_option("--draws", check.draws)->capture_default_str();
  checks->add_option("--level", check.level)->capture_default_str();
  checks->add_option("--seed", check.seed)->capture_default_str();
  checks->add_option("--out", out);

  // serve
  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  int port = 8080;
  if (const char* p = std::getenv("PORT"); p && *p) port = std::atoi(p);
  std::string data_dir;
  std::string host = "127.0.0.1";
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--data-dir", data_dir, "defaults to DATA_DIR or ./data");
  serve->add_option("--host", host)->capture_default_str();

  // export
  auto* exp = app.add_subcommand("export", "zip a session with score tables for archival");
  std::string session_id;
  std::vector<std::string> include;
  bool all_versions = false;
  exp->add_option("--data-dir", data_dir, "defaults to DATA_DIR or ./data");
  exp->add_option("--session", session_id)->required();
  exp->add_option("--include", include, "extra files (CSV score tables, folds)");
  exp->add_flag("--all-versions", all_versions, "every stored version, not just the latest");
  exp->add_option("--out", out, "bundle path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*fit) {
      Json body;
      if (!judgment_file.empty()) {
        body["judgment"] = elicit::json::parse(slurp(judgment_file));
      } else {
        if (!vmin || !vq25 || !vmed || !vq75 || !vmax) {
          elicit::fail(ErrorCode::validation, "fit needs --judgment or all of --min --q25 --median --q75 --max");
        }
        Json j{{"minimum", *vmin}, {"q25", *vq25}, {"median", *vmed}, {"q75", *vq75}, {"maximum", *vmax}};
        elicit::Support s;
        if (lower) s.lo = *lower;
        if (upper) s.hi = *upper;
        j["support"] = elicit::json::to_json(s);
        body["judgment"] = std::move(j);
      }
      body["family"] = family;
      emit(elicit::json::render(api::fit(body)), out);
    } else if (*pool) {
      Json body = elicit::json::parse(slurp(pool_input));
      if (!method.empty()) body["method"] = method;
      emit(elicit::json::render(api::pool(body)), out);
    } else if (*cmw) {
      elicit::cooke::CvOptions o = api::cv_options(Json{{"alpha", alpha}, {"optimize_alpha", optimize}});
      emit(elicit::json::render(api::cm_weights(store::load_seed_csv(seeds), o)), out);
    } else if (*cv) {
      elicit::cooke::CvOptions o = api::cv_options(Json{{"alpha", alpha}, {"optimize_alpha", optimize}});
      const auto dataset = store::load_seed_csv(seeds);
      std::optional<std::vector<elicit::ElicitedJudgment>> shelf;
      if (!consensus.empty()) shelf = store::load_consensus_csv(consensus);
      emit(elicit::json::render(api::crossval(dataset, o, shelf ? &*shelf : nullptr)), out);
    } else if (*score) {
      elicit::scoring::ScoreOptions o;
      if (brier_scale == "declared") o.brier_scale = elicit::scoring::BrierScale::declared;
      const auto e = api::evaluands_from_folds(elicit::json::parse(slurp(folds)), store::load_seed_csv(truths));
      const auto table = api::score_folds(e, o);
      if (!json_out.empty()) emit(elicit::json::render(elicit::json::to_json(table)), json_out);
      if (!out.empty()) emit(api::score_table_csv(table), out);
      std::cout << api::score_table_text(table);
    } else if (*corr) {
      const auto e = api::evaluands_from_folds(elicit::json::parse(slurp(folds)), store::load_seed_csv(truths));
      const auto m = api::correlate_folds(e);
      if (!json_out.empty()) emit(elicit::json::render(elicit::json::to_json(m)), json_out);
      if (!out.empty()) emit(api::correlations_csv(m), out);
      std::cout << api::correlations_text(m);
    } else if (*checks) {
      const auto p = elicit::json::trial_parameters_from_json(elicit::json::parse(slurp(params)));
      emit(elicit::json::render(api::checks(p, check)), out);
    } else if (*serve) {
      auto config = elicit::service::config_from_env(
          data_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(data_dir));
      elicit::service::serve(config, host, port);
    } else if (*exp) {
      auto config = elicit::service::config_from_env(
          data_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(data_dir));
      store::Store st(config.data_dir);
      std::vector<std::pair<std::string, std::string>> entries;
      const auto versions = st.versions(session_id);
      if (versions.empty()) elicit::fail(ErrorCode::not_found, "unknown session '" + session_id + "'");
      for (int v : versions) {
        if (!all_versions && v != versions.back()) continue;
        entries.emplace_back(session_id + "/" + fmt::format("v{:06d}.json", v),
                             elicit::json::render(store::to_json(st.load(session_id, v))));
      }
      for (const auto& f : include) {
        entries.emplace_back(std::filesystem::path(f).filename().string(), slurp(f));
      }
      store::write_bundle(out, entries);
    }
  } catch (const elicit::Error& e) {
    std::cerr << "error [" << elicit::to_string(e.code()) << "]: " << e.what() << "\n";
    if (const auto* v = dynamic_cast<const elicit::ValidationErrors*>(&e)) {
      for (const auto& p : v->problems()) std::cerr << "  " << p << "\n";
    }
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error [internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
