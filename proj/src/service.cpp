#include "elicit/service.hpp"

#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

#include <httplib.h>

#include "elicit/api.hpp"
#include "elicit/error.hpp"
#include "elicit/store.hpp"

namespace elicit::service {
namespace {

using json::Json;

constexpr const char* kJson = "application/json";

struct Context {
  Config config;
  store::Store store;
};

void send(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(json::render(body), kJson);
}

void send_error(httplib::Response& res, const Error& e) {
  send(res, api::http_status(e.code()), api::error_json(e));
}

Json body_of(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  Json j = json::parse(req.body);
  if (!j.is_object()) fail(ErrorCode::validation, "request body must be a JSON object");
  return j;
}

void require_facilitator(const Context& ctx, const httplib::Request& req) {
  if (!ctx.config.facilitator_token) return;
  if (req.get_header_value(kFacilitatorHeader) != *ctx.config.facilitator_token) {
    fail(ErrorCode::unauthorized, "this endpoint needs the facilitator token in " + std::string(kFacilitatorHeader));
  }
}

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

// Engine errors become ApiError bodies; anything else is a 500 with code internal.
Handler guarded(Handler h) {
  return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
    try {
      h(req, res);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const nlohmann::json::exception& e) {
      send(res, 400, api::error_json(ErrorCode::validation, e.what()));
    } catch (const std::exception& e) {
      send(res, 500, api::error_json(ErrorCode::internal, e.what()));
    }
  };
}

// The base version a mutation is applied to: the body's "version" if given.
store::Session load_for_update(Context& ctx, const std::string& id, const Json& body) {
  store::Session s = ctx.store.load(id);
  if (const Json* v = json::optional_member(body, "version"); v && !v->is_null()) {
    if (!v->is_number_integer()) fail(ErrorCode::validation, "field 'version' must be an integer");
    if (v->get<int>() != s.version) {
      fail(ErrorCode::version_conflict, "session '" + id + "' is at version " + std::to_string(s.version) +
                                            ", request was based on version " + std::to_string(v->get<int>()));
    }
  }
  return s;
}

void send_versioned(httplib::Response& res, const store::Session& s, const Json& body) {
  res.set_header("X-Session-Version", std::to_string(s.version));
  send(res, 200, body);
}

std::optional<Family> override_of(const Json& body) {
  const Json* f = json::optional_member(body, "family");
  if (f == nullptr || f->is_null() || *f == "auto") return std::nullopt;
  if (!f->is_string()) fail(ErrorCode::validation, "field 'family' must be a string");
  try {
    return family_from_string(f->get<std::string>());
  } catch (const Error&) {
    fail(ErrorCode::validation, "unknown family '" + f->get<std::string>() + "'");
  }
}

template <class T>
T query_number(const httplib::Request& req, const char* name, T fallback) {
  if (!req.has_param(name)) return fallback;
  const std::string v = req.get_param_value(name);
  try {
    std::size_t used = 0;
    T out;
    if constexpr (std::is_same_v<T, double>) {
      out = std::stod(v, &used);
    } else {
      out = static_cast<T>(std::stoll(v, &used));
    }
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    fail(ErrorCode::validation, std::string("query parameter '") + name + "' must be a number");
  }
}

api::CheckOptions check_options(const httplib::Request& req) {
  api::CheckOptions o;
  o.total = query_number<int>(req, "total", o.total);
  o.draws = query_number<int>(req, "draws", o.draws);
  o.level = query_number<double>(req, "level", o.level);
  o.seed = query_number<std::uint64_t>(req, "seed", o.seed);
  return o;
}

store::SeedDataset dataset_of(Context& ctx, const Json& body) {
  return ctx.store.load_dataset(json::string(body, "dataset_id"));
}

void routes(httplib::Server& server, std::shared_ptr<Context> ctx) {
  const std::string id = "([A-Za-z0-9_.-]+)";

  server.Get("/health", guarded([](const httplib::Request&, httplib::Response& res) {
               send(res, 200, Json{{"status", "ok"}});
             }));

  server.Post("/sessions", guarded([ctx](const httplib::Request& req, httplib::Response& res) {
                const Json body = body_of(req);
                Json doc{{"session_id", json::string(body, "session_id")},
                         {"stage", "setup"},
                         {"created_at", ""},
                         {"quantities", json::member(body, "quantities")},
                         {"experts", json::member(body, "experts")},
                         {"judgments", Json::array()},
                         {"consensus", Json::array()},
                         {"notes", Json::array()},
                         {"audit_log", Json::array()}};
                const store::Session parsed = store::session_from_json(doc);
                store::Session s = ctx->store.create(
                    store::new_session(parsed.session_id, parsed.quantities, parsed.experts));
                res.set_header("X-Session-Version", std::to_string(s.version));
                send(res, 201, store::to_json(s));
              }));

  server.Get("/sessions/" + id, guarded([ctx](const httplib::Request& req, httplib::Response& res) {
               const store::Session s = ctx->store.load(req.matches[1].str());
               send_versioned(res, s, store::to_json(s));
             }));

  server.Put("/sessions/" + id + "/stage", guarded([ctx](const httplib::Request& req, httplib::Response& res) {
               require_facilitator(*ctx, req);
               const Json body = body_of(req);
               store::Session s = load_for_update(*ctx, req.matches[1].str(), body);
               store::set_stage(s, store::stage_from_string(json::string(body, "stage")));
               ctx->store.save(s);
               send_versioned(res, s, store::to_json(s));
             }));

  server.Put("/sessions/" + id + "/judgments/" + id + "/" + id,
             guarded([ctx](const httplib::Request& req, httplib::Response& res) {
               const Json body = body_of(req);
               store::Session s = load_for_update(*ctx, req.matches[1].str(), body);
               ElicitedJudgment j = json::judgment_from_json(body);
               j.expert_id = req.matches[2].str();
               j.quantity_id = req.matches[3].str();
               const auto& record = store::put_judgment(s, std::move(j), override_of(body));
               const Json fit = json::to_json(record.fit);
               ctx->store.save(s);
               send_versioned(res, s, fit);
             }));

  server.Get("/sessions/" + id + "/overlay/" + id, guarded([ctx](const httplib::Request& req, httplib::Response& res) {
               const store::Session s = ctx->store.load(req.matches[1].str());
               send_versioned(res, s, api::overlay(s, req.matches[2].str()));
             }));

  server.Put("/sessions/" + id + "/consensus/" + id,
             guarded([ctx](const httplib::Request& req, httplib::Response& res) {
               require_facilitator(*ctx, req);
               const Json body = body_of(req);
               store::Session s = load_for_update(*ctx, req.matches[1].str(), body);
               ElicitedJudgment j = json::judgment_from_json(body);
               j.quantity_id = req.matches[2].str();
               const auto& record = store::put_consensus(s, std::move(j));
               const Json fit = json::to_json(record.fit);
               ctx->store.save(s);
               send_versioned(res, s, fit);
             }));

  server.Post("/sessions/" + id + "/notes", guarded([ctx](const httplib::Request& req, httplib::Response& res) {
                const Json body = body_of(req);
                store::Session s = load_for_update(*ctx, req.matches[1].str(), body);
                std::string author;
                if (const Json* a = json::optional_member(body, "author"); a && a->is_string()) {
                  author = a->get<std::string>();
                }
                store::add_note(s, author, json::string(body, "text"));
                ctx->store.save(s);
                send_versioned(res, s, store::to_json(s));
              }));

  server.Get("/sessions/" + id + "/checks/delayed-positive",
             guarded([ctx](const httplib::Request& req, httplib::Response& res) {
               const store::Session s = ctx->store.load(req.matches[1].str());
               send_versioned(res, s, api::delayed_positive(api::session_trial_parameters(s), check_options(req)));
             }));

  server.Get("/sessions/" + id + "/checks/patient-sample",
             guarded([ctx](const httplib::Request& req, httplib::Response& res) {
               const store::Session s = ctx->store.load(req.matches[1].str());
               send_versioned(res, s, api::patient_sample(api::session_trial_parameters(s), check_options(req).total));
             }));

  server.Post("/fit", guarded([](const httplib::Request& req, httplib::Response& res) {
                send(res, 200, api::fit(body_of(req)));
              }));

  server.Post("/pool", guarded([](const httplib::Request& req, httplib::Response& res) {
                send(res, 200, api::pool(body_of(req)));
              }));

  server.Post("/datasets", guarded([ctx](const httplib::Request& req, httplib::Response& res) {
                require_facilitator(*ctx, req);
                const Json body = body_of(req);
                store::SeedDataset d;
                if (const Json* csv = json::optional_member(body, "csv")) {
                  if (!csv->is_string()) fail(ErrorCode::validation, "field 'csv' must be a string");
                  std::istringstream in(csv->get<std::string>());
                  d = store::load_seed_csv(in, json::string(body, "dataset_id"));
                } else {
                  d = store::dataset_from_json(body);
                }
                ctx->store.save_dataset(d);
                send(res, 201, store::to_json(d, store::View::expert));
              }));

  server.Get("/datasets/" + id, guarded([ctx](const httplib::Request& req, httplib::Response& res) {
               const store::SeedDataset d = ctx->store.load_dataset(req.matches[1].str());
               const bool full = req.get_param_value("view") == "facilitator";
               if (full) require_facilitator(*ctx, req);
               send(res, 200, store::to_json(d, full ? store::View::facilitator : store::View::expert));
             }));

  server.Post("/cm/weights", guarded([ctx](const httplib::Request& req, httplib::Response& res) {
                require_facilitator(*ctx, req);
                const Json body = body_of(req);
                send(res, 200, api::cm_weights(dataset_of(*ctx, body), api::cv_options(body)));
              }));

  server.Post("/cm/crossval", guarded([ctx](const httplib::Request& req, httplib::Response& res) {
                require_facilitator(*ctx, req);
                const Json body = body_of(req);
                send(res, 200, api::crossval(dataset_of(*ctx, body), api::cv_options(body)));
              }));

  server.Post("/scores", guarded([](const httplib::Request& req, httplib::Response& res) {
                send(res, 200, api::scores(body_of(req)));
              }));

  server.Post("/scores/correlations", guarded([](const httplib::Request& req, httplib::Response& res) {
                send(res, 200, api::correlations(body_of(req)));
              }));

  // Unmatched routes get a JSON 404 rather than httplib's empty body.
  server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    if (res.status == 404) {
      send(res, 404, api::error_json(ErrorCode::not_found, "no route for " + req.method + " " + req.path));
    }
  });
}

}  // namespace

Config config_from_env(std::optional<std::filesystem::path> data_dir) {
  Config c;
  if (data_dir) {
    c.data_dir = *data_dir;
  } else if (const char* d = std::getenv("DATA_DIR"); d && *d) {
    c.data_dir = d;
  }
  if (const char* t = std::getenv("FACILITATOR_TOKEN"); t && *t) c.facilitator_token = t;
  return c;
}

std::unique_ptr<httplib::Server> make_server(const Config& config) {
  auto server = std::make_unique<httplib::Server>();
  auto ctx = std::make_shared<Context>(Context{config, store::Store(config.data_dir)});
  routes(*server, ctx);
  return server;
}

void serve(const Config& config, const std::string& host, int port) {
  auto server = make_server(config);
  std::cerr << "elicit: serving " << config.data_dir.string() << " on " << host << ":" << port
            << (config.facilitator_token ? "" : " (facilitator token not set; facilitator checks disabled)")
            << "\n";
  if (!server->listen(host, port)) fail(ErrorCode::internal, "cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace elicit::service
