#include "gradarg/http_service.hpp"

#include "gradarg/corpus.hpp"
#include "gradarg/error.hpp"
#include "gradarg/json_io.hpp"

#include <sstream>

#include <httplib.h>

namespace gradarg {

using nlohmann::json;

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Forbidden: return 403;
    case ErrorCode::NotFound:
    case ErrorCode::UnknownCorpus:
    case ErrorCode::OutOfRange: return 404;
    case ErrorCode::WouldCreateCycle:
    case ErrorCode::DuplicateId:
    case ErrorCode::OptionEditForbidden: return 409;
    default: return 422;
  }
}

struct HttpService::Impl {
  SessionManager& sessions;
  httplib::Server server;

  explicit Impl(SessionManager& s) : sessions(s) { routes(); }

  static void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message,
                         const json& detail = nullptr) {
    send_json(res, json{{"code", code}, {"message", message}, {"detail", detail}}, status);
  }

  static json body_of(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
      return json::parse(req.body);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Syntax, std::string("request body is not JSON: ") + e.what());
    }
  }

  static SemanticsKind semantics_param(const httplib::Request& req) {
    return req.has_param("semantics") ? parse_semantics(req.get_param_value("semantics"))
                                      : SemanticsKind::QuadraticEnergy;
  }

  template <typename Handler>
  static httplib::Server::Handler guarded(Handler h) {
    return [h](const httplib::Request& req, httplib::Response& res) {
      try {
        h(req, res);
      } catch (const Error& e) {
        json detail = nullptr;
        if (e.code() == ErrorCode::InvalidAf) {
          detail = json::array();
          std::istringstream lines(e.what());
          for (std::string line; std::getline(lines, line);) detail.push_back(line);
        }
        const int status = e.code() == ErrorCode::Syntax ? 400 : http_status(e.code());
        send_error(res, status, to_string(e.code()), e.what(), detail);
      } catch (const json::exception& e) {
        send_error(res, 400, "INVALID_ARGUMENT", e.what());
      } catch (const std::logic_error& e) {
        send_error(res, 400, "INVALID_ARGUMENT", std::string("bad query parameter: ") + e.what());
      }
    };
  }

  void routes() {
    server.Get("/corpora", guarded([this](const httplib::Request&, httplib::Response& res) {
      json out = json::array();
      for (const auto& name : list_corpora(sessions.corpus_directory())) {
        const auto entry = load_corpus(name, sessions.corpus_directory());
        out.push_back({{"name", name},
                       {"arguments", entry.framework.arguments().size()},
                       {"relations", entry.framework.relations().size()},
                       {"options", entry.framework.options()},
                       {"toggles", entry.scenario.toggles},
                       {"provenance", entry.provenance}});
      }
      send_json(res, out);
    }));

    server.Get(R"(/corpora/([^/]+)/sweep)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto entry = load_corpus(req.matches[1], sessions.corpus_directory());
      const auto target = req.has_param("target") ? req.get_param_value("target") : entry.scenario.risk.at(0);
      const auto points = req.has_param("points") ? std::stoul(req.get_param_value("points")) : 11ul;
      const auto result = base_score_sweep(entry.scenario, normalize_id(target), linear_grid(0.0, 1.0, points),
                                           semantics_param(req), {}, {ScenarioFilter::All, false, 0, 1e-9});
      std::ostringstream csv;
      write_sweep_csv(csv, result);
      res.set_content(csv.str(), "text/csv");
    }));

    server.Get("/sessions", guarded([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, json(sessions.session_ids()));
    }));

    server.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = body_of(req);
      CreateSessionRequest create;
      create.corpus = body.value("corpus", "");
      create.af_document = body.value("af_document", "");
      create.participants = body.value("participants", std::map<std::string, std::string>{});
      if (create.corpus.empty() && create.af_document.empty()) {
        throw Error(ErrorCode::InvalidArgument, "either corpus or af_document is required");
      }
      send_json(res, to_json(sessions.create_session(create)), 201);
    }));

    server.Get(R"(/sessions/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, to_json(sessions.get(req.matches[1]), semantics_param(req)));
    }));

    server.Get(R"(/sessions/([^/]+)/strengths)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, to_json(sessions.strengths(req.matches[1], semantics_param(req))));
    }));

    server.Get(R"(/sessions/([^/]+)/log)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      res.set_content(sessions.export_log(req.matches[1]), "application/x-ndjson");
    }));

    server.Post(R"(/sessions/([^/]+)/events)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = body_of(req);
      if (!body.contains("event")) throw Error(ErrorCode::InvalidArgument, "missing field 'event'");
      const auto event = event_from_json(body.at("event"));
      const auto view = sessions.post_event(req.matches[1], event.payload, body.value("actor", ""));
      send_json(res, to_json(view, semantics_param(req)));
    }));

    server.Post(R"(/sessions/([^/]+)/decision)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto outcome = sessions.request_decision(req.matches[1], decision_request_from_json(body_of(req)));
      if (outcome.tie_prompt) {
        send_json(res, json{{"status", "tie"}, {"tie_prompt", to_json(*outcome.tie_prompt)}});
      } else {
        const auto index = sessions.get(req.matches[1]).decisions.size() - 1;
        send_json(res, json{{"status", "decision"}, {"index", index}, {"decision", to_json(*outcome.decision)}});
      }
    }));

    server.Get(R"(/sessions/([^/]+)/decisions/(-?\d+)/explanation)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 AttributionOptions options;
                 if (req.has_param("samples")) options.samples = std::stoul(req.get_param_value("samples"));
                 if (req.has_param("seed")) options.seed = std::stoull(req.get_param_value("seed"));
                 options.jobs = 0;
                 const auto index = std::stoll(req.matches[2]);
                 send_json(res, to_json(sessions.get_explanation(req.matches[1], index, options)));
               }));

    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) {
        send_error(res, res.status, res.status == 404 ? "NOT_FOUND" : "INVALID_ARGUMENT", "no such route");
      }
    });
  }
};

HttpService::HttpService(SessionManager& sessions) : impl_(std::make_unique<Impl>(sessions)) {}
HttpService::~HttpService() = default;

bool HttpService::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }
int HttpService::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }
bool HttpService::listen_after_bind() { return impl_->server.listen_after_bind(); }
void HttpService::stop() { impl_->server.stop(); }
void HttpService::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace gradarg
