#include "remake/http_service.hpp"

#include <httplib.h>

#include "remake/agent.hpp"

namespace remake {

using json = nlohmann::json;

struct HttpService::Impl {
    SessionStore& store;
    HttpOptions options;
    httplib::Server server;

    Impl(SessionStore& s, HttpOptions o) : store(s), options(std::move(o)) {}
};

namespace {

constexpr const char* kJson = "application/json; charset=utf-8";

void reply(httplib::Response& res, int status, const nlohmann::ordered_json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

void error(httplib::Response& res, int status, const std::string& message,
           std::optional<std::size_t> position = std::nullopt) {
    nlohmann::ordered_json body;
    body["error"] = message;
    if (position) body["position"] = *position;
    reply(res, status, body);
}

nlohmann::ordered_json state_body(const SessionStore& store, const InterfaceState& state) {
    nlohmann::ordered_json body;
    body["markdown"] = store.render(state);
    body["json"] = to_json(state);
    return body;
}

struct BadRequest : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    json j = json::parse(req.body);
    if (!j.is_object()) throw BadRequest("request body must be a JSON object");
    return j;
}

Action action_from_body(const json& body) {
    if (body.contains("command")) return parse_action(body.at("command").get<std::string>());
    if (body.contains("act")) {
        auto act = parse_act_token(body.at("act").get<std::string>());
        if (!act) throw PolicyError("unknown act '" + body.at("act").get<std::string>() + "'");
        return decision_to_action({*act, body.at("sequence").get<std::string>()});
    }
    throw PolicyError("body needs 'command' or 'act' and 'sequence'");
}

// Maps library exceptions onto status codes.
template <typename F>
void guarded(httplib::Response& res, F&& f) {
    try {
        f();
    } catch (const UnknownSession& e) {
        error(res, 404, e.what());
    } catch (const ParseError& e) {
        error(res, 422, e.what(), e.position());
    } catch (const ProtocolError& e) {
        error(res, 409, e.what());
    } catch (const QueryError& e) {
        error(res, 422, e.what());
    } catch (const PolicyError& e) {
        error(res, 422, e.what());
    } catch (const json::exception& e) {
        error(res, 400, std::string("malformed JSON body: ") + e.what());
    } catch (const BadRequest& e) {
        error(res, 400, e.what());
    } catch (const std::exception& e) {
        error(res, 500, e.what());
    }
}

}  // namespace

HttpService::HttpService(SessionStore& store, HttpOptions options)
    : impl_(std::make_unique<Impl>(store, std::move(options))) {
    auto& srv = impl_->server;
    auto& st = impl_->store;
    std::size_t workers = impl_->options.worker_threads;
    srv.new_task_queue = [workers] { return new httplib::ThreadPool(workers); };

    srv.Get("/health", [&st](const httplib::Request&, httplib::Response& res) {
        nlohmann::ordered_json body;
        body["status"] = "ok";
        body["sessions"] = st.size();
        reply(res, 200, body);
    });

    srv.Post("/sessions", [&st](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            json body = parse_body(req);
            std::optional<json> goal;
            if (body.contains("goal") && !body["goal"].is_null()) goal = body["goal"];
            nlohmann::ordered_json out;
            out["id"] = st.create(goal);
            reply(res, 201, out);
        });
    });

    srv.Post(R"(/sessions/([A-Za-z0-9_-]+)/user)", [&st](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            json body = parse_body(req);
            auto state = st.post_user(req.matches[1], body.at("text").get<std::string>());
            reply(res, 200, state_body(st, state));
        });
    });

    srv.Post(R"(/sessions/([A-Za-z0-9_-]+)/action)", [&st](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            std::string id = req.matches[1];
            st.state(id);  // unknown sessions answer 404 before body validation
            auto state = st.post_action(id, action_from_body(parse_body(req)));
            reply(res, 200, state_body(st, state));
        });
    });

    srv.Get(R"(/sessions/([A-Za-z0-9_-]+)/state)", [&st](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { reply(res, 200, state_body(st, st.state(req.matches[1]))); });
    });

    srv.Get(R"(/sessions/([A-Za-z0-9_-]+)/log)", [&st](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto snap = st.snapshot(req.matches[1]);
            nlohmann::ordered_json out;
            out["id"] = snap.id;
            out["created_ms"] = snap.created_ms;
            out["updated_ms"] = snap.updated_ms;
            out["goal"] = snap.goal ? nlohmann::ordered_json(*snap.goal) : nlohmann::ordered_json(nullptr);
            out["locked"] = snap.locked;
            out["events"] = nlohmann::ordered_json::array();
            for (const auto& e : snap.events) out["events"].push_back(to_json(e));
            out["ratings"] = nlohmann::ordered_json::array();
            for (const auto& r : snap.ratings) out["ratings"].push_back(to_json(r));
            out["state_hash"] = state_hash(snap.state);
            out["chain_valid"] = verify_event_log(snap.events, st.kb());
            reply(res, 200, out);
        });
    });

    srv.Post(R"(/sessions/([A-Za-z0-9_-]+)/rating)", [&st](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            std::string id = req.matches[1];
            st.state(id);
            Rating r = rating_from_json(parse_body(req));
            st.rate(id, r);
            nlohmann::ordered_json out;
            out["stored"] = true;
            reply(res, 201, out);
        });
    });

    if (!impl_->options.console_dir.empty()) {
        srv.set_mount_point("/console", impl_->options.console_dir.string());
    }
}

HttpService::~HttpService() { stop(); }

bool HttpService::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int HttpService::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool HttpService::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpService::wait_until_ready() { impl_->server.wait_until_ready(); }

void HttpService::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace remake
