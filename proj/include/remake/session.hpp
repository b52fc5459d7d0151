#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "remake/interface.hpp"
#include "remake/kb.hpp"

namespace remake {

class UnknownSession : public Error {
public:
    using Error::Error;
};

// Writes to a session after it was rated.
class SessionLocked : public ProtocolError {
public:
    using ProtocolError::ProtocolError;
};

struct SessionEvent {
    std::string actor;    // "user" or "agent"
    std::string payload;  // user text, or the serialized action
    std::string state_hash;
    std::string chain;    // sha256 over the previous link and this event
    std::int64_t at_ms = 0;
};

struct Rating {
    bool goal_success = false;
    std::string coherence;   // win | lose | tie
    std::string comparison;  // what the session was compared against
    std::string notes;
    std::int64_t at_ms = 0;
};

struct SessionSnapshot {
    std::string id;
    InterfaceState state;
    std::optional<nlohmann::json> goal;
    std::int64_t created_ms = 0;
    std::int64_t updated_ms = 0;
    std::vector<SessionEvent> events;
    std::vector<Rating> ratings;
    bool locked = false;
};

struct ServiceOptions {
    InterfaceOptions interface;
    std::chrono::seconds idle_timeout{7200};
    std::filesystem::path ratings_path;  // append-only JSON Lines; empty keeps ratings in memory only
    std::function<std::chrono::system_clock::time_point()> clock = [] { return std::chrono::system_clock::now(); };
};

// Live sessions over a shared read-only knowledge base. Operations on one
// session are serialized; different sessions proceed in parallel.
class SessionStore {
public:
    SessionStore(const KnowledgeBase& kb, ServiceOptions options);

    std::string create(std::optional<nlohmann::json> goal = std::nullopt);
    InterfaceState post_user(const std::string& id, std::string_view text);
    // Throws ProtocolError / QueryError from the interface, SessionLocked after a rating.
    InterfaceState post_action(const std::string& id, const Action& action);
    InterfaceState state(const std::string& id);
    SessionSnapshot snapshot(const std::string& id);
    void rate(const std::string& id, Rating rating);

    std::size_t sweep_expired();
    std::size_t size() const;
    std::string render(const InterfaceState& state) const { return render_state(state, options_.interface); }
    const KnowledgeBase& kb() const { return kb_; }
    const ServiceOptions& options() const { return options_; }

private:
    struct Session {
        std::mutex mutex;
        SessionSnapshot data;
    };

    const KnowledgeBase& kb_;
    ServiceOptions options_;
    mutable std::shared_mutex map_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::mutex ratings_file_mutex_;

    std::shared_ptr<Session> get(const std::string& id);
    std::int64_t now_ms() const;
    void append(Session& s, std::string actor, std::string payload);
};

// 128 random bits, base64url without padding (22 characters).
std::string generate_session_token();

std::string chain_link(std::string_view previous, const SessionEvent& event);

// Folds the event log from the empty state; throws if an action is rejected.
InterfaceState replay_events(const std::vector<SessionEvent>& events, const KnowledgeBase& kb);
// Every link and every recorded state hash agree with a fresh replay.
bool verify_event_log(const std::vector<SessionEvent>& events, const KnowledgeBase& kb);

nlohmann::ordered_json to_json(const SessionEvent& e);
nlohmann::ordered_json to_json(const Rating& r);
Rating rating_from_json(const nlohmann::json& j);

}  // namespace remake
