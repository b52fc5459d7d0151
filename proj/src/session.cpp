#include "remake/session.hpp"

#include <fstream>

#include <openssl/rand.h>

#include "remake/hash.hpp"

namespace remake {

using json = nlohmann::json;

std::string generate_session_token() {
    unsigned char bytes[16];
    if (RAND_bytes(bytes, sizeof bytes) != 1) throw Error("RAND_bytes failed");
    static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";
    std::string out;
    std::uint32_t acc = 0;
    int bits = 0;
    for (unsigned char b : bytes) {
        acc = (acc << 8) | b;
        bits += 8;
        while (bits >= 6) {
            bits -= 6;
            out.push_back(kAlphabet[(acc >> bits) & 0x3F]);
        }
    }
    if (bits > 0) out.push_back(kAlphabet[(acc << (6 - bits)) & 0x3F]);
    return out;
}

std::string chain_link(std::string_view previous, const SessionEvent& e) {
    std::string message(previous);
    message += '\n';
    message += e.actor;
    message += '\n';
    message += e.payload;
    message += '\n';
    message += e.state_hash;
    return sha256_hex(message);
}

SessionStore::SessionStore(const KnowledgeBase& kb, ServiceOptions options) : kb_(kb), options_(std::move(options)) {}

std::int64_t SessionStore::now_ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(options_.clock().time_since_epoch()).count();
}

std::string SessionStore::create(std::optional<json> goal) {
    sweep_expired();
    auto s = std::make_shared<Session>();
    s->data.goal = std::move(goal);
    s->data.created_ms = s->data.updated_ms = now_ms();
    std::unique_lock lock(map_mutex_);
    std::string id;
    do {
        id = generate_session_token();
    } while (sessions_.contains(id));
    s->data.id = id;
    sessions_.emplace(id, std::move(s));
    return id;
}

std::shared_ptr<SessionStore::Session> SessionStore::get(const std::string& id) {
    std::shared_ptr<Session> s;
    {
        std::shared_lock lock(map_mutex_);
        auto it = sessions_.find(id);
        if (it == sessions_.end()) throw UnknownSession("unknown session " + id);
        s = it->second;
    }
    std::int64_t idle_ms = options_.idle_timeout.count() * 1000;
    bool expired;
    {
        std::lock_guard guard(s->mutex);
        expired = now_ms() - s->data.updated_ms > idle_ms;
    }
    if (expired) {
        std::unique_lock lock(map_mutex_);
        sessions_.erase(id);
        throw UnknownSession("session expired: " + id);
    }
    return s;
}

void SessionStore::append(Session& s, std::string actor, std::string payload) {
    SessionEvent e;
    e.actor = std::move(actor);
    e.payload = std::move(payload);
    e.state_hash = state_hash(s.data.state);
    e.chain = chain_link(s.data.events.empty() ? "" : s.data.events.back().chain, e);
    e.at_ms = now_ms();
    s.data.updated_ms = e.at_ms;
    s.data.events.push_back(std::move(e));
}

InterfaceState SessionStore::post_user(const std::string& id, std::string_view text) {
    auto s = get(id);
    std::lock_guard guard(s->mutex);
    if (s->data.locked) throw SessionLocked("session " + id + " was rated and is closed");
    s->data.state = user_turn(s->data.state, text);
    append(*s, "user", text::collapse_ws(text));
    return s->data.state;
}

InterfaceState SessionStore::post_action(const std::string& id, const Action& action) {
    auto s = get(id);
    std::lock_guard guard(s->mutex);
    if (s->data.locked) throw SessionLocked("session " + id + " was rated and is closed");
    s->data.state = apply_action(s->data.state, action, kb_);
    append(*s, "agent", serialize_action(action));
    return s->data.state;
}

InterfaceState SessionStore::state(const std::string& id) {
    auto s = get(id);
    std::lock_guard guard(s->mutex);
    return s->data.state;
}

SessionSnapshot SessionStore::snapshot(const std::string& id) {
    auto s = get(id);
    std::lock_guard guard(s->mutex);
    return s->data;
}

void SessionStore::rate(const std::string& id, Rating rating) {
    if (rating.coherence != "win" && rating.coherence != "lose" && rating.coherence != "tie") {
        throw QueryError("coherence must be win, lose or tie");
    }
    auto s = get(id);
    std::lock_guard guard(s->mutex);
    rating.at_ms = now_ms();
    if (!options_.ratings_path.empty()) {
        auto line = to_json(rating);
        line["session_id"] = id;
        std::lock_guard file_guard(ratings_file_mutex_);
        std::ofstream out(options_.ratings_path, std::ios::app);
        if (!out) throw Error("cannot append to " + options_.ratings_path.string());
        out << line.dump() << "\n";
    }
    s->data.ratings.push_back(std::move(rating));
    s->data.locked = true;
    s->data.updated_ms = now_ms();
}

std::size_t SessionStore::sweep_expired() {
    std::int64_t now = now_ms();
    std::int64_t idle_ms = options_.idle_timeout.count() * 1000;
    std::unique_lock lock(map_mutex_);
    return std::erase_if(sessions_, [&](const auto& kv) {
        std::lock_guard guard(kv.second->mutex);
        return now - kv.second->data.updated_ms > idle_ms;
    });
}

std::size_t SessionStore::size() const {
    std::shared_lock lock(map_mutex_);
    return sessions_.size();
}

InterfaceState replay_events(const std::vector<SessionEvent>& events, const KnowledgeBase& kb) {
    InterfaceState state;
    for (const auto& e : events) {
        state = e.actor == "user" ? user_turn(state, e.payload) : apply_action(state, parse_action(e.payload), kb);
    }
    return state;
}

bool verify_event_log(const std::vector<SessionEvent>& events, const KnowledgeBase& kb) {
    InterfaceState state;
    std::string previous;
    try {
        for (const auto& e : events) {
            state = e.actor == "user" ? user_turn(state, e.payload)
                                      : apply_action(state, parse_action(e.payload), kb);
            if (state_hash(state) != e.state_hash || chain_link(previous, e) != e.chain) return false;
            previous = e.chain;
        }
    } catch (const Error&) {
        return false;
    }
    return true;
}

nlohmann::ordered_json to_json(const SessionEvent& e) {
    nlohmann::ordered_json j;
    j["actor"] = e.actor;
    j["payload"] = e.payload;
    j["state_hash"] = e.state_hash;
    j["chain"] = e.chain;
    j["at_ms"] = e.at_ms;
    return j;
}

nlohmann::ordered_json to_json(const Rating& r) {
    nlohmann::ordered_json j;
    j["goal_success"] = r.goal_success;
    j["coherence"] = r.coherence;
    j["comparison"] = r.comparison;
    j["notes"] = r.notes;
    j["at_ms"] = r.at_ms;
    return j;
}

Rating rating_from_json(const json& j) {
    Rating r;
    r.goal_success = j.at("goal_success").get<bool>();
    r.coherence = j.at("coherence").get<std::string>();
    r.comparison = j.value("comparison", "");
    r.notes = j.value("notes", "");
    return r;
}

}  // namespace remake
