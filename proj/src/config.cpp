#include "remake/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include <json.hpp>

#include "remake/hash.hpp"

namespace remake {

AppConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw LoadError("cannot open config " + file.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw LoadError("config " + file.string() + ": " + e.what());
    }
    static const std::set<std::string> known{"db_dir",   "hash_key", "max_results",  "chat_turns",     "show_chat",
                                             "host",     "port",     "ratings_path", "idle_timeout_s", "console_dir"};
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) throw LoadError("unknown config key '" + key + "'");
    }
    AppConfig c;
    c.db_dir = j.value("db_dir", c.db_dir.string());
    c.hash_key = j.value("hash_key", c.hash_key);
    c.interface.max_results = j.value("max_results", c.interface.max_results);
    c.interface.chat_turns = j.value("chat_turns", c.interface.chat_turns);
    c.interface.show_chat = j.value("show_chat", c.interface.show_chat);
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    c.ratings_path = j.value("ratings_path", c.ratings_path.string());
    c.idle_timeout = std::chrono::seconds(j.value("idle_timeout_s", static_cast<long>(c.idle_timeout.count())));
    c.console_dir = j.value("console_dir", c.console_dir.string());
    return c;
}

std::string effective_hash_key(const AppConfig& config) {
    return hash_key_from_env(config.hash_key.empty() ? kDefaultHashKey : std::string_view(config.hash_key));
}

}  // namespace remake
