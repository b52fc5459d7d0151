#pragma once

#include <chrono>
#include <filesystem>
#include <string>

#include "remake/interface.hpp"

namespace remake {

struct AppConfig {
    std::filesystem::path db_dir = "data/multiwoz/db";
    std::string hash_key;  // empty: REMAKE_HASH_KEY, then the built-in default
    InterfaceOptions interface;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path ratings_path = "ratings.jsonl";
    std::chrono::seconds idle_timeout{7200};
    std::filesystem::path console_dir;
};

// JSON keys: db_dir, hash_key, max_results, chat_turns, show_chat, host, port,
// ratings_path, idle_timeout_s, console_dir. Unknown keys are rejected.
AppConfig load_config(const std::filesystem::path& file);

// REMAKE_HASH_KEY wins over the config file, which wins over the default.
std::string effective_hash_key(const AppConfig& config);

}  // namespace remake
