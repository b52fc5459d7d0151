#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "remake/session.hpp"

namespace remake {

struct HttpOptions {
    std::filesystem::path console_dir;  // served under /console when set
    std::size_t worker_threads = 32;
};

// JSON-over-HTTP front end for a SessionStore:
//   POST /sessions                  {goal?}                 -> {id}
//   POST /sessions/{id}/user        {text}                  -> {markdown, json}
//   POST /sessions/{id}/action      {command} | {act, sequence} -> {markdown, json}
//   GET  /sessions/{id}/state                               -> {markdown, json}
//   GET  /sessions/{id}/log                                 -> events, ratings, chain check
//   POST /sessions/{id}/rating      {goal_success, coherence, comparison?, notes?}
//   GET  /health
class HttpService {
public:
    HttpService(SessionStore& store, HttpOptions options = {});
    ~HttpService();
    HttpService(const HttpService&) = delete;
    HttpService& operator=(const HttpService&) = delete;

    // Blocks until stop().
    bool listen(const std::string& host, int port);
    // Binds to a free port and returns it; then call listen_after_bind().
    int bind_to_any_port(const std::string& host);
    bool listen_after_bind();
    void wait_until_ready();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace remake
