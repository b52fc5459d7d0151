#include "remake/bridge.hpp"

#include <csignal>
#include <cstring>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

namespace remake {

ProcessPolicy::ProcessPolicy(std::string command) : command_(std::move(command)) { start(); }

ProcessPolicy::~ProcessPolicy() { stop(); }

void ProcessPolicy::start() {
    int in[2];
    int out[2];
    if (pipe(in) != 0 || pipe(out) != 0) throw PolicyError(std::string("pipe: ") + std::strerror(errno));
    pid_ = fork();
    if (pid_ < 0) throw PolicyError(std::string("fork: ") + std::strerror(errno));
    if (pid_ == 0) {
        dup2(in[0], STDIN_FILENO);
        dup2(out[1], STDOUT_FILENO);
        close(in[0]);
        close(in[1]);
        close(out[0]);
        close(out[1]);
        execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(in[0]);
    close(out[1]);
    to_child_ = in[1];
    from_child_ = out[0];
    std::signal(SIGPIPE, SIG_IGN);
}

void ProcessPolicy::stop() {
    if (to_child_ >= 0) close(to_child_);
    if (from_child_ >= 0) close(from_child_);
    to_child_ = from_child_ = -1;
    if (pid_ > 0) {
        int status = 0;
        if (waitpid(pid_, &status, WNOHANG) == 0) {
            kill(pid_, SIGTERM);
            waitpid(pid_, &status, 0);
        }
    }
    pid_ = -1;
}

std::string ProcessPolicy::read_line() {
    for (;;) {
        std::size_t nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        char chunk[4096];
        ssize_t n = read(from_child_, chunk, sizeof chunk);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) throw PolicyError("policy process closed its output");
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

PolicyDecision ProcessPolicy::decide(const std::optional<Action>& prev, std::string_view state_markdown) {
    nlohmann::json request{{"prev_action", serialize_prev(prev)}, {"state", std::string(state_markdown)}};
    std::string line = request.dump() + "\n";
    std::size_t sent = 0;
    while (sent < line.size()) {
        ssize_t n = write(to_child_, line.data() + sent, line.size() - sent);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) throw PolicyError("policy process closed its input");
        sent += static_cast<std::size_t>(n);
    }

    std::string reply = read_line();
    try {
        auto j = nlohmann::json::parse(reply);
        auto act = parse_act_token(j.at("act").get<std::string>());
        if (!act) throw PolicyError("unknown act in policy reply: " + reply);
        return {*act, j.at("sequence").get<std::string>()};
    } catch (const nlohmann::json::exception& e) {
        throw PolicyError("malformed policy reply: " + reply);
    }
}

}  // namespace remake
