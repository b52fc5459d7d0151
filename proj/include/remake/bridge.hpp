#pragma once

#include <string>
#include <sys/types.h>

#include "remake/agent.hpp"

namespace remake {

// Runs an external policy process (`/bin/sh -c command`). Each decision is one
// JSON line each way:
//   -> {"prev_action": "<start>", "state": "# MultiWOZ Interface ..."}
//   <- {"act": "Search", "sequence": "[restaurant] [food] indian"}
class ProcessPolicy : public Policy {
public:
    explicit ProcessPolicy(std::string command);
    ~ProcessPolicy() override;
    ProcessPolicy(const ProcessPolicy&) = delete;
    ProcessPolicy& operator=(const ProcessPolicy&) = delete;

    PolicyDecision decide(const std::optional<Action>& prev, std::string_view state_markdown) override;

private:
    std::string command_;
    pid_t pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;

    void start();
    void stop();
    std::string read_line();
};

}  // namespace remake
