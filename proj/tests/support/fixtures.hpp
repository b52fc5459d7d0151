#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "remake/agent.hpp"
#include "remake/kb.hpp"

namespace remake::testing {

std::filesystem::path source_dir();
std::filesystem::path fixture(const std::string& relative);
std::string read_file(const std::filesystem::path& file);

// The vendored MultiWOZ database with the default hash key.
const KnowledgeBase& real_kb();
// tests/fixtures/db30: 30 entities over restaurant, hotel, attraction and train.
const KnowledgeBase& db30_kb();

// Runs the baseline, but every Chat claims the top listed entity has free parking.
class FreeParkingPolicy : public Policy {
public:
    PolicyDecision decide(const std::optional<Action>& prev, std::string_view state_markdown) override;

private:
    BaselinePolicy inner_;
};

}  // namespace remake::testing

namespace remake::testing {

// Applies one-line commands in order from the empty state.
InterfaceState run_commands(const std::vector<std::string>& commands, const KnowledgeBase& kb);

// For `trials` random constraint maps over the real database, renders a random
// permutation of single-slot Searches and compares with the single combined
// Search. Returns the number of mismatching trials.
std::size_t path_independence_failures(const KnowledgeBase& kb, std::size_t trials, unsigned seed);

// A random Chat, Search (any domain, any subset of its search slots) or Book.
Action random_action(std::mt19937& rng);

}  // namespace remake::testing
