#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "remake/actions.hpp"
#include "remake/goal.hpp"
#include "remake/interface.hpp"
#include "remake/kb.hpp"
#include "remake/replay.hpp"

namespace remake {

struct PolicyDecision {
    ActToken act = ActToken::Chat;
    std::string sequence;

    bool operator==(const PolicyDecision&) const = default;
};

// A dialogue policy sees only the previous action and the rendered interface.
class Policy {
public:
    virtual ~Policy() = default;
    virtual PolicyDecision decide(const std::optional<Action>& prev, std::string_view state_markdown) = 0;
    virtual void reset() {}
};

// Validates that the sequence parses as the declared act. Throws PolicyError.
Action decision_to_action(const PolicyDecision& d);

// What a policy can read back from the rendered interface.
struct ListedEntity {
    std::string name;
    SlotMap slots;
};

struct InterfaceView {
    std::vector<ChatTurn> chat;
    std::optional<Domain> domain;
    SlotMap constraints;
    std::optional<std::size_t> result_count;  // unset when the query is insufficient
    std::vector<std::string> missing;
    std::vector<ListedEntity> listed;
    SlotMap booking;
    BookingStatus status = BookingStatus::none;
    std::string reference;

    // Text of the newest chat line when the user spoke last.
    std::optional<std::string> pending_user() const;
};

InterfaceView read_interface(std::string_view markdown);

// Understands the simulator's templates and acts on the rendered interface only.
class BaselinePolicy : public Policy {
public:
    PolicyDecision decide(const std::optional<Action>& prev, std::string_view state_markdown) override;
};

// Returns recorded decisions in order; throws PolicyError when exhausted.
class PlaybackPolicy : public Policy {
public:
    explicit PlaybackPolicy(std::vector<PolicyDecision> decisions);
    static PlaybackPolicy from_steps(std::span<const StepRecord> steps);
    PolicyDecision decide(const std::optional<Action>& prev, std::string_view state_markdown) override;
    void reset() override { next_ = 0; }

private:
    std::vector<PolicyDecision> decisions_;
    std::size_t next_ = 0;
};

// Template-based user that brings up one goal item per turn.
class UserSimulator {
public:
    UserSimulator(const Goal& goal, std::uint64_t seed);
    std::optional<std::string> next_utterance();
    bool done() const { return next_ >= script_.size(); }
    const std::vector<std::string>& script() const { return script_; }

private:
    std::vector<std::string> script_;
    std::size_t next_ = 0;
};

inline constexpr std::string_view kGoodbye = "Thank you, that is all I need. Goodbye.";

struct Contradiction {
    std::string entity;
    std::string slot;
    std::string claimed;
    std::string actual;

    bool operator==(const Contradiction&) const = default;
};

// Flags claims about gated attributes (area, price range, food, attraction
// type, stars, parking, internet) that disagree with the grounded entity.
class ContradictionChecker {
public:
    explicit ContradictionChecker(const KnowledgeBase& kb);
    std::vector<Contradiction> check(std::string_view utterance, const Entity& grounded) const;

private:
    const KnowledgeBase& kb_;
    // per domain: (slot, value) pairs, longest value first
    std::map<Domain, std::vector<std::pair<std::string, std::string>>> vocabulary_;
};

struct EpisodeOptions {
    std::size_t max_turns = 20;
    std::size_t max_actions_per_turn = 8;
    std::uint64_t seed = 0;
    InterfaceOptions interface;
};

struct EpisodeResult {
    bool success = false;
    std::size_t turns = 0;
    std::vector<Contradiction> contradictions;
    std::vector<std::string> failures;  // why success is false
    std::vector<ChatTurn> transcript;
    std::vector<PolicyDecision> decisions;
    std::optional<std::string> error;   // policy or protocol error that ended the episode
};

EpisodeResult run_episode(const Goal& goal, Policy& policy, const KnowledgeBase& kb,
                          const EpisodeOptions& options = {});

struct PlaybackResult {
    std::vector<PolicyDecision> predictions;
    std::vector<Contradiction> contradictions;
};

// Teacher-forced playback: the policy predicts each recorded step, the
// recorded action is then applied.
PlaybackResult run_playback(std::span<const StepRecord> steps, Policy& policy, const KnowledgeBase& kb,
                            const InterfaceOptions& options = {});

}  // namespace remake
