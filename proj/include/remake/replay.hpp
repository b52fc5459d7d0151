#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "remake/actions.hpp"
#include "remake/interface.hpp"
#include "remake/kb.hpp"

namespace remake {

struct AnnotatedTurn {
    std::string user_text;
    std::string agent_text;
    Belief belief;   // cumulative search constraints
    Belief booking;  // cumulative booking slots (day, people, time, stay)
    std::vector<std::pair<Domain, std::string>> booking_refs;
    std::vector<std::pair<Domain, BookingStatus>> booking_outcomes;
};

struct AnnotatedDialogue {
    std::string id;
    std::vector<AnnotatedTurn> turns;
    std::vector<Domain> domains;  // dataset's service list; derived from annotations when empty
};

// One (previous action, rendered state, chosen action) step. The event
// fields describe what happened to the interface between the previous step
// and this one, so that the trajectory can be replayed exactly.
struct StepRecord {
    std::optional<Action> prev_action;
    std::string state_markdown;
    Action chosen_action;

    std::optional<std::string> user_text;
    std::vector<std::string> focus;
    std::optional<BookingStatus> booking_override;
};

enum class InconsistencyKind { EntityNotInResults, BookingMisalignment, UnresolvableReference, InvalidAnnotation };

std::string_view to_string(InconsistencyKind k);

struct Trajectory {
    std::string dialogue_id;
    std::vector<StepRecord> steps;
    bool consistent = true;
    std::vector<std::string> inconsistency_reasons;
    std::vector<InconsistencyKind> inconsistency_kinds;
    std::size_t num_turns = 0;
    std::vector<Domain> domains;
};

struct ReplayOptions {
    InterfaceOptions interface;
};

// Per domain, slots that are new or changed in `curr`; slots that vanished map to "none".
Belief diff_belief(const Belief& prev, const Belief& curr);
// Folds a diff into a cumulative belief (inverse of diff_belief).
Belief apply_belief_diff(const Belief& base, const Belief& diff);

// One Search per domain with a non-empty diff: the active domain first, then canonical order.
std::vector<Action> split_multidomain(const Belief& diff, std::optional<Domain> active);

struct Mention {
    Domain domain;
    std::string name;
    std::size_t position;
};

// Exact, case-insensitive, longest-match detection of entity names and train
// IDs on word boundaries.
class MentionIndex {
public:
    explicit MentionIndex(const KnowledgeBase& kb);
    std::vector<Mention> detect(std::string_view text, std::span<const Domain> domains) const;

private:
    // first word -> candidate names, longest first
    std::map<Domain, std::map<std::string, std::vector<std::string>, std::less<>>> by_first_word_;
};

Trajectory replay_dialogue(const AnnotatedDialogue& dialogue, const KnowledgeBase& kb,
                           const ReplayOptions& options = {});
Trajectory replay_dialogue(const AnnotatedDialogue& dialogue, const KnowledgeBase& kb,
                           const MentionIndex& mentions, const ReplayOptions& options = {});

// Replays every dialogue (in parallel when threads > 1); output ordered by dialogue id.
std::vector<Trajectory> replay_corpus(std::span<const AnnotatedDialogue> dialogues,
                                      const KnowledgeBase& kb, const ReplayOptions& options = {},
                                      unsigned threads = 0);

// Re-applies the steps from the empty state; returns the index of the first
// step whose markdown differs, or nullopt when all match.
std::optional<std::size_t> verify_trajectory(const Trajectory& t, const KnowledgeBase& kb,
                                             const ReplayOptions& options = {});

struct TrainingRecord {
    std::string dialogue_id;
    std::size_t turn = 0;
    std::string context;
    ActToken act = ActToken::Chat;
    std::string target;

    bool operator==(const TrainingRecord&) const = default;
};

inline constexpr std::string_view kContextSeparator = "\n";

class ExportRefused : public Error {
public:
    using Error::Error;
};

std::vector<TrainingRecord> export_training(const Trajectory& t);
nlohmann::ordered_json to_json(const TrainingRecord& r);
TrainingRecord training_record_from_json(const nlohmann::json& j);
std::vector<TrainingRecord> read_training_records(const std::filesystem::path& file);

// Splits a record context into (previous action text, state markdown).
std::pair<std::string, std::string> split_context(std::string_view context);

// Rebuilds replayable steps from exported records of one dialogue: user
// turns are read from the chat window, the listed entity order becomes a
// focus event and a Book's outcome is read from the next record's status.
std::vector<StepRecord> steps_from_records(std::span<const TrainingRecord> records,
                                           const KnowledgeBase& kb, const ReplayOptions& options = {});

struct RateBucket {
    std::string label;
    std::size_t total = 0;
    std::size_t consistent = 0;
    double rate() const { return total == 0 ? 0.0 : 100.0 * static_cast<double>(consistent) / static_cast<double>(total); }
};

struct ConsistencyReport {
    RateBucket overall{"all"};
    RateBucket single_domain{"single-domain"};
    RateBucket multi_domain{"multi-domain"};
    std::vector<RateBucket> by_turns;
    std::map<std::string, std::size_t> reasons;
};

ConsistencyReport consistency_report(std::span<const Trajectory> trajectories);
nlohmann::ordered_json to_json(const ConsistencyReport& r);
std::string format_table(const ConsistencyReport& r);

// Native JSON Lines dialogue format (one AnnotatedDialogue per line).
AnnotatedDialogue dialogue_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const AnnotatedDialogue& d);
std::vector<AnnotatedDialogue> read_dialogues_jsonl(const std::filesystem::path& file);

}  // namespace remake
