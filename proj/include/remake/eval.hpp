#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "remake/agent.hpp"
#include "remake/goal.hpp"
#include "remake/kb.hpp"

namespace remake {

// ---- BLEU ---------------------------------------------------------------

// Lowercases, makes every ASCII punctuation character its own token, splits on whitespace.
std::vector<std::string> bleu_tokenize(std::string_view s);

// Smoothed sentence BLEU on a 0-100 scale: exponential smoothing for zero
// n-gram matches, effective order for short hypotheses, 0 when nothing matches.
double sentence_bleu(std::string_view hypothesis, std::string_view reference);

// Mean of sentence scores. Throws AlignmentError on length mismatch.
double mean_sentence_bleu(std::span<const std::string> hypotheses, std::span<const std::string> references);

// ---- lexicalization -----------------------------------------------------

struct LexicalizeResult {
    std::string text;
    std::size_t unresolved = 0;
};

// Fills [value_<slot>] placeholders from the entity (name, id -> name) and
// the booking (reference). Unresolvable placeholders stay verbatim.
LexicalizeResult lexicalize(std::string_view response, const Entity* entity, const BookingOutcome* booking);

std::vector<std::string> placeholders(std::string_view response);
std::string placeholder_for(std::string_view slot);

// ---- Inform / Success -----------------------------------------------------

struct EvalTurn {
    Belief belief;             // cumulative belief after the user turn
    std::string response;      // delexicalized system response
    std::optional<Domain> domain;
};

struct EvalDialogue {
    std::string id;
    Goal goal;
    std::vector<EvalTurn> turns;
};

using EvalCorpus = std::vector<EvalDialogue>;

struct DomainVerdict {
    Domain domain = Domain::restaurant;
    bool inform = false;
    bool success = false;
    std::optional<std::string> offered;  // venue id credited to the dialogue
    std::vector<std::string> flags;
};

struct DialogueScore {
    std::string id;
    bool inform = false;
    bool success = false;
    std::vector<DomainVerdict> domains;
};

struct InformSuccessReport {
    double inform = 0.0;   // percent
    double success = 0.0;  // percent
    std::vector<DialogueScore> dialogues;
};

InformSuccessReport inform_success(std::span<const EvalDialogue> corpus, const KnowledgeBase& kb);

inline constexpr std::string_view kFixedResponse =
    "[value_name] [value_phone] [value_address] [value_postcode] [value_reference] [value_id]";

struct FixedResponseAudit {
    InformSuccessReport original;
    InformSuccessReport fixed;
    // The fixed response matches or beats the responses on Success.
    bool exploitable() const { return fixed.success >= original.success; }
};

FixedResponseAudit fixed_response_audit(std::span<const EvalDialogue> corpus, const KnowledgeBase& kb);

// Returns a copy with every response replaced (one list per dialogue, by id).
EvalCorpus with_responses(std::span<const EvalDialogue> corpus,
                          const std::map<std::string, std::vector<std::string>>& responses);

EvalDialogue eval_dialogue_from_json(const nlohmann::json& j);
EvalCorpus read_eval_corpus(const std::filesystem::path& file);
nlohmann::ordered_json to_json(const InformSuccessReport& r);

// ---- next-act and search accuracy -----------------------------------------

struct GoldStep {
    ActToken act = ActToken::Chat;
    std::string target;
};

struct AccuracyReport {
    double next_act = 0.0;  // percent of steps whose act matches
    double search = 0.0;    // percent of gold Search steps predicted exactly
    std::size_t steps = 0;
    std::size_t search_steps = 0;
};

// Throws AlignmentError when the sequences differ in length.
AccuracyReport act_and_search_accuracy(std::span<const PolicyDecision> predictions,
                                       std::span<const GoldStep> gold);

}  // namespace remake
