#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "remake/actions.hpp"
#include "remake/common.hpp"
#include "remake/doctree.hpp"
#include "remake/kb.hpp"

namespace remake {

enum class Speaker { user, agent };

std::string_view to_string(Speaker s);

struct ChatTurn {
    Speaker speaker = Speaker::user;
    std::string text;

    bool operator==(const ChatTurn&) const = default;
};

struct InterfaceOptions {
    std::size_t max_results = 3;  // displayed entities
    std::size_t chat_turns = 6;   // chat window length
    bool show_chat = true;
};

// The single shared state between user, agent and knowledge base.
struct InterfaceState {
    std::optional<Domain> active_domain;
    std::map<Domain, SlotMap> constraints;
    std::map<Domain, SlotMap> booking_info;
    std::map<Domain, BookingStatus> booking_status;
    std::map<Domain, std::string> booking_reference;
    std::vector<EntityPtr> results;     // full result of the active query, id order
    std::size_t result_count = 0;       // before truncation
    std::vector<std::string> missing;   // gating slots when the query is insufficient
    std::optional<std::string> selected;  // pinned entity, shown first
    std::vector<std::string> focus;       // entities kept visible, after `selected`
    std::vector<ChatTurn> chat_log;

    BookingStatus status_of(Domain d) const;
};

bool operator==(const InterfaceState& a, const InterfaceState& b);

InterfaceState user_turn(const InterfaceState& state, std::string_view text);

// Search merges slots into the domain's cumulative constraints (`none`
// deletes) and re-queries; Book merges booking info and, once complete,
// books the first displayed entity; Chat appends to the chat log.
// Throws ProtocolError for Book without an active domain or results, and
// QueryError for unknown slots.
InterfaceState apply_action(const InterfaceState& state, const Action& action,
                            const KnowledgeBase& kb,
                            std::optional<BookingStatus> booking_override = std::nullopt);

// Mentioned entities first (mention order, duplicates dropped), then the rest
// in id order, truncated to k. Throws EntityNotInResults.
std::vector<EntityPtr> rearrange_results(std::span<const EntityPtr> results,
                                         std::span<const std::string> mentioned, std::size_t k);

// Keeps `ids` visible at the top of the list. Clears `selected` unless it is
// among them. Throws EntityNotInResults.
InterfaceState focus_entities(const InterfaceState& state, std::span<const std::string> ids);

std::vector<EntityPtr> displayed_results(const InterfaceState& state, std::size_t k);
// The entity a Book binds to (selected, else first displayed); nullptr when
// there are no results.
EntityPtr booking_target(const InterfaceState& state);

DocNode build_document(const InterfaceState& state, const InterfaceOptions& options = {});
std::string render_state(const InterfaceState& state, const InterfaceOptions& options = {});

// One display line for an entity: "name | slot: value | ...".
std::string entity_line(const Entity& e);

nlohmann::json to_json(const Entity& e);
Entity entity_from_json(const nlohmann::json& j);
nlohmann::json to_json(const InterfaceState& state);
InterfaceState state_from_json(const nlohmann::json& j);
std::string state_hash(const InterfaceState& state);

inline constexpr std::string_view kInterfaceTitle = "MultiWOZ Interface";

}  // namespace remake
