#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "remake/common.hpp"

namespace remake {

enum class ActToken { Chat, Search, Book };

std::string_view to_string(ActToken a);
std::optional<ActToken> parse_act_token(std::string_view s);

// Chat(text) | Search(domain, slots) | Book(slots).
struct Action {
    ActToken kind = ActToken::Chat;
    std::optional<Domain> domain;  // Search only
    SlotList slots;                // Search / Book, annotation order
    std::string text;              // Chat only

    static Action chat(std::string text);
    static Action search(Domain d, SlotList slots = {});
    static Action book(SlotList slots = {});

    bool operator==(const Action&) const = default;
};

// Text standing in for the previous action at the first step of a dialogue.
inline constexpr std::string_view kStartToken = "<start>";

// Parses "[domain] [slot] value ..." or "[booking] [slot] value ...".
// Slot names are canonicalized, values lowercased and whitespace-collapsed.
// Throws ParseError (with byte position) on unknown domain, empty value,
// unbalanced brackets, or text that is not a command.
Action parse_command(std::string_view text);

// Like parse_command, but text not starting with '[' becomes a Chat action.
Action parse_action(std::string_view text);

std::string serialize_action(const Action& a);
// Serializes an optional previous action; nullopt is the start token.
std::string serialize_prev(const std::optional<Action>& a);

}  // namespace remake
