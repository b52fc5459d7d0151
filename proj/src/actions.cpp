#include "remake/actions.hpp"

#include <cctype>

#include "remake/ontology.hpp"

namespace remake {

std::string_view to_string(ActToken a) {
    switch (a) {
        case ActToken::Chat: return "Chat";
        case ActToken::Search: return "Search";
        case ActToken::Book: return "Book";
    }
    return "";
}

std::optional<ActToken> parse_act_token(std::string_view s) {
    std::string v = text::to_lower(s);
    if (v == "chat") return ActToken::Chat;
    if (v == "search") return ActToken::Search;
    if (v == "book") return ActToken::Book;
    return std::nullopt;
}

Action Action::chat(std::string text) { return {ActToken::Chat, std::nullopt, {}, std::move(text)}; }
Action Action::search(Domain d, SlotList slots) { return {ActToken::Search, d, std::move(slots), {}}; }
Action Action::book(SlotList slots) { return {ActToken::Book, std::nullopt, std::move(slots), {}}; }

namespace {

struct Token {
    std::string name;
    std::size_t position;  // offset of the first byte inside the brackets
    std::string trailing;  // text up to the next '[' or end of input
    std::size_t trailing_position;
};

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i == text.size() || text[i] != '[') throw ParseError("not a command", i);

    while (i < text.size()) {
        // text[i] == '['
        std::size_t open = i;
        std::size_t close = open + 1;
        while (close < text.size() && text[close] != ']') {
            if (text[close] == '[') throw ParseError("unbalanced '['", open);
            ++close;
        }
        if (close == text.size()) throw ParseError("unbalanced '['", open);

        Token tok;
        tok.position = open + 1;
        tok.name = text::to_lower(text::collapse_ws(text.substr(open + 1, close - open - 1)));
        if (tok.name.empty()) throw ParseError("empty bracket token", tok.position);

        std::size_t next = close + 1;
        while (next < text.size() && text[next] != '[') {
            if (text[next] == ']') throw ParseError("unbalanced ']'", next);
            ++next;
        }
        tok.trailing_position = close + 1;
        tok.trailing = text::to_lower(text::collapse_ws(text.substr(close + 1, next - close - 1)));
        tokens.push_back(std::move(tok));
        i = next;
    }
    return tokens;
}

}  // namespace

Action parse_command(std::string_view text) {
    std::vector<Token> tokens = tokenize(text);
    const Token& head = tokens.front();
    if (!head.trailing.empty()) {
        throw ParseError("value without a slot token", head.trailing_position);
    }

    Action out;
    if (head.name == "booking") {
        out.kind = ActToken::Book;
    } else if (auto d = parse_domain(head.name)) {
        out.kind = ActToken::Search;
        out.domain = *d;
    } else {
        throw ParseError("unknown domain '" + head.name + "'", head.position);
    }

    for (std::size_t k = 1; k < tokens.size(); ++k) {
        const Token& t = tokens[k];
        if (t.trailing.empty()) throw ParseError("empty value for slot '" + t.name + "'", t.position);
        out.slots.emplace_back(ontology::canonical_slot(t.name), t.trailing);
    }
    return out;
}

Action parse_action(std::string_view text) {
    std::string trimmed = text::trim(text);
    if (trimmed.empty() || trimmed.front() != '[') return Action::chat(std::string(text));
    return parse_command(text);
}

std::string serialize_action(const Action& a) {
    if (a.kind == ActToken::Chat) return a.text;
    std::string out = a.kind == ActToken::Book ? "[booking]" : "[" + std::string(to_string(*a.domain)) + "]";
    for (const auto& [slot, value] : a.slots) {
        out += " [" + slot + "] " + value;
    }
    return out;
}

std::string serialize_prev(const std::optional<Action>& a) {
    return a ? serialize_action(*a) : std::string(kStartToken);
}

}  // namespace remake
