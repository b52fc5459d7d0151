#include <regex>

#include "remake/eval.hpp"
#include "remake/ontology.hpp"

namespace remake {

namespace {

const std::regex& placeholder_pattern() {
    static const std::regex re(R"(\[value_([a-z0-9_]+)\])");
    return re;
}

}  // namespace

std::vector<std::string> placeholders(std::string_view response) {
    std::vector<std::string> out;
    std::string s(response);
    for (std::sregex_iterator it(s.begin(), s.end(), placeholder_pattern()), end; it != end; ++it) {
        out.push_back(it->str());
    }
    return out;
}

std::string placeholder_for(std::string_view slot) {
    std::string s = text::to_lower(slot);
    if (s == "trainid") s = "id";
    std::replace(s.begin(), s.end(), ' ', '_');
    return "[value_" + s + "]";
}

LexicalizeResult lexicalize(std::string_view response, const Entity* entity, const BookingOutcome* booking) {
    LexicalizeResult out;
    std::string s(response);
    std::size_t last = 0;
    for (std::sregex_iterator it(s.begin(), s.end(), placeholder_pattern()), end; it != end; ++it) {
        out.text.append(s, last, static_cast<std::size_t>(it->position()) - last);
        last = static_cast<std::size_t>(it->position() + it->length());

        std::string slot = (*it)[1].str();
        std::optional<std::string> value;
        if (slot == "reference") {
            if (booking && booking->status == BookingStatus::success) value = booking->reference;
        } else if (entity && (slot == "name" || slot == "id")) {
            value = entity->name;
        } else if (entity) {
            std::string key = slot;
            std::replace(key.begin(), key.end(), '_', ' ');
            key = ontology::canonical_slot(key);
            if (auto v = entity->slots.find(key); v != entity->slots.end()) value = v->second;
        }
        if (value) {
            out.text += *value;
        } else {
            out.text += it->str();
            ++out.unresolved;
        }
    }
    out.text.append(s, last);
    return out;
}

}  // namespace remake
