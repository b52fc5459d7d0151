#include "remake/common.hpp"

#include <algorithm>
#include <cctype>

namespace remake {

std::string_view to_string(Domain d) {
    switch (d) {
        case Domain::restaurant: return "restaurant";
        case Domain::hotel: return "hotel";
        case Domain::attraction: return "attraction";
        case Domain::train: return "train";
        case Domain::taxi: return "taxi";
        case Domain::hospital: return "hospital";
        case Domain::police: return "police";
    }
    return "";
}

std::optional<Domain> parse_domain(std::string_view name) {
    for (Domain d : kAllDomains) {
        if (to_string(d) == name) return d;
    }
    return std::nullopt;
}

std::string_view to_string(BookingStatus s) {
    switch (s) {
        case BookingStatus::none: return "none";
        case BookingStatus::success: return "success";
        case BookingStatus::failure: return "failure";
    }
    return "";
}

std::optional<BookingStatus> parse_booking_status(std::string_view s) {
    std::string v = text::to_lower(s);
    if (v == "none") return BookingStatus::none;
    if (v == "success") return BookingStatus::success;
    if (v == "failure") return BookingStatus::failure;
    return std::nullopt;
}

namespace {

std::string join_slots(const std::vector<std::string>& slots) {
    std::string out;
    for (const auto& s : slots) {
        if (!out.empty()) out += ", ";
        out += s;
    }
    return out;
}

}  // namespace

MissingSlotError::MissingSlotError(std::vector<std::string> slots)
    : Error("missing booking slots: " + join_slots(slots)), slots_(std::move(slots)) {}

namespace text {

namespace {
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_word(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) != 0 || u >= 0x80;
}
}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](char c) {
        return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    });
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::string collapse_ws(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending = false;
    for (char c : s) {
        if (is_space(c)) {
            pending = !out.empty();
            continue;
        }
        if (pending) out.push_back(' ');
        pending = false;
        out.push_back(c);
    }
    return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

bool starts_with_word(std::string_view haystack, std::size_t pos, std::string_view needle) {
    if (needle.empty() || pos + needle.size() > haystack.size()) return false;
    if (haystack.compare(pos, needle.size(), needle) != 0) return false;
    if (pos > 0 && is_word(haystack[pos - 1]) && is_word(needle.front())) return false;
    std::size_t end = pos + needle.size();
    if (end < haystack.size() && is_word(haystack[end]) && is_word(needle.back())) return false;
    return true;
}

}  // namespace text

}  // namespace remake
