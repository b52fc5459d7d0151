#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace remake {

enum class Domain { restaurant, hotel, attraction, train, taxi, hospital, police };

// Canonical order, also used to break ties when one turn touches several domains.
inline constexpr std::array<Domain, 7> kAllDomains = {
    Domain::restaurant, Domain::hotel,    Domain::attraction, Domain::train,
    Domain::taxi,       Domain::hospital, Domain::police};

std::string_view to_string(Domain d);
std::optional<Domain> parse_domain(std::string_view name);

using SlotMap = std::map<std::string, std::string>;
using SlotList = std::vector<std::pair<std::string, std::string>>;
using Belief = std::map<Domain, SlotMap>;

enum class BookingStatus { none, success, failure };

std::string_view to_string(BookingStatus s);
std::optional<BookingStatus> parse_booking_status(std::string_view s);

// Distinguished slot values.
inline constexpr std::string_view kDontCare = "dontcare";
inline constexpr std::string_view kClearValue = "none";

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed document tree (children on a leaf, newline inside a value, ...).
class StructuralError : public Error {
public:
    using Error::Error;
};

// replace_section found zero or several matching sections.
class AmbiguityError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class LoadError : public Error {
public:
    using Error::Error;
};

class QueryError : public Error {
public:
    using Error::Error;
};

class MissingSlotError : public Error {
public:
    explicit MissingSlotError(std::vector<std::string> slots);
    const std::vector<std::string>& slots() const noexcept { return slots_; }

private:
    std::vector<std::string> slots_;
};

// Action not applicable in the current interface state (e.g. Book without an active domain).
class ProtocolError : public Error {
public:
    using Error::Error;
};

class EntityNotInResults : public Error {
public:
    explicit EntityNotInResults(std::string id)
        : Error("entity not in results: " + id), id_(std::move(id)) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class AlignmentError : public Error {
public:
    using Error::Error;
};

class PolicyError : public Error {
public:
    using Error::Error;
};

namespace text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
// Trims and collapses every run of whitespace into a single space.
std::string collapse_ws(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
bool starts_with_word(std::string_view haystack, std::size_t pos, std::string_view needle);

}  // namespace text

}  // namespace remake
