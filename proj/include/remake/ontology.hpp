#pragma once

#include <span>
#include <string>
#include <string_view>

#include "remake/common.hpp"

namespace remake::ontology {

// Maps a slot name in any casing to its canonical spelling (leaveAt,
// arriveBy, trainID; everything else lowercase).
std::string canonical_slot(std::string_view name);

// Slots a Search may constrain, in display order.
std::span<const std::string_view> search_slots(Domain d);
// Slots a Book may carry (excluding the `select` pseudo-slot), in display order.
std::span<const std::string_view> booking_slots(Domain d);
std::span<const std::string_view> required_booking_slots(Domain d);
// Columns shown for each listed entity; the first one is the naming slot.
std::span<const std::string_view> display_slots(Domain d);

bool is_search_slot(Domain d, std::string_view slot);
bool is_booking_slot(Domain d, std::string_view slot);
bool bookable(Domain d);
// Domains backed by a database file (taxi is synthesized).
bool has_database(Domain d);

// Train slots matched as inequalities instead of equality.
inline constexpr std::string_view kLeaveAt = "leaveAt";
inline constexpr std::string_view kArriveBy = "arriveBy";
inline constexpr std::string_view kSelectSlot = "select";

}  // namespace remake::ontology
