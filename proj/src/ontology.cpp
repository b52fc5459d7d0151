#include "remake/ontology.hpp"

#include <algorithm>
#include <array>

namespace remake::ontology {

namespace {

using namespace std::string_view_literals;

constexpr std::array kRestaurantSearch{"name"sv, "food"sv, "pricerange"sv, "area"sv};
constexpr std::array kHotelSearch{"name"sv,    "type"sv,    "pricerange"sv, "area"sv,
                                  "stars"sv,   "parking"sv, "internet"sv};
constexpr std::array kAttractionSearch{"name"sv, "type"sv, "area"sv};
constexpr std::array kTrainSearch{"departure"sv, "destination"sv, "day"sv, "leaveAt"sv,
                                  "arriveBy"sv};
constexpr std::array kTaxiSearch{"departure"sv, "destination"sv, "leaveAt"sv, "arriveBy"sv};
constexpr std::array kHospitalSearch{"department"sv};
constexpr std::array<std::string_view, 1> kPoliceSearch{"name"sv};

constexpr std::array kRestaurantBooking{"day"sv, "people"sv, "time"sv};
constexpr std::array kHotelBooking{"day"sv, "people"sv, "stay"sv};
constexpr std::array kTrainBooking{"people"sv};
constexpr std::array<std::string_view, 0> kNoSlots{};

constexpr std::array kRestaurantDisplay{"name"sv,  "food"sv,    "area"sv,    "pricerange"sv,
                                        "phone"sv, "address"sv, "postcode"sv};
constexpr std::array kHotelDisplay{"name"sv,     "area"sv,     "pricerange"sv, "phone"sv,
                                   "address"sv,  "postcode"sv, "stars"sv,      "parking"sv,
                                   "internet"sv, "type"sv};
constexpr std::array kAttractionDisplay{"name"sv,  "type"sv,    "area"sv,    "entrance fee"sv,
                                        "phone"sv, "address"sv, "postcode"sv};
constexpr std::array kTrainDisplay{"trainID"sv, "departure"sv, "destination"sv, "day"sv,
                                   "leaveAt"sv, "arriveBy"sv,  "price"sv,       "duration"sv};
constexpr std::array kTaxiDisplay{"name"sv, "type"sv, "phone"sv};
constexpr std::array kHospitalDisplay{"department"sv, "phone"sv};
constexpr std::array kPoliceDisplay{"name"sv, "address"sv, "phone"sv};

bool contains(std::span<const std::string_view> xs, std::string_view x) {
    return std::find(xs.begin(), xs.end(), x) != xs.end();
}

}  // namespace

std::string canonical_slot(std::string_view name) {
    std::string lower = text::to_lower(text::collapse_ws(name));
    if (lower == "leaveat") return "leaveAt";
    if (lower == "arriveby") return "arriveBy";
    if (lower == "trainid") return "trainID";
    return lower;
}

std::span<const std::string_view> search_slots(Domain d) {
    switch (d) {
        case Domain::restaurant: return kRestaurantSearch;
        case Domain::hotel: return kHotelSearch;
        case Domain::attraction: return kAttractionSearch;
        case Domain::train: return kTrainSearch;
        case Domain::taxi: return kTaxiSearch;
        case Domain::hospital: return kHospitalSearch;
        case Domain::police: return kPoliceSearch;
    }
    return kNoSlots;
}

std::span<const std::string_view> booking_slots(Domain d) {
    switch (d) {
        case Domain::restaurant: return kRestaurantBooking;
        case Domain::hotel: return kHotelBooking;
        case Domain::train: return kTrainBooking;
        default: return kNoSlots;
    }
}

std::span<const std::string_view> required_booking_slots(Domain d) { return booking_slots(d); }

std::span<const std::string_view> display_slots(Domain d) {
    switch (d) {
        case Domain::restaurant: return kRestaurantDisplay;
        case Domain::hotel: return kHotelDisplay;
        case Domain::attraction: return kAttractionDisplay;
        case Domain::train: return kTrainDisplay;
        case Domain::taxi: return kTaxiDisplay;
        case Domain::hospital: return kHospitalDisplay;
        case Domain::police: return kPoliceDisplay;
    }
    return kNoSlots;
}

bool is_search_slot(Domain d, std::string_view slot) { return contains(search_slots(d), slot); }
bool is_booking_slot(Domain d, std::string_view slot) { return contains(booking_slots(d), slot); }

bool bookable(Domain d) {
    return d == Domain::restaurant || d == Domain::hotel || d == Domain::train || d == Domain::taxi;
}

bool has_database(Domain d) { return d != Domain::taxi; }

}  // namespace remake::ontology
