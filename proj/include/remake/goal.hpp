#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "remake/common.hpp"

namespace remake {

struct DomainGoal {
    Domain domain = Domain::restaurant;
    SlotMap info;                    // search constraints the user wants
    SlotMap book;                    // booking slots; empty when no booking is wanted
    std::vector<std::string> reqt;   // requested slots ("phone", "reference", ...)

    bool wants_booking() const;
};

// A user goal: per-domain items in the order the user brings them up.
struct Goal {
    std::vector<DomainGoal> domains;

    const DomainGoal* find(Domain d) const;
};

// {"restaurant": {"info": {...}, "book": {...}, "reqt": [...]}, ...}; an
// optional "order" array fixes the domain order (default: canonical).
Goal goal_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const Goal& g);

}  // namespace remake
