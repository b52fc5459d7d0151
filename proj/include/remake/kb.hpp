#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "remake/common.hpp"
#include "remake/hash.hpp"

namespace remake {

struct Entity {
    Domain domain = Domain::restaurant;
    std::string id;    // unique within the domain
    std::string name;  // what responses call it: name, trainID or department
    SlotMap slots;

    bool operator==(const Entity&) const = default;
};

using EntityPtr = std::shared_ptr<const Entity>;

struct Constraints {
    Domain domain = Domain::restaurant;
    SlotMap slots;
};

struct QueryResult {
    std::vector<EntityPtr> entities;
    // Set for train (and taxi) queries missing a gating slot; entities is then empty.
    std::vector<std::string> missing;

    bool insufficient() const { return !missing.empty(); }
};

struct BookingOutcome {
    BookingStatus status = BookingStatus::none;
    std::string reference;  // success only
    std::string reason;     // failure only
};

// lowercase, trim, collapse whitespace, synonym table, HH:MM zero padding.
std::string normalize_value(std::string_view slot, std::string_view raw);

struct KbOptions {
    // Domains whose `<domain>_db.json` must exist. Taxi is always available.
    std::vector<Domain> domains{Domain::restaurant, Domain::hotel,    Domain::attraction,
                                Domain::train,      Domain::hospital, Domain::police};
    std::string hash_key{kDefaultHashKey};
};

// Immutable after load; safe for concurrent readers.
class KnowledgeBase {
public:
    static KnowledgeBase load(const std::filesystem::path& dir, const KbOptions& options = {});
    // Builds a knowledge base from already-parsed records (used by fixtures).
    static KnowledgeBase from_entities(std::vector<Entity> entities, const KbOptions& options = {});

    std::map<Domain, std::size_t> counts() const;
    bool loaded(Domain d) const;
    const std::vector<EntityPtr>& entities(Domain d) const;
    EntityPtr find(Domain d, std::string_view id) const;
    const std::string& hash_key() const { return hash_key_; }

    // Equality on every constrained slot, `dontcare` as wildcard; train
    // leaveAt/arriveBy as at-or-after / at-or-before. Result sorted by id.
    QueryResult query(const Constraints& c) const;

    BookingOutcome check_booking(Domain d, std::string_view entity_id, const SlotMap& booking,
                                 std::optional<BookingStatus> override_status = std::nullopt) const;

    // The synthesized taxi for a set of taxi constraints.
    EntityPtr synthesize_taxi(const SlotMap& constraints) const;

private:
    std::map<Domain, std::vector<EntityPtr>> by_domain_;
    std::map<Domain, std::map<std::string, EntityPtr, std::less<>>> index_;
    std::vector<std::string> taxi_colors_;
    std::vector<std::string> taxi_types_;
    std::string hash_key_;

    void add_domain(Domain d, std::vector<Entity> entities);
};

// Parses one raw database record into an Entity. `index` is only used in error messages.
Entity entity_from_record(Domain d, const std::map<std::string, std::string>& flat_record,
                          std::size_t index);

std::string booking_reference(std::string_view key, Domain d, std::string_view entity_id,
                              const SlotMap& booking);

}  // namespace remake
