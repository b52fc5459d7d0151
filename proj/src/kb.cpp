#include "remake/kb.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include <json.hpp>

#include "remake/ontology.hpp"

namespace remake {

using json = nlohmann::json;

namespace {

// "9:30" -> "09:30"; returns nullopt for anything that is not H:MM / HH:MM.
std::optional<std::string> pad_time(std::string_view v) {
    std::size_t colon = v.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon > 2 || v.size() != colon + 3) {
        return std::nullopt;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i != colon && !std::isdigit(static_cast<unsigned char>(v[i]))) return std::nullopt;
    }
    std::string out(v);
    if (colon == 1) out.insert(out.begin(), '0');
    return out;
}

std::string replace_word(std::string s, std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        if (text::starts_with_word(s, pos, from)) {
            s.replace(pos, from.size(), to);
            pos += to.size();
        } else {
            pos += from.size();
        }
    }
    return s;
}

std::string describe(Domain d) { return std::string(to_string(d)); }

}  // namespace

std::string normalize_value(std::string_view slot, std::string_view raw) {
    std::string v = text::to_lower(text::collapse_ws(raw));
    std::string s = ontology::canonical_slot(slot);

    v = replace_word(std::move(v), "center", "centre");
    if (v == "moderately priced" || v == "moderately") v = "moderate";
    if (v == "cheaply") v = "cheap";
    if (v == "dont care" || v == "don't care" || v == "do n't care" || v == "do not care") {
        v = std::string(kDontCare);
    }
    if (s == "type" && v == "guest house") v = "guesthouse";
    if ((s == "parking" || s == "internet") && v == "free") v = "yes";
    if (auto t = pad_time(v)) v = *t;
    return v;
}

Entity entity_from_record(Domain d, const std::map<std::string, std::string>& flat_record,
                          std::size_t index) {
    Entity e;
    e.domain = d;
    for (const auto& [key, value] : flat_record) {
        std::string slot = ontology::canonical_slot(key);
        e.slots[slot] = normalize_value(slot, value);
    }
    auto require = [&](std::string_view slot) -> const std::string& {
        auto it = e.slots.find(std::string(slot));
        if (it == e.slots.end() || it->second.empty()) {
            throw LoadError(describe(d) + " record " + std::to_string(index) + " is missing '" +
                            std::string(slot) + "'");
        }
        return it->second;
    };

    switch (d) {
        case Domain::train:
            e.name = require("trainID");
            e.id = e.name + " " + require("day") + " " + require(ontology::kLeaveAt);
            break;
        case Domain::hospital:
            e.id = require("id");
            e.name = require("department");
            break;
        default:
            e.id = require("name");
            e.name = e.id;
            break;
    }
    return e;
}

std::string booking_reference(std::string_view key, Domain d, std::string_view entity_id,
                              const SlotMap& booking) {
    std::string message = describe(d);
    message += '\x1f';
    message += entity_id;
    for (const auto& [slot, value] : booking) {  // std::map: sorted by slot
        message += '\x1e';
        message += slot + "=" + value;
    }
    std::string hex = hmac_sha256_hex(key, message).substr(0, 8);
    std::transform(hex.begin(), hex.end(), hex.begin(),
                   [](char c) { return static_cast<char>(std::toupper(static_cast<unsigned char>(c))); });
    return hex;
}

void KnowledgeBase::add_domain(Domain d, std::vector<Entity> entities) {
    auto& index = index_[d];
    auto& list = by_domain_[d];
    for (auto& e : entities) {
        if (index.contains(e.id)) {
            throw LoadError("duplicate id '" + e.id + "' in " + describe(d));
        }
        auto ptr = std::make_shared<const Entity>(std::move(e));
        index.emplace(ptr->id, ptr);
        list.push_back(std::move(ptr));
    }
    std::stable_sort(list.begin(), list.end(),
                     [](const EntityPtr& a, const EntityPtr& b) { return a->id < b->id; });
}

namespace {

const std::vector<std::string> kDefaultTaxiColors{"black", "white", "red", "yellow", "blue", "grey"};
const std::vector<std::string> kDefaultTaxiTypes{"toyota", "skoda", "bmw",   "honda",      "ford",
                                                 "audi",   "lexus", "volvo", "volkswagen", "tesla"};

bool is_known_slot(Domain d, const std::string& slot) {
    if (ontology::is_search_slot(d, slot)) return true;
    auto display = ontology::display_slots(d);
    if (std::find(display.begin(), display.end(), slot) != display.end()) return true;
    return slot == "name" || slot == "id" || slot == "trainID" || slot == "day" ||
           slot == ontology::kLeaveAt;
}

std::vector<Entity> read_domain_file(Domain d, const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw LoadError("cannot open " + file.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw LoadError(file.string() + ": " + e.what());
    }
    if (!doc.is_array()) throw LoadError(file.string() + ": expected a JSON array");

    std::vector<Entity> out;
    out.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& rec = doc[i];
        if (!rec.is_object()) {
            throw LoadError(describe(d) + " record " + std::to_string(i) + " is not an object");
        }
        std::map<std::string, std::string> flat;
        for (const auto& [key, value] : rec.items()) {
            if (value.is_string()) {
                flat[key] = value.get<std::string>();
            } else if (value.is_number_integer()) {
                flat[key] = std::to_string(value.get<long long>());
            } else if (value.is_number() || value.is_boolean()) {
                flat[key] = value.dump();
            } else if (value.is_null()) {
                continue;
            } else if (is_known_slot(d, ontology::canonical_slot(key))) {
                throw LoadError(describe(d) + " record " + std::to_string(i) + ": slot '" + key +
                                "' is not flat");
            }
            // Nested data outside the slot ontology (location, price tables) is ignored.
        }
        out.push_back(entity_from_record(d, flat, i));
    }
    return out;
}

}  // namespace

KnowledgeBase KnowledgeBase::load(const std::filesystem::path& dir, const KbOptions& options) {
    KnowledgeBase kb;
    kb.hash_key_ = options.hash_key;
    kb.taxi_colors_ = kDefaultTaxiColors;
    kb.taxi_types_ = kDefaultTaxiTypes;

    for (Domain d : options.domains) {
        if (d == Domain::taxi) continue;
        auto file = dir / (describe(d) + "_db.json");
        if (!std::filesystem::exists(file)) throw LoadError("missing database file " + file.string());
        kb.add_domain(d, read_domain_file(d, file));
    }

    auto taxi_file = dir / "taxi_db.json";
    if (std::filesystem::exists(taxi_file)) {
        std::ifstream in(taxi_file);
        json doc = json::parse(in, nullptr, false);
        if (doc.is_object()) {
            if (doc.contains("taxi_colors")) kb.taxi_colors_ = doc["taxi_colors"].get<std::vector<std::string>>();
            if (doc.contains("taxi_types")) kb.taxi_types_ = doc["taxi_types"].get<std::vector<std::string>>();
        }
    }
    return kb;
}

KnowledgeBase KnowledgeBase::from_entities(std::vector<Entity> entities, const KbOptions& options) {
    KnowledgeBase kb;
    kb.hash_key_ = options.hash_key;
    kb.taxi_colors_ = kDefaultTaxiColors;
    kb.taxi_types_ = kDefaultTaxiTypes;
    std::map<Domain, std::vector<Entity>> grouped;
    for (Domain d : options.domains) grouped[d];
    for (auto& e : entities) grouped[e.domain].push_back(std::move(e));
    for (auto& [d, list] : grouped) {
        if (d != Domain::taxi) kb.add_domain(d, std::move(list));
    }
    return kb;
}

std::map<Domain, std::size_t> KnowledgeBase::counts() const {
    std::map<Domain, std::size_t> out;
    for (const auto& [d, list] : by_domain_) out[d] = list.size();
    return out;
}

bool KnowledgeBase::loaded(Domain d) const { return d == Domain::taxi || by_domain_.contains(d); }

const std::vector<EntityPtr>& KnowledgeBase::entities(Domain d) const {
    static const std::vector<EntityPtr> kEmpty;
    auto it = by_domain_.find(d);
    return it == by_domain_.end() ? kEmpty : it->second;
}

EntityPtr KnowledgeBase::find(Domain d, std::string_view id) const {
    auto it = index_.find(d);
    if (it == index_.end()) return nullptr;
    auto hit = it->second.find(id);
    return hit == it->second.end() ? nullptr : hit->second;
}

namespace {

bool matches(const Entity& e, const std::string& slot, const std::string& value) {
    if (value == kDontCare) return true;
    auto it = e.slots.find(slot);
    if (it == e.slots.end()) return false;
    if (e.domain == Domain::train && (slot == ontology::kLeaveAt || slot == ontology::kArriveBy)) {
        auto want = pad_time(value);
        auto have = pad_time(it->second);
        if (want && have) return slot == ontology::kLeaveAt ? *have >= *want : *have <= *want;
    }
    return it->second == value;
}

}  // namespace

QueryResult KnowledgeBase::query(const Constraints& c) const {
    if (!loaded(c.domain)) throw QueryError("domain not loaded: " + describe(c.domain));

    std::vector<std::pair<std::string, std::string>> active;
    for (const auto& [slot, raw] : c.slots) {
        std::string s = ontology::canonical_slot(slot);
        if (!ontology::is_search_slot(c.domain, s)) {
            throw QueryError("unknown slot '" + s + "' for " + describe(c.domain));
        }
        active.emplace_back(s, normalize_value(s, raw));
    }

    QueryResult out;
    auto gate = [&](std::initializer_list<std::string_view> needed) {
        for (auto slot : needed) {
            bool present = std::any_of(active.begin(), active.end(),
                                       [&](const auto& kv) { return kv.first == slot; });
            if (!present) out.missing.emplace_back(slot);
        }
    };

    if (c.domain == Domain::train) gate({"departure", "destination", "day"});
    if (c.domain == Domain::taxi) {
        gate({"departure", "destination"});
        if (!out.insufficient()) {
            SlotMap normalized(active.begin(), active.end());
            out.entities.push_back(synthesize_taxi(normalized));
        }
        return out;
    }
    if (out.insufficient()) return out;

    for (const auto& e : entities(c.domain)) {
        bool ok = std::all_of(active.begin(), active.end(),
                              [&](const auto& kv) { return matches(*e, kv.first, kv.second); });
        if (ok) out.entities.push_back(e);
    }
    return out;
}

EntityPtr KnowledgeBase::synthesize_taxi(const SlotMap& constraints) const {
    std::string message = "taxi";
    for (const auto& [slot, value] : constraints) message += "\x1e" + slot + "=" + value;
    auto mac = hmac_sha256(hash_key_, message);

    Entity taxi;
    taxi.domain = Domain::taxi;
    taxi.id = "taxi";
    taxi.name = "taxi";
    taxi.slots = constraints;
    taxi.slots["name"] = "taxi";
    taxi.slots["type"] = taxi_colors_[mac[0] % taxi_colors_.size()] + " " +
                         taxi_types_[mac[1] % taxi_types_.size()];
    std::string phone = "07";
    for (std::size_t i = 2; phone.size() < 10; ++i) phone.push_back(static_cast<char>('0' + mac[i] % 10));
    taxi.slots["phone"] = phone;
    return std::make_shared<const Entity>(std::move(taxi));
}

BookingOutcome KnowledgeBase::check_booking(Domain d, std::string_view entity_id,
                                            const SlotMap& booking,
                                            std::optional<BookingStatus> override_status) const {
    if (!ontology::bookable(d)) throw ProtocolError(describe(d) + " does not take bookings");
    if (d != Domain::taxi && !find(d, entity_id)) {
        throw QueryError("unknown " + describe(d) + " entity '" + std::string(entity_id) + "'");
    }
    std::vector<std::string> missing;
    for (auto slot : ontology::required_booking_slots(d)) {
        auto it = booking.find(std::string(slot));
        if (it == booking.end() || it->second.empty()) missing.emplace_back(slot);
    }
    if (!missing.empty()) throw MissingSlotError(std::move(missing));

    BookingOutcome out;
    out.status = override_status.value_or(BookingStatus::success);
    if (out.status == BookingStatus::success) {
        out.reference = booking_reference(hash_key_, d, entity_id, booking);
    } else {
        out.status = BookingStatus::failure;
        out.reason = "booking not available (recorded outcome)";
    }
    return out;
}

}  // namespace remake
