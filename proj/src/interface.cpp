#include "remake/interface.hpp"

#include <algorithm>

#include "remake/hash.hpp"
#include "remake/ontology.hpp"

namespace remake {

using json = nlohmann::json;

std::string_view to_string(Speaker s) { return s == Speaker::user ? "user" : "agent"; }

BookingStatus InterfaceState::status_of(Domain d) const {
    auto it = booking_status.find(d);
    return it == booking_status.end() ? BookingStatus::none : it->second;
}

bool operator==(const InterfaceState& a, const InterfaceState& b) {
    auto same_results = std::equal(a.results.begin(), a.results.end(), b.results.begin(),
                                   b.results.end(),
                                   [](const EntityPtr& x, const EntityPtr& y) { return *x == *y; });
    return same_results && a.active_domain == b.active_domain && a.constraints == b.constraints &&
           a.booking_info == b.booking_info && a.booking_status == b.booking_status &&
           a.booking_reference == b.booking_reference && a.result_count == b.result_count &&
           a.missing == b.missing && a.selected == b.selected && a.focus == b.focus &&
           a.chat_log == b.chat_log;
}

InterfaceState user_turn(const InterfaceState& state, std::string_view text) {
    InterfaceState next = state;
    next.chat_log.push_back({Speaker::user, text::collapse_ws(text)});
    return next;
}

namespace {

bool contains_id(std::span<const EntityPtr> results, std::string_view id) {
    return std::any_of(results.begin(), results.end(), [&](const EntityPtr& e) { return e->id == id; });
}

std::vector<std::string> pinned(const InterfaceState& s) {
    std::vector<std::string> ids;
    if (s.selected) ids.push_back(*s.selected);
    for (const auto& id : s.focus) {
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
    }
    return ids;
}

void requery(InterfaceState& s, const KnowledgeBase& kb) {
    Domain d = *s.active_domain;
    QueryResult r = kb.query({d, s.constraints[d]});
    s.results = std::move(r.entities);
    s.missing = std::move(r.missing);
    s.result_count = s.results.size();
    std::erase_if(s.focus, [&](const std::string& id) { return !contains_id(s.results, id); });
    if (s.selected && !contains_id(s.results, *s.selected)) s.selected.reset();
}

void apply_search(InterfaceState& s, const Action& a, const KnowledgeBase& kb) {
    Domain d = *a.domain;
    SlotMap merged = s.constraints[d];
    for (const auto& [raw_slot, raw_value] : a.slots) {
        std::string slot = ontology::canonical_slot(raw_slot);
        if (!ontology::is_search_slot(d, slot)) {
            throw QueryError("unknown slot '" + slot + "' for " + std::string(to_string(d)));
        }
        std::string value = normalize_value(slot, raw_value);
        if (value == kClearValue) {
            merged.erase(slot);
        } else {
            merged[slot] = value;
        }
    }
    s.constraints[d] = std::move(merged);
    if (s.active_domain != d) {
        s.focus.clear();
        s.selected.reset();
    }
    s.active_domain = d;
    requery(s, kb);
}

std::optional<std::string> resolve_selection(const InterfaceState& s, const std::string& value) {
    for (const auto& e : s.results) {
        if (e->id == value) return e->id;
    }
    std::optional<std::string> by_name;
    for (const auto& e : s.results) {
        if (e->name == value) {
            if (by_name) return std::nullopt;  // ambiguous name (e.g. a trainID on two days)
            by_name = e->id;
        }
    }
    return by_name;
}

void apply_book(InterfaceState& s, const Action& a, const KnowledgeBase& kb,
                std::optional<BookingStatus> override_status) {
    if (!s.active_domain) throw ProtocolError("Book requires an active domain");
    Domain d = *s.active_domain;
    if (!ontology::bookable(d)) throw ProtocolError(std::string(to_string(d)) + " does not take bookings");
    if (s.results.empty()) throw ProtocolError("Book requires at least one search result");

    SlotMap info = s.booking_info[d];
    for (const auto& [raw_slot, raw_value] : a.slots) {
        std::string slot = ontology::canonical_slot(raw_slot);
        std::string value = normalize_value(slot, raw_value);
        if (slot == ontology::kSelectSlot) {
            auto id = resolve_selection(s, value);
            if (!id) throw ProtocolError("cannot select '" + value + "': not among the results");
            s.selected = *id;
            continue;
        }
        if (!ontology::is_booking_slot(d, slot)) {
            throw QueryError("unknown booking slot '" + slot + "' for " + std::string(to_string(d)));
        }
        if (value == kClearValue) {
            info.erase(slot);
        } else {
            info[slot] = value;
        }
    }
    s.booking_info[d] = info;

    auto required = ontology::required_booking_slots(d);
    bool complete = std::all_of(required.begin(), required.end(),
                                [&](std::string_view slot) { return info.contains(std::string(slot)); });
    if (!complete) {
        s.booking_status[d] = BookingStatus::none;
        s.booking_reference.erase(d);
        return;
    }

    EntityPtr target = booking_target(s);
    BookingOutcome outcome = kb.check_booking(d, target->id, info, override_status);
    s.booking_status[d] = outcome.status;
    if (outcome.status == BookingStatus::success) {
        s.booking_reference[d] = outcome.reference;
        s.selected = target->id;
    } else {
        s.booking_reference.erase(d);
    }
}

}  // namespace

InterfaceState apply_action(const InterfaceState& state, const Action& action,
                            const KnowledgeBase& kb, std::optional<BookingStatus> booking_override) {
    InterfaceState next = state;
    switch (action.kind) {
        case ActToken::Chat:
            next.chat_log.push_back({Speaker::agent, text::collapse_ws(action.text)});
            break;
        case ActToken::Search:
            if (!action.domain) throw ProtocolError("Search without a domain");
            apply_search(next, action, kb);
            break;
        case ActToken::Book:
            apply_book(next, action, kb, booking_override);
            break;
    }
    return next;
}

std::vector<EntityPtr> rearrange_results(std::span<const EntityPtr> results,
                                         std::span<const std::string> mentioned, std::size_t k) {
    std::vector<EntityPtr> out;
    std::vector<std::string> seen;
    for (const auto& id : mentioned) {
        if (std::find(seen.begin(), seen.end(), id) != seen.end()) continue;
        auto it = std::find_if(results.begin(), results.end(),
                               [&](const EntityPtr& e) { return e->id == id; });
        if (it == results.end()) throw EntityNotInResults(id);
        seen.push_back(id);
        out.push_back(*it);
    }
    std::vector<EntityPtr> rest;
    for (const auto& e : results) {
        if (std::find(seen.begin(), seen.end(), e->id) == seen.end()) rest.push_back(e);
    }
    std::stable_sort(rest.begin(), rest.end(),
                     [](const EntityPtr& a, const EntityPtr& b) { return a->id < b->id; });
    out.insert(out.end(), rest.begin(), rest.end());
    if (out.size() > k) out.resize(k);
    return out;
}

InterfaceState focus_entities(const InterfaceState& state, std::span<const std::string> ids) {
    // Validates membership before touching the state.
    rearrange_results(state.results, ids, state.results.size());
    InterfaceState next = state;
    next.focus.assign(ids.begin(), ids.end());
    if (next.selected && std::find(ids.begin(), ids.end(), *next.selected) == ids.end()) {
        next.selected.reset();
    }
    return next;
}

std::vector<EntityPtr> displayed_results(const InterfaceState& state, std::size_t k) {
    return rearrange_results(state.results, pinned(state), k);
}

EntityPtr booking_target(const InterfaceState& state) {
    auto top = displayed_results(state, 1);
    return top.empty() ? nullptr : top.front();
}

std::string entity_line(const Entity& e) {
    std::string line = e.name;
    auto columns = ontology::display_slots(e.domain);
    for (std::size_t i = 1; i < columns.size(); ++i) {
        auto it = e.slots.find(std::string(columns[i]));
        if (it == e.slots.end()) continue;
        line += " | " + it->first + ": " + it->second;
    }
    return line;
}

DocNode build_document(const InterfaceState& state, const InterfaceOptions& options) {
    DocNode root = DocNode::section(std::string(kInterfaceTitle));

    if (options.show_chat) {
        DocNode chat = DocNode::section("Chat");
        std::size_t n = state.chat_log.size();
        std::size_t first = n > options.chat_turns ? n - options.chat_turns : 0;
        for (std::size_t i = first; i < n; ++i) {
            const auto& turn = state.chat_log[i];
            chat.children.push_back(DocNode::key_value(std::string(to_string(turn.speaker)), turn.text));
        }
        root.children.push_back(std::move(chat));
    }

    if (!state.active_domain) return root;
    Domain d = *state.active_domain;

    DocNode search = DocNode::section("Search: " + std::string(to_string(d)));
    auto found = state.constraints.find(d);
    if (found != state.constraints.end()) {
        for (auto slot : ontology::search_slots(d)) {
            auto it = found->second.find(std::string(slot));
            if (it != found->second.end()) search.children.push_back(DocNode::key_value(it->first, it->second));
        }
    }
    if (!state.missing.empty()) {
        std::string missing;
        for (const auto& m : state.missing) missing += (missing.empty() ? "" : ", ") + m;
        search.children.push_back(
            DocNode::status_line("Results", "insufficient constraints (missing " + missing + ")"));
    } else {
        auto shown = displayed_results(state, options.max_results);
        search.children.push_back(DocNode::status_line(
            "Results", std::to_string(state.result_count) + " found (showing " +
                           std::to_string(shown.size()) + ")"));
        if (!shown.empty()) {
            std::vector<DocNode> items;
            for (const auto& e : shown) items.push_back(DocNode::text(entity_line(*e)));
            search.children.push_back(DocNode::ordered_list(std::move(items)));
        }
    }
    root.children.push_back(std::move(search));

    if (ontology::bookable(d)) {
        DocNode booking = DocNode::section("Booking");
        auto info = state.booking_info.find(d);
        if (info != state.booking_info.end()) {
            for (auto slot : ontology::booking_slots(d)) {
                auto it = info->second.find(std::string(slot));
                if (it != info->second.end()) booking.children.push_back(DocNode::key_value(it->first, it->second));
            }
        }
        BookingStatus status = state.status_of(d);
        booking.children.push_back(DocNode::status_line("Status", std::string(to_string(status))));
        auto ref = state.booking_reference.find(d);
        if (status == BookingStatus::success && ref != state.booking_reference.end()) {
            booking.children.push_back(DocNode::status_line("Reference", ref->second));
        }
        root.children.push_back(std::move(booking));
    }
    return root;
}

std::string render_state(const InterfaceState& state, const InterfaceOptions& options) {
    return render_markdown(build_document(state, options), 1);
}

json to_json(const Entity& e) {
    return {{"domain", to_string(e.domain)}, {"id", e.id}, {"name", e.name}, {"slots", e.slots}};
}

Entity entity_from_json(const json& j) {
    Entity e;
    auto d = parse_domain(j.at("domain").get<std::string>());
    if (!d) throw Error("unknown domain in entity json");
    e.domain = *d;
    e.id = j.at("id").get<std::string>();
    e.name = j.at("name").get<std::string>();
    e.slots = j.at("slots").get<SlotMap>();
    return e;
}

namespace {

template <typename V, typename F>
json domain_map(const std::map<Domain, V>& m, F&& conv) {
    json out = json::object();
    for (const auto& [d, v] : m) out[std::string(to_string(d))] = conv(v);
    return out;
}

template <typename V, typename F>
std::map<Domain, V> domain_map_from(const json& j, F&& conv) {
    std::map<Domain, V> out;
    for (const auto& [key, value] : j.items()) {
        auto d = parse_domain(key);
        if (!d) throw Error("unknown domain '" + key + "' in state json");
        out[*d] = conv(value);
    }
    return out;
}

}  // namespace

json to_json(const InterfaceState& s) {
    json j;
    j["active_domain"] = s.active_domain ? json(std::string(to_string(*s.active_domain))) : json(nullptr);
    j["constraints"] = domain_map(s.constraints, [](const SlotMap& m) { return json(m); });
    j["booking_info"] = domain_map(s.booking_info, [](const SlotMap& m) { return json(m); });
    j["booking_status"] =
        domain_map(s.booking_status, [](BookingStatus b) { return json(std::string(to_string(b))); });
    j["booking_reference"] = domain_map(s.booking_reference, [](const std::string& r) { return json(r); });
    j["results"] = json::array();
    for (const auto& e : s.results) j["results"].push_back(to_json(*e));
    j["result_count"] = s.result_count;
    j["missing"] = s.missing;
    j["selected"] = s.selected ? json(*s.selected) : json(nullptr);
    j["focus"] = s.focus;
    j["chat_log"] = json::array();
    for (const auto& t : s.chat_log) {
        j["chat_log"].push_back({{"speaker", to_string(t.speaker)}, {"text", t.text}});
    }
    return j;
}

InterfaceState state_from_json(const json& j) {
    InterfaceState s;
    if (!j.at("active_domain").is_null()) {
        auto d = parse_domain(j.at("active_domain").get<std::string>());
        if (!d) throw Error("unknown active_domain in state json");
        s.active_domain = *d;
    }
    s.constraints = domain_map_from<SlotMap>(j.at("constraints"), [](const json& v) { return v.get<SlotMap>(); });
    s.booking_info = domain_map_from<SlotMap>(j.at("booking_info"), [](const json& v) { return v.get<SlotMap>(); });
    s.booking_status = domain_map_from<BookingStatus>(j.at("booking_status"), [](const json& v) {
        auto b = parse_booking_status(v.get<std::string>());
        if (!b) throw Error("bad booking status in state json");
        return *b;
    });
    s.booking_reference = domain_map_from<std::string>(
        j.at("booking_reference"), [](const json& v) { return v.get<std::string>(); });
    for (const auto& e : j.at("results")) s.results.push_back(std::make_shared<const Entity>(entity_from_json(e)));
    s.result_count = j.at("result_count").get<std::size_t>();
    s.missing = j.value("missing", std::vector<std::string>{});
    if (!j.at("selected").is_null()) s.selected = j.at("selected").get<std::string>();
    s.focus = j.value("focus", std::vector<std::string>{});
    for (const auto& t : j.at("chat_log")) {
        Speaker sp = t.at("speaker").get<std::string>() == "user" ? Speaker::user : Speaker::agent;
        s.chat_log.push_back({sp, t.at("text").get<std::string>()});
    }
    return s;
}

std::string state_hash(const InterfaceState& state) { return sha256_hex(to_json(state).dump()); }

}  // namespace remake
