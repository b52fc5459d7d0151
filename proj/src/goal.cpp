#include "remake/goal.hpp"

#include <algorithm>

#include "remake/kb.hpp"
#include "remake/ontology.hpp"

namespace remake {

using json = nlohmann::json;

bool DomainGoal::wants_booking() const {
    return !book.empty() || std::find(reqt.begin(), reqt.end(), "reference") != reqt.end();
}

const DomainGoal* Goal::find(Domain d) const {
    for (const auto& g : domains) {
        if (g.domain == d) return &g;
    }
    return nullptr;
}

namespace {

SlotMap slots_from(const json& j) {
    SlotMap out;
    for (const auto& [k, v] : j.items()) {
        std::string slot = ontology::canonical_slot(k);
        out[slot] = normalize_value(slot, v.is_string() ? v.get<std::string>() : v.dump());
    }
    return out;
}

}  // namespace

Goal goal_from_json(const json& j) {
    Goal g;
    std::vector<Domain> order;
    if (j.contains("order")) {
        for (const auto& name : j.at("order")) {
            auto d = parse_domain(name.get<std::string>());
            if (!d) throw Error("unknown domain '" + name.get<std::string>() + "' in goal order");
            order.push_back(*d);
        }
    } else {
        for (Domain d : kAllDomains) {
            if (j.contains(std::string(to_string(d)))) order.push_back(d);
        }
    }
    for (const auto& [key, _] : j.items()) {
        if (key != "order" && !parse_domain(key)) throw Error("unknown domain '" + key + "' in goal");
    }
    for (Domain d : order) {
        const auto& item = j.at(std::string(to_string(d)));
        DomainGoal dg;
        dg.domain = d;
        dg.info = slots_from(item.value("info", json::object()));
        dg.book = slots_from(item.value("book", json::object()));
        for (const auto& r : item.value("reqt", json::array())) {
            dg.reqt.push_back(ontology::canonical_slot(r.get<std::string>()));
        }
        g.domains.push_back(std::move(dg));
    }
    return g;
}

nlohmann::ordered_json to_json(const Goal& g) {
    nlohmann::ordered_json j;
    j["order"] = nlohmann::ordered_json::array();
    for (const auto& dg : g.domains) j["order"].push_back(to_string(dg.domain));
    for (const auto& dg : g.domains) {
        nlohmann::ordered_json item;
        item["info"] = dg.info;
        item["book"] = dg.book;
        item["reqt"] = dg.reqt;
        j[std::string(to_string(dg.domain))] = std::move(item);
    }
    return j;
}

}  // namespace remake
