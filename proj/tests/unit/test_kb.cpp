#include <doctest.h>

#include <fstream>
#include <random>

#include <json.hpp>

#include "fixtures.hpp"
#include "query_oracle.hpp"
#include "remake/kb.hpp"
#include "remake/ontology.hpp"

using namespace remake;
using namespace remake::testing;

namespace {

std::vector<std::string> ids(const QueryResult& r) {
    std::vector<std::string> out;
    for (const auto& e : r.entities) out.push_back(e->id);
    return out;
}

}  // namespace

TEST_CASE("normalize_value") {
    CHECK(normalize_value("area", " Centre ") == "centre");
    CHECK(normalize_value("area", "center") == "centre");
    CHECK(normalize_value("time", "9:30") == "09:30");
    CHECK(normalize_value("pricerange", "moderately priced") == "moderate");
    CHECK(normalize_value("pricerange", "cheaply") == "cheap");
    CHECK(normalize_value("area", "do n't care") == "dontcare");
    CHECK(normalize_value("food", "Modern   European") == "modern european");
    CHECK(normalize_value("type", "guest house") == "guesthouse");
    CHECK(normalize_value("parking", "free") == "yes");
}

TEST_CASE("property: normalize_value is idempotent over the ontology and arbitrary strings") {
    auto ontology = nlohmann::json::parse(std::ifstream(source_dir() / "data/multiwoz/ontology.json"));
    std::size_t checked = 0;
    for (const auto& [key, values] : ontology.items()) {
        std::string slot = key.substr(key.find('-') + 1);
        for (const auto& v : values) {
            std::string once = normalize_value(slot, v.get<std::string>());
            CHECK(normalize_value(slot, once) == once);
            ++checked;
        }
    }
    CHECK(checked > 1000);

    std::mt19937 rng(5);
    const std::string alphabet = "aBc Ce ntr:09 \t";
    for (int i = 0; i < 2000; ++i) {
        std::string s;
        for (int k = 0, n = static_cast<int>(rng() % 12); k < n; ++k) s.push_back(alphabet[rng() % alphabet.size()]);
        std::string once = normalize_value("area", s);
        CHECK(normalize_value("area", once) == once);
    }
}

TEST_CASE("loading counts and errors") {
    auto counts = real_kb().counts();
    CHECK(counts[Domain::restaurant] == 110);
    CHECK(db30_kb().counts()[Domain::restaurant] == 8);
    std::size_t total = 0;
    for (auto [d, n] : db30_kb().counts()) total += n;
    CHECK(total == 30);

    CHECK_THROWS_AS(KnowledgeBase::load(fixture("does-not-exist")), LoadError);

    std::map<std::string, std::string> record{{"food", "indian"}};
    try {
        entity_from_record(Domain::restaurant, record, 7);
        FAIL("expected a load error");
    } catch (const LoadError& e) {
        CHECK(std::string(e.what()).find("7") != std::string::npos);
        CHECK(std::string(e.what()).find("name") != std::string::npos);
    }

    std::vector<Entity> dup(2);
    dup[0].domain = dup[1].domain = Domain::restaurant;
    dup[0].id = dup[1].id = dup[0].name = dup[1].name = "twin";
    KbOptions opts;
    opts.domains = {Domain::restaurant};
    CHECK_THROWS_AS(KnowledgeBase::from_entities(dup, opts), LoadError);
}

TEST_CASE("query on the fixture database") {
    const auto& kb = db30_kb();
    auto all = kb.query({Domain::restaurant, {}});
    CHECK(all.entities.size() == 8);
    CHECK(std::is_sorted(all.entities.begin(), all.entities.end(),
                         [](const EntityPtr& a, const EntityPtr& b) { return a->id < b->id; }));
    CHECK(ids(kb.query({Domain::restaurant, {{"food", "Indian"}, {"area", "centre"}}})) ==
          std::vector<std::string>{"alder kitchen", "cedar grill"});
    CHECK(ids(kb.query({Domain::restaurant, {{"food", "chinese"}}})) ==
          std::vector<std::string>{"dune diner", "fern cafe"});

    auto gated = kb.query({Domain::train, {{"departure", "cambridge"}}});
    CHECK(gated.insufficient());
    CHECK(gated.missing == std::vector<std::string>{"destination", "day"});

    auto after = kb.query({Domain::train, {{"departure", "cambridge"}, {"destination", "london kings cross"},
                                           {"day", "monday"}, {"leaveAt", "9:00"}}});
    CHECK(ids(after) == std::vector<std::string>{"tr0002 monday 09:00", "tr0003 monday 13:00"});
    auto before = kb.query({Domain::train, {{"departure", "london kings cross"}, {"destination", "cambridge"},
                                            {"day", "monday"}, {"arriveBy", "12:08"}}});
    CHECK(ids(before) == std::vector<std::string>{"tr0005 monday 07:17", "tr0006 monday 11:17"});

    CHECK_THROWS_AS(kb.query({Domain::restaurant, {{"stars", "4"}}}), QueryError);
}

TEST_CASE("exhaustive oracle equivalence on the fixture database") {
    BruteForceDb oracle(fixture("db30"), {Domain::restaurant, Domain::hotel, Domain::attraction, Domain::train});
    for (Domain d : {Domain::restaurant, Domain::hotel, Domain::attraction, Domain::train}) {
        auto r = exhaustive_query_check(db30_kb(), oracle, d);
        INFO(to_string(d), " ", (r.examples.empty() ? "" : r.examples.front()));
        CHECK(r.queries > 100);
        CHECK(r.mismatches == 0);
    }
}

TEST_CASE("property: adding a constraint never grows the result") {
    const auto& kb = db30_kb();
    BruteForceDb oracle(fixture("db30"), {Domain::hotel});
    std::mt19937 rng(3);
    auto slots = ontology::search_slots(Domain::hotel);
    for (int i = 0; i < 500; ++i) {
        SlotMap c;
        for (int k = 0; k < 3; ++k) {
            std::string s(slots[rng() % slots.size()]);
            auto values = oracle.values(Domain::hotel, s);
            c[s] = values[rng() % values.size()];
        }
        std::size_t before = kb.query({Domain::hotel, c}).entities.size();
        std::string s(slots[rng() % slots.size()]);
        auto values = oracle.values(Domain::hotel, s);
        SlotMap narrower = c;
        narrower[s] = values[rng() % values.size()];
        if (!c.contains(s)) CHECK(kb.query({Domain::hotel, narrower}).entities.size() <= before);
        SlotMap wild = c;
        if (!c.contains(s)) {
            wild[s] = "dontcare";
            CHECK(kb.query({Domain::hotel, wild}).entities.size() == before);
        }
    }
}

TEST_CASE("the real database agrees with the oracle on indian and expensive") {
    BruteForceDb oracle(source_dir() / "data/multiwoz/db", {Domain::restaurant});
    std::map<std::string, std::string> c{{"food", "indian"}, {"pricerange", "expensive"}};
    auto expected = oracle.query(Domain::restaurant, c);
    REQUIRE(expected);
    CHECK(expected->size() == 14);
    CHECK(ids(real_kb().query({Domain::restaurant, SlotMap(c.begin(), c.end())})) == *expected);
}

TEST_CASE("check_booking") {
    const auto& kb = real_kb();
    SlotMap booking{{"day", "saturday"}, {"people", "6"}, {"time", "19:30"}};
    auto a = kb.check_booking(Domain::restaurant, "curry garden", booking);
    auto b = kb.check_booking(Domain::restaurant, "curry garden", booking);
    CHECK(a.status == BookingStatus::success);
    CHECK(a.reference == b.reference);
    CHECK(a.reference.size() == 8);
    CHECK(std::all_of(a.reference.begin(), a.reference.end(),
                      [](char c) { return std::isdigit(static_cast<unsigned char>(c)) || std::isupper(c); }));
    // Independently computed: HMAC-SHA256 with the default key over the documented message.
    CHECK(kb.check_booking(Domain::restaurant, "cocum", booking).reference == "67AB32B2");

    auto failed = kb.check_booking(Domain::restaurant, "curry garden", booking, BookingStatus::failure);
    CHECK(failed.status == BookingStatus::failure);
    CHECK(failed.reference.empty());

    try {
        kb.check_booking(Domain::hotel, "cityroomz", {{"day", "monday"}, {"people", "2"}});
        FAIL("expected MissingSlotError");
    } catch (const MissingSlotError& e) {
        CHECK(e.slots() == std::vector<std::string>{"stay"});
    }
    CHECK_THROWS_AS(kb.check_booking(Domain::restaurant, "no such place", booking), QueryError);
    CHECK_THROWS_AS(kb.check_booking(Domain::attraction, "cambridge punter", {}), ProtocolError);

    KbOptions other;
    other.hash_key = "another key";
    auto kb2 = KnowledgeBase::load(source_dir() / "data/multiwoz/db", other);
    CHECK(kb2.check_booking(Domain::restaurant, "curry garden", booking).reference != a.reference);
}

TEST_CASE("taxi entities are synthesized deterministically") {
    const auto& kb = real_kb();
    auto q = kb.query({Domain::taxi, {{"departure", "cocum"}, {"destination", "cityroomz"}}});
    REQUIRE(q.entities.size() == 1);
    auto again = kb.query({Domain::taxi, {{"departure", "cocum"}, {"destination", "cityroomz"}}});
    CHECK(*q.entities[0] == *again.entities[0]);
    CHECK(q.entities[0]->slots.at("phone").size() == 10);
    CHECK(kb.query({Domain::taxi, {{"departure", "cocum"}}}).insufficient());
}
