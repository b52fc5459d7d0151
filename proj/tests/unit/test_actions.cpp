#include <doctest.h>

#include <random>

#include "remake/actions.hpp"
#include "remake/ontology.hpp"
#include "fixtures.hpp"

using namespace remake;
using namespace remake::testing;


TEST_CASE("parse_command on the interface commands") {
    Action a = parse_command("[restaurant] [food] indian [pricerange] expensive");
    CHECK(a == Action::search(Domain::restaurant, {{"food", "indian"}, {"pricerange", "expensive"}}));
    Action b = parse_command("[booking] [day] saturday [people] 6 [time] 19:30");
    CHECK(b == Action::book({{"day", "saturday"}, {"people", "6"}, {"time", "19:30"}}));
    CHECK(parse_command("[hotel]") == Action::search(Domain::hotel));
    CHECK(parse_command("  [Train]  [leaveAt]  9:30   [Day] Monday ") ==
          Action::search(Domain::train, {{"leaveAt", "9:30"}, {"day", "monday"}}));
    CHECK(parse_command("[attraction] [name] All  Saints   Church") ==
          Action::search(Domain::attraction, {{"name", "all saints church"}}));
}

TEST_CASE("serialize_action") {
    CHECK(serialize_action(Action::search(Domain::restaurant, {{"food", "indian"}})) == "[restaurant] [food] indian");
    CHECK(serialize_action(Action::book()) == "[booking]");
    CHECK(serialize_action(Action::chat("hello there")) == "hello there");
    CHECK(serialize_prev(std::nullopt) == kStartToken);
}

TEST_CASE("parse errors carry the byte position") {
    auto position_of = [](std::string_view text) -> long {
        try {
            parse_command(text);
        } catch (const ParseError& e) {
            return static_cast<long>(e.position());
        }
        return -1;
    };
    CHECK(position_of("[resturant]") == 1);
    CHECK(position_of("[restaurant] [food]") == 14);
    CHECK(position_of("[restaurant] [food") == 13);
    CHECK(position_of("[restaurant] food] x") >= 0);
    CHECK(position_of("hello") == 0);
    CHECK(position_of("") == 0);
    CHECK(parse_action("hello").kind == ActToken::Chat);
}

TEST_CASE("property: parse(serialize(a)) == a for generated actions") {
    std::mt19937 rng(2024);
    int failures = 0;
    for (int i = 0; i < 1000; ++i) {
        Action a = random_action(rng);
        if (parse_action(serialize_action(a)) != a) ++failures;
    }
    CHECK(failures == 0);
}

TEST_CASE("property: serialize(parse(x)) is a fixed point after one pass") {
    const char* inputs[] = {"[RESTAURANT]  [Food]   Indian  ", "[booking] [Time] 9:05 [people]  6",
                            "[train] [leaveat] 7:00 [arriveBy] 10:00", "[hotel] [area] Center"};
    for (const char* s : inputs) {
        std::string once = serialize_action(parse_command(s));
        CHECK(serialize_action(parse_command(once)) == once);
    }
}

TEST_CASE("fuzz: arbitrary bytes parse or raise ParseError") {
    std::mt19937 rng(99);
    const std::string alphabet = "[] abcdefghijklmnopqrstuvwxyz:0123456789\t\n\x01\xff";
    for (int i = 0; i < 5000; ++i) {
        std::string s;
        for (int k = 0, n = static_cast<int>(rng() % 40); k < n; ++k) s.push_back(alphabet[rng() % alphabet.size()]);
        try {
            parse_command(s);
        } catch (const ParseError&) {
        } catch (...) {
            FAIL("unexpected exception for input " << s);
        }
    }
}
