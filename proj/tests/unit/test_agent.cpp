#include <doctest.h>

#include <json.hpp>

#include "fixtures.hpp"
#include "remake/agent.hpp"
#include "remake/bridge.hpp"
#include "remake/eval.hpp"

using namespace remake;
using namespace remake::testing;

namespace {

std::vector<Goal> fixture_goals() {
    std::vector<Goal> goals;
    for (const auto& g : nlohmann::json::parse(read_file(fixture("agent/goals.json")))) goals.push_back(goal_from_json(g));
    return goals;
}

std::string state_after(const std::vector<std::string>& commands, const std::string& user) {
    InterfaceState s = run_commands(commands, real_kb());
    if (!user.empty()) s = user_turn(s, user);
    return render_state(s);
}

}  // namespace

TEST_CASE("decision_to_action validates the sequence against the act") {
    CHECK(decision_to_action({ActToken::Search, "[restaurant] [food] indian"}) ==
          Action::search(Domain::restaurant, {{"food", "indian"}}));
    CHECK(decision_to_action({ActToken::Chat, "hello"}) == Action::chat("hello"));
    CHECK_THROWS_AS(decision_to_action({ActToken::Search, "[resturant]"}), PolicyError);
    CHECK_THROWS_AS(decision_to_action({ActToken::Book, "[restaurant] [food] indian"}), PolicyError);
    CHECK_THROWS_AS(decision_to_action({ActToken::Chat, ""}), PolicyError);
    CHECK_THROWS_AS(decision_to_action({ActToken::Chat, "[booking]"}), PolicyError);
}

TEST_CASE("read_interface recovers what the rendering shows") {
    std::string md = state_after({"[restaurant] [food] indian [pricerange] expensive",
                                  "[booking] [day] saturday [people] 6 [time] 19:30"},
                                 "thanks");
    InterfaceView v = read_interface(md);
    CHECK(v.domain == Domain::restaurant);
    CHECK(v.constraints == SlotMap{{"food", "indian"}, {"pricerange", "expensive"}});
    CHECK(v.result_count == std::optional<std::size_t>(14));
    REQUIRE(v.listed.size() == 3);
    CHECK(v.listed[0].name == "cocum");
    CHECK(v.listed[0].slots.at("area") == "west");
    CHECK(v.status == BookingStatus::success);
    CHECK(v.reference == "67AB32B2");
    CHECK(v.pending_user() == std::optional<std::string>("thanks"));

    InterfaceView gated = read_interface(state_after({"[train] [departure] cambridge"}, ""));
    CHECK_FALSE(gated.result_count.has_value());
    CHECK(gated.missing == std::vector<std::string>{"destination", "day"});
}

TEST_CASE("baseline rules") {
    BaselinePolicy p;
    auto d = p.decide(std::nullopt, state_after({}, "I am looking for a restaurant where the food is indian."));
    CHECK(d == PolicyDecision{ActToken::Search, "[restaurant] [food] indian"});

    std::string booked = state_after({"[restaurant] [food] indian [pricerange] expensive",
                                      "[booking] [day] saturday [people] 6 [time] 19:30"},
                                     "Please book the restaurant for 6 people.");
    auto after_book = p.decide(parse_action("[booking] [day] saturday [people] 6 [time] 19:30"), booked);
    CHECK(after_book.act == ActToken::Chat);
    CHECK(after_book.sequence.find("67AB32B2") != std::string::npos);

    auto ask = p.decide(std::nullopt, state_after({"[restaurant] [food] indian"}, "What is the phone of the restaurant?"));
    CHECK(ask.act == ActToken::Chat);
    CHECK(ask.sequence.find("01223366668") != std::string::npos);  // cocum, first by id

    auto bye = p.decide(std::nullopt, state_after({}, std::string(kGoodbye)));
    CHECK(bye == PolicyDecision{ActToken::Chat, "Thank you for using our service. Goodbye."});
}

TEST_CASE("the simulator is deterministic under a seed") {
    Goal g = fixture_goals()[0];
    UserSimulator a(g, 0), b(g, 0), c(g, 1);
    CHECK(a.script() == b.script());
    CHECK(a.script().back() == kGoodbye);
    CHECK(a.script().size() == c.script().size());
    // 2 info items, 3 booking items, 1 request, goodbye.
    CHECK(a.script().size() == 7);
}

TEST_CASE("baseline reaches every fixture goal without contradictions") {
    auto goals = fixture_goals();
    REQUIRE(goals.size() == 10);
    BaselinePolicy policy;
    for (std::size_t i = 0; i < goals.size(); ++i) {
        EpisodeOptions opts;
        opts.seed = 0;
        auto r = run_episode(goals[i], policy, real_kb(), opts);
        INFO("goal ", i, " ", (r.failures.empty() ? "" : r.failures.front()));
        CHECK(r.success);
        CHECK(r.contradictions.empty());
        CHECK_FALSE(r.error.has_value());
    }
}

TEST_CASE("episode edge cases") {
    Goal g = fixture_goals()[1];
    BaselinePolicy policy;
    EpisodeOptions zero;
    zero.max_turns = 0;
    auto r = run_episode(g, policy, real_kb(), zero);
    CHECK_FALSE(r.success);
    CHECK(r.turns == 0);

    PlaybackPolicy empty({});
    auto e = run_episode(g, empty, real_kb());
    CHECK_FALSE(e.success);
    REQUIRE(e.error.has_value());
}

TEST_CASE("act routing keeps commands out of the chat") {
    BaselinePolicy policy;
    auto r = run_episode(fixture_goals()[0], policy, real_kb());
    for (const auto& t : r.transcript) CHECK_FALSE(t.text.starts_with("["));
}

TEST_CASE("the contradiction checker") {
    ContradictionChecker checker(real_kb());
    auto cityroomz = real_kb().find(Domain::hotel, "cityroomz");
    REQUIRE(cityroomz);
    REQUIRE(cityroomz->slots.at("parking") == "no");
    auto c = checker.check("cityroomz has free parking.", *cityroomz);
    REQUIRE(c.size() == 1);
    CHECK(c[0] == Contradiction{"cityroomz", "parking", "yes", "no"});
    CHECK(checker.check("cityroomz has no parking.", *cityroomz).empty());
    CHECK(checker.check("cityroomz is a nice place.", *cityroomz).empty());
    CHECK(checker.check("cityroomz is a 5 star hotel in the north.", *cityroomz).size() == 2);

    auto cocum = real_kb().find(Domain::restaurant, "cocum");
    CHECK(checker.check("cocum serves indian food in the west.", *cocum).empty());
    auto wrong = checker.check("cocum is a cheap place in the centre.", *cocum);
    CHECK(wrong.size() == 2);
    // Names and addresses are masked: "71 castle street city centre" is not a claim about the area.
    CHECK(checker.check("cocum is at 71 castle street city centre.", *cocum).empty());
}

TEST_CASE("the free-parking policy is flagged on every hotel without parking") {
    auto no_parking = real_kb().query({Domain::hotel, {{"parking", "no"}}}).entities;
    REQUIRE(no_parking.size() >= 4);
    for (const auto& h : no_parking) {
        Goal g = goal_from_json({{"hotel", {{"info", {{"name", h->name}}}, {"reqt", {"phone"}}}}});
        FreeParkingPolicy policy;
        auto r = run_episode(g, policy, real_kb());
        INFO(h->name);
        CHECK_FALSE(r.contradictions.empty());
        CHECK_FALSE(r.success);
    }
    auto with_parking = real_kb().query({Domain::hotel, {{"parking", "yes"}}}).entities.front();
    Goal ok = goal_from_json({{"hotel", {{"info", {{"name", with_parking->name}}}, {"reqt", {"phone"}}}}});
    FreeParkingPolicy policy;
    CHECK(run_episode(ok, policy, real_kb()).contradictions.empty());
}

TEST_CASE("playback reproduces exported trajectories") {
    auto trajectories = replay_corpus(read_dialogues_jsonl(fixture("replay/dialogues.jsonl")), real_kb());
    std::vector<PolicyDecision> predictions;
    std::vector<GoldStep> gold;
    for (const auto& t : trajectories) {
        if (!t.consistent) continue;
        auto records = export_training(t);
        auto steps = steps_from_records(records, real_kb());
        auto policy = PlaybackPolicy::from_steps(steps);
        auto r = run_playback(steps, policy, real_kb());
        CHECK(r.contradictions.empty());
        predictions.insert(predictions.end(), r.predictions.begin(), r.predictions.end());
        for (const auto& rec : records) gold.push_back({rec.act, rec.target});
    }
    auto acc = act_and_search_accuracy(predictions, gold);
    CHECK(acc.next_act == doctest::Approx(100.0));
    CHECK(acc.search == doctest::Approx(100.0));
    CHECK(acc.search_steps > 0);
}

TEST_CASE("the process bridge speaks line JSON") {
    std::string script = (fixture("agent/scripted_policy.py")).string();
    ProcessPolicy policy("python3 '" + script + "'");
    auto first = policy.decide(std::nullopt, render_state({}));
    CHECK(first == PolicyDecision{ActToken::Search, "[restaurant] [food] indian"});
    auto second = policy.decide(parse_action("[restaurant] [food] indian"),
                                state_after({"[restaurant] [food] indian"}, ""));
    CHECK(second == PolicyDecision{ActToken::Chat, "prev was [restaurant] [food] indian"});

    ProcessPolicy silent("exit 0");
    CHECK_THROWS_AS(silent.decide(std::nullopt, render_state({})), PolicyError);
    ProcessPolicy garbage("while read l; do echo not-json; done");
    CHECK_THROWS_AS(garbage.decide(std::nullopt, render_state({})), PolicyError);
}
