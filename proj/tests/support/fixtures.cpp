#include "fixtures.hpp"

#include <fstream>
#include <sstream>

namespace remake::testing {

std::filesystem::path source_dir() { return REMAKE_SOURCE_DIR; }

std::filesystem::path fixture(const std::string& relative) { return source_dir() / "tests" / "fixtures" / relative; }

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw LoadError("cannot open " + file.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const KnowledgeBase& real_kb() {
    static const KnowledgeBase kb = KnowledgeBase::load(source_dir() / "data" / "multiwoz" / "db");
    return kb;
}

const KnowledgeBase& db30_kb() {
    static const KnowledgeBase kb = [] {
        KbOptions opts;
        opts.domains = {Domain::restaurant, Domain::hotel, Domain::attraction, Domain::train};
        return KnowledgeBase::load(fixture("db30"), opts);
    }();
    return kb;
}

PolicyDecision FreeParkingPolicy::decide(const std::optional<Action>& prev, std::string_view state_markdown) {
    PolicyDecision d = inner_.decide(prev, state_markdown);
    if (d.act != ActToken::Chat) return d;
    InterfaceView view = read_interface(state_markdown);
    if (!view.listed.empty()) d.sequence = view.listed.front().name + " has free parking.";
    return d;
}

}  // namespace remake::testing

#include <algorithm>
#include <random>

#include "remake/ontology.hpp"

namespace remake::testing {

InterfaceState run_commands(const std::vector<std::string>& commands, const KnowledgeBase& kb) {
    InterfaceState s;
    for (const auto& c : commands) s = apply_action(s, parse_action(c), kb);
    return s;
}

std::size_t path_independence_failures(const KnowledgeBase& kb, std::size_t trials, unsigned seed) {
    std::mt19937 rng(seed);
    const Domain domains[] = {Domain::restaurant, Domain::hotel, Domain::attraction};
    std::size_t failures = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        Domain d = domains[rng() % std::size(domains)];
        const auto& entities = kb.entities(d);
        // Values are drawn from real entities so that results are non-trivial.
        const Entity& source = *entities[rng() % entities.size()];
        SlotList slots;
        for (auto slot : ontology::search_slots(d)) {
            auto it = source.slots.find(std::string(slot));
            if (it != source.slots.end() && slot != "name" && rng() % 3 != 0) slots.emplace_back(it->first, it->second);
        }
        if (slots.empty()) continue;
        InterfaceState combined = apply_action({}, Action::search(d, slots), kb);
        std::shuffle(slots.begin(), slots.end(), rng);
        InterfaceState stepwise;
        for (const auto& kv : slots) stepwise = apply_action(stepwise, Action::search(d, {kv}), kb);
        if (render_state(stepwise) != render_state(combined)) ++failures;
    }
    return failures;
}

Action random_action(std::mt19937& rng) {
    static const char* values[] = {"indian", "expensive", "19:30", "london kings cross", "dontcare", "6",
                                   "none",   "museum",    "a b c", "cambridge", "free"};
    auto pick_value = [&] { return std::string(values[rng() % std::size(values)]); };
    switch (rng() % 3) {
        case 0: return Action::chat("Sure, " + pick_value() + " it is.");
        case 1: {
            Domain d = kAllDomains[rng() % kAllDomains.size()];
            auto slots = ontology::search_slots(d);
            SlotList list;
            for (const auto& s : slots) {
                if (rng() % 2) list.emplace_back(std::string(s), pick_value());
            }
            return Action::search(d, list);
        }
        default: {
            static const char* slots[] = {"day", "people", "time", "stay", "select"};
            SlotList list;
            for (const char* s : slots) {
                if (rng() % 2) list.emplace_back(s, pick_value());
            }
            return Action::book(list);
        }
    }
}

}  // namespace remake::testing
