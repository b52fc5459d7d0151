#include "remake/agent.hpp"

#include <algorithm>
#include <random>
#include <regex>

#include "remake/ontology.hpp"

namespace remake {

Action decision_to_action(const PolicyDecision& d) {
    if (d.act == ActToken::Chat) {
        std::string t = text::trim(d.sequence);
        if (t.empty()) throw PolicyError("empty Chat utterance");
        if (t.front() == '[') throw PolicyError("Chat utterance looks like a command: " + t);
        return Action::chat(t);
    }
    Action a;
    try {
        a = parse_command(d.sequence);
    } catch (const ParseError& e) {
        throw PolicyError(std::string("invalid ") + std::string(to_string(d.act)) + " sequence: " + e.what());
    }
    if (a.kind != d.act) {
        throw PolicyError("sequence is a " + std::string(to_string(a.kind)) + " command but the act is " +
                          std::string(to_string(d.act)));
    }
    return a;
}

std::optional<std::string> InterfaceView::pending_user() const {
    if (chat.empty() || chat.back().speaker != Speaker::user) return std::nullopt;
    return chat.back().text;
}

namespace {

ListedEntity parse_entity_line(std::string_view line) {
    ListedEntity e;
    std::size_t pos = line.find(" | ");
    e.name = std::string(line.substr(0, pos));
    while (pos != std::string_view::npos) {
        std::size_t start = pos + 3;
        std::size_t next = line.find(" | ", start);
        std::string_view field = line.substr(start, next == std::string_view::npos ? next : next - start);
        std::size_t colon = field.find(": ");
        if (colon != std::string_view::npos) {
            e.slots[std::string(field.substr(0, colon))] = std::string(field.substr(colon + 2));
        }
        pos = next;
    }
    return e;
}

void read_results_line(InterfaceView& v, std::string_view value) {
    static const std::string_view kMissing = "insufficient constraints (missing ";
    if (value.starts_with(kMissing)) {
        std::string_view list = value.substr(kMissing.size());
        if (list.ends_with(')')) list.remove_suffix(1);
        for (auto& m : text::split(list, ',')) v.missing.push_back(text::trim(m));
        return;
    }
    std::size_t n = 0;
    std::size_t i = 0;
    while (i < value.size() && std::isdigit(static_cast<unsigned char>(value[i]))) n = n * 10 + (value[i++] - '0');
    if (i > 0) v.result_count = n;
}

}  // namespace

InterfaceView read_interface(std::string_view markdown) {
    InterfaceView v;
    DocNode root = parse_layout(markdown);
    for (const auto& section : root.children) {
        if (section.kind != NodeKind::Section) continue;
        if (section.label == "Chat") {
            for (const auto& c : section.children) {
                if (c.kind != NodeKind::KeyValue) continue;
                v.chat.push_back({c.label == "user" ? Speaker::user : Speaker::agent, c.value});
            }
        } else if (section.label.starts_with("Search: ")) {
            v.domain = parse_domain(std::string_view(section.label).substr(8));
            for (const auto& c : section.children) {
                if (c.kind == NodeKind::KeyValue) v.constraints[c.label] = c.value;
                if (c.kind == NodeKind::StatusLine && c.label == "Results") read_results_line(v, c.value);
                if (c.kind == NodeKind::OrderedList) {
                    for (const auto& item : c.children) v.listed.push_back(parse_entity_line(item.value));
                }
            }
        } else if (section.label == "Booking") {
            for (const auto& c : section.children) {
                if (c.kind == NodeKind::KeyValue) v.booking[c.label] = c.value;
                if (c.kind == NodeKind::StatusLine && c.label == "Status") {
                    v.status = parse_booking_status(c.value).value_or(BookingStatus::none);
                }
                if (c.kind == NodeKind::StatusLine && c.label == "Reference") v.reference = c.value;
            }
        }
    }
    return v;
}

namespace {

struct Intent {
    enum Kind { inform, book, request, bye, unknown } kind = unknown;
    Domain domain = Domain::restaurant;
    std::string slot;
    std::string value;
};

Intent classify(std::string_view utterance) {
    static const std::regex inform1(R"(^i am looking for an? (\w+) where the (.+?) is (.+)\.$)");
    static const std::regex inform2(R"(^i need an? (\w+) with (\S+) (.+)\.$)");
    static const std::regex book(R"(^(?:please book|can you book) the (\w+) (on|at|for) (.+?)( people| nights)?[.?]$)");
    static const std::regex request(R"(^(?:what is|can you tell me) the (.+) of the (\w+)\?$)");

    std::string u = text::to_lower(text::collapse_ws(utterance));
    std::smatch m;
    Intent out;
    auto set_domain = [&](const std::string& name) {
        auto d = parse_domain(name);
        if (!d) return false;
        out.domain = *d;
        return true;
    };
    if ((std::regex_match(u, m, inform1) || std::regex_match(u, m, inform2)) && set_domain(m[1].str())) {
        out.kind = Intent::inform;
        out.slot = ontology::canonical_slot(m[2].str());
        out.value = m[3].str();
    } else if (std::regex_match(u, m, book) && set_domain(m[1].str())) {
        out.kind = Intent::book;
        std::string prep = m[2].str();
        std::string unit = m[4].str();
        out.slot = prep == "on" ? "day" : prep == "at" ? "time" : unit == " nights" ? "stay" : "people";
        out.value = m[3].str();
    } else if (std::regex_match(u, m, request) && set_domain(m[2].str())) {
        out.kind = Intent::request;
        out.slot = ontology::canonical_slot(m[1].str());
    } else if (u.find("goodbye") != std::string::npos) {
        out.kind = Intent::bye;
    }
    return out;
}

PolicyDecision chat(std::string text) { return {ActToken::Chat, std::move(text)}; }

PolicyDecision offer(const InterfaceView& v) {
    if (!v.missing.empty()) {
        std::string list;
        for (const auto& m : v.missing) list += (list.empty() ? "" : " and ") + m;
        return chat("Could you tell me the " + list + "?");
    }
    if (v.listed.empty()) return chat("I am sorry, nothing matches your request.");
    return chat(v.listed.front().name + " matches your request. There are " + std::to_string(*v.result_count) +
                " options in total.");
}

PolicyDecision booking_reply(const InterfaceView& v) {
    std::string venue = v.listed.empty() ? "the venue" : v.listed.front().name;
    switch (v.status) {
        case BookingStatus::success:
            return chat("Your booking at " + venue + " is confirmed. The reference number is " + v.reference + ".");
        case BookingStatus::failure:
            return chat("I am sorry, the booking at " + venue + " was not successful.");
        case BookingStatus::none: break;
    }
    return chat("Noted. What else do you need for the booking?");
}

PolicyDecision answer(const InterfaceView& v, Domain d, const std::string& slot) {
    if (slot == "reference") {
        if (v.status == BookingStatus::success) return chat("The reference number is " + v.reference + ".");
        return chat("There is no booking yet.");
    }
    if (v.listed.empty()) return offer(v);
    const auto& top = v.listed.front();
    if (slot == ontology::display_slots(d).front()) return chat("It is " + top.name + ".");
    auto it = top.slots.find(slot);
    if (it == top.slots.end()) return chat("I am sorry, I do not have the " + slot + " of " + top.name + ".");
    return chat("The " + slot + " of " + top.name + " is " + it->second + ".");
}

std::string search_command(Domain d) { return "[" + std::string(to_string(d)) + "]"; }

}  // namespace

PolicyDecision BaselinePolicy::decide(const std::optional<Action>&, std::string_view state_markdown) {
    InterfaceView v = read_interface(state_markdown);
    auto utterance = v.pending_user();
    if (!utterance) return chat("How can I help you?");

    Intent intent = classify(*utterance);
    switch (intent.kind) {
        case Intent::inform: {
            auto current = v.constraints.find(intent.slot);
            bool applied = v.domain == intent.domain && current != v.constraints.end() &&
                           current->second == normalize_value(intent.slot, intent.value);
            if (applied) return offer(v);
            return {ActToken::Search, search_command(intent.domain) + " [" + intent.slot + "] " + intent.value};
        }
        case Intent::book: {
            if (v.domain != intent.domain) return {ActToken::Search, search_command(intent.domain)};
            auto current = v.booking.find(intent.slot);
            if (current != v.booking.end() && current->second == normalize_value(intent.slot, intent.value)) {
                return booking_reply(v);
            }
            return {ActToken::Book, "[booking] [" + intent.slot + "] " + intent.value};
        }
        case Intent::request:
            if (v.domain != intent.domain) return {ActToken::Search, search_command(intent.domain)};
            return answer(v, intent.domain, intent.slot);
        case Intent::bye: return chat("Thank you for using our service. Goodbye.");
        case Intent::unknown: break;
    }
    return chat("How can I help you?");
}

PlaybackPolicy::PlaybackPolicy(std::vector<PolicyDecision> decisions) : decisions_(std::move(decisions)) {}

PlaybackPolicy PlaybackPolicy::from_steps(std::span<const StepRecord> steps) {
    std::vector<PolicyDecision> out;
    for (const auto& s : steps) out.push_back({s.chosen_action.kind, serialize_action(s.chosen_action)});
    return PlaybackPolicy(std::move(out));
}

PolicyDecision PlaybackPolicy::decide(const std::optional<Action>&, std::string_view) {
    if (next_ >= decisions_.size()) throw PolicyError("playback exhausted after " + std::to_string(next_) + " steps");
    return decisions_[next_++];
}

namespace {

std::string article(std::string_view word) {
    return std::string_view("aeiou").find(word.front()) != std::string_view::npos ? "an" : "a";
}

std::string booking_phrase(const std::string& slot, const std::string& value) {
    if (slot == "day") return "on " + value;
    if (slot == "time") return "at " + value;
    if (slot == "stay") return "for " + value + " nights";
    return "for " + value + " people";
}

}  // namespace

UserSimulator::UserSimulator(const Goal& goal, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto coin = [&] { return (rng() & 1U) != 0; };
    for (const auto& dg : goal.domains) {
        std::string d(to_string(dg.domain));
        std::vector<std::pair<std::string, std::string>> info(dg.info.begin(), dg.info.end());
        std::shuffle(info.begin(), info.end(), rng);
        for (const auto& [slot, value] : info) {
            script_.push_back(coin() ? "I am looking for " + article(d) + " " + d + " where the " + slot + " is " +
                                           value + "."
                                     : "I need " + article(d) + " " + d + " with " + slot + " " + value + ".");
        }
        std::vector<std::pair<std::string, std::string>> book(dg.book.begin(), dg.book.end());
        std::shuffle(book.begin(), book.end(), rng);
        for (const auto& [slot, value] : book) {
            std::string phrase = booking_phrase(slot, value);
            script_.push_back(coin() ? "Please book the " + d + " " + phrase + "."
                                     : "Can you book the " + d + " " + phrase + "?");
        }
        for (const auto& slot : dg.reqt) {
            if (slot == "reference") continue;
            script_.push_back(coin() ? "What is the " + slot + " of the " + d + "?"
                                     : "Can you tell me the " + slot + " of the " + d + "?");
        }
    }
    script_.emplace_back(kGoodbye);
}

std::optional<std::string> UserSimulator::next_utterance() {
    if (done()) return std::nullopt;
    return script_[next_++];
}

namespace {

// Overwrites every word-bounded occurrence of `needle` in `s` with spaces.
bool mask(std::string& s, std::string_view needle) {
    bool found = false;
    std::size_t pos = 0;
    while ((pos = s.find(needle, pos)) != std::string::npos) {
        if (text::starts_with_word(s, pos, needle)) {
            std::fill_n(s.begin() + static_cast<std::ptrdiff_t>(pos), needle.size(), ' ');
            found = true;
        }
        pos += needle.size();
    }
    return found;
}

std::vector<std::string_view> gated_slots(Domain d) {
    switch (d) {
        case Domain::restaurant: return {"area", "pricerange", "food"};
        case Domain::hotel: return {"area", "pricerange"};
        case Domain::attraction: return {"area", "type"};
        default: return {};
    }
}

}  // namespace

ContradictionChecker::ContradictionChecker(const KnowledgeBase& kb) : kb_(kb) {
    for (Domain d : {Domain::restaurant, Domain::hotel, Domain::attraction}) {
        if (!kb.loaded(d)) continue;
        std::vector<std::pair<std::string, std::string>> vocab;
        for (auto slot : gated_slots(d)) {
            for (const auto& e : kb.entities(d)) {
                auto it = e->slots.find(std::string(slot));
                if (it == e->slots.end() || it->second.empty()) continue;
                std::pair<std::string, std::string> entry{std::string(slot), it->second};
                if (std::find(vocab.begin(), vocab.end(), entry) == vocab.end()) vocab.push_back(entry);
            }
        }
        std::stable_sort(vocab.begin(), vocab.end(),
                         [](const auto& a, const auto& b) { return a.second.size() > b.second.size(); });
        vocabulary_[d] = std::move(vocab);
    }
}

std::vector<Contradiction> ContradictionChecker::check(std::string_view utterance, const Entity& grounded) const {
    std::vector<Contradiction> out;
    std::string s = text::to_lower(text::collapse_ws(utterance));

    // Names and free-text attributes (addresses such as "... city centre")
    // are not claims about gated slots.
    if (kb_.loaded(grounded.domain)) {
        for (const auto& e : kb_.entities(grounded.domain)) mask(s, text::to_lower(e->name));
    }
    for (const auto& [slot, value] : grounded.slots) {
        if (slot == "address" || slot == "name" || slot == "postcode" || slot == "phone") mask(s, value);
    }

    auto claim = [&](const std::string& slot, const std::string& value) {
        auto it = grounded.slots.find(slot);
        if (it == grounded.slots.end() || it->second == value) return;
        out.push_back({grounded.name, slot, value, it->second});
    };

    if (auto vocab = vocabulary_.find(grounded.domain); vocab != vocabulary_.end()) {
        for (const auto& [slot, value] : vocab->second) {
            if (mask(s, value)) claim(slot, value);
        }
    }

    if (grounded.domain == Domain::hotel) {
        static const std::regex stars(R"((\d)[ -]stars?\b)");
        for (std::sregex_iterator it(s.begin(), s.end(), stars), end; it != end; ++it) claim("stars", (*it)[1].str());
        for (auto [phrase, value] : {std::pair{"no free parking", "no"}, {"no parking", "no"}, {"free parking", "yes"}}) {
            if (mask(s, phrase)) claim("parking", value);
        }
        for (auto [phrase, value] : {std::pair{"no internet", "no"}, {"no wifi", "no"}, {"free wifi", "yes"},
                                     {"free wi-fi", "yes"}, {"free internet", "yes"}}) {
            if (mask(s, phrase)) claim("internet", value);
        }
    }
    return out;
}

namespace {

// The entity an agent utterance is about: the longest result name it
// contains, otherwise the top of the displayed list.
EntityPtr grounded_entity(const InterfaceState& state, std::string_view utterance) {
    std::string s = text::to_lower(utterance);
    EntityPtr best;
    for (const auto& e : state.results) {
        std::string name = text::to_lower(e->name);
        if (best && best->name.size() >= name.size()) continue;
        std::size_t pos = s.find(name);
        while (pos != std::string::npos && !text::starts_with_word(s, pos, name)) pos = s.find(name, pos + 1);
        if (pos != std::string::npos) best = e;
    }
    return best ? best : booking_target(state);
}

bool contains_ci(const std::vector<std::string>& texts, std::string_view needle) {
    std::string n = text::to_lower(needle);
    return std::any_of(texts.begin(), texts.end(),
                       [&](const std::string& t) { return text::to_lower(t).find(n) != std::string::npos; });
}

}  // namespace

EpisodeResult run_episode(const Goal& goal, Policy& policy, const KnowledgeBase& kb, const EpisodeOptions& options) {
    EpisodeResult result;
    ContradictionChecker checker(kb);
    UserSimulator user(goal, options.seed);
    policy.reset();

    InterfaceState state;
    std::optional<Action> prev;
    std::map<Domain, EntityPtr> grounded;
    std::vector<std::string> agent_texts;

    for (std::size_t turn = 0; turn < options.max_turns && !result.error; ++turn) {
        auto utterance = user.next_utterance();
        if (!utterance) break;
        state = user_turn(state, *utterance);
        ++result.turns;

        bool replied = false;
        for (std::size_t step = 0; step < options.max_actions_per_turn && !replied; ++step) {
            try {
                PolicyDecision decision = policy.decide(prev, render_state(state, options.interface));
                result.decisions.push_back(decision);
                Action action = decision_to_action(decision);
                state = apply_action(state, action, kb);
                prev = action;
                if (action.kind != ActToken::Chat) continue;
                replied = true;
                agent_texts.push_back(action.text);
                if (!state.active_domain) continue;
                if (EntityPtr e = grounded_entity(state, action.text)) {
                    grounded[*state.active_domain] = e;
                    auto found = checker.check(action.text, *e);
                    result.contradictions.insert(result.contradictions.end(), found.begin(), found.end());
                }
            } catch (const Error& e) {
                result.error = e.what();
                break;
            }
        }
        if (!replied && !result.error) result.failures.push_back("no reply in turn " + std::to_string(turn));
        if (user.done()) break;
    }
    result.transcript = state.chat_log;

    if (!user.done()) result.failures.push_back("the user goal was not completed within the turn limit");
    for (const auto& dg : goal.domains) {
        std::string d(to_string(dg.domain));
        auto it = grounded.find(dg.domain);
        if (it == grounded.end()) {
            result.failures.push_back("no " + d + " entity was offered");
            continue;
        }
        const Entity& e = *it->second;
        try {
            auto q = kb.query({dg.domain, dg.info});
            bool ok = std::any_of(q.entities.begin(), q.entities.end(),
                                  [&](const EntityPtr& x) { return x->id == e.id; });
            if (!ok) result.failures.push_back(d + " entity " + e.name + " does not satisfy the goal");
        } catch (const QueryError& err) {
            result.failures.push_back(err.what());
        }
        for (const auto& slot : dg.reqt) {
            if (slot == "reference") continue;
            std::string value = slot == ontology::display_slots(dg.domain).front() ? e.name : "";
            if (auto s = e.slots.find(slot); value.empty() && s != e.slots.end()) value = s->second;
            if (value.empty() || !contains_ci(agent_texts, value)) {
                result.failures.push_back("requested " + d + " " + slot + " was not delivered");
            }
        }
        if (dg.wants_booking()) {
            auto ref = state.booking_reference.find(dg.domain);
            if (state.status_of(dg.domain) != BookingStatus::success || ref == state.booking_reference.end() ||
                !contains_ci(agent_texts, ref->second)) {
                result.failures.push_back(d + " booking reference was not delivered");
            }
        }
    }
    if (!result.contradictions.empty()) {
        result.failures.push_back(std::to_string(result.contradictions.size()) + " contradiction(s)");
    }
    if (result.error) result.failures.push_back("error: " + *result.error);
    result.success = result.failures.empty();
    return result;
}

PlaybackResult run_playback(std::span<const StepRecord> steps, Policy& policy, const KnowledgeBase& kb,
                            const InterfaceOptions& options) {
    PlaybackResult out;
    ContradictionChecker checker(kb);
    policy.reset();
    InterfaceState state;
    for (const auto& step : steps) {
        if (step.user_text) state = user_turn(state, *step.user_text);
        if (!step.focus.empty()) state = focus_entities(state, step.focus);
        PolicyDecision p = policy.decide(step.prev_action, render_state(state, options));
        out.predictions.push_back(p);
        if (p.act == ActToken::Chat && state.active_domain) {
            if (EntityPtr e = grounded_entity(state, p.sequence)) {
                auto found = checker.check(p.sequence, *e);
                out.contradictions.insert(out.contradictions.end(), found.begin(), found.end());
            }
        }
        state = apply_action(state, step.chosen_action, kb, step.booking_override);
    }
    return out;
}

}  // namespace remake
