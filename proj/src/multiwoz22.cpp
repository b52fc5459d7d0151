#include "remake/multiwoz22.hpp"

#include <algorithm>
#include <fstream>
#include <regex>

#include "remake/ontology.hpp"

namespace remake {

using json = nlohmann::json;

namespace {

// "restaurant-bookday" -> ("day", booking), "train-leaveat" -> ("leaveAt", search).
std::pair<std::string, bool> split_slot(std::string_view local) {
    std::string s = text::to_lower(local);
    if (s.starts_with("book") && s.size() > 4) return {s.substr(4), true};
    return {ontology::canonical_slot(s), false};
}

std::optional<Domain> service_domain(std::string_view service) {
    return parse_domain(text::to_lower(service));
}

std::string first_value(const json& v) {
    if (v.is_array()) return v.empty() ? "" : v.front().get<std::string>();
    return v.get<std::string>();
}

// Collects search and booking beliefs from the user turn's frames.
void read_frames(const json& frames, Belief& belief, Belief& booking) {
    for (const auto& frame : frames) {
        auto d = service_domain(frame.value("service", ""));
        if (!d || !frame.contains("state")) continue;
        const json slot_values = frame["state"].value("slot_values", json::object());
        for (const auto& [key, value] : slot_values.items()) {
            std::size_t dash = key.find('-');
            auto prefix = service_domain(key.substr(0, dash));
            if (dash == std::string::npos || !prefix) continue;
            auto [slot, is_booking] = split_slot(std::string_view(key).substr(dash + 1));
            std::string v = normalize_value(slot, first_value(value));
            if (v.empty() || v == kClearValue) continue;
            (is_booking ? booking : belief)[*prefix][slot] = v;
        }
    }
}

std::optional<Domain> active_intent_domain(const json& frames) {
    for (const auto& frame : frames) {
        auto intent = frame.contains("state") ? frame["state"].value("active_intent", "NONE") : "NONE";
        if (intent.starts_with("book_")) {
            if (auto d = service_domain(frame.value("service", ""))) return d;
        }
    }
    return std::nullopt;
}

struct ActSignals {
    std::vector<std::pair<std::optional<Domain>, BookingStatus>> outcomes;
    std::vector<std::pair<std::optional<Domain>, std::string>> refs;
    std::optional<Domain> other_domain;  // domain of the turn's non-booking acts
};

ActSignals read_acts(const json& dialog_act) {
    ActSignals s;
    for (const auto& [name, pairs] : dialog_act.items()) {
        std::string act = text::to_lower(name);
        std::size_t dash = act.find('-');
        if (dash == std::string::npos) continue;
        std::string head = act.substr(0, dash);
        std::string intent = act.substr(dash + 1);
        std::optional<Domain> d = head == "booking" ? std::nullopt : service_domain(head);
        if (head != "booking" && !d) continue;
        if (d && !s.other_domain && intent != "offerbooked") s.other_domain = d;

        bool booked = (head == "booking" && intent == "book") || intent == "offerbooked";
        bool failed = head == "booking" && intent == "nobook";
        if (booked) s.outcomes.emplace_back(d, BookingStatus::success);
        if (failed) s.outcomes.emplace_back(d, BookingStatus::failure);
        if (!booked) continue;
        for (const auto& pair : pairs) {
            if (!pair.is_array() || pair.size() < 2) continue;
            if (text::to_lower(pair[0].get<std::string>()) == "ref") {
                s.refs.emplace_back(d, pair[1].get<std::string>());
            }
        }
    }
    return s;
}

// Fallback when no act file is available: a system-side span on a
// "*-ref"/"*-bookreference" slot, or an 8-character code next to "reference".
void read_reference_spans(const json& frames, std::string_view utterance, ActSignals& s) {
    for (const auto& frame : frames) {
        for (const auto& slot : frame.value("slots", json::array())) {
            std::string name = text::to_lower(slot.value("slot", ""));
            if (name.ends_with("-ref") || name.ends_with("reference")) {
                std::size_t dash = name.find('-');
                s.refs.emplace_back(service_domain(name.substr(0, dash)), slot.value("value", ""));
            }
        }
    }
    if (!s.refs.empty()) return;
    static const std::regex code(R"((reference|ref)[^A-Za-z0-9]+(?:number\s+)?(?:is\s+)?:?\s*#?([A-Z0-9]{8})\b)",
                                 std::regex::icase);
    std::smatch m;
    std::string u(utterance);
    if (std::regex_search(u, m, code)) s.refs.emplace_back(std::nullopt, m[2].str());
}

}  // namespace

AnnotatedDialogue adapt_multiwoz22_dialogue(const json& dialogue, const json& acts) {
    AnnotatedDialogue out;
    out.id = dialogue.at("dialogue_id").get<std::string>();
    for (const auto& service : dialogue.value("services", json::array())) {
        if (auto d = service_domain(service.get<std::string>())) out.domains.push_back(*d);
    }
    std::sort(out.domains.begin(), out.domains.end());

    const auto& turns = dialogue.at("turns");
    std::optional<Domain> last_domain;
    Belief prev_booking;
    for (std::size_t i = 0; i < turns.size(); ++i) {
        const auto& user = turns[i];
        if (user.value("speaker", "") != "USER") continue;
        AnnotatedTurn turn;
        turn.user_text = text::collapse_ws(user.value("utterance", ""));
        read_frames(user.value("frames", json::array()), turn.belief, turn.booking);

        const json* system = nullptr;
        if (i + 1 < turns.size() && turns[i + 1].value("speaker", "") == "SYSTEM") system = &turns[i + 1];

        ActSignals signals;
        if (system) {
            turn.agent_text = text::collapse_ws(system->value("utterance", ""));
            std::string turn_id = system->value("turn_id", std::to_string(i + 1));
            if (acts.is_object() && acts.contains(turn_id)) {
                signals = read_acts(acts[turn_id].value("dialog_act", json::object()));
            } else {
                read_reference_spans(system->value("frames", json::array()), turn.agent_text, signals);
            }
        }

        // Domain for booking acts that do not name one.
        std::optional<Domain> booking_domain;
        Belief booking_diff = diff_belief(prev_booking, turn.booking);
        if (!booking_diff.empty()) booking_domain = booking_diff.begin()->first;
        if (!booking_domain) booking_domain = active_intent_domain(user.value("frames", json::array()));
        if (!booking_domain) booking_domain = signals.other_domain;
        if (!booking_domain) booking_domain = last_domain;

        for (const auto& [d, status] : signals.outcomes) {
            auto dom = d ? d : booking_domain;
            if (dom) turn.booking_outcomes.emplace_back(*dom, status);
        }
        for (const auto& [d, ref] : signals.refs) {
            auto dom = d ? d : booking_domain;
            if (dom && !ref.empty()) turn.booking_refs.emplace_back(*dom, ref);
        }

        for (const auto& frame : user.value("frames", json::array())) {
            auto intent = frame.contains("state") ? frame["state"].value("active_intent", "NONE") : "NONE";
            if (intent != "NONE") {
                if (auto d = service_domain(frame.value("service", ""))) last_domain = d;
            }
        }
        prev_booking = turn.booking;
        out.turns.push_back(std::move(turn));
    }
    return out;
}

std::vector<AnnotatedDialogue> load_multiwoz22(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) throw LoadError("not a directory: " + root.string());

    json acts = json::object();
    if (fs::exists(root / "dialog_acts.json")) {
        std::ifstream in(root / "dialog_acts.json");
        acts = json::parse(in);
    }

    std::vector<fs::path> files;
    for (const char* split : {"train", "dev", "test"}) {
        if (!fs::is_directory(root / split)) continue;
        for (const auto& entry : fs::directory_iterator(root / split)) {
            auto name = entry.path().filename().string();
            if (name.starts_with("dialogues_") && name.ends_with(".json")) files.push_back(entry.path());
        }
    }
    if (files.empty()) throw LoadError("no dialogues_*.json under " + root.string());
    std::sort(files.begin(), files.end());

    std::vector<AnnotatedDialogue> out;
    for (const auto& file : files) {
        std::ifstream in(file);
        json dialogues = json::parse(in);
        for (const auto& d : dialogues) {
            std::string id = d.at("dialogue_id").get<std::string>();
            const json& a = acts.contains(id) ? acts[id] : json();
            out.push_back(adapt_multiwoz22_dialogue(d, a));
        }
    }
    std::sort(out.begin(), out.end(),
              [](const AnnotatedDialogue& a, const AnnotatedDialogue& b) { return a.id < b.id; });
    return out;
}

}  // namespace remake
