#include "remake/replay.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <set>
#include <sstream>
#include <thread>

#include "remake/ontology.hpp"

namespace remake {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string_view to_string(InconsistencyKind k) {
    switch (k) {
        case InconsistencyKind::EntityNotInResults: return "EntityNotInResults";
        case InconsistencyKind::BookingMisalignment: return "BookingMisalignment";
        case InconsistencyKind::UnresolvableReference: return "UnresolvableReference";
        case InconsistencyKind::InvalidAnnotation: return "InvalidAnnotation";
    }
    return "?";
}

Belief diff_belief(const Belief& prev, const Belief& curr) {
    Belief diff;
    for (const auto& [d, slots] : curr) {
        auto old = prev.find(d);
        for (const auto& [slot, value] : slots) {
            if (old == prev.end()) {
                diff[d][slot] = value;
                continue;
            }
            auto it = old->second.find(slot);
            if (it == old->second.end() || it->second != value) diff[d][slot] = value;
        }
    }
    for (const auto& [d, slots] : prev) {
        auto now = curr.find(d);
        for (const auto& [slot, value] : slots) {
            if (now == curr.end() || !now->second.contains(slot)) diff[d][slot] = std::string(kClearValue);
        }
    }
    return diff;
}

Belief apply_belief_diff(const Belief& base, const Belief& diff) {
    Belief out = base;
    for (const auto& [d, slots] : diff) {
        auto& target = out[d];
        for (const auto& [slot, value] : slots) {
            if (value == kClearValue) {
                target.erase(slot);
            } else {
                target[slot] = value;
            }
        }
        if (target.empty()) out.erase(d);
    }
    return out;
}

namespace {

// Slots in ontology order, unknown ones after them in name order.
SlotList ordered_slots(const SlotMap& slots, std::span<const std::string_view> order) {
    SlotList out;
    for (auto slot : order) {
        auto it = slots.find(std::string(slot));
        if (it != slots.end()) out.emplace_back(it->first, it->second);
    }
    for (const auto& kv : slots) {
        if (std::find(order.begin(), order.end(), kv.first) == order.end()) out.push_back(kv);
    }
    return out;
}

}  // namespace

std::vector<Action> split_multidomain(const Belief& diff, std::optional<Domain> active) {
    std::vector<Action> out;
    auto emit = [&](Domain d) {
        auto it = diff.find(d);
        if (it == diff.end() || it->second.empty()) return;
        out.push_back(Action::search(d, ordered_slots(it->second, ontology::search_slots(d))));
    };
    if (active) emit(*active);
    for (Domain d : kAllDomains) {
        if (d != active) emit(d);
    }
    return out;
}

namespace {

constexpr std::array<Domain, 4> kNamedDomains = {Domain::restaurant, Domain::hotel, Domain::attraction,
                                                 Domain::train};

std::string mention_key(std::string_view s) { return text::to_lower(text::collapse_ws(s)); }

std::string first_word(std::string_view s) {
    std::size_t sp = s.find(' ');
    return std::string(sp == std::string_view::npos ? s : s.substr(0, sp));
}

bool word_char(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) != 0 || u >= 0x80;
}

}  // namespace

MentionIndex::MentionIndex(const KnowledgeBase& kb) {
    for (Domain d : kNamedDomains) {
        if (!kb.loaded(d)) continue;
        auto& table = by_first_word_[d];
        for (const auto& e : kb.entities(d)) {
            std::string key = mention_key(e->name);
            if (key.empty()) continue;
            auto& bucket = table[first_word(key)];
            if (std::find(bucket.begin(), bucket.end(), key) == bucket.end()) bucket.push_back(key);
        }
        for (auto& [word, bucket] : table) {
            std::stable_sort(bucket.begin(), bucket.end(),
                             [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
        }
    }
}

std::vector<Mention> MentionIndex::detect(std::string_view raw, std::span<const Domain> domains) const {
    std::string s = mention_key(raw);
    std::vector<Mention> out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (!word_char(s[i]) || (i > 0 && word_char(s[i - 1]))) {
            ++i;
            continue;
        }
        std::size_t end = i;
        while (end < s.size() && s[end] != ' ') ++end;
        std::string_view token(s.data() + i, end - i);

        // Longest name across the requested domains starting here.
        std::optional<Mention> best;
        for (Domain d : domains) {
            auto table = by_first_word_.find(d);
            if (table == by_first_word_.end()) continue;
            // The first word of a name may be followed by punctuation in the text.
            for (std::size_t len = token.size(); len > 0; --len) {
                auto bucket = table->second.find(token.substr(0, len));
                if (bucket == table->second.end()) continue;
                for (const auto& name : bucket->second) {
                    if (best && best->name.size() >= name.size()) break;
                    if (text::starts_with_word(s, i, name)) {
                        best = Mention{d, name, i};
                        break;
                    }
                }
            }
        }
        if (best) {
            out.push_back(*best);
            i += best->name.size();
        } else {
            i = end;
        }
    }
    return out;
}

namespace {

struct Inconsistent {
    InconsistencyKind kind;
    std::string detail;
};

std::vector<Domain> dialogue_domains(const AnnotatedDialogue& dlg) {
    if (!dlg.domains.empty()) return dlg.domains;
    std::set<Domain> seen;
    for (const auto& t : dlg.turns) {
        for (const auto& [d, _] : t.belief) seen.insert(d);
        for (const auto& [d, _] : t.booking) seen.insert(d);
        for (const auto& [d, _] : t.booking_refs) seen.insert(d);
        for (const auto& [d, _] : t.booking_outcomes) seen.insert(d);
    }
    return {seen.begin(), seen.end()};
}

class Replayer {
public:
    Replayer(const KnowledgeBase& kb, const MentionIndex& index, const ReplayOptions& options)
        : kb_(kb), index_(index), options_(options) {}

    Trajectory run(const AnnotatedDialogue& dlg) {
        trajectory_.dialogue_id = dlg.id;
        trajectory_.num_turns = dlg.turns.size();
        trajectory_.domains = dialogue_domains(dlg);
        for (Domain d : trajectory_.domains) {
            if (std::find(kNamedDomains.begin(), kNamedDomains.end(), d) != kNamedDomains.end()) {
                scan_domains_.push_back(d);
            }
        }

        Belief prev_belief;
        Belief prev_booking;
        for (std::size_t i = 0; i < dlg.turns.size(); ++i) {
            turn_ = i;
            try {
                replay_turn(dlg.turns[i], prev_belief, prev_booking);
            } catch (const Inconsistent& bad) {
                trajectory_.consistent = false;
                trajectory_.inconsistency_kinds.push_back(bad.kind);
                trajectory_.inconsistency_reasons.push_back(std::string(to_string(bad.kind)) + " (turn " +
                                                            std::to_string(i) + "): " + bad.detail);
                break;
            }
            prev_belief = dlg.turns[i].belief;
            prev_booking = dlg.turns[i].booking;
        }
        return std::move(trajectory_);
    }

private:
    const KnowledgeBase& kb_;
    const MentionIndex& index_;
    const ReplayOptions& options_;
    Trajectory trajectory_;
    InterfaceState state_;
    std::optional<Action> prev_;
    StepRecord pending_;
    std::vector<Domain> scan_domains_;
    std::size_t turn_ = 0;

    void emit(const Action& a, std::optional<BookingStatus> override_status = std::nullopt) {
        StepRecord step = std::move(pending_);
        pending_ = {};
        step.prev_action = prev_;
        step.state_markdown = render_state(state_, options_.interface);
        step.chosen_action = a;
        step.booking_override = override_status;
        try {
            state_ = apply_action(state_, a, kb_, override_status);
        } catch (const QueryError& e) {
            throw Inconsistent{InconsistencyKind::InvalidAnnotation, e.what()};
        } catch (const ProtocolError& e) {
            throw Inconsistent{InconsistencyKind::BookingMisalignment, e.what()};
        } catch (const MissingSlotError& e) {
            throw Inconsistent{InconsistencyKind::BookingMisalignment, e.what()};
        }
        trajectory_.steps.push_back(std::move(step));
        prev_ = a;
    }

    void switch_to(Domain d) {
        if (state_.active_domain != d) emit(Action::search(d));
    }

    std::vector<std::string> resolve(const std::vector<Mention>& mentions) {
        std::vector<std::string> ids;
        for (const auto& m : mentions) {
            auto it = std::find_if(state_.results.begin(), state_.results.end(),
                                   [&](const EntityPtr& e) { return mention_key(e->name) == m.name; });
            if (it == state_.results.end()) {
                throw Inconsistent{InconsistencyKind::EntityNotInResults,
                                   "'" + m.name + "' is not among the " + std::string(to_string(m.domain)) +
                                       " results"};
            }
            if (std::find(ids.begin(), ids.end(), (*it)->id) == ids.end()) ids.push_back((*it)->id);
        }
        if (ids.size() > options_.interface.max_results) {
            throw Inconsistent{InconsistencyKind::UnresolvableReference,
                               std::to_string(ids.size()) + " entities mentioned, only " +
                                   std::to_string(options_.interface.max_results) + " can be shown"};
        }
        return ids;
    }

    void focus(const std::vector<Mention>& mentions) {
        auto ids = resolve(mentions);
        state_ = focus_entities(state_, ids);
        pending_.focus = ids;
    }

    void replay_turn(const AnnotatedTurn& turn, const Belief& prev_belief, const Belief& prev_booking) {
        state_ = user_turn(state_, turn.user_text);
        pending_.user_text = turn.user_text;

        for (const auto& a : split_multidomain(diff_belief(prev_belief, turn.belief), state_.active_domain)) {
            emit(a);
        }

        // Booking signals, strongest first: recorded outcome, reference, new booking slots.
        std::map<Domain, std::optional<BookingStatus>> bookings;
        for (const auto& [d, status] : turn.booking_outcomes) bookings[d] = status;
        for (const auto& [d, ref] : turn.booking_refs) {
            if (!bookings[d]) bookings[d] = BookingStatus::success;
        }
        Belief booking_diff = diff_belief(prev_booking, turn.booking);
        for (const auto& [d, _] : booking_diff) bookings.try_emplace(d);

        auto mentions = index_.detect(turn.agent_text, scan_domains_);
        std::optional<Domain> mentioned;
        for (const auto& m : mentions) {
            if (mentioned && *mentioned != m.domain) {
                throw Inconsistent{InconsistencyKind::UnresolvableReference,
                                   "entities of " + std::string(to_string(*mentioned)) + " and " +
                                       std::string(to_string(m.domain)) + " mentioned together"};
            }
            mentioned = m.domain;
        }

        std::vector<Domain> order;
        for (const auto& [d, _] : bookings) {
            if (d != mentioned) order.push_back(d);
        }
        if (mentioned && bookings.contains(*mentioned)) order.push_back(*mentioned);

        for (Domain d : order) {
            switch_to(d);
            std::vector<std::string> ids;
            if (d == mentioned) {
                focus(mentions);
                ids = state_.focus;
            }
            SlotList slots;
            if (auto it = booking_diff.find(d); it != booking_diff.end()) {
                slots = ordered_slots(it->second, ontology::booking_slots(d));
            }
            auto recorded = bookings[d];
            emit(Action::book(slots), recorded);
            if (recorded && state_.status_of(d) != *recorded) {
                throw Inconsistent{InconsistencyKind::BookingMisalignment,
                                   "recorded " + std::string(to_string(*recorded)) + " but the interface shows " +
                                       std::string(to_string(state_.status_of(d)))};
            }
            if (!ids.empty() && state_.status_of(d) == BookingStatus::success && state_.selected != ids.front()) {
                throw Inconsistent{InconsistencyKind::BookingMisalignment,
                                   "booked entity differs from the one mentioned"};
            }
        }

        if (mentioned && !bookings.contains(*mentioned)) {
            switch_to(*mentioned);
            focus(mentions);
        }

        // The dataset's reference codes are replaced by the ones the interface shows.
        std::string agent_text = turn.agent_text;
        for (const auto& [d, ref] : turn.booking_refs) {
            auto shown = state_.booking_reference.find(d);
            if (ref.empty() || shown == state_.booking_reference.end()) continue;
            for (std::size_t pos = 0; (pos = agent_text.find(ref, pos)) != std::string::npos;) {
                agent_text.replace(pos, ref.size(), shown->second);
                pos += shown->second.size();
            }
        }
        if (!agent_text.empty()) emit(Action::chat(agent_text));
    }
};

}  // namespace

Trajectory replay_dialogue(const AnnotatedDialogue& dialogue, const KnowledgeBase& kb,
                           const MentionIndex& mentions, const ReplayOptions& options) {
    return Replayer(kb, mentions, options).run(dialogue);
}

Trajectory replay_dialogue(const AnnotatedDialogue& dialogue, const KnowledgeBase& kb,
                           const ReplayOptions& options) {
    MentionIndex index(kb);
    return replay_dialogue(dialogue, kb, index, options);
}

std::vector<Trajectory> replay_corpus(std::span<const AnnotatedDialogue> dialogues, const KnowledgeBase& kb,
                                      const ReplayOptions& options, unsigned threads) {
    MentionIndex index(kb);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, std::max<std::size_t>(1, dialogues.size()));

    std::vector<Trajectory> out(dialogues.size());
    std::vector<std::future<void>> workers;
    for (unsigned w = 0; w < threads; ++w) {
        workers.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < dialogues.size(); i += threads) {
                out[i] = replay_dialogue(dialogues[i], kb, index, options);
            }
        }));
    }
    for (auto& f : workers) f.get();
    std::stable_sort(out.begin(), out.end(),
                     [](const Trajectory& a, const Trajectory& b) { return a.dialogue_id < b.dialogue_id; });
    return out;
}

namespace {

InterfaceState apply_events(InterfaceState state, const StepRecord& step) {
    if (step.user_text) state = user_turn(state, *step.user_text);
    if (!step.focus.empty()) state = focus_entities(state, step.focus);
    return state;
}

}  // namespace

std::optional<std::size_t> verify_trajectory(const Trajectory& t, const KnowledgeBase& kb,
                                             const ReplayOptions& options) {
    InterfaceState state;
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const auto& step = t.steps[i];
        try {
            state = apply_events(std::move(state), step);
            if (render_state(state, options.interface) != step.state_markdown) return i;
            state = apply_action(state, step.chosen_action, kb, step.booking_override);
        } catch (const Error&) {
            return i;
        }
    }
    return std::nullopt;
}

std::vector<TrainingRecord> export_training(const Trajectory& t) {
    if (!t.consistent) {
        throw ExportRefused("refusing to export inconsistent dialogue " + t.dialogue_id);
    }
    std::vector<TrainingRecord> out;
    out.reserve(t.steps.size());
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const auto& step = t.steps[i];
        TrainingRecord r;
        r.dialogue_id = t.dialogue_id;
        r.turn = i;
        r.context = serialize_prev(step.prev_action) + std::string(kContextSeparator) + step.state_markdown;
        r.act = step.chosen_action.kind;
        r.target = serialize_action(step.chosen_action);
        out.push_back(std::move(r));
    }
    return out;
}

ojson to_json(const TrainingRecord& r) {
    ojson j;
    j["dialogue_id"] = r.dialogue_id;
    j["turn"] = r.turn;
    j["context"] = r.context;
    j["act"] = to_string(r.act);
    j["target"] = r.target;
    return j;
}

TrainingRecord training_record_from_json(const json& j) {
    TrainingRecord r;
    r.dialogue_id = j.at("dialogue_id").get<std::string>();
    r.turn = j.at("turn").get<std::size_t>();
    r.context = j.at("context").get<std::string>();
    auto act = parse_act_token(j.at("act").get<std::string>());
    if (!act) throw Error("unknown act '" + j.at("act").get<std::string>() + "'");
    r.act = *act;
    r.target = j.at("target").get<std::string>();
    return r;
}

std::vector<TrainingRecord> read_training_records(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw LoadError("cannot open " + file.string());
    std::vector<TrainingRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        out.push_back(training_record_from_json(json::parse(line)));
    }
    return out;
}

std::pair<std::string, std::string> split_context(std::string_view context) {
    std::size_t sep = context.find(kContextSeparator);
    if (sep == std::string_view::npos) throw Error("record context has no state part");
    return {std::string(context.substr(0, sep)), std::string(context.substr(sep + kContextSeparator.size()))};
}

namespace {

struct ParsedView {
    std::optional<std::string> last_user;  // set when the newest chat line is the user's
    std::vector<std::string> listed;       // displayed entity names, in order
    std::optional<BookingStatus> status;
};

ParsedView read_view(const std::string& markdown) {
    ParsedView v;
    DocNode root = parse_layout(markdown);
    for (const auto& section : root.children) {
        if (section.kind != NodeKind::Section) continue;
        if (section.label == "Chat" && !section.children.empty()) {
            const auto& last = section.children.back();
            if (last.kind == NodeKind::KeyValue && last.label == "user") v.last_user = last.value;
        } else if (section.label.starts_with("Search: ")) {
            for (const auto& child : section.children) {
                if (child.kind != NodeKind::OrderedList) continue;
                for (const auto& item : child.children) {
                    std::string_view line = item.value;
                    v.listed.emplace_back(line.substr(0, line.find(" | ")));
                }
            }
        } else if (section.label == "Booking") {
            for (const auto& child : section.children) {
                if (child.kind == NodeKind::StatusLine && child.label == "Status") {
                    v.status = parse_booking_status(child.value);
                }
            }
        }
    }
    return v;
}

}  // namespace

std::vector<StepRecord> steps_from_records(std::span<const TrainingRecord> records, const KnowledgeBase& kb,
                                           const ReplayOptions& options) {
    std::vector<StepRecord> steps;
    InterfaceState state;
    std::vector<ParsedView> views;
    for (const auto& r : records) views.push_back(read_view(split_context(r.context).second));

    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        StepRecord step;
        if (!steps.empty()) step.prev_action = steps.back().chosen_action;
        step.state_markdown = split_context(r.context).second;
        step.chosen_action = r.act == ActToken::Chat ? Action::chat(r.target) : parse_command(r.target);

        bool turn_start = i == 0 || records[i - 1].act == ActToken::Chat;
        if (turn_start && views[i].last_user) {
            step.user_text = *views[i].last_user;
            state = user_turn(state, *step.user_text);
        }

        // A listing that differs from the default order came from a focus event.
        auto shown = displayed_results(state, options.interface.max_results);
        std::vector<std::string> names;
        for (const auto& e : shown) names.push_back(e->name);
        if (names != views[i].listed) {
            for (const auto& name : views[i].listed) {
                auto it = std::find_if(state.results.begin(), state.results.end(),
                                       [&](const EntityPtr& e) { return e->name == name; });
                if (it == state.results.end()) throw EntityNotInResults(name);
                step.focus.push_back((*it)->id);
            }
            state = focus_entities(state, step.focus);
        }

        if (r.act == ActToken::Book && i + 1 < records.size()) {
            auto next_status = views[i + 1].status;
            if (next_status && *next_status != BookingStatus::none) step.booking_override = next_status;
        }
        state = apply_action(state, step.chosen_action, kb, step.booking_override);
        steps.push_back(std::move(step));
    }
    return steps;
}

ConsistencyReport consistency_report(std::span<const Trajectory> trajectories) {
    ConsistencyReport r;
    r.by_turns = {{"1-5"}, {"6-10"}, {"11-15"}, {"16+"}};
    for (const auto& t : trajectories) {
        auto count = [&](RateBucket& b) {
            ++b.total;
            if (t.consistent) ++b.consistent;
        };
        count(r.overall);
        count(t.domains.size() > 1 ? r.multi_domain : r.single_domain);
        std::size_t bucket = t.num_turns <= 5 ? 0 : t.num_turns <= 10 ? 1 : t.num_turns <= 15 ? 2 : 3;
        count(r.by_turns[bucket]);
        for (auto k : t.inconsistency_kinds) ++r.reasons[std::string(to_string(k))];
    }
    return r;
}

ojson to_json(const ConsistencyReport& r) {
    auto bucket = [](const RateBucket& b) {
        ojson j;
        j["label"] = b.label;
        j["total"] = b.total;
        j["consistent"] = b.consistent;
        j["rate"] = b.rate();
        return j;
    };
    ojson j;
    j["overall"] = bucket(r.overall);
    j["single_domain"] = bucket(r.single_domain);
    j["multi_domain"] = bucket(r.multi_domain);
    j["by_turns"] = ojson::array();
    for (const auto& b : r.by_turns) j["by_turns"].push_back(bucket(b));
    j["reasons"] = ojson::object();
    for (const auto& [k, n] : r.reasons) j["reasons"][k] = n;
    return j;
}

std::string format_table(const ConsistencyReport& r) {
    std::ostringstream out;
    auto row = [&](const RateBucket& b) {
        char rate[32];
        std::snprintf(rate, sizeof rate, "%6.2f%%", b.rate());
        out << b.label << std::string(b.label.size() < 16 ? 16 - b.label.size() : 1, ' ') << b.consistent << "/"
            << b.total << "  " << rate << "\n";
    };
    out << "bucket          consistent  rate\n";
    row(r.overall);
    row(r.single_domain);
    row(r.multi_domain);
    for (const auto& b : r.by_turns) {
        RateBucket labelled = b;
        labelled.label = "turns " + b.label;
        row(labelled);
    }
    if (!r.reasons.empty()) {
        out << "\ninconsistency reasons\n";
        for (const auto& [k, n] : r.reasons) out << "  " << k << ": " << n << "\n";
    }
    return out.str();
}

namespace {

Belief belief_from_json(const json& j) {
    Belief b;
    if (j.is_null()) return b;
    for (const auto& [key, slots] : j.items()) {
        auto d = parse_domain(key);
        if (!d) throw LoadError("unknown domain '" + key + "' in dialogue annotations");
        SlotMap m;
        for (const auto& [slot, value] : slots.items()) {
            std::string s = ontology::canonical_slot(slot);
            std::string v = normalize_value(s, value.get<std::string>());
            if (v.empty() || v == kClearValue) continue;
            m[s] = v;
        }
        if (!m.empty()) b[*d] = std::move(m);
    }
    return b;
}

json belief_to_json(const Belief& b) {
    json j = json::object();
    for (const auto& [d, slots] : b) j[std::string(to_string(d))] = slots;
    return j;
}

Domain domain_of(const json& j) {
    auto d = parse_domain(j.get<std::string>());
    if (!d) throw LoadError("unknown domain '" + j.get<std::string>() + "'");
    return *d;
}

}  // namespace

AnnotatedDialogue dialogue_from_json(const json& j) {
    AnnotatedDialogue d;
    d.id = j.at("id").get<std::string>();
    if (j.contains("domains")) {
        for (const auto& x : j.at("domains")) d.domains.push_back(domain_of(x));
    }
    for (const auto& t : j.at("turns")) {
        AnnotatedTurn turn;
        turn.user_text = text::collapse_ws(t.value("user", ""));
        turn.agent_text = text::collapse_ws(t.value("agent", ""));
        turn.belief = belief_from_json(t.value("belief", json()));
        turn.booking = belief_from_json(t.value("booking", json()));
        for (const auto& ref : t.value("booking_refs", json::array())) {
            turn.booking_refs.emplace_back(domain_of(ref.at(0)), ref.at(1).get<std::string>());
        }
        for (const auto& outcome : t.value("booking_outcomes", json::array())) {
            auto status = parse_booking_status(outcome.at(1).get<std::string>());
            if (!status) throw LoadError("bad booking outcome in dialogue " + d.id);
            turn.booking_outcomes.emplace_back(domain_of(outcome.at(0)), *status);
        }
        d.turns.push_back(std::move(turn));
    }
    return d;
}

ojson to_json(const AnnotatedDialogue& d) {
    ojson j;
    j["id"] = d.id;
    if (!d.domains.empty()) {
        j["domains"] = ojson::array();
        for (Domain x : d.domains) j["domains"].push_back(to_string(x));
    }
    j["turns"] = ojson::array();
    for (const auto& t : d.turns) {
        ojson turn;
        turn["user"] = t.user_text;
        turn["agent"] = t.agent_text;
        turn["belief"] = belief_to_json(t.belief);
        turn["booking"] = belief_to_json(t.booking);
        turn["booking_refs"] = ojson::array();
        for (const auto& [dom, ref] : t.booking_refs) turn["booking_refs"].push_back({to_string(dom), ref});
        turn["booking_outcomes"] = ojson::array();
        for (const auto& [dom, s] : t.booking_outcomes) {
            turn["booking_outcomes"].push_back({to_string(dom), to_string(s)});
        }
        j["turns"].push_back(std::move(turn));
    }
    return j;
}

std::vector<AnnotatedDialogue> read_dialogues_jsonl(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw LoadError("cannot open " + file.string());
    std::vector<AnnotatedDialogue> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (text::trim(line).empty()) continue;
        try {
            out.push_back(dialogue_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw LoadError(file.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace remake
