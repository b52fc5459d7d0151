#include <algorithm>
#include <fstream>

#include "remake/eval.hpp"
#include "remake/ontology.hpp"

namespace remake {

using json = nlohmann::json;

namespace {

bool venue_domain(Domain d) {
    return d == Domain::restaurant || d == Domain::hotel || d == Domain::attraction || d == Domain::train;
}

bool names_venue(std::string_view response) {
    return response.find("[value_name]") != std::string_view::npos ||
           response.find("[value_id]") != std::string_view::npos;
}

// The domain each turn talks about: explicit annotation, else the domain whose
// belief changed (the previous turn's domain wins ties), else the previous one.
std::vector<std::optional<Domain>> turn_domains(const EvalDialogue& dlg) {
    std::vector<std::optional<Domain>> out;
    Belief prev;
    std::optional<Domain> current;
    for (const auto& t : dlg.turns) {
        if (t.domain) {
            current = t.domain;
        } else {
            std::vector<Domain> changed;
            for (Domain d : kAllDomains) {
                auto a = prev.find(d);
                auto b = t.belief.find(d);
                bool before = a != prev.end();
                bool after = b != t.belief.end();
                if (before != after || (before && a->second != b->second)) changed.push_back(d);
            }
            if (current && std::find(changed.begin(), changed.end(), *current) != changed.end()) {
                // keep the current domain
            } else if (!changed.empty()) {
                current = changed.front();
            }
        }
        out.push_back(current);
        prev = t.belief;
    }
    return out;
}

bool contains_id(const std::vector<EntityPtr>& v, std::string_view id) {
    return std::any_of(v.begin(), v.end(), [&](const EntityPtr& e) { return e->id == id; });
}

DomainVerdict score_domain(const EvalDialogue& dlg, const DomainGoal& goal,
                           const std::vector<std::optional<Domain>>& domains, const std::string& all_text,
                           const KnowledgeBase& kb) {
    DomainVerdict v;
    v.domain = goal.domain;
    std::string d(to_string(goal.domain));

    if (!venue_domain(goal.domain)) {
        v.inform = true;
    } else if (dlg.turns.empty() || !dlg.turns.back().belief.contains(goal.domain)) {
        v.flags.push_back("no belief for " + d);
    } else {
        std::optional<std::string> offered;
        for (std::size_t i = 0; i < dlg.turns.size(); ++i) {
            const auto& t = dlg.turns[i];
            if (domains[i] != goal.domain || !names_venue(t.response)) continue;
            auto belief = t.belief.find(goal.domain);
            if (belief == t.belief.end()) {
                v.flags.push_back("turn " + std::to_string(i) + " names a " + d + " without a belief");
                continue;
            }
            QueryResult q;
            try {
                q = kb.query({goal.domain, belief->second});
            } catch (const QueryError& e) {
                v.flags.push_back("turn " + std::to_string(i) + ": " + e.what());
                continue;
            }
            if (q.entities.empty()) continue;
            if (!offered || !contains_id(q.entities, *offered)) offered = q.entities.front()->id;
        }
        v.offered = offered;
        if (offered) {
            try {
                v.inform = contains_id(kb.query({goal.domain, goal.info}).entities, *offered);
            } catch (const QueryError& e) {
                v.flags.push_back(std::string("goal: ") + e.what());
            }
        }
    }

    v.success = v.inform;
    for (const auto& slot : goal.reqt) {
        if (slot == "reference") continue;
        if (all_text.find(placeholder_for(slot)) == std::string::npos) v.success = false;
    }
    if (goal.wants_booking() && all_text.find("[value_reference]") == std::string::npos) v.success = false;
    return v;
}

double percent(std::size_t n, std::size_t total) {
    return total == 0 ? 0.0 : 100.0 * static_cast<double>(n) / static_cast<double>(total);
}

}  // namespace

InformSuccessReport inform_success(std::span<const EvalDialogue> corpus, const KnowledgeBase& kb) {
    InformSuccessReport report;
    std::size_t informed = 0;
    std::size_t succeeded = 0;
    for (const auto& dlg : corpus) {
        DialogueScore score;
        score.id = dlg.id;
        auto domains = turn_domains(dlg);
        std::string all_text;
        for (const auto& t : dlg.turns) all_text += t.response + "\n";

        score.inform = true;
        score.success = true;
        for (const auto& goal : dlg.goal.domains) {
            auto v = score_domain(dlg, goal, domains, all_text, kb);
            score.inform = score.inform && v.inform;
            score.success = score.success && v.success;
            score.domains.push_back(std::move(v));
        }
        if (score.inform) ++informed;
        if (score.success) ++succeeded;
        report.dialogues.push_back(std::move(score));
    }
    report.inform = percent(informed, corpus.size());
    report.success = percent(succeeded, corpus.size());
    return report;
}

EvalCorpus with_responses(std::span<const EvalDialogue> corpus,
                          const std::map<std::string, std::vector<std::string>>& responses) {
    EvalCorpus out(corpus.begin(), corpus.end());
    for (auto& dlg : out) {
        auto it = responses.find(dlg.id);
        if (it == responses.end()) throw AlignmentError("no responses for dialogue " + dlg.id);
        if (it->second.size() != dlg.turns.size()) {
            throw AlignmentError("dialogue " + dlg.id + " has " + std::to_string(dlg.turns.size()) +
                                 " turns but " + std::to_string(it->second.size()) + " responses");
        }
        for (std::size_t i = 0; i < dlg.turns.size(); ++i) dlg.turns[i].response = it->second[i];
    }
    return out;
}

FixedResponseAudit fixed_response_audit(std::span<const EvalDialogue> corpus, const KnowledgeBase& kb) {
    EvalCorpus fixed(corpus.begin(), corpus.end());
    for (auto& dlg : fixed) {
        for (auto& t : dlg.turns) t.response = std::string(kFixedResponse);
    }
    return {inform_success(corpus, kb), inform_success(fixed, kb)};
}

EvalDialogue eval_dialogue_from_json(const json& j) {
    EvalDialogue d;
    d.id = j.at("id").get<std::string>();
    d.goal = goal_from_json(j.at("goal"));
    for (const auto& t : j.at("turns")) {
        EvalTurn turn;
        const json belief = t.value("belief", json::object());
        for (const auto& [key, slots] : belief.items()) {
            auto dom = parse_domain(key);
            if (!dom) throw LoadError("unknown domain '" + key + "' in eval dialogue " + d.id);
            SlotMap m;
            for (const auto& [slot, value] : slots.items()) {
                std::string s = ontology::canonical_slot(slot);
                std::string v = normalize_value(s, value.get<std::string>());
                if (!v.empty() && v != kClearValue) m[s] = v;
            }
            if (!m.empty()) turn.belief[*dom] = std::move(m);
        }
        turn.response = t.value("response", "");
        if (t.contains("domain") && !t["domain"].is_null()) {
            turn.domain = parse_domain(t["domain"].get<std::string>());
            if (!turn.domain) throw LoadError("unknown turn domain in eval dialogue " + d.id);
        }
        d.turns.push_back(std::move(turn));
    }
    return d;
}

EvalCorpus read_eval_corpus(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw LoadError("cannot open " + file.string());
    EvalCorpus out;
    std::string line;
    while (std::getline(in, line)) {
        if (!text::trim(line).empty()) out.push_back(eval_dialogue_from_json(json::parse(line)));
    }
    return out;
}

nlohmann::ordered_json to_json(const InformSuccessReport& r) {
    nlohmann::ordered_json j;
    j["inform"] = r.inform;
    j["success"] = r.success;
    j["dialogues"] = nlohmann::ordered_json::array();
    for (const auto& d : r.dialogues) {
        nlohmann::ordered_json dj;
        dj["id"] = d.id;
        dj["inform"] = d.inform;
        dj["success"] = d.success;
        dj["domains"] = nlohmann::ordered_json::array();
        for (const auto& v : d.domains) {
            nlohmann::ordered_json vj;
            vj["domain"] = to_string(v.domain);
            vj["inform"] = v.inform;
            vj["success"] = v.success;
            vj["offered"] = v.offered ? nlohmann::ordered_json(*v.offered) : nlohmann::ordered_json(nullptr);
            vj["flags"] = v.flags;
            dj["domains"].push_back(std::move(vj));
        }
        j["dialogues"].push_back(std::move(dj));
    }
    return j;
}

}  // namespace remake
