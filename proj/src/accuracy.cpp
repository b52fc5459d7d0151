#include "remake/eval.hpp"

namespace remake {

AccuracyReport act_and_search_accuracy(std::span<const PolicyDecision> predictions, std::span<const GoldStep> gold) {
    if (predictions.size() != gold.size()) {
        throw AlignmentError("predictions and gold differ in length (" + std::to_string(predictions.size()) +
                             " vs " + std::to_string(gold.size()) + ")");
    }
    AccuracyReport r;
    r.steps = gold.size();
    std::size_t act_hits = 0;
    std::size_t search_hits = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const auto& p = predictions[i];
        const auto& g = gold[i];
        if (p.act == g.act) ++act_hits;
        if (g.act != ActToken::Search) continue;
        ++r.search_steps;
        if (p.act != ActToken::Search) continue;
        try {
            Action a = parse_command(p.sequence);
            if (a.kind == ActToken::Search && serialize_action(a) == g.target) ++search_hits;
        } catch (const ParseError&) {
            // an unparsable prediction is simply wrong
        }
    }
    auto pct = [](std::size_t n, std::size_t d) { return d == 0 ? 0.0 : 100.0 * n / static_cast<double>(d); };
    r.next_act = pct(act_hits, r.steps);
    r.search = pct(search_hits, r.search_steps);
    return r;
}

}  // namespace remake
