#include <algorithm>
#include <cmath>
#include <map>

#include "remake/eval.hpp"

namespace remake {

std::vector<std::string> bleu_tokenize(std::string_view s) {
    std::vector<std::string> out;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) out.push_back(std::move(current));
        current.clear();
    };
    for (char c : s) {
        auto u = static_cast<unsigned char>(c);
        if (std::isspace(u)) {
            flush();
        } else if (u < 0x80 && std::ispunct(u)) {
            flush();
            out.emplace_back(1, c);
        } else {
            current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
        }
    }
    flush();
    return out;
}

namespace {

constexpr int kMaxOrder = 4;

using NgramCounts = std::map<std::vector<std::string>, int>;

NgramCounts ngrams(const std::vector<std::string>& tokens, std::size_t n) {
    NgramCounts counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                          tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
    }
    return counts;
}

}  // namespace

double sentence_bleu(std::string_view hypothesis, std::string_view reference) {
    auto hyp = bleu_tokenize(hypothesis);
    auto ref = bleu_tokenize(reference);

    std::array<int, kMaxOrder> correct{};
    std::array<int, kMaxOrder> total{};
    for (int n = 1; n <= kMaxOrder; ++n) {
        auto h = ngrams(hyp, static_cast<std::size_t>(n));
        auto r = ngrams(ref, static_cast<std::size_t>(n));
        for (const auto& [gram, count] : h) {
            total[n - 1] += count;
            if (auto it = r.find(gram); it != r.end()) correct[n - 1] += std::min(count, it->second);
        }
    }
    if (std::all_of(correct.begin(), correct.end(), [](int c) { return c == 0; })) return 0.0;

    std::array<double, kMaxOrder> precision{};
    double smooth = 1.0;
    int order = kMaxOrder;
    for (int n = 1; n <= kMaxOrder; ++n) {
        if (total[n - 1] == 0) break;
        order = n;
        if (correct[n - 1] == 0) {
            smooth *= 2;
            precision[n - 1] = 100.0 / (smooth * total[n - 1]);
        } else {
            precision[n - 1] = 100.0 * correct[n - 1] / total[n - 1];
        }
    }

    double log_sum = 0.0;
    for (int n = 0; n < order; ++n) log_sum += precision[n] > 0 ? std::log(precision[n]) : -9999999999.0;

    double h = static_cast<double>(hyp.size());
    double r = static_cast<double>(ref.size());
    double bp = h < r ? (h > 0 ? std::exp(1.0 - r / h) : 0.0) : 1.0;
    return bp * std::exp(log_sum / order);
}

double mean_sentence_bleu(std::span<const std::string> hypotheses, std::span<const std::string> references) {
    if (hypotheses.size() != references.size()) {
        throw AlignmentError("BLEU needs one reference per hypothesis (" + std::to_string(hypotheses.size()) +
                             " vs " + std::to_string(references.size()) + ")");
    }
    if (hypotheses.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < hypotheses.size(); ++i) sum += sentence_bleu(hypotheses[i], references[i]);
    return sum / static_cast<double>(hypotheses.size());
}

}  // namespace remake
