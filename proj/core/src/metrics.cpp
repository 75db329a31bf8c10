#include "praline/metrics.hpp"

#include "praline/common.hpp"

#include <algorithm>
#include <cmath>

namespace praline {

double reciprocal_rank(const std::vector<std::string>& ranked_answers,
                       const std::set<std::string>& gold) {
    for (std::size_t i = 0; i < ranked_answers.size(); ++i)
        if (gold.count(ranked_answers[i])) return 1.0 / static_cast<double>(i + 1);
    return 0.0;
}

int hits_at_k(const std::vector<std::string>& ranked_answers, const std::set<std::string>& gold,
              int k) {
    if (k < 1) throw config_error("k must be at least 1");
    const std::size_t limit = std::min(ranked_answers.size(), static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < limit; ++i)
        if (gold.count(ranked_answers[i])) return 1;
    return 0;
}

int precision_at_1(const std::vector<std::string>& ranked_answers,
                   const std::set<std::string>& gold) {
    return !ranked_answers.empty() && gold.count(ranked_answers.front()) ? 1 : 0;
}

DomainPrfReport domain_prf(const std::vector<std::string>& predictions,
                           const std::vector<std::string>& golds) {
    if (predictions.size() != golds.size()) throw config_error("prediction/gold length mismatch");
    if (predictions.empty()) throw config_error("empty prediction list");

    std::set<std::string> classes(golds.begin(), golds.end());
    classes.insert(predictions.begin(), predictions.end());

    DomainPrfReport report;
    for (const std::string& c : classes) {
        long tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < golds.size(); ++i) {
            const bool pred = predictions[i] == c;
            const bool gold = golds[i] == c;
            if (pred && gold) ++tp;
            else if (pred) ++fp;
            else if (gold) ++fn;
        }
        PrfScores s;
        s.precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
        s.recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
        s.f1 = s.precision + s.recall > 0.0
                   ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                   : 0.0;
        report.macro.precision += s.precision;
        report.macro.recall += s.recall;
        report.macro.f1 += s.f1;
        report.per_class[c] = s;
    }
    const double n = static_cast<double>(classes.size());
    report.macro.precision /= n;
    report.macro.recall /= n;
    report.macro.f1 /= n;
    return report;
}

namespace {

std::map<std::vector<std::string>, int> ngram_counts(const std::vector<std::string>& tokens, int n) {
    std::map<std::vector<std::string>, int> counts;
    if (static_cast<int>(tokens.size()) < n) return counts;
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i)
        ++counts[std::vector<std::string>(tokens.begin() + static_cast<long>(i),
                                          tokens.begin() + static_cast<long>(i) + n)];
    return counts;
}

} // namespace

double bleu4(const std::vector<std::string>& candidate, const std::vector<std::string>& reference) {
    if (candidate.empty() || reference.empty()) return 0.0;

    double log_sum = 0.0;
    for (int n = 1; n <= 4; ++n) {
        const auto cand = ngram_counts(candidate, n);
        const auto ref = ngram_counts(reference, n);
        long matches = 0, total = 0;
        for (const auto& [gram, count] : cand) {
            total += count;
            auto it = ref.find(gram);
            if (it != ref.end()) matches += std::min(count, it->second);
        }
        double p;
        if (n == 1) {
            if (matches == 0) return 0.0;
            p = static_cast<double>(matches) / static_cast<double>(total);
        } else {
            p = static_cast<double>(matches + 1) / static_cast<double>(total + 1);
        }
        log_sum += 0.25 * std::log(p);
    }
    const double ratio = static_cast<double>(reference.size()) / static_cast<double>(candidate.size());
    const double brevity = ratio > 1.0 ? std::exp(1.0 - ratio) : 1.0;
    return brevity * std::exp(log_sum);
}

double meteor_simplified(const std::vector<std::string>& candidate,
                         const std::vector<std::string>& reference) {
    if (candidate.empty() || reference.empty()) return 0.0;

    // Leftmost-unused exact alignment: candidate position -> reference position.
    std::vector<int> align(candidate.size(), -1);
    std::vector<bool> used(reference.size(), false);
    long matches = 0;
    for (std::size_t i = 0; i < candidate.size(); ++i) {
        for (std::size_t j = 0; j < reference.size(); ++j) {
            if (!used[j] && reference[j] == candidate[i]) {
                align[i] = static_cast<int>(j);
                used[j] = true;
                ++matches;
                break;
            }
        }
    }
    if (matches == 0) return 0.0;

    const double precision = static_cast<double>(matches) / static_cast<double>(candidate.size());
    const double recall = static_cast<double>(matches) / static_cast<double>(reference.size());
    const double fmean = 10.0 * precision * recall / (recall + 9.0 * precision);

    long chunks = 0;
    int prev_ref = -2;
    for (std::size_t i = 0; i < candidate.size(); ++i) {
        if (align[i] < 0) {
            prev_ref = -2;
            continue;
        }
        if (align[i] != prev_ref + 1) ++chunks;
        prev_ref = align[i];
    }
    const double frag = static_cast<double>(chunks) / static_cast<double>(matches);
    const double penalty = 0.5 * frag * frag * frag;
    return fmean * (1.0 - penalty);
}

} // namespace praline
