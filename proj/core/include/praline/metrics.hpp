#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace praline {

// Ranking metrics over a deduplicated answer ranking. Absent gold scores 0.
double reciprocal_rank(const std::vector<std::string>& ranked_answers,
                       const std::set<std::string>& gold);
int hits_at_k(const std::vector<std::string>& ranked_answers, const std::set<std::string>& gold,
              int k);
int precision_at_1(const std::vector<std::string>& ranked_answers,
                   const std::set<std::string>& gold);

struct PrfScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct DomainPrfReport {
    std::map<std::string, PrfScores> per_class;
    PrfScores macro;
};

// Multi-class macro-averaged precision/recall/F1 over the union of labels
// seen in gold or predictions. Zero denominators score 0.
DomainPrfReport domain_prf(const std::vector<std::string>& predictions,
                           const std::vector<std::string>& golds);

// Geometric mean of 1..4-gram modified precisions with brevity penalty;
// add-one smoothing on the n >= 2 precisions. Zero unigram overlap gives 0.
double bleu4(const std::vector<std::string>& candidate, const std::vector<std::string>& reference);

// Exact-match unigram variant: leftmost-unused alignment, F-mean
// 10PR/(R+9P), fragmentation penalty 0.5*(chunks/matches)^3.
double meteor_simplified(const std::vector<std::string>& candidate,
                         const std::vector<std::string>& reference);

} // namespace praline
