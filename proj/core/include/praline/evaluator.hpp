#pragma once

#include "praline/corpus.hpp"
#include "praline/embedder.hpp"
#include "praline/metrics.hpp"
#include "praline/model.hpp"
#include "praline/trainer.hpp"

#include <map>
#include <string>
#include <vector>

namespace praline {

// Which parameter set serves each head. Joint training passes the same model
// three times; separately trained modules are stitched here.
struct EvalModelRefs {
    const Model* domain = nullptr;
    const Model* ranking = nullptr;
    const Model* decoding = nullptr;

    static EvalModelRefs joint(const Model& m) { return {&m, &m, &m}; }
};

enum class ScorerKind { model, random, oracle };

struct EvalOptions {
    AblationFlags flags;
    bool use_gold_domain = false; // diagnostic: bypass the pointer
    bool gold_history = false;    // diagnostic: gold responses instead of generated ones
    ScorerKind scorer = ScorerKind::model;
    std::uint64_t scorer_seed = 0;
    int max_hops = 3;
    bool include_inverse = false;
};

struct TurnResult {
    std::string conversation_id;
    int turn_index = 0;
    std::vector<std::string> ranked_answers; // deduplicated endpoints, best first
    std::vector<std::pair<ContextPath, double>> top_paths; // best-first, capped
    std::set<std::string> gold_answers;
    std::string predicted_domain;
    std::string gold_domain;
    std::string generated_response;
    std::string gold_response;
    bool had_gold_paths = true;
    double rr = 0.0;
    int hit5 = 0;
    int hit10 = 0;
    int p1 = 0;
};

struct MetricBlock {
    double p_at_1 = 0.0;
    double hits_at_5 = 0.0;
    double hits_at_10 = 0.0;
    double mrr = 0.0;
    long turns = 0;
};

struct EvalReport {
    MetricBlock overall;
    std::map<std::string, MetricBlock> per_domain;
    DomainPrfReport domains;
    double bleu4_score = 0.0;
    double meteor_score = 0.0;
    long turns_missing_gold = 0;
    std::string scorer_tag;
    std::vector<TurnResult> turns; // per-turn detail, not serialized by default

    std::string to_json(bool include_turns = false) const;
    std::string to_table() const;
    void save(const std::string& json_file, const std::string& table_file) const;
    // JSON Lines, one record per turn:
    // {"turn":..., "ranking":[{"path":..., "score":...}, ...]}
    void save_rankings(const std::string& jsonl_file) const;
};

// Inference pipeline per turn: encode the accumulated history and question,
// point at a domain, extract + embed + rank candidate paths, deduplicate
// endpoints, generate the fluent response and feed it forward into the next
// turn's history. Turns whose candidates cannot reach any gold answer score 0
// on every ranking metric and are tallied.
EvalReport evaluate(const EvalModelRefs& models, const std::vector<Conversation>& dataset,
                    const KnowledgeGraph& graph, const EmbeddingProvider& embedder,
                    const DomainVocabulary& domains, const Tokenizer& tok, const EvalOptions& opt);

} // namespace praline
