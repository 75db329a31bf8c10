#include "praline/evaluator.hpp"

#include "praline/common.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace praline {

namespace {

void accumulate(MetricBlock& block, const TurnResult& t) {
    block.p_at_1 += t.p1;
    block.hits_at_5 += t.hit5;
    block.hits_at_10 += t.hit10;
    block.mrr += t.rr;
    ++block.turns;
}

void finalize(MetricBlock& block) {
    if (block.turns == 0) return;
    const double n = static_cast<double>(block.turns);
    block.p_at_1 /= n;
    block.hits_at_5 /= n;
    block.hits_at_10 /= n;
    block.mrr /= n;
}

nlohmann::json block_to_json(const MetricBlock& b) {
    return {{"p_at_1", b.p_at_1},
            {"hits_at_5", b.hits_at_5},
            {"hits_at_10", b.hits_at_10},
            {"mrr", b.mrr},
            {"turns", b.turns}};
}

} // namespace

EvalReport evaluate(const EvalModelRefs& models, const std::vector<Conversation>& dataset,
                    const KnowledgeGraph& graph, const EmbeddingProvider& embedder,
                    const DomainVocabulary& domains, const Tokenizer& tok, const EvalOptions& opt) {
    if (!models.domain || !models.ranking || !models.decoding)
        throw config_error("evaluate needs all three model heads");

    EvalReport report;
    switch (opt.scorer) {
        case ScorerKind::model: report.scorer_tag = "model"; break;
        case ScorerKind::random: report.scorer_tag = "random"; break;
        case ScorerKind::oracle: report.scorer_tag = "oracle"; break;
    }

    std::vector<std::string> domain_predictions, domain_golds;
    double bleu_sum = 0.0, meteor_sum = 0.0;

    for (const Conversation& conv : dataset) {
        Conversation work = conv; // histories get overwritten with generated responses
        for (int ti = 0; ti < static_cast<int>(conv.turns.size()); ++ti) {
            const Turn& turn = conv.turns[static_cast<std::size_t>(ti)];
            TurnResult res;
            res.conversation_id = conv.id;
            res.turn_index = ti;
            res.gold_answers = turn.answers;
            res.gold_domain = conv.domain;
            res.gold_response = turn.fluent_response;
            res.had_gold_paths = turn.has_gold_paths;

            const std::vector<int> input_ids =
                build_input_sequence(work, ti, tok, opt.flags.history_mode, opt.flags.response_mode);

            // Domain head.
            EncoderOutput enc_dm = models.domain->encoder().forward(input_ids);
            Vec omega = score_domains(enc_dm, domains, models.domain->pointer());
            const int predicted_id = predict_domain(omega);
            res.predicted_domain = domains.label(predicted_id);
            domain_predictions.push_back(res.predicted_domain);
            domain_golds.push_back(res.gold_domain);

            // Candidate extraction; a turn flagged without gold annotations
            // behaves as if no gold-reachable path existed in the graph.
            std::vector<ContextPath> candidates =
                extract_context_paths(graph, turn.context_entities, opt.max_hops, opt.include_inverse);
            if (!turn.has_gold_paths) {
                std::erase_if(candidates, [&](const ContextPath& p) {
                    return turn.answers.count(p.endpoint()) > 0;
                });
            }

            // Ranking head.
            std::vector<RankedCandidate> ranked;
            if (opt.scorer == ScorerKind::model) {
                const Model& rk = *models.ranking;
                EncoderOutput enc_rk = models.ranking == models.domain
                                           ? enc_dm
                                           : rk.encoder().forward(input_ids);
                Vec h_dm;
                if (opt.flags.use_domain) {
                    int used_id = predicted_id;
                    if (opt.use_gold_domain) {
                        const int gid = domains.find(conv.domain);
                        if (gid < 0) throw config_error("gold domain not in vocabulary: " + conv.domain);
                        used_id = gid;
                    }
                    h_dm = domains.embedding(used_id);
                }
                Vec phi_c = conversation_embedding(pool_encoder(enc_rk).values, h_dm, rk.towers());
                std::vector<Vec> phis;
                phis.reserve(candidates.size());
                for (const ContextPath& p : candidates)
                    phis.push_back(
                        path_embedding(embedder.embed_text(verbalize_path(p, graph)), rk.towers()));
                ranked = rank_candidates(phi_c, phis, candidates);
            } else {
                rng_t rng = make_rng(opt.scorer_seed,
                                     hashing::fnv1a64(conv.id) ^ static_cast<std::uint64_t>(ti));
                std::uniform_real_distribution<double> u(-1.0, 1.0);
                ranked.reserve(candidates.size());
                for (std::size_t i = 0; i < candidates.size(); ++i) {
                    double s = 0.0;
                    if (opt.scorer == ScorerKind::random) s = u(rng);
                    else s = turn.answers.count(candidates[i].endpoint()) ? 1.0 : 0.0;
                    ranked.push_back({candidates[i], s, i});
                }
                std::stable_sort(ranked.begin(), ranked.end(),
                                 [](const RankedCandidate& a, const RankedCandidate& b) {
                                     if (a.path_score != b.path_score)
                                         return a.path_score > b.path_score;
                                     return a.canonical_index < b.canonical_index;
                                 });
            }

            // Answers are deduplicated endpoints in ranked-path order.
            std::set<std::string> seen;
            for (const RankedCandidate& rc : ranked) {
                if (res.top_paths.size() < 10) res.top_paths.push_back({rc.path, rc.path_score});
                if (seen.insert(rc.path.endpoint()).second)
                    res.ranked_answers.push_back(rc.path.endpoint());
            }

            bool gold_reachable = false;
            for (const std::string& a : res.ranked_answers)
                if (turn.answers.count(a)) gold_reachable = true;
            if (gold_reachable) {
                res.rr = reciprocal_rank(res.ranked_answers, turn.answers);
                res.hit5 = hits_at_k(res.ranked_answers, turn.answers, 5);
                res.hit10 = hits_at_k(res.ranked_answers, turn.answers, 10);
                res.p1 = precision_at_1(res.ranked_answers, turn.answers);
            } else {
                ++report.turns_missing_gold; // counted as wrong, never excluded
            }

            // Decoder head: greedy generation, then answer substitution.
            EncoderOutput enc_dec = models.decoding == models.domain
                                        ? enc_dm
                                        : models.decoding->encoder().forward(input_ids);
            std::vector<int> gen_ids =
                models.decoding->decoder().generate(enc_dec.hidden, kMaxTargetTokens);
            std::vector<std::string> gen_tokens;
            gen_tokens.reserve(gen_ids.size());
            for (int id : gen_ids) gen_tokens.push_back(tok.token(id));
            const std::string top_label = res.ranked_answers.empty()
                                              ? std::string("unknown")
                                              : graph.entity_label(res.ranked_answers.front());
            res.generated_response = substitute_answer(gen_tokens, top_label);

            bleu_sum += bleu4(Tokenizer::split(res.generated_response),
                              Tokenizer::split(res.gold_response));
            meteor_sum += meteor_simplified(Tokenizer::split(res.generated_response),
                                            Tokenizer::split(res.gold_response));

            // The generated response becomes history for the next turn.
            if (!opt.gold_history) {
                Turn& wt = work.turns[static_cast<std::size_t>(ti)];
                wt.fluent_response = res.generated_response;
                wt.answer_labels = {top_label};
            }

            accumulate(report.overall, res);
            accumulate(report.per_domain[conv.domain], res);
            report.turns.push_back(std::move(res));
        }
    }

    // every vocabulary domain gets a row, observed or not
    for (int d = 0; d < domains.size(); ++d) report.per_domain[domains.label(d)];
    finalize(report.overall);
    for (auto& [_, block] : report.per_domain) finalize(block);
    if (!domain_predictions.empty()) report.domains = domain_prf(domain_predictions, domain_golds);
    if (report.overall.turns > 0) {
        bleu_sum /= static_cast<double>(report.overall.turns);
        meteor_sum /= static_cast<double>(report.overall.turns);
    }
    report.bleu4_score = bleu_sum;
    report.meteor_score = meteor_sum;
    return report;
}

std::string EvalReport::to_json(bool include_turns) const {
    nlohmann::json j;
    j["overall"] = block_to_json(overall);
    nlohmann::json pd = nlohmann::json::object();
    for (const auto& [name, block] : per_domain) pd[name] = block_to_json(block);
    j["per_domain"] = pd;

    nlohmann::json prf = nlohmann::json::object();
    for (const auto& [name, s] : domains.per_class)
        prf[name] = {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
    j["domain_prf"] = {{"per_class", prf},
                       {"macro",
                        {{"precision", domains.macro.precision},
                         {"recall", domains.macro.recall},
                         {"f1", domains.macro.f1}}}};
    j["generation"] = {{"bleu4", bleu4_score},
                       {"meteor", meteor_score},
                       {"meteor_variant", "exact-match unigram alignment, no stemming or synonyms"}};
    j["missing_gold"] = {{"count", turns_missing_gold}, {"total", overall.turns}};
    j["scorer"] = scorer_tag;
    if (include_turns) {
        nlohmann::json arr = nlohmann::json::array();
        for (const TurnResult& t : turns) {
            arr.push_back({{"conversation", t.conversation_id},
                           {"turn", t.turn_index},
                           {"ranked_answers", t.ranked_answers},
                           {"predicted_domain", t.predicted_domain},
                           {"generated_response", t.generated_response},
                           {"rr", t.rr},
                           {"had_gold_paths", t.had_gold_paths}});
        }
        j["turns"] = arr;
    }
    return j.dump(2);
}

std::string EvalReport::to_table() const {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-16s %7s %8s %8s %8s %8s\n", "domain", "turns", "P@1", "H@5",
                  "H@10", "MRR");
    out += buf;
    auto row = [&](const std::string& name, const MetricBlock& b) {
        std::snprintf(buf, sizeof(buf), "%-16s %7ld %8.3f %8.3f %8.3f %8.3f\n", name.c_str(),
                      b.turns, b.p_at_1, b.hits_at_5, b.hits_at_10, b.mrr);
        out += buf;
    };
    row("overall", overall);
    for (const auto& [name, block] : per_domain) row(name, block);

    std::snprintf(buf, sizeof(buf),
                  "\ndomain pointer   macro P=%.3f R=%.3f F1=%.3f\n", domains.macro.precision,
                  domains.macro.recall, domains.macro.f1);
    out += buf;
    std::snprintf(buf, sizeof(buf), "generation       BLEU-4=%.3f METEOR*=%.3f\n", bleu4_score,
                  meteor_score);
    out += buf;
    std::snprintf(buf, sizeof(buf), "missing gold     %ld of %ld turns\n", turns_missing_gold,
                  overall.turns);
    out += buf;
    out += "scorer           " + scorer_tag + "\n";
    out += "(*) METEOR here is the exact-match unigram variant.\n";
    return out;
}

void EvalReport::save(const std::string& json_file, const std::string& table_file) const {
    std::ofstream jf(json_file);
    if (!jf) throw parse_error("cannot write report: " + json_file);
    jf << to_json() << '\n';
    std::ofstream tf(table_file);
    if (!tf) throw parse_error("cannot write report: " + table_file);
    tf << to_table();
}

void EvalReport::save_rankings(const std::string& jsonl_file) const {
    std::ofstream out(jsonl_file);
    if (!out) throw parse_error("cannot write rankings: " + jsonl_file);
    for (const TurnResult& t : turns) {
        nlohmann::json ranking = nlohmann::json::array();
        for (const auto& [path, path_score] : t.top_paths) {
            nlohmann::json steps = nlohmann::json::array();
            for (const PathStep& s : path.steps) steps.push_back({s.relation, s.node});
            ranking.push_back({{"path", {{"anchor", path.anchor}, {"steps", steps}}},
                               {"score", path_score}});
        }
        out << nlohmann::json{{"turn", t.conversation_id + "#" + std::to_string(t.turn_index)},
                              {"ranking", ranking}}
                   .dump()
            << '\n';
    }
}

} // namespace praline
