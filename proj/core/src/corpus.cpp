#include "praline/corpus.hpp"

#include "praline/common.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

namespace praline {

namespace {

using nlohmann::json;

json path_to_json_obj(const ContextPath& p) {
    json steps = json::array();
    for (const PathStep& s : p.steps) steps.push_back({s.relation, s.node});
    return json{{"anchor", p.anchor}, {"steps", steps}};
}

ContextPath path_from_json_obj(const json& j, const std::string& conv_id) {
    ContextPath p;
    p.anchor = j.at("anchor").get<std::string>();
    for (const auto& s : j.at("steps"))
        p.steps.push_back({s.at(0).get<std::string>(), s.at(1).get<std::string>()});
    if (p.steps.empty())
        throw parse_error("conversation " + conv_id + ": path with no steps");
    return p;
}

const json& require_key(const json& obj, const char* key, const std::string& conv_id) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw parse_error("conversation " + (conv_id.empty() ? "<unknown>" : conv_id) +
                          ": missing key \"" + key + "\"");
    return *it;
}

} // namespace

std::vector<Conversation> load_conversations(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw parse_error("cannot open conversations file: " + file);

    std::vector<Conversation> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw parse_error(file + ": line " + std::to_string(lineno) + ": " + e.what());
        }

        Conversation conv;
        conv.id = require_key(j, "id", "").get<std::string>();
        conv.domain = require_key(j, "domain", conv.id).get<std::string>();
        if (conv.domain.empty())
            throw parse_error("conversation " + conv.id + ": empty domain");
        const json& turns = require_key(j, "turns", conv.id);
        if (!turns.is_array() || turns.empty())
            throw parse_error("conversation " + conv.id + ": needs at least one turn");

        for (const auto& tj : turns) {
            Turn t;
            t.question = require_key(tj, "question", conv.id).get<std::string>();
            for (const auto& a : require_key(tj, "answers", conv.id)) t.answers.insert(a.get<std::string>());
            if (t.answers.empty())
                throw parse_error("conversation " + conv.id + ": empty \"answers\"");
            for (const auto& a : require_key(tj, "answer_labels", conv.id))
                t.answer_labels.push_back(a.get<std::string>());
            t.fluent_response = require_key(tj, "fluent_response", conv.id).get<std::string>();
            for (const auto& e : require_key(tj, "context_entities", conv.id))
                t.context_entities.insert(e.get<std::string>());
            t.has_gold_paths = tj.value("has_gold_paths", true);

            if (tj.contains("positives") || tj.contains("negatives")) {
                for (const auto& pj : tj.value("positives", json::array())) {
                    ContextPath p = path_from_json_obj(pj, conv.id);
                    p.label = PathLabel::positive;
                    if (!t.answers.count(p.endpoint()))
                        throw parse_error("conversation " + conv.id +
                                          ": positive path endpoint not in answers");
                    t.positives.push_back(std::move(p));
                }
                for (const auto& pj : tj.value("negatives", json::array())) {
                    ContextPath p = path_from_json_obj(pj, conv.id);
                    p.label = PathLabel::negative;
                    t.negatives.push_back(std::move(p));
                }
                t.paths_loaded = true;
            }
            conv.turns.push_back(std::move(t));
        }
        out.push_back(std::move(conv));
    }
    return out;
}

void save_conversations(const std::vector<Conversation>& convs, const std::string& file,
                        bool write_paths) {
    std::ofstream out(file);
    if (!out) throw parse_error("cannot write conversations file: " + file);
    for (const Conversation& c : convs) {
        json turns = json::array();
        for (const Turn& t : c.turns) {
            json tj;
            tj["question"] = t.question;
            tj["answers"] = json(t.answers);
            tj["answer_labels"] = t.answer_labels;
            tj["fluent_response"] = t.fluent_response;
            tj["context_entities"] = json(t.context_entities);
            if (!t.has_gold_paths) tj["has_gold_paths"] = false;
            if (write_paths) {
                json pos = json::array(), neg = json::array();
                for (const auto& p : t.positives) pos.push_back(path_to_json_obj(p));
                for (const auto& p : t.negatives) neg.push_back(path_to_json_obj(p));
                tj["positives"] = pos;
                tj["negatives"] = neg;
            }
            turns.push_back(std::move(tj));
        }
        out << json{{"id", c.id}, {"domain", c.domain}, {"turns", turns}}.dump() << '\n';
    }
}

std::vector<std::string> load_domain_vocabulary(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw parse_error("cannot open domain vocabulary file: " + file);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) out.push_back(line);
    }
    if (out.empty()) throw parse_error(file + ": empty domain vocabulary");
    return out;
}

void save_domain_vocabulary(const std::vector<std::string>& domains, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw parse_error("cannot write domain vocabulary file: " + file);
    for (const auto& d : domains) out << d << '\n';
}

std::vector<int> build_input_sequence(const Conversation& conv, int turn_index,
                                      const Tokenizer& tok, HistoryMode history_mode,
                                      ResponseMode response_mode) {
    if (turn_index < 0 || turn_index >= static_cast<int>(conv.turns.size()))
        throw config_error("turn index out of range");

    std::vector<std::vector<int>> parts;
    if (history_mode != HistoryMode::none) {
        int start = history_mode == HistoryMode::full ? 0 : turn_index - 1;
        for (int i = std::max(0, start); i < turn_index; ++i) {
            const Turn& t = conv.turns[static_cast<std::size_t>(i)];
            parts.push_back(tok.encode(t.question));
            std::string response;
            if (response_mode == ResponseMode::fluent) {
                response = t.fluent_response;
            } else {
                for (const auto& l : t.answer_labels) {
                    if (!response.empty()) response += ' ';
                    response += l;
                }
            }
            if (!response.empty()) parts.push_back(tok.encode(response));
        }
    }
    parts.push_back(tok.encode(conv.turns[static_cast<std::size_t>(turn_index)].question));

    std::vector<int> ids;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i].empty()) continue;
        if (!ids.empty()) ids.push_back(Tokenizer::sep_id);
        ids.insert(ids.end(), parts[i].begin(), parts[i].end());
    }
    if (static_cast<int>(ids.size()) > kMaxInputTokens)
        ids.erase(ids.begin(), ids.end() - kMaxInputTokens);
    return ids;
}

void attach_paths(std::vector<Conversation>& convs, const KnowledgeGraph& graph, int max_hops,
                  bool include_inverse) {
    for (Conversation& c : convs) {
        for (Turn& t : c.turns) {
            if (t.paths_loaded) continue;
            auto cands = extract_context_paths(graph, t.context_entities, max_hops, include_inverse);
            auto [pos, neg] = label_paths(cands, t.answers);
            if (t.has_gold_paths) {
                t.positives = std::move(pos);
            } else {
                t.positives.clear(); // gold annotation missing: gold-endpoint paths disappear
            }
            t.negatives = std::move(neg);
        }
    }
}

namespace {

std::vector<std::string> mark_answer_span(const std::vector<std::string>& target_tokens,
                                          const std::vector<std::vector<std::string>>& label_tokens,
                                          bool& marked) {
    std::vector<std::string> out;
    marked = false;
    std::size_t i = 0;
    while (i < target_tokens.size()) {
        bool replaced = false;
        for (const auto& label : label_tokens) {
            if (label.empty() || i + label.size() > target_tokens.size()) continue;
            if (std::equal(label.begin(), label.end(), target_tokens.begin() + static_cast<long>(i))) {
                out.push_back("[ANS]");
                i += label.size();
                marked = true;
                replaced = true;
                break;
            }
        }
        if (!replaced) {
            out.push_back(target_tokens[i]);
            ++i;
        }
    }
    return out;
}

} // namespace

std::vector<TrainingInstance> build_training_instances(const std::vector<Conversation>& convs,
                                                       const Tokenizer& tok,
                                                       const std::vector<std::string>& domain_vocab,
                                                       HistoryMode history_mode,
                                                       ResponseMode response_mode) {
    std::vector<TrainingInstance> out;
    for (const Conversation& c : convs) {
        auto dit = std::find(domain_vocab.begin(), domain_vocab.end(), c.domain);
        if (dit == domain_vocab.end())
            throw config_error("domain not in vocabulary: " + c.domain);
        const int domain_id = static_cast<int>(dit - domain_vocab.begin());

        for (int ti = 0; ti < static_cast<int>(c.turns.size()); ++ti) {
            const Turn& t = c.turns[static_cast<std::size_t>(ti)];
            TrainingInstance inst;
            inst.conversation_id = c.id;
            inst.turn_index = ti;
            inst.domain_id = domain_id;
            inst.input_ids = build_input_sequence(c, ti, tok, history_mode, response_mode);

            std::vector<std::vector<std::string>> label_tokens;
            for (const auto& l : t.answer_labels) label_tokens.push_back(Tokenizer::split(l));
            std::sort(label_tokens.begin(), label_tokens.end(),
                      [](const auto& a, const auto& b) { return a.size() > b.size(); });
            auto marked = mark_answer_span(Tokenizer::split(t.fluent_response), label_tokens,
                                           inst.answer_marked);
            for (const auto& token : marked) inst.target_ids.push_back(tok.token_id(token));
            if (static_cast<int>(inst.target_ids.size()) > kMaxTargetTokens - 1)
                inst.target_ids.resize(kMaxTargetTokens - 1);
            inst.target_ids.push_back(Tokenizer::eos_id);

            inst.gold_answers = t.answers;
            inst.positives = t.positives;
            inst.negatives = t.negatives;
            out.push_back(std::move(inst));
        }
    }
    return out;
}

std::vector<Batch> make_batches(const std::vector<TrainingInstance>& instances, int batch_size,
                                std::uint64_t seed) {
    if (batch_size < 2 || batch_size % 2 != 0)
        throw config_error("batch_size must be even and at least 2");

    rng_t rng = make_rng(seed, 0xba7c4);
    std::vector<std::size_t> order(instances.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<Batch> batches;
    bool odd_toggle = false;
    for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(batch_size)) {
        const std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(batch_size));
        Batch batch;
        std::vector<std::size_t> free_slots;
        int forced_pos = 0, forced_neg = 0;
        for (std::size_t k = begin; k < end; ++k) {
            const TrainingInstance& inst = instances[order[k]];
            BatchElement el;
            el.instance = &inst;
            const bool has_pos = !inst.positives.empty();
            const bool has_neg = !inst.negatives.empty();
            if (has_pos && has_neg) {
                free_slots.push_back(batch.elements.size());
            } else if (has_pos) {
                el.rank_label = 1;
                ++forced_pos;
            } else if (has_neg) {
                el.rank_label = -1;
                ++forced_neg;
            } else {
                el.rank_label = 0; // no_rank
            }
            batch.elements.push_back(std::move(el));
        }

        const int eligible = forced_pos + forced_neg + static_cast<int>(free_slots.size());
        int target_pos = eligible / 2;
        if (eligible % 2 != 0) {
            if (odd_toggle) ++target_pos;
            odd_toggle = !odd_toggle;
        }
        int free_pos = std::clamp(target_pos - forced_pos, 0, static_cast<int>(free_slots.size()));
        std::shuffle(free_slots.begin(), free_slots.end(), rng);
        for (std::size_t k = 0; k < free_slots.size(); ++k)
            batch.elements[free_slots[k]].rank_label = static_cast<int>(k) < free_pos ? 1 : -1;

        for (BatchElement& el : batch.elements) {
            if (el.rank_label == 0) continue;
            const auto& pool = el.rank_label == 1 ? el.instance->positives : el.instance->negatives;
            std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
            el.sampled_path = pool[pick(rng)];
        }
        batches.push_back(std::move(batch));
    }
    return batches;
}

} // namespace praline
