#pragma once

#include "praline/kg.hpp"
#include "praline/tokenizer.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace praline {

inline constexpr int kMaxInputTokens = 150;
inline constexpr int kMaxTargetTokens = 50;

struct Turn {
    std::string question;
    std::set<std::string> answers;            // entity ids or literals
    std::vector<std::string> answer_labels;   // display labels, aligned with answers
    std::string fluent_response;
    std::set<std::string> context_entities;
    bool has_gold_paths = true;               // false emulates missing gold annotations
    std::vector<ContextPath> positives;
    std::vector<ContextPath> negatives;
    bool paths_loaded = false;                // set when path fields came from the file
};

struct Conversation {
    std::string id;
    std::string domain;
    std::vector<Turn> turns;
};

std::vector<Conversation> load_conversations(const std::string& file);
void save_conversations(const std::vector<Conversation>& convs, const std::string& file,
                        bool write_paths = false);

std::vector<std::string> load_domain_vocabulary(const std::string& file);
void save_domain_vocabulary(const std::vector<std::string>& domains, const std::string& file);

enum class HistoryMode { full, previous_turn_only, none };
enum class ResponseMode { fluent, bare_answer };

// History and current question joined with [SEP]; inside the history each
// question and its response are separated by [SEP] as well. Truncation drops
// the oldest tokens first; the result always ends with the current question
// and never exceeds kMaxInputTokens. An empty history yields just the
// tokenized question, with no leading separator.
std::vector<int> build_input_sequence(const Conversation& conv, int turn_index,
                                      const Tokenizer& tok, HistoryMode history_mode,
                                      ResponseMode response_mode);

struct TrainingInstance {
    std::string conversation_id;
    int turn_index = 0;
    std::vector<int> input_ids;
    std::vector<int> target_ids;   // fluent response with the answer span as [ANS], [EOS]-terminated
    int domain_id = 0;
    bool answer_marked = false;    // [ANS] substitution succeeded
    std::set<std::string> gold_answers;
    std::vector<ContextPath> positives;
    std::vector<ContextPath> negatives;
};

// Fills D+/D- for every turn that did not carry explicit path fields, by
// extracting candidates from the graph and partitioning against the gold
// answers. Turns flagged without gold paths get an empty positive set and
// keep only the non-gold candidates.
void attach_paths(std::vector<Conversation>& convs, const KnowledgeGraph& graph, int max_hops,
                  bool include_inverse = false);

// Locates the answer span in the target by exact token-sequence match of any
// answer label (longest label first) and replaces each occurrence with one
// [ANS] token. Unmatched targets are kept verbatim and flagged.
std::vector<TrainingInstance> build_training_instances(const std::vector<Conversation>& convs,
                                                       const Tokenizer& tok,
                                                       const std::vector<std::string>& domain_vocab,
                                                       HistoryMode history_mode,
                                                       ResponseMode response_mode);

struct BatchElement {
    const TrainingInstance* instance = nullptr;
    int rank_label = 0;            // +1, -1, or 0 when no_rank
    std::optional<ContextPath> sampled_path;
};

struct Batch {
    std::vector<BatchElement> elements;
};

// Deterministic per-epoch batch stream. Each batch is balanced half +1 and
// half -1 over its rank-eligible elements; instances with one empty path set
// are forced to the other side, and instances with both sets empty are
// emitted with rank_label 0.
std::vector<Batch> make_batches(const std::vector<TrainingInstance>& instances, int batch_size,
                                std::uint64_t seed);

} // namespace praline
