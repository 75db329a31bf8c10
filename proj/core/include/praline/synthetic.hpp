#pragma once

#include "praline/corpus.hpp"
#include "praline/kg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace praline {

// Desk-scale benchmark generator. The graph's relations are partitioned by
// domain (plus one relation label deliberately shared across domains, so the
// conversation domain is needed to resolve it); conversations are random
// 1..3-hop walks phrased from templates. Questions after the first turn may
// refer back anaphorically to the previous answer or to the opening entity,
// which is what makes dialog history worth encoding.
struct SynthSpec {
    int n_domains = 4;
    int n_entities = 200;
    int n_relations = 12;
    int n_conversations = 300;
    int turns_per_conversation = 3;
    std::uint64_t seed = 7;
    double corruption_rate = 0.0; // fraction of turns stripped of gold annotations
};

struct SynthOutput {
    std::vector<Triple> triples;
    std::map<std::string, std::string> labels;
    std::vector<std::string> domain_labels;
    std::vector<Conversation> conversations;
};

SynthOutput generate_synthetic_benchmark(const SynthSpec& spec);

// Writes triples.tsv, labels.tsv, conversations.jsonl and domains.txt into
// the directory. Byte-identical across runs with the same spec.
void write_synthetic_benchmark(const SynthOutput& out, const std::string& dir);

struct DatasetSplit {
    std::vector<Conversation> train;
    std::vector<Conversation> val;
    std::vector<Conversation> test;
};

// Deterministic shuffle-then-cut split at conversation granularity.
DatasetSplit split_dataset(const std::vector<Conversation>& convs, double train_frac,
                           double val_frac, std::uint64_t seed);

} // namespace praline
