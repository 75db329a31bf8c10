#include <benchmark/benchmark.h>

#include "praline/corpus.hpp"
#include "praline/embedder.hpp"
#include "praline/kg.hpp"
#include "praline/model.hpp"
#include "praline/ranker.hpp"
#include "praline/synthetic.hpp"
#include "praline/tokenizer.hpp"
#include "praline/trainer.hpp"

#include <memory>

namespace {

using namespace praline;

struct BenchWorld {
    SynthOutput synth;
    KnowledgeGraph graph;
    Tokenizer tokenizer;
    std::unique_ptr<EmbeddingProvider> embedder;
    std::unique_ptr<DomainVocabulary> domains;
    std::unique_ptr<Model> model;
    std::vector<int> input_ids;
    std::vector<ContextPath> candidates;

    static const BenchWorld& instance() {
        static BenchWorld w = [] {
            BenchWorld b;
            SynthSpec spec;
            spec.n_domains = 4;
            spec.n_entities = 200;
            spec.n_relations = 12;
            spec.n_conversations = 40;
            spec.turns_per_conversation = 3;
            spec.seed = 7;
            b.synth = generate_synthetic_benchmark(spec);
            b.graph = KnowledgeGraph::from_triples(b.synth.triples, b.synth.labels);
            for (const Conversation& c : b.synth.conversations)
                for (const Turn& t : c.turns) {
                    b.tokenizer.add_corpus_text(t.question);
                    b.tokenizer.add_corpus_text(t.fluent_response);
                }
            b.embedder = std::make_unique<EmbeddingProvider>(
                EmbeddingProvider::Method::hashed_bag_of_tokens, 64, 7);
            b.domains = std::make_unique<DomainVocabulary>(b.synth.domain_labels, *b.embedder);
            Hyperparameters hp = Hyperparameters::desk_profile();
            b.model = std::make_unique<Model>(hp.model_config(b.tokenizer.size()), 7);

            const Conversation& conv = b.synth.conversations.front();
            b.input_ids = build_input_sequence(conv, static_cast<int>(conv.turns.size()) - 1,
                                               b.tokenizer, HistoryMode::full, ResponseMode::fluent);
            b.candidates =
                extract_context_paths(b.graph, conv.turns.back().context_entities, 3);
            return b;
        }();
        return w;
    }
};

void BM_PathExtraction(benchmark::State& state) {
    const BenchWorld& w = BenchWorld::instance();
    const Turn& turn = w.synth.conversations.front().turns.back();
    const int hops = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto paths = extract_context_paths(w.graph, turn.context_entities, hops);
        benchmark::DoNotOptimize(paths);
    }
}
BENCHMARK(BM_PathExtraction)->Arg(1)->Arg(2)->Arg(3);

void BM_PathVerbalizeEmbed(benchmark::State& state) {
    const BenchWorld& w = BenchWorld::instance();
    // fresh provider per iteration set so the in-memory cache does not hide the cost
    EmbeddingProvider cold(EmbeddingProvider::Method::hashed_bag_of_tokens, 64, 99);
    std::size_t i = 0;
    for (auto _ : state) {
        const ContextPath& p = w.candidates[i++ % w.candidates.size()];
        auto v = cold.embed_text(verbalize_path(p, w.graph) + std::to_string(i));
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_PathVerbalizeEmbed);

void BM_EncoderForward(benchmark::State& state) {
    const BenchWorld& w = BenchWorld::instance();
    for (auto _ : state) {
        EncoderOutput out = w.model->encoder().forward(w.input_ids);
        benchmark::DoNotOptimize(out.hidden);
    }
}
BENCHMARK(BM_EncoderForward);

void BM_CandidateScoring(benchmark::State& state) {
    const BenchWorld& w = BenchWorld::instance();
    EncoderOutput enc = w.model->encoder().forward(w.input_ids);
    Vec h_dm = w.domains->embedding(0);
    Vec phi_c = conversation_embedding(pool_encoder(enc).values, h_dm, w.model->towers());
    std::vector<Vec> raw;
    for (const ContextPath& p : w.candidates)
        raw.push_back(w.embedder->embed_text(verbalize_path(p, w.graph)));
    for (auto _ : state) {
        std::vector<Vec> phis;
        phis.reserve(raw.size());
        for (const Vec& v : raw) phis.push_back(path_embedding(v, w.model->towers()));
        auto ranked = rank_candidates(phi_c, phis, w.candidates);
        benchmark::DoNotOptimize(ranked);
    }
    state.counters["candidates"] = static_cast<double>(w.candidates.size());
}
BENCHMARK(BM_CandidateScoring);

void BM_TrainStep(benchmark::State& state) {
    const BenchWorld& w = BenchWorld::instance();
    auto convs = w.synth.conversations;
    attach_paths(convs, w.graph, 3);
    auto instances = build_training_instances(convs, w.tokenizer, w.synth.domain_labels,
                                              HistoryMode::full, ResponseMode::fluent);
    Hyperparameters hp = Hyperparameters::desk_profile();
    hp.epochs = 1;
    std::vector<TrainingInstance> subset(instances.begin(), instances.begin() + 16);
    for (auto _ : state) {
        Model model(hp.model_config(w.tokenizer.size()), 7);
        TrainOptions opt;
        opt.hp = hp;
        TrainOutput out = train(model, subset, {}, *w.domains, *w.embedder, w.graph, opt);
        benchmark::DoNotOptimize(out.log);
    }
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
