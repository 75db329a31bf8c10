#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_helpers.hpp"

#include "praline/synthetic.hpp"

#include <filesystem>
#include <fstream>

using namespace praline;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

SynthSpec default_spec() {
    SynthSpec spec;
    spec.n_domains = 2;
    spec.n_entities = 50;
    spec.n_relations = 8;
    spec.n_conversations = 20;
    spec.turns_per_conversation = 3;
    spec.seed = 7;
    return spec;
}

} // namespace

TEST_CASE("generation is deterministic: byte-identical files") {
    const std::string a = "/tmp/praline_synth_a", b = "/tmp/praline_synth_b";
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
    write_synthetic_benchmark(generate_synthetic_benchmark(default_spec()), a);
    write_synthetic_benchmark(generate_synthetic_benchmark(default_spec()), b);
    for (const char* name : {"triples.tsv", "labels.tsv", "conversations.jsonl", "domains.txt"})
        CHECK(slurp(a + "/" + name) == slurp(b + "/" + name));
}

TEST_CASE("generated data is schema-valid and self-consistent") {
    const std::string dir = "/tmp/praline_synth_c";
    std::filesystem::remove_all(dir);
    write_synthetic_benchmark(generate_synthetic_benchmark(default_spec()), dir);

    KnowledgeGraph graph = KnowledgeGraph::load(dir + "/triples.tsv", dir + "/labels.tsv");
    auto convs = load_conversations(dir + "/conversations.jsonl");
    auto domains = load_domain_vocabulary(dir + "/domains.txt");
    CHECK(convs.size() == 20);
    CHECK(domains.size() == 2);

    for (const Conversation& c : convs) {
        CHECK(std::find(domains.begin(), domains.end(), c.domain) != domains.end());
        for (const Turn& t : c.turns)
            for (const std::string& e : t.context_entities) CHECK(graph.has_entity(e));
    }
}

TEST_CASE("every turn of a clean benchmark has at least one positive path") {
    const auto out = generate_synthetic_benchmark(default_spec());
    KnowledgeGraph graph = KnowledgeGraph::from_triples(out.triples, out.labels);
    auto convs = out.conversations;
    attach_paths(convs, graph, 3);
    for (const Conversation& c : convs)
        for (const Turn& t : c.turns) {
            INFO(c.id << " / " << t.question);
            CHECK(!t.positives.empty());
        }
}

TEST_CASE("corruption strips roughly the requested fraction of turns") {
    SynthSpec spec = default_spec();
    spec.n_conversations = 400;
    spec.corruption_rate = 0.25;
    const auto out = generate_synthetic_benchmark(spec);
    long total = 0, stripped = 0;
    for (const Conversation& c : out.conversations)
        for (const Turn& t : c.turns) {
            ++total;
            if (!t.has_gold_paths) ++stripped;
        }
    const double fraction = static_cast<double>(stripped) / static_cast<double>(total);
    CHECK(fraction >= 0.23);
    CHECK(fraction <= 0.27);
}

TEST_CASE("infeasible specifications are rejected") {
    SynthSpec spec = default_spec();
    spec.n_relations = 200; // more than the label pool can provide
    CHECK_THROWS_WITH_AS(generate_synthetic_benchmark(spec),
                         doctest::Contains("template slots"), config_error);

    SynthSpec bad = default_spec();
    bad.n_domains = 1;
    CHECK_THROWS_AS(generate_synthetic_benchmark(bad), config_error);

    SynthSpec zero = default_spec();
    zero.n_conversations = 0;
    CHECK_THROWS_AS(generate_synthetic_benchmark(zero), config_error);
}

TEST_CASE("the shared relation label appears in more than one domain") {
    SynthSpec spec = default_spec();
    spec.n_relations = 8; // 4 per domain: one shared + three unique each
    const auto out = generate_synthetic_benchmark(spec);
    std::map<std::string, int> label_count;
    for (const auto& [id, label] : out.labels)
        if (id.rfind("r", 0) == 0 && id.find_first_not_of("0123456789", 1) == std::string::npos)
            ++label_count[label];
    CHECK(label_count.at("partner") == 2);
}

TEST_CASE("dataset split is deterministic and partitions the data") {
    const auto out = generate_synthetic_benchmark(default_spec());
    DatasetSplit a = split_dataset(out.conversations, 0.8, 0.1, 7);
    DatasetSplit b = split_dataset(out.conversations, 0.8, 0.1, 7);
    CHECK(a.train.size() == b.train.size());
    CHECK(a.train.size() + a.val.size() + a.test.size() == out.conversations.size());
    REQUIRE(!a.test.empty());
    CHECK(a.test[0].id == b.test[0].id);

    std::set<std::string> ids;
    for (const auto& c : a.train) ids.insert(c.id);
    for (const auto& c : a.val) ids.insert(c.id);
    for (const auto& c : a.test) ids.insert(c.id);
    CHECK(ids.size() == out.conversations.size());

    CHECK_THROWS_AS(split_dataset(out.conversations, 0.9, 0.2, 7), config_error);
}
