#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_helpers.hpp"

#include "praline/common.hpp"
#include "praline/kg.hpp"

#include <algorithm>
#include <fstream>
#include <set>

using namespace praline;

namespace {

std::string write_tmp(const std::string& name, const std::string& content) {
    const std::string path = "/tmp/praline_kg_" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

// Independent brute-force enumeration used as the extraction oracle: walks
// the raw triple list directly instead of the indexed adjacency.
void brute_force_walk(const std::vector<Triple>& triples, const std::set<std::string>& entities,
                      const std::string& node, int remaining, ContextPath& current,
                      std::set<std::string>& visited, std::vector<ContextPath>& out) {
    if (remaining == 0) return;
    if (!entities.count(node)) return;
    for (const Triple& t : triples) {
        if (t.head != node || visited.count(t.tail)) continue;
        current.steps.push_back({t.relation, t.tail});
        out.push_back(current);
        visited.insert(t.tail);
        brute_force_walk(triples, entities, t.tail, remaining - 1, current, visited, out);
        visited.erase(t.tail);
        current.steps.pop_back();
    }
}

std::set<std::vector<std::pair<std::string, std::string>>>
brute_force_paths(const KnowledgeGraph& g, const std::set<std::string>& context, int hops) {
    std::vector<ContextPath> all;
    for (const std::string& anchor : context) {
        ContextPath cur;
        cur.anchor = anchor;
        std::set<std::string> visited{anchor};
        brute_force_walk(g.triples(), g.entities(), anchor, hops, cur, visited, all);
    }
    std::set<std::vector<std::pair<std::string, std::string>>> keyed;
    for (const ContextPath& p : all) {
        std::vector<std::pair<std::string, std::string>> key{{p.anchor, ""}};
        for (const PathStep& s : p.steps) key.push_back({s.relation, s.node});
        keyed.insert(key);
    }
    return keyed;
}

std::set<std::vector<std::pair<std::string, std::string>>>
keyed(const std::vector<ContextPath>& paths) {
    std::set<std::vector<std::pair<std::string, std::string>>> out;
    for (const ContextPath& p : paths) {
        std::vector<std::pair<std::string, std::string>> key{{p.anchor, ""}};
        for (const PathStep& s : p.steps) key.push_back({s.relation, s.node});
        out.insert(key);
    }
    return out;
}

KnowledgeGraph random_graph(rng_t& rng, int max_nodes, int max_edges) {
    std::uniform_int_distribution<int> node_count(2, max_nodes);
    const int n = node_count(rng);
    std::uniform_int_distribution<int> edge_count(1, max_edges);
    std::uniform_int_distribution<int> node_pick(0, n - 1);
    std::uniform_int_distribution<int> rel_pick(0, 4);
    const int m = edge_count(rng);
    std::vector<Triple> triples;
    for (int i = 0; i < m; ++i) {
        triples.push_back({"n" + std::to_string(node_pick(rng)),
                           "r" + std::to_string(rel_pick(rng)),
                           "n" + std::to_string(node_pick(rng))});
    }
    std::map<std::string, std::string> labels;
    for (int i = 0; i < n; ++i) labels["n" + std::to_string(i)] = "node " + std::to_string(i);
    return KnowledgeGraph::from_triples(std::move(triples), std::move(labels));
}

} // namespace

TEST_CASE("load_graph builds the index") {
    const std::string triples = write_tmp("t1.tsv", "e1\tr1\te2\ne2\tr2\te3\n");
    const std::string labels = write_tmp("l1.tsv", "e1\tone\ne2\ttwo\ne3\tthree\nr1\tfirst\nr2\tsecond\n");
    KnowledgeGraph g = KnowledgeGraph::load(triples, labels);
    CHECK(g.entities().size() == 3);
    CHECK(g.relations().size() == 2);
    CHECK(g.triples().size() == 2);
    CHECK(g.entity_label("e1") == "one");
    CHECK(g.entity_label("missing") == "missing");
    CHECK(g.out_edges("e1").size() == 1);
    CHECK(g.out_edges("e3").empty());
}

TEST_CASE("load_graph rejects malformed input") {
    const std::string labels = write_tmp("l2.tsv", "e1\tone\n");
    CHECK_THROWS_WITH_AS(
        KnowledgeGraph::load(write_tmp("empty.tsv", ""), labels), doctest::Contains("no triples"),
        parse_error);
    CHECK_THROWS_WITH_AS(KnowledgeGraph::load(write_tmp("twocol.tsv", "e1\tr1\n"), labels),
                         doctest::Contains("line 1"), parse_error);
}

TEST_CASE("adjacency matches the triple list exactly") {
    rng_t rng = make_rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        KnowledgeGraph g = random_graph(rng, 15, 40);
        std::set<std::tuple<std::string, std::string, std::string>> from_triples;
        for (const Triple& t : g.triples()) from_triples.insert({t.head, t.relation, t.tail});
        std::set<std::tuple<std::string, std::string, std::string>> from_adjacency;
        for (const std::string& e : g.entities())
            for (const PathStep& s : g.out_edges(e)) from_adjacency.insert({e, s.relation, s.node});
        CHECK(from_triples == from_adjacency);
    }
}

TEST_CASE("extract_context_paths on the toy graph") {
    KnowledgeGraph g = testing::toy_graph();

    auto one = extract_context_paths(g, {"e1"}, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].anchor == "e1");
    CHECK(one[0].steps == std::vector<PathStep>{{"r1", "e2"}});

    auto two = extract_context_paths(g, {"e1"}, 2);
    REQUIRE(two.size() == 3);
    CHECK(keyed(two) == brute_force_paths(g, {"e1"}, 2));

    CHECK(extract_context_paths(g, {}, 3).empty());
    CHECK_THROWS_WITH_AS(extract_context_paths(g, {"nope"}, 2), doctest::Contains("nope"),
                         config_error);
    CHECK_THROWS_AS(extract_context_paths(g, {"e1"}, 4), config_error);
}

TEST_CASE("extraction equals brute force on random graphs") {
    rng_t rng = make_rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        KnowledgeGraph g = random_graph(rng, 30, 60);
        std::vector<std::string> pool(g.entities().begin(), g.entities().end());
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        std::set<std::string> context{pool[pick(rng)], pool[pick(rng)]};
        for (int hops = 1; hops <= 3; ++hops) {
            auto got = extract_context_paths(g, context, hops);
            CHECK(keyed(got) == brute_force_paths(g, context, hops));
        }
    }
}

TEST_CASE("path sets are monotone in max_hops") {
    rng_t rng = make_rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        KnowledgeGraph g = random_graph(rng, 20, 50);
        std::vector<std::string> pool(g.entities().begin(), g.entities().end());
        std::set<std::string> context{pool[0]};
        auto k1 = keyed(extract_context_paths(g, context, 1));
        auto k2 = keyed(extract_context_paths(g, context, 2));
        auto k3 = keyed(extract_context_paths(g, context, 3));
        CHECK(std::includes(k2.begin(), k2.end(), k1.begin(), k1.end()));
        CHECK(std::includes(k3.begin(), k3.end(), k2.begin(), k2.end()));
    }
}

TEST_CASE("canonical extraction order: anchors ascending, steps lexicographic") {
    KnowledgeGraph g = testing::toy_graph();
    auto paths = extract_context_paths(g, {"e1", "e2"}, 2);
    auto sorted = paths;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::equal(paths.begin(), paths.end(), sorted.begin()));
}

TEST_CASE("label_paths partitions by endpoint") {
    KnowledgeGraph g = testing::toy_graph();
    auto paths = extract_context_paths(g, {"e1"}, 2);

    SUBCASE("single gold") {
        auto [pos, neg] = label_paths(paths, {"e3"});
        REQUIRE(pos.size() == 1);
        CHECK(pos[0].endpoint() == "e3");
        CHECK(pos[0].label == PathLabel::positive);
        CHECK(neg.size() == 2);
    }
    SUBCASE("empty gold set makes everything negative") {
        auto [pos, neg] = label_paths(paths, {});
        CHECK(pos.empty());
        CHECK(neg.size() == paths.size());
    }
    SUBCASE("multiple golds") {
        auto [pos, neg] = label_paths(paths, {"e2", "e4"});
        REQUIRE(pos.size() == 2);
        std::set<std::string> endpoints{pos[0].endpoint(), pos[1].endpoint()};
        CHECK(endpoints == std::set<std::string>{"e2", "e4"});
    }
    SUBCASE("partition and idempotence") {
        auto [pos, neg] = label_paths(paths, {"e3"});
        CHECK(pos.size() + neg.size() == paths.size());
        auto relabeled = pos;
        relabeled.insert(relabeled.end(), neg.begin(), neg.end());
        auto [pos2, neg2] = label_paths(relabeled, {"e3"});
        CHECK(pos2.size() == pos.size());
        CHECK(neg2.size() == neg.size());
    }
}

TEST_CASE("verbalize_path") {
    KnowledgeGraph g = testing::toy_graph();
    auto paths = extract_context_paths(g, {"e1"}, 2);
    // canonical order: [e1 r1 e2], [e1 r1 e2 r2 e3], [e1 r1 e2 r3 e4]
    CHECK(verbalize_path(paths[0], g) == "Secret Garden author F. H. Burnett");
    CHECK(verbalize_path(paths[1], g) == "Secret Garden author F. H. Burnett birthplace Manchester");

    SUBCASE("missing labels fall back to the id") {
        KnowledgeGraph g2 = KnowledgeGraph::from_triples({{"Q7", "P1", "Q9"}}, {});
        auto p = extract_context_paths(g2, {"Q7"}, 1);
        CHECK(verbalize_path(p[0], g2) == "Q7 P1 Q9");
    }
    SUBCASE("injective when labels are unique") {
        rng_t rng = make_rng(13);
        KnowledgeGraph g3 = random_graph(rng, 12, 30);
        std::vector<std::string> pool(g3.entities().begin(), g3.entities().end());
        auto all = extract_context_paths(g3, {pool.begin(), pool.end()}, 3);
        std::set<std::string> texts;
        for (const ContextPath& p : all) texts.insert(verbalize_path(p, g3));
        CHECK(texts.size() == all.size());
    }
}

TEST_CASE("inverse edges are opt-in and tagged") {
    KnowledgeGraph g = testing::toy_graph();
    auto forward_only = extract_context_paths(g, {"e3"}, 1);
    CHECK(forward_only.empty());

    auto with_inverse = extract_context_paths(g, {"e3"}, 1, true);
    REQUIRE(with_inverse.size() == 1);
    CHECK(with_inverse[0].steps[0].relation == "inverse:r2");
    CHECK(with_inverse[0].endpoint() == "e2");
    CHECK(verbalize_path(with_inverse[0], g) == "Manchester inverse: birthplace F. H. Burnett");
}

TEST_CASE("literals are endpoints but never expanded") {
    KnowledgeGraph g = KnowledgeGraph::from_triples(
        {{"a", "r", "1999"}, {"b", "r", "1999"}, {"a", "s", "b"}}, {{"a", "A"}, {"b", "B"}});
    CHECK(!g.has_entity("1999"));
    auto paths = extract_context_paths(g, {"a"}, 3, true);
    for (const ContextPath& p : paths)
        for (std::size_t i = 0; i + 1 < p.steps.size(); ++i) CHECK(p.steps[i].node != "1999");
}

TEST_CASE("path JSON round trip") {
    KnowledgeGraph g = testing::toy_graph();
    auto paths = extract_context_paths(g, {"e1"}, 3);
    auto [pos, neg] = label_paths(paths, {"e3"});
    for (const auto& p : pos) {
        ContextPath q = path_from_json(path_to_json(p));
        CHECK(q == p);
        CHECK(q.label == PathLabel::positive);
    }
    for (const auto& p : neg) CHECK(path_from_json(path_to_json(p)) == p);
}
