#include "praline/kg.hpp"

#include "praline/common.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace praline {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find('\t', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

} // namespace

KnowledgeGraph KnowledgeGraph::load(const std::string& triples_file, const std::string& labels_file) {
    std::ifstream tf(triples_file);
    if (!tf) throw parse_error("cannot open triples file: " + triples_file);

    std::vector<Triple> triples;
    std::string line;
    int lineno = 0;
    while (std::getline(tf, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cols = split_tabs(line);
        if (cols.size() != 3 || cols[0].empty() || cols[1].empty() || cols[2].empty()) {
            throw parse_error(triples_file + ": line " + std::to_string(lineno) +
                              ": expected 3 tab-separated columns");
        }
        triples.push_back({cols[0], cols[1], cols[2]});
    }
    if (triples.empty()) throw parse_error(triples_file + ": no triples");

    std::map<std::string, std::string> labels;
    std::ifstream lf(labels_file);
    if (!lf) throw parse_error("cannot open labels file: " + labels_file);
    lineno = 0;
    while (std::getline(lf, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cols = split_tabs(line);
        if (cols.size() != 2 || cols[0].empty()) {
            throw parse_error(labels_file + ": line " + std::to_string(lineno) +
                              ": expected 2 tab-separated columns");
        }
        labels[cols[0]] = cols[1];
    }

    return from_triples(std::move(triples), std::move(labels));
}

KnowledgeGraph KnowledgeGraph::from_triples(std::vector<Triple> triples,
                                            std::map<std::string, std::string> labels) {
    if (triples.empty()) throw parse_error("no triples");
    KnowledgeGraph g;
    g.triples_ = std::move(triples);
    g.labels_ = std::move(labels);
    g.build_index();
    return g;
}

void KnowledgeGraph::build_index() {
    for (const Triple& t : triples_) {
        entities_.insert(t.head);
        relations_.insert(t.relation);
    }
    // A tail is an entity when it occurs as a head or carries a label entry;
    // everything else is a literal.
    for (const Triple& t : triples_) {
        if (entities_.count(t.tail) == 0 && labels_.count(t.tail) > 0) entities_.insert(t.tail);
    }
    for (const Triple& t : triples_) {
        auto& edges = adjacency_[t.head];
        edges.push_back({t.relation, t.tail});
    }
    for (auto& [id, edges] : adjacency_) {
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    }
}

const std::string& KnowledgeGraph::entity_label(const std::string& id) const {
    auto it = labels_.find(id);
    return it != labels_.end() ? it->second : id;
}

const std::string& KnowledgeGraph::relation_label(const std::string& id) const {
    auto it = labels_.find(id);
    return it != labels_.end() ? it->second : id;
}

const std::vector<PathStep>& KnowledgeGraph::out_edges(const std::string& entity) const {
    static const std::vector<PathStep> none;
    auto it = adjacency_.find(entity);
    return it != adjacency_.end() ? it->second : none;
}

namespace {

void walk(const KnowledgeGraph& graph, const std::string& node, int remaining,
          bool include_inverse, ContextPath& current, std::set<std::string>& visited,
          std::vector<ContextPath>& out,
          const std::map<std::string, std::vector<PathStep>>* inverse_edges) {
    if (remaining == 0) return;
    if (!graph.has_entity(node)) return; // literals are endpoints, never expanded
    std::vector<PathStep> edges = graph.out_edges(node);
    if (inverse_edges) {
        auto it = inverse_edges->find(node);
        if (it != inverse_edges->end())
            edges.insert(edges.end(), it->second.begin(), it->second.end());
        std::sort(edges.begin(), edges.end());
    }
    for (const PathStep& e : edges) {
        if (visited.count(e.node)) continue; // simple paths only
        current.steps.push_back(e);
        out.push_back(current);
        visited.insert(e.node);
        walk(graph, e.node, remaining - 1, include_inverse, current, visited, out, inverse_edges);
        visited.erase(e.node);
        current.steps.pop_back();
    }
}

} // namespace

std::vector<ContextPath> extract_context_paths(const KnowledgeGraph& graph,
                                               const std::set<std::string>& context_entities,
                                               int max_hops, bool include_inverse) {
    if (max_hops < 1 || max_hops > 3) throw config_error("max_hops must be 1, 2 or 3");
    for (const auto& e : context_entities) {
        if (!graph.has_entity(e)) throw config_error("unknown context entity: " + e);
    }

    std::map<std::string, std::vector<PathStep>> inverse_edges;
    if (include_inverse) {
        for (const Triple& t : graph.triples())
            inverse_edges[t.tail].push_back({"inverse:" + t.relation, t.head});
    }

    std::vector<ContextPath> out;
    for (const auto& anchor : context_entities) { // std::set iterates in anchor id order
        ContextPath current;
        current.anchor = anchor;
        std::set<std::string> visited{anchor};
        walk(graph, anchor, max_hops, include_inverse, current, visited, out,
             include_inverse ? &inverse_edges : nullptr);
    }
    return out;
}

std::pair<std::vector<ContextPath>, std::vector<ContextPath>>
label_paths(const std::vector<ContextPath>& paths, const std::set<std::string>& gold_answers) {
    std::vector<ContextPath> pos, neg;
    for (ContextPath p : paths) {
        if (gold_answers.count(p.endpoint())) {
            p.label = PathLabel::positive;
            pos.push_back(std::move(p));
        } else {
            p.label = PathLabel::negative;
            neg.push_back(std::move(p));
        }
    }
    return {std::move(pos), std::move(neg)};
}

std::string verbalize_path(const ContextPath& path, const KnowledgeGraph& graph) {
    std::string out = graph.entity_label(path.anchor);
    for (const PathStep& s : path.steps) {
        std::string rel = s.relation;
        bool inverse = false;
        if (rel.rfind("inverse:", 0) == 0) {
            rel = rel.substr(8);
            inverse = true;
        }
        out += ' ';
        if (inverse) out += "inverse: ";
        out += graph.relation_label(rel);
        out += ' ';
        out += graph.entity_label(s.node);
    }
    return out;
}

std::string path_to_json(const ContextPath& path) {
    nlohmann::json j;
    j["anchor"] = path.anchor;
    auto steps = nlohmann::json::array();
    for (const PathStep& s : path.steps) steps.push_back({s.relation, s.node});
    j["steps"] = steps;
    j["endpoint"] = path.endpoint();
    switch (path.label) {
        case PathLabel::positive: j["label"] = "positive"; break;
        case PathLabel::negative: j["label"] = "negative"; break;
        case PathLabel::unlabeled: j["label"] = "unlabeled"; break;
    }
    return j.dump();
}

ContextPath path_from_json(const std::string& line) {
    nlohmann::json j = nlohmann::json::parse(line);
    ContextPath p;
    p.anchor = j.at("anchor").get<std::string>();
    for (const auto& s : j.at("steps")) {
        p.steps.push_back({s.at(0).get<std::string>(), s.at(1).get<std::string>()});
    }
    if (p.steps.empty()) throw parse_error("path has no steps");
    const std::string label = j.value("label", "unlabeled");
    if (label == "positive") p.label = PathLabel::positive;
    else if (label == "negative") p.label = PathLabel::negative;
    else p.label = PathLabel::unlabeled;
    return p;
}

} // namespace praline
