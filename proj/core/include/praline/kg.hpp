#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace praline {

// One directed traversal step: relation followed to a node. The node is
// either an entity id or a literal value.
struct PathStep {
    std::string relation;
    std::string node;

    auto operator<=>(const PathStep&) const = default;
};

enum class PathLabel { unlabeled, positive, negative };

// A 1..3-hop forward path anchored at a context entity. Endpoint is the last
// node; it may be a literal. Paths are simple: no node is revisited.
struct ContextPath {
    std::string anchor;
    std::vector<PathStep> steps;
    PathLabel label = PathLabel::unlabeled;

    const std::string& endpoint() const { return steps.back().node; }

    bool operator==(const ContextPath& o) const {
        return anchor == o.anchor && steps == o.steps;
    }
    bool operator<(const ContextPath& o) const {
        if (anchor != o.anchor) return anchor < o.anchor;
        return steps < o.steps;
    }
};

struct Triple {
    std::string head;
    std::string relation;
    std::string tail;
};

// Immutable after load. Tails that never occur as heads and carry no label
// entry are treated as literals: they are valid path endpoints but are never
// expanded.
class KnowledgeGraph {
  public:
    static KnowledgeGraph load(const std::string& triples_file, const std::string& labels_file);
    static KnowledgeGraph from_triples(std::vector<Triple> triples,
                                       std::map<std::string, std::string> labels);

    const std::set<std::string>& entities() const { return entities_; }
    const std::set<std::string>& relations() const { return relations_; }
    const std::vector<Triple>& triples() const { return triples_; }

    bool has_entity(const std::string& id) const { return entities_.count(id) > 0; }

    // Label lookup falls back to the id itself when no entry exists.
    const std::string& entity_label(const std::string& id) const;
    const std::string& relation_label(const std::string& id) const;

    // Forward edges of an entity, sorted by (relation, tail). Empty for
    // literals and unknown ids.
    const std::vector<PathStep>& out_edges(const std::string& entity) const;

  private:
    void build_index();

    std::vector<Triple> triples_;
    std::set<std::string> entities_;
    std::set<std::string> relations_;
    std::map<std::string, std::string> labels_;
    std::map<std::string, std::vector<PathStep>> adjacency_;
};

// All simple forward paths of length 1..max_hops starting at any context
// entity, in canonical order: anchor id first, then lexicographic step
// sequence. include_inverse additionally walks edges backwards; reversed
// steps carry an "inverse:" prefix on the relation id.
std::vector<ContextPath> extract_context_paths(const KnowledgeGraph& graph,
                                               const std::set<std::string>& context_entities,
                                               int max_hops,
                                               bool include_inverse = false);

// Partition by endpoint membership in the gold answer set. Labels are written
// onto the returned copies.
std::pair<std::vector<ContextPath>, std::vector<ContextPath>>
label_paths(const std::vector<ContextPath>& paths, const std::set<std::string>& gold_answers);

// Space-joined label sequence: anchor label, then relation and node label per
// hop. Literals render verbatim.
std::string verbalize_path(const ContextPath& path, const KnowledgeGraph& graph);

// JSON Lines form used by the CLI path dumps:
// {"anchor":..., "steps":[[rel,node],...], "endpoint":..., "label":...}
std::string path_to_json(const ContextPath& path);
ContextPath path_from_json(const std::string& line);

} // namespace praline
