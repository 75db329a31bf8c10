#include "praline/synthetic.hpp"

#include "praline/common.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>

namespace praline {

namespace {

const std::vector<std::string> kDomainPool = {"films",  "books",   "music",  "sport",
                                              "science", "travel", "food",   "history"};

// One shared label per domain block plus unique labels drawn from this pool.
const std::string kSharedRelationLabel = "partner";
const std::vector<std::string> kRelationLabelPool = {
    "director", "author",   "composer", "coach",    "producer", "editor",
    "founder",  "leader",   "owner",    "sponsor",  "mentor",   "captain",
    "designer", "curator",  "publisher", "narrator", "builder",  "painter",
    "manager",  "inventor", "teacher",  "pilot",    "guide",    "keeper"};

const std::vector<std::string> kSyllables = {"ba", "ke", "ri", "to", "mu", "sa", "ve", "lo",
                                             "ni", "da", "po", "che", "gu", "fa", "zo", "wi"};

std::string make_entity_label(rng_t& rng, std::set<std::string>& used, int index) {
    std::uniform_int_distribution<std::size_t> pick(0, kSyllables.size() - 1);
    for (int attempt = 0; attempt < 8; ++attempt) {
        std::string name;
        for (int s = 0; s < 3; ++s) name += kSyllables[pick(rng)];
        if (used.insert(name).second) return name;
    }
    std::string fallback = "node" + std::to_string(index);
    used.insert(fallback);
    return fallback;
}

struct GraphView {
    // entity -> edges, split by the relation's domain
    std::map<std::string, std::map<int, std::vector<PathStep>>> domain_edges;
    std::map<std::string, int> relation_domain; // relation id -> domain index
    std::set<std::string> entity_ids;
};

} // namespace

SynthOutput generate_synthetic_benchmark(const SynthSpec& spec) {
    if (spec.n_domains < 2) throw config_error("need at least 2 domains");
    if (spec.n_entities < 1 || spec.n_relations < 1 || spec.n_conversations < 1 ||
        spec.turns_per_conversation < 1)
        throw config_error("all benchmark counts must be at least 1");
    if (spec.n_relations < spec.n_domains)
        throw config_error("need at least one relation per domain");
    if (spec.corruption_rate < 0.0 || spec.corruption_rate >= 1.0)
        throw config_error("corruption rate must be in [0, 1)");

    rng_t rng = make_rng(spec.seed, 0x5e7);
    SynthOutput out;

    for (int d = 0; d < spec.n_domains; ++d)
        out.domain_labels.push_back(d < static_cast<int>(kDomainPool.size())
                                        ? kDomainPool[static_cast<std::size_t>(d)]
                                        : "topic" + std::to_string(d));

    // Relations round-robin over domains; the first relation of each domain
    // carries the shared label.
    GraphView view;
    std::vector<std::string> relation_ids;
    std::map<int, std::vector<std::string>> domain_relations;
    int unique_needed = 0;
    for (int r = 0; r < spec.n_relations; ++r) {
        const int d = r % spec.n_domains;
        const std::string id = "r" + std::to_string(r);
        relation_ids.push_back(id);
        view.relation_domain[id] = d;
        domain_relations[d].push_back(id);
        const bool shared = domain_relations[d].size() == 1 && spec.n_relations >= 2 * spec.n_domains;
        if (shared) {
            out.labels[id] = kSharedRelationLabel;
        } else {
            if (unique_needed >= static_cast<int>(kRelationLabelPool.size()))
                throw config_error("more relations than template slots (" +
                                   std::to_string(kRelationLabelPool.size()) + " unique labels)");
            out.labels[id] = kRelationLabelPool[static_cast<std::size_t>(unique_needed)];
            ++unique_needed;
        }
    }

    std::vector<std::string> entity_ids;
    std::set<std::string> used_labels;
    for (int i = 0; i < spec.n_entities; ++i) {
        const std::string id = "e" + std::to_string(i);
        entity_ids.push_back(id);
        view.entity_ids.insert(id);
        out.labels[id] = make_entity_label(rng, used_labels, i);
    }

    // At most one edge per (head, relation); a bounded share of the entities
    // head each relation, a few edges end in literal years.
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> entity_pick(0, entity_ids.size() - 1);
    std::uniform_int_distribution<int> year_pick(1900, 1999);
    for (const std::string& rel : relation_ids) {
        const int d = view.relation_domain[rel];
        for (const std::string& head : entity_ids) {
            if (coin(rng) >= 0.3) continue;
            std::string tail;
            if (coin(rng) < 0.08) {
                tail = std::to_string(year_pick(rng));
            } else {
                tail = entity_ids[entity_pick(rng)];
                if (tail == head) continue;
            }
            out.triples.push_back({head, rel, tail});
            view.domain_edges[head][d].push_back({rel, tail});
        }
    }

    // Every domain needs at least one anchor entity with an out-edge.
    std::map<int, std::vector<std::string>> domain_anchors;
    for (const auto& [entity, by_domain] : view.domain_edges)
        for (const auto& [d, edges] : by_domain)
            if (!edges.empty()) domain_anchors[d].push_back(entity);
    for (int d = 0; d < spec.n_domains; ++d) {
        if (!domain_anchors[d].empty()) continue;
        const std::string& head = entity_ids[0];
        const std::string& tail = entity_ids[entity_ids.size() / 2];
        const std::string& rel = domain_relations[d].front();
        out.triples.push_back({head, rel, tail});
        view.domain_edges[head][d].push_back({rel, tail});
        domain_anchors[d].push_back(head);
    }

    auto domain_out_edges = [&](const std::string& entity, int d) -> const std::vector<PathStep>& {
        static const std::vector<PathStep> none;
        auto it = view.domain_edges.find(entity);
        if (it == view.domain_edges.end()) return none;
        auto dit = it->second.find(d);
        return dit != it->second.end() ? dit->second : none;
    };

    auto label_of = [&](const std::string& id) -> const std::string& {
        auto it = out.labels.find(id);
        return it != out.labels.end() ? it->second : id;
    };

    // Walks phrased from templates. The anchor reference decides how much
    // dialog history the question needs: "that one" points at the previous
    // answer, "the first one" at the opening entity.
    std::uniform_int_distribution<int> tmpl_pick(0, 1);
    for (int c = 0; c < spec.n_conversations; ++c) {
        const int d = c % spec.n_domains;
        Conversation conv;
        conv.id = "conv" + std::to_string(c);
        conv.domain = out.domain_labels[static_cast<std::size_t>(d)];

        const auto& anchors = domain_anchors[d];
        std::uniform_int_distribution<std::size_t> anchor_pick(0, anchors.size() - 1);

        std::string first_anchor;
        std::string prev_answer;
        for (int t = 0; t < spec.turns_per_conversation; ++t) {
            std::string anchor;
            enum class Ref { explicit_name, previous_answer, first_entity } ref = Ref::explicit_name;
            if (t > 0) {
                const double roll = coin(rng);
                if (roll < 0.4 && view.entity_ids.count(prev_answer) &&
                    !domain_out_edges(prev_answer, d).empty()) {
                    ref = Ref::previous_answer;
                    anchor = prev_answer;
                } else if (roll < 0.7 && !domain_out_edges(first_anchor, d).empty()) {
                    ref = Ref::first_entity;
                    anchor = first_anchor;
                }
            }
            if (anchor.empty()) {
                ref = Ref::explicit_name;
                anchor = anchors[anchor_pick(rng)];
            }
            if (t == 0) first_anchor = anchor;

            // Walk 1-3 hops inside the conversation domain without revisiting
            // nodes, so the gold answer stays reachable as a simple-path
            // endpoint. An ambiguity roll prefers the shared-label relation
            // when the anchor has one.
            int want_hops = 1;
            {
                const double roll = coin(rng);
                want_hops = roll < 0.7 ? 1 : roll < 0.95 ? 2 : 3;
            }
            // The shared-label relation is only asked about once history can
            // disambiguate the domain; a first turn has no such context.
            // Walks otherwise stick to domain-unique relations, leaving the
            // shared edges in the graph as ranking distractors.
            const bool want_shared = coin(rng) < 0.12 && t > 0;

            std::vector<PathStep> walk;
            std::string node = anchor;
            std::set<std::string> on_walk{anchor};
            for (int h = 0; h < want_hops; ++h) {
                std::vector<PathStep> edges = domain_out_edges(node, d);
                std::erase_if(edges, [&](const PathStep& e) { return on_walk.count(e.node) > 0; });
                const bool use_shared = h == 0 && want_shared;
                std::erase_if(edges, [&](const PathStep& e) {
                    return (label_of(e.relation) == kSharedRelationLabel) != use_shared;
                });
                if (edges.empty()) break;
                std::uniform_int_distribution<std::size_t> edge_pick(0, edges.size() - 1);
                walk.push_back(edges[edge_pick(rng)]);
                node = walk.back().node;
                on_walk.insert(node);
                if (!view.entity_ids.count(node)) break; // literals end the walk
            }
            if (walk.empty()) {
                // If the chosen anchor went dry (no usable edge), fall back to
                // a fresh explicit anchor, preferring domain-unique relations.
                anchor = anchors[anchor_pick(rng)];
                std::vector<PathStep> edges = domain_out_edges(anchor, d);
                std::vector<PathStep> unique_edges = edges;
                std::erase_if(unique_edges, [&](const PathStep& e) {
                    return label_of(e.relation) == kSharedRelationLabel;
                });
                if (!unique_edges.empty()) edges = std::move(unique_edges);
                std::uniform_int_distribution<std::size_t> edge_pick(0, edges.size() - 1);
                walk.push_back(edges[edge_pick(rng)]);
                ref = Ref::explicit_name;
                if (t == 0) first_anchor = anchor;
            }

            const std::string& answer = walk.back().node;
            std::string subject;
            switch (ref) {
                case Ref::explicit_name: subject = label_of(anchor); break;
                case Ref::previous_answer: subject = "that one"; break;
                case Ref::first_entity: subject = "the first one"; break;
            }

            std::string chain; // "<L2> of the <L1>" for multi-hop walks
            for (auto it = walk.rbegin(); it != walk.rend(); ++it) {
                if (!chain.empty()) chain += " of the ";
                chain += label_of(it->relation);
            }

            Turn turn;
            turn.question = (tmpl_pick(rng) == 0 ? "who is the " : "what is the ") + chain + " of " +
                            subject + " ?";
            turn.answers = {answer};
            turn.answer_labels = {label_of(answer)};
            turn.fluent_response = tmpl_pick(rng) == 0
                                       ? "the " + chain + " of " + label_of(anchor) + " is " +
                                             label_of(answer) + " ."
                                       : label_of(answer) + " is the " + chain + " of " +
                                             label_of(anchor) + " .";
            turn.context_entities.insert(anchor);
            if (view.entity_ids.count(prev_answer)) turn.context_entities.insert(prev_answer);
            turn.has_gold_paths = !(spec.corruption_rate > 0.0 && coin(rng) < spec.corruption_rate);
            conv.turns.push_back(std::move(turn));
            prev_answer = answer;
        }
        out.conversations.push_back(std::move(conv));
    }
    return out;
}

void write_synthetic_benchmark(const SynthOutput& out, const std::string& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream tf(dir + "/triples.tsv");
        if (!tf) throw parse_error("cannot write " + dir + "/triples.tsv");
        for (const Triple& t : out.triples) tf << t.head << '\t' << t.relation << '\t' << t.tail << '\n';
    }
    {
        std::ofstream lf(dir + "/labels.tsv");
        if (!lf) throw parse_error("cannot write " + dir + "/labels.tsv");
        for (const auto& [id, label] : out.labels) lf << id << '\t' << label << '\n';
    }
    save_conversations(out.conversations, dir + "/conversations.jsonl");
    save_domain_vocabulary(out.domain_labels, dir + "/domains.txt");
}

DatasetSplit split_dataset(const std::vector<Conversation>& convs, double train_frac,
                           double val_frac, std::uint64_t seed) {
    if (train_frac <= 0.0 || val_frac < 0.0 || train_frac + val_frac > 1.0)
        throw config_error("invalid split fractions");
    std::vector<std::size_t> order(convs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng_t rng = make_rng(seed, 0x5b117);
    std::shuffle(order.begin(), order.end(), rng);

    DatasetSplit split;
    const std::size_t n_train = static_cast<std::size_t>(train_frac * static_cast<double>(convs.size()));
    const std::size_t n_val = static_cast<std::size_t>(val_frac * static_cast<double>(convs.size()));
    for (std::size_t i = 0; i < order.size(); ++i) {
        const Conversation& c = convs[order[i]];
        if (i < n_train) split.train.push_back(c);
        else if (i < n_train + n_val) split.val.push_back(c);
        else split.test.push_back(c);
    }
    return split;
}

} // namespace praline
