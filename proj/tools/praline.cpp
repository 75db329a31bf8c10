#include "praline/common.hpp"
#include "praline/corpus.hpp"
#include "praline/embedder.hpp"
#include "praline/evaluator.hpp"
#include "praline/kg.hpp"
#include "praline/model.hpp"
#include "praline/run_config.hpp"
#include "praline/synthetic.hpp"
#include "praline/tokenizer.hpp"
#include "praline/trainer.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace praline;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct RunArtifacts {
    RunConfig cfg;
    KnowledgeGraph graph;
    std::vector<Conversation> conversations;
    Tokenizer tokenizer;
    std::unique_ptr<EmbeddingProvider> embedder;
    std::unique_ptr<DomainVocabulary> domains;
    std::vector<std::unique_ptr<Model>> models; // 1 (joint) or 3 (dm, rank, dec)

    EvalModelRefs refs() const {
        if (models.size() == 1) return EvalModelRefs::joint(*models[0]);
        return {models[0].get(), models[1].get(), models[2].get()};
    }
};

std::vector<Conversation> pick_split(const std::vector<Conversation>& all, const RunConfig& cfg,
                                     const std::string& which) {
    if (which == "all") return all;
    DatasetSplit split = split_dataset(all, cfg.train_frac, cfg.val_frac, cfg.hp.seed);
    if (which == "train") return split.train;
    if (which == "val") return split.val;
    return split.test;
}

RunArtifacts load_run(const std::string& run_dir, const std::string& checkpoint_override) {
    RunArtifacts art;
    art.cfg = RunConfig::load(run_dir + "/config.json");
    art.graph = KnowledgeGraph::load(art.cfg.graph_file, art.cfg.labels_file);
    art.conversations = load_conversations(art.cfg.conversations_file);
    art.tokenizer = Tokenizer::load(run_dir + "/vocab.txt");
    art.embedder = std::make_unique<EmbeddingProvider>(
        EmbeddingProvider::Method::hashed_bag_of_tokens, art.cfg.hp.dim, art.cfg.hp.seed);
    art.domains = std::make_unique<DomainVocabulary>(
        load_domain_vocabulary(art.cfg.domains_file), *art.embedder);

    if (!checkpoint_override.empty()) {
        art.models.push_back(std::make_unique<Model>(Model::load_checkpoint(checkpoint_override)));
    } else if (art.cfg.flags.training_mode == TrainingMode::separate) {
        for (const char* part : {"dm", "rank", "dec"})
            art.models.push_back(std::make_unique<Model>(
                Model::load_checkpoint(run_dir + "/" + part + "/checkpoint")));
    } else {
        art.models.push_back(
            std::make_unique<Model>(Model::load_checkpoint(run_dir + "/checkpoint_best")));
    }
    return art;
}

EvalOptions eval_options(const RunConfig& cfg) {
    EvalOptions opt;
    opt.flags = cfg.flags;
    opt.use_gold_domain = cfg.use_gold_domain;
    opt.gold_history = cfg.gold_history;
    if (cfg.scorer == "model") opt.scorer = ScorerKind::model;
    else if (cfg.scorer == "random") opt.scorer = ScorerKind::random;
    else opt.scorer = ScorerKind::oracle;
    opt.scorer_seed = cfg.hp.seed;
    opt.max_hops = cfg.max_hops;
    opt.include_inverse = cfg.include_inverse;
    return opt;
}

int cmd_train(const RunConfig& cfg, bool verbose) {
    cfg.validate();
    fs::create_directories(cfg.output_dir);
    cfg.save(cfg.output_dir + "/config.json");

    KnowledgeGraph graph = KnowledgeGraph::load(cfg.graph_file, cfg.labels_file);
    auto conversations = load_conversations(cfg.conversations_file);
    auto domain_labels = load_domain_vocabulary(cfg.domains_file);
    DatasetSplit split = split_dataset(conversations, cfg.train_frac, cfg.val_frac, cfg.hp.seed);
    if (split.train.empty()) throw config_error("training split is empty");

    Tokenizer tokenizer;
    for (const Conversation& c : split.train) {
        for (const Turn& t : c.turns) {
            tokenizer.add_corpus_text(t.question);
            tokenizer.add_corpus_text(t.fluent_response);
            for (const auto& l : t.answer_labels) tokenizer.add_corpus_text(l);
        }
    }
    tokenizer.save(cfg.output_dir + "/vocab.txt");

    attach_paths(split.train, graph, cfg.max_hops, cfg.include_inverse);
    attach_paths(split.val, graph, cfg.max_hops, cfg.include_inverse);

    EmbeddingProvider embedder(EmbeddingProvider::Method::hashed_bag_of_tokens, cfg.hp.dim,
                               cfg.hp.seed);
    DomainVocabulary domains(domain_labels, embedder);

    auto train_insts = build_training_instances(split.train, tokenizer, domain_labels,
                                                cfg.flags.history_mode, cfg.flags.response_mode);
    auto val_insts = build_training_instances(split.val, tokenizer, domain_labels,
                                              cfg.flags.history_mode, cfg.flags.response_mode);

    json summary;
    summary["vocab_size"] = tokenizer.size();
    summary["train_instances"] = train_insts.size();
    summary["val_instances"] = val_insts.size();

    if (cfg.flags.training_mode == TrainingMode::separate) {
        SeparateTrainOutput out =
            train_separately(cfg.hp, cfg.flags, tokenizer.size(), train_insts, val_insts, domains,
                             embedder, graph, cfg.output_dir);
        const char* names[3] = {"dm", "rank", "dec"};
        for (int k = 0; k < 3; ++k)
            out.logs[static_cast<std::size_t>(k)].save_csv(cfg.output_dir + "/trainlog_" +
                                                           names[k] + ".csv");
        summary["mode"] = "separate";
        std::cout << "trained 3 separate modules into " << cfg.output_dir << "\n";
    } else {
        Model model(cfg.hp.model_config(tokenizer.size()), cfg.hp.seed);
        TrainOptions opt;
        opt.hp = cfg.hp;
        opt.flags = cfg.flags;
        opt.checkpoint_dir = cfg.output_dir;
        opt.verbose = verbose;
        TrainOutput out = train(model, train_insts, val_insts, domains, embedder, graph, opt);
        out.log.save_csv(cfg.output_dir + "/trainlog.csv");
        summary["mode"] = "joint";
        summary["best_epoch"] = out.best_epoch;
        summary["best_val_mrr"] = out.best_val_mrr;
        std::cout << "trained " << out.log.rows.size() << " epochs, best val MRR "
                  << out.best_val_mrr << " at epoch " << out.best_epoch << "\n";
    }
    std::ofstream sf(cfg.output_dir + "/train_summary.json");
    sf << summary.dump(2) << '\n';
    return kExitOk;
}

int cmd_eval(const std::string& run_dir, const RunConfig& overrides, bool has_split,
             bool has_scorer, bool use_gold_domain, bool gold_history,
             const std::string& checkpoint, const std::string& out_dir, bool dump_rankings) {
    RunArtifacts art = load_run(run_dir, checkpoint);
    if (has_split) art.cfg.split = overrides.split;
    if (has_scorer) art.cfg.scorer = overrides.scorer;
    if (use_gold_domain) art.cfg.use_gold_domain = true;
    if (gold_history) art.cfg.gold_history = true;
    art.cfg.validate();

    auto dataset = pick_split(art.conversations, art.cfg, art.cfg.split);
    EvalReport report = evaluate(art.refs(), dataset, art.graph, *art.embedder, *art.domains,
                                 art.tokenizer, eval_options(art.cfg));

    const std::string dir = out_dir.empty() ? run_dir : out_dir;
    fs::create_directories(dir);
    report.save(dir + "/eval_report.json", dir + "/eval_report.txt");
    if (dump_rankings) report.save_rankings(dir + "/rankings.jsonl");
    std::cout << report.to_table();
    return kExitOk;
}

int cmd_synth(const SynthSpec& spec, const std::string& out_dir) {
    SynthOutput out = generate_synthetic_benchmark(spec);
    write_synthetic_benchmark(out, out_dir);
    std::cout << "wrote " << out.triples.size() << " triples, " << out.conversations.size()
              << " conversations, " << out.domain_labels.size() << " domains to " << out_dir
              << "\n";
    return kExitOk;
}

int cmd_paths(const std::string& graph_file, const std::string& labels_file,
              const std::vector<std::string>& context, int hops, bool inverse,
              const std::vector<std::string>& gold, const std::string& out_file) {
    KnowledgeGraph graph = KnowledgeGraph::load(graph_file, labels_file);
    std::set<std::string> ctx(context.begin(), context.end());
    auto paths = extract_context_paths(graph, ctx, hops, inverse);
    if (!gold.empty()) {
        std::set<std::string> gold_set(gold.begin(), gold.end());
        auto [pos, neg] = label_paths(paths, gold_set);
        paths = std::move(pos);
        paths.insert(paths.end(), neg.begin(), neg.end());
        std::sort(paths.begin(), paths.end());
    }
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_file.empty()) {
        file.open(out_file);
        if (!file) throw config_error("cannot write: " + out_file);
        out = &file;
    }
    for (const ContextPath& p : paths) *out << path_to_json(p) << '\n';
    return kExitOk;
}

// Entities whose label tokens occur as a contiguous token run in the text.
std::set<std::string> match_context_entities(const KnowledgeGraph& graph, const std::string& text) {
    std::set<std::string> found;
    const auto tokens = Tokenizer::split(text);
    for (const std::string& id : graph.entities()) {
        const auto label_tokens = Tokenizer::split(graph.entity_label(id));
        if (label_tokens.empty() || label_tokens.size() > tokens.size()) continue;
        for (std::size_t i = 0; i + label_tokens.size() <= tokens.size(); ++i) {
            if (std::equal(label_tokens.begin(), label_tokens.end(), tokens.begin() + static_cast<long>(i))) {
                found.insert(id);
                break;
            }
        }
    }
    return found;
}

int cmd_ask(const std::string& run_dir, const std::string& replay_file, int top_k) {
    RunArtifacts art = load_run(run_dir, "");
    const Model& dm = *art.refs().domain;
    const Model& rk = *art.refs().ranking;
    const Model& dec = *art.refs().decoding;

    Conversation session;
    session.id = "session";
    session.domain = art.domains->label(0);

    std::vector<Conversation> replay;
    std::size_t replay_conv = 0, replay_turn = 0;
    if (!replay_file.empty()) replay = load_conversations(replay_file);

    std::string line;
    bool reset_after_turn = false;
    while (true) {
        std::string question;
        std::set<std::string> context;
        if (!replay_file.empty()) {
            if (replay_conv >= replay.size()) break;
            const Conversation& rc = replay[replay_conv];
            question = rc.turns[replay_turn].question;
            context = rc.turns[replay_turn].context_entities;
            if (++replay_turn >= rc.turns.size()) {
                replay_turn = 0;
                ++replay_conv;
                reset_after_turn = true; // conversation boundary resets history
            }
            std::cout << "> " << question << "\n";
        } else {
            std::cout << "> " << std::flush;
            if (!std::getline(std::cin, line)) break;
            if (line == ":quit" || line == ":q") break;
            if (line == ":reset") {
                session.turns.clear();
                std::cout << "history cleared\n";
                continue;
            }
            if (line.find_first_not_of(" \t") == std::string::npos) continue;
            question = line;
            std::string all_text = question;
            for (const Turn& t : session.turns) {
                all_text += ' ';
                all_text += t.question;
                all_text += ' ';
                all_text += t.fluent_response;
            }
            context = match_context_entities(art.graph, all_text);
        }

        if (context.empty()) {
            std::cout << "no context entities found\n";
            if (reset_after_turn) {
                session.turns.clear();
                reset_after_turn = false;
            }
            continue;
        }

        Turn current;
        current.question = question;
        session.turns.push_back(current);
        const int ti = static_cast<int>(session.turns.size()) - 1;
        const std::vector<int> input_ids = build_input_sequence(
            session, ti, art.tokenizer, art.cfg.flags.history_mode, art.cfg.flags.response_mode);

        EncoderOutput enc_dm = dm.encoder().forward(input_ids);
        Vec omega = score_domains(enc_dm, *art.domains, dm.pointer());
        const int domain_id = predict_domain(omega);

        auto candidates = extract_context_paths(art.graph, context, art.cfg.max_hops,
                                                art.cfg.include_inverse);
        EncoderOutput enc_rk = &rk == &dm ? enc_dm : rk.encoder().forward(input_ids);
        Vec h_dm = art.cfg.flags.use_domain ? art.domains->embedding(domain_id) : Vec{};
        Vec phi_c = conversation_embedding(pool_encoder(enc_rk).values, h_dm, rk.towers());
        std::vector<Vec> phis;
        phis.reserve(candidates.size());
        for (const ContextPath& p : candidates)
            phis.push_back(path_embedding(art.embedder->embed_text(verbalize_path(p, art.graph)),
                                          rk.towers()));
        auto ranked = rank_candidates(phi_c, phis, candidates);

        std::vector<std::pair<std::string, double>> answers;
        std::set<std::string> seen;
        for (const RankedCandidate& rc : ranked) {
            if (!seen.insert(rc.path.endpoint()).second) continue;
            answers.push_back({rc.path.endpoint(), rc.path_score});
            if (static_cast<int>(answers.size()) >= top_k) break;
        }

        EncoderOutput enc_dec = &dec == &dm ? enc_dm : dec.encoder().forward(input_ids);
        std::vector<int> gen = dec.decoder().generate(enc_dec.hidden, kMaxTargetTokens);
        std::vector<std::string> gen_tokens;
        for (int id : gen) gen_tokens.push_back(art.tokenizer.token(id));
        const std::string top_label =
            answers.empty() ? std::string("unknown") : art.graph.entity_label(answers[0].first);
        const std::string response = substitute_answer(gen_tokens, top_label);

        std::cout << "domain: " << art.domains->label(domain_id) << "\n";
        std::cout << "answers:\n";
        char buf[160];
        for (const auto& [answer, sc] : answers) {
            std::snprintf(buf, sizeof(buf), "  %-30s %.4f", art.graph.entity_label(answer).c_str(),
                          sc);
            std::cout << buf << "\n";
        }
        std::cout << "response: " << response << "\n";

        Turn& stored = session.turns.back();
        stored.fluent_response = response;
        stored.answer_labels = {top_label};
        if (reset_after_turn) {
            session.turns.clear();
            reset_after_turn = false;
        }
    }
    return kExitOk;
}

int cmd_report(const std::vector<std::string>& run_dirs, const std::string& out_dir, bool plot) {
    struct Row {
        std::string name;
        json report;
    };
    std::vector<Row> rows;
    for (const std::string& dir : run_dirs) {
        std::ifstream in(dir + "/eval_report.json");
        if (!in) throw config_error("missing eval_report.json in " + dir);
        Row row;
        row.name = fs::path(dir).filename().string();
        if (row.name.empty()) row.name = dir;
        in >> row.report;
        rows.push_back(std::move(row));
    }

    std::string table;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-24s %8s %8s %8s %8s %8s %8s\n", "run", "P@1", "H@5", "H@10",
                  "MRR", "F1", "BLEU4");
    table += buf;
    json comparison = json::array();
    for (const Row& row : rows) {
        const json& o = row.report.at("overall");
        std::snprintf(buf, sizeof(buf), "%-24s %8.3f %8.3f %8.3f %8.3f %8.3f %8.3f\n",
                      row.name.c_str(), o.at("p_at_1").get<double>(),
                      o.at("hits_at_5").get<double>(), o.at("hits_at_10").get<double>(),
                      o.at("mrr").get<double>(),
                      row.report.at("domain_prf").at("macro").at("f1").get<double>(),
                      row.report.at("generation").at("bleu4").get<double>());
        table += buf;
        comparison.push_back({{"run", row.name}, {"overall", o}});
    }
    std::cout << table;

    fs::create_directories(out_dir);
    std::ofstream tf(out_dir + "/report_comparison.txt");
    tf << table;
    std::ofstream jf(out_dir + "/report_comparison.json");
    jf << comparison.dump(2) << '\n';

    if (plot) {
        // Grouped H@5/H@10 bars per domain, one band per run.
        std::vector<std::string> domains;
        for (const Row& row : rows)
            for (const auto& [name, _] : row.report.at("per_domain").items())
                if (std::find(domains.begin(), domains.end(), name) == domains.end())
                    domains.push_back(name);
        const int bar_w = 18, gap = 10, group_gap = 34;
        const int chart_h = 220, base_y = 250, label_h = 50;
        const int group_w =
            static_cast<int>(rows.size()) * (2 * bar_w + gap) + group_gap;
        const int width = 60 + group_w * static_cast<int>(domains.size());
        std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                          std::to_string(width) + "\" height=\"" +
                          std::to_string(base_y + label_h) + "\">\n";
        svg += "<text x=\"10\" y=\"20\" font-size=\"14\">hits@5 (solid) / hits@10 (hollow)</text>\n";
        int x = 50;
        for (const std::string& domain : domains) {
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const json& pd = rows[r].report.at("per_domain");
                double h5 = 0.0, h10 = 0.0;
                if (pd.contains(domain)) {
                    h5 = pd.at(domain).at("hits_at_5").get<double>();
                    h10 = pd.at(domain).at("hits_at_10").get<double>();
                }
                const int h5_px = static_cast<int>(h5 * chart_h);
                const int h10_px = static_cast<int>(h10 * chart_h);
                svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" +
                       std::to_string(base_y - h5_px) + "\" width=\"" + std::to_string(bar_w) +
                       "\" height=\"" + std::to_string(h5_px) + "\" fill=\"#4477aa\"/>\n";
                svg += "<rect x=\"" + std::to_string(x + bar_w + 2) + "\" y=\"" +
                       std::to_string(base_y - h10_px) + "\" width=\"" + std::to_string(bar_w) +
                       "\" height=\"" + std::to_string(h10_px) +
                       "\" fill=\"none\" stroke=\"#4477aa\"/>\n";
                x += 2 * bar_w + gap;
            }
            svg += "<text x=\"" + std::to_string(x - group_w / 2) + "\" y=\"" +
                   std::to_string(base_y + 20) + "\" font-size=\"12\">" + domain + "</text>\n";
            x += group_gap;
        }
        svg += "</svg>\n";
        std::ofstream pf(out_dir + "/hits_chart.svg");
        pf << svg;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"contrastive KG-path ranking for conversational question answering"};
    app.require_subcommand(1);

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "generate a synthetic benchmark");
    SynthSpec spec;
    std::string synth_out = "bench";
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--domains", spec.n_domains);
    synth->add_option("--entities", spec.n_entities);
    synth->add_option("--relations", spec.n_relations);
    synth->add_option("--conversations", spec.n_conversations);
    synth->add_option("--turns", spec.turns_per_conversation);
    synth->add_option("--seed", spec.seed);
    synth->add_option("--corruption", spec.corruption_rate, "fraction of turns stripped of gold paths");

    // ---- train ----
    auto* train_cmd = app.add_subcommand("train", "train a model");
    std::string config_file, data_dir, out_dir, profile, ablation, history_mode, response_mode;
    bool no_domain = false, verbose = false;
    std::optional<int> o_epochs, o_batch, o_dim, o_layers, o_heads, o_ffn;
    std::optional<double> o_lr, o_dropout, o_train_frac, o_val_frac;
    std::optional<std::uint64_t> o_seed;
    std::string graph_file, labels_file, conversations_file, domains_file;
    train_cmd->add_option("--config", config_file, "config JSON file");
    train_cmd->add_option("--data-dir", data_dir, "directory with triples/labels/conversations/domains");
    train_cmd->add_option("--graph", graph_file);
    train_cmd->add_option("--labels", labels_file);
    train_cmd->add_option("--conversations", conversations_file);
    train_cmd->add_option("--domains", domains_file);
    train_cmd->add_option("--out", out_dir, "run output directory");
    train_cmd->add_option("--profile", profile, "desk or paper");
    train_cmd->add_option("--epochs", o_epochs);
    train_cmd->add_option("--batch-size", o_batch);
    train_cmd->add_option("--dim", o_dim);
    train_cmd->add_option("--layers", o_layers);
    train_cmd->add_option("--heads", o_heads);
    train_cmd->add_option("--ffn-dim", o_ffn);
    train_cmd->add_option("--lr", o_lr);
    train_cmd->add_option("--dropout", o_dropout);
    train_cmd->add_option("--seed", o_seed);
    train_cmd->add_option("--train-frac", o_train_frac);
    train_cmd->add_option("--val-frac", o_val_frac);
    train_cmd->add_option("--ablation", ablation,
                          "none | w/o-full-conv | w/o-domain | w/o-fluent-resp | train-separately");
    train_cmd->add_option("--history-mode", history_mode, "full | previous_turn_only | none");
    train_cmd->add_option("--response-mode", response_mode, "fluent | bare_answer");
    train_cmd->add_flag("--no-domain", no_domain, "drop the domain signal");
    train_cmd->add_flag("--verbose", verbose);

    // ---- eval ----
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a trained run");
    std::string eval_run, eval_split, eval_scorer, eval_checkpoint, eval_out;
    bool eval_gold_domain = false, eval_gold_history = false;
    eval_cmd->add_option("--run", eval_run, "run directory")->required();
    auto* split_opt = eval_cmd->add_option("--split", eval_split, "train | val | test | all");
    auto* scorer_opt = eval_cmd->add_option("--scorer", eval_scorer, "model | random | oracle");
    eval_cmd->add_option("--checkpoint", eval_checkpoint, "checkpoint prefix override");
    eval_cmd->add_option("--out", eval_out, "report output directory (default: run dir)");
    eval_cmd->add_flag("--use-gold-domain", eval_gold_domain);
    eval_cmd->add_flag("--gold-history", eval_gold_history);
    bool eval_dump_rankings = false;
    eval_cmd->add_flag("--dump-rankings", eval_dump_rankings, "write rankings.jsonl");

    // ---- ask ----
    auto* ask_cmd = app.add_subcommand("ask", "interactive question loop");
    std::string ask_run, ask_replay;
    int ask_top = 5;
    ask_cmd->add_option("--run", ask_run, "run directory")->required();
    ask_cmd->add_option("--replay", ask_replay, "conversations file to replay with gold context");
    ask_cmd->add_option("--top", ask_top, "answers to print");

    // ---- paths ----
    auto* paths_cmd = app.add_subcommand("paths", "dump candidate context paths");
    std::string p_graph, p_labels, p_out;
    std::vector<std::string> p_context, p_gold;
    int p_hops = 3;
    bool p_inverse = false;
    paths_cmd->add_option("--graph", p_graph)->required();
    paths_cmd->add_option("--labels", p_labels)->required();
    paths_cmd->add_option("--context", p_context, "context entity ids")->required()->delimiter(',');
    paths_cmd->add_option("--gold", p_gold, "gold answers for labeling")->delimiter(',');
    paths_cmd->add_option("--hops", p_hops);
    paths_cmd->add_option("--out", p_out, "output file (default stdout)");
    paths_cmd->add_flag("--inverse", p_inverse, "also walk inverse edges");

    // ---- report ----
    auto* report_cmd = app.add_subcommand("report", "compare runs, optionally plot");
    std::vector<std::string> report_runs;
    std::string report_out = ".";
    bool report_plot = false;
    report_cmd->add_option("runs", report_runs, "run directories")->required();
    report_cmd->add_option("--out", report_out);
    report_cmd->add_flag("--plot", report_plot, "write hits_chart.svg");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (synth->parsed()) return cmd_synth(spec, synth_out);

        if (train_cmd->parsed()) {
            RunConfig cfg;
            if (!config_file.empty()) cfg = RunConfig::load(config_file);
            if (!profile.empty()) {
                if (profile == "paper") cfg.hp = Hyperparameters::paper_profile();
                else if (profile == "desk") cfg.hp = Hyperparameters::desk_profile();
                else throw config_error("unknown profile: " + profile);
            }
            if (!data_dir.empty()) cfg.set_data_dir(data_dir);
            if (!graph_file.empty()) cfg.graph_file = graph_file;
            if (!labels_file.empty()) cfg.labels_file = labels_file;
            if (!conversations_file.empty()) cfg.conversations_file = conversations_file;
            if (!domains_file.empty()) cfg.domains_file = domains_file;
            if (!out_dir.empty()) cfg.output_dir = out_dir;
            if (o_epochs) cfg.hp.epochs = *o_epochs;
            if (o_batch) cfg.hp.batch_size = *o_batch;
            if (o_dim) cfg.hp.dim = *o_dim;
            if (o_layers) cfg.hp.layers = *o_layers;
            if (o_heads) cfg.hp.heads = *o_heads;
            if (o_ffn) cfg.hp.ffn_dim = *o_ffn;
            if (o_lr) cfg.hp.learning_rate = *o_lr;
            if (o_dropout) cfg.hp.dropout = *o_dropout;
            if (o_seed) cfg.hp.seed = *o_seed;
            if (o_train_frac) cfg.train_frac = *o_train_frac;
            if (o_val_frac) cfg.val_frac = *o_val_frac;
            if (!ablation.empty()) apply_ablation_name(cfg.flags, ablation);
            if (!history_mode.empty()) cfg.flags.history_mode = history_mode_from_name(history_mode);
            if (!response_mode.empty())
                cfg.flags.response_mode = response_mode_from_name(response_mode);
            if (no_domain) cfg.flags.use_domain = false;
            cfg.apply_env();
            return cmd_train(cfg, verbose);
        }

        if (eval_cmd->parsed()) {
            RunConfig overrides;
            overrides.split = eval_split;
            overrides.scorer = eval_scorer;
            return cmd_eval(eval_run, overrides, split_opt->count() > 0, scorer_opt->count() > 0,
                            eval_gold_domain, eval_gold_history, eval_checkpoint, eval_out,
                            eval_dump_rankings);
        }

        if (ask_cmd->parsed()) return cmd_ask(ask_run, ask_replay, ask_top);
        if (paths_cmd->parsed())
            return cmd_paths(p_graph, p_labels, p_context, p_hops, p_inverse, p_gold, p_out);
        if (report_cmd->parsed()) return cmd_report(report_runs, report_out, report_plot);
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
