#include "praline/run_config.hpp"

#include "praline/common.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace praline {

namespace {

using nlohmann::json;

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace

std::string history_mode_name(HistoryMode m) {
    switch (m) {
        case HistoryMode::full: return "full";
        case HistoryMode::previous_turn_only: return "previous_turn_only";
        case HistoryMode::none: return "none";
    }
    return "full";
}

HistoryMode history_mode_from_name(const std::string& name) {
    if (name == "full") return HistoryMode::full;
    if (name == "previous_turn_only") return HistoryMode::previous_turn_only;
    if (name == "none") return HistoryMode::none;
    throw config_error("unknown history mode: " + name);
}

std::string response_mode_name(ResponseMode m) {
    return m == ResponseMode::fluent ? "fluent" : "bare_answer";
}

ResponseMode response_mode_from_name(const std::string& name) {
    if (name == "fluent") return ResponseMode::fluent;
    if (name == "bare_answer") return ResponseMode::bare_answer;
    throw config_error("unknown response mode: " + name);
}

void apply_ablation_name(AblationFlags& flags, const std::string& name) {
    if (name == "none" || name.empty()) return;
    if (name == "w/o-full-conv") {
        flags.history_mode = HistoryMode::previous_turn_only;
    } else if (name == "w/o-domain") {
        flags.use_domain = false;
    } else if (name == "w/o-fluent-resp") {
        flags.response_mode = ResponseMode::bare_answer;
    } else if (name == "train-separately") {
        flags.training_mode = TrainingMode::separate;
    } else {
        throw config_error("unknown ablation: " + name +
                           " (expected none, w/o-full-conv, w/o-domain, w/o-fluent-resp or "
                           "train-separately)");
    }
}

std::string RunConfig::to_json_string() const {
    json j;
    j["data"] = {{"graph", graph_file},
                 {"labels", labels_file},
                 {"conversations", conversations_file},
                 {"domains", domains_file}};
    j["model"] = {{"dim", hp.dim},
                  {"layers", hp.layers},
                  {"heads", hp.heads},
                  {"ffn_dim", hp.ffn_dim},
                  {"dropout", hp.dropout},
                  {"v_max", hp.v_max},
                  {"s_max", hp.s_max}};
    j["train"] = {{"epochs", hp.epochs},
                  {"batch_size", hp.batch_size},
                  {"learning_rate", hp.learning_rate},
                  {"weight_decay", hp.weight_decay},
                  {"clip_norm", hp.clip_norm},
                  {"lambda_dm", hp.lambda_dm},
                  {"lambda_rk", hp.lambda_rk},
                  {"lambda_dec", hp.lambda_dec},
                  {"margin", hp.margin},
                  {"seed", hp.seed}};
    j["ablation"] = {{"history_mode", history_mode_name(flags.history_mode)},
                     {"use_domain", flags.use_domain},
                     {"response_mode", response_mode_name(flags.response_mode)},
                     {"training_mode",
                      flags.training_mode == TrainingMode::joint ? "joint" : "separate"}};
    j["eval"] = {{"use_gold_domain", use_gold_domain},
                 {"gold_history", gold_history},
                 {"scorer", scorer},
                 {"split", split},
                 {"max_hops", max_hops},
                 {"include_inverse", include_inverse}};
    j["split"] = {{"train_frac", train_frac}, {"val_frac", val_frac}};
    j["output_dir"] = output_dir;
    return j.dump(2);
}

RunConfig RunConfig::from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw config_error(std::string("config parse failure: ") + e.what());
    }

    RunConfig cfg;
    if (j.contains("profile")) {
        const std::string profile = j.at("profile").get<std::string>();
        if (profile == "paper") cfg.hp = Hyperparameters::paper_profile();
        else if (profile == "desk") cfg.hp = Hyperparameters::desk_profile();
        else throw config_error("unknown profile: " + profile);
    }
    if (j.contains("data")) {
        const json& d = j.at("data");
        maybe(d, "graph", cfg.graph_file);
        maybe(d, "labels", cfg.labels_file);
        maybe(d, "conversations", cfg.conversations_file);
        maybe(d, "domains", cfg.domains_file);
    }
    if (j.contains("model")) {
        const json& m = j.at("model");
        maybe(m, "dim", cfg.hp.dim);
        maybe(m, "layers", cfg.hp.layers);
        maybe(m, "heads", cfg.hp.heads);
        maybe(m, "ffn_dim", cfg.hp.ffn_dim);
        maybe(m, "dropout", cfg.hp.dropout);
        maybe(m, "v_max", cfg.hp.v_max);
        maybe(m, "s_max", cfg.hp.s_max);
    }
    if (j.contains("train")) {
        const json& t = j.at("train");
        maybe(t, "epochs", cfg.hp.epochs);
        maybe(t, "batch_size", cfg.hp.batch_size);
        maybe(t, "learning_rate", cfg.hp.learning_rate);
        maybe(t, "weight_decay", cfg.hp.weight_decay);
        maybe(t, "clip_norm", cfg.hp.clip_norm);
        maybe(t, "lambda_dm", cfg.hp.lambda_dm);
        maybe(t, "lambda_rk", cfg.hp.lambda_rk);
        maybe(t, "lambda_dec", cfg.hp.lambda_dec);
        maybe(t, "margin", cfg.hp.margin);
        maybe(t, "seed", cfg.hp.seed);
    }
    if (j.contains("ablation")) {
        const json& a = j.at("ablation");
        if (a.contains("history_mode"))
            cfg.flags.history_mode = history_mode_from_name(a.at("history_mode").get<std::string>());
        maybe(a, "use_domain", cfg.flags.use_domain);
        if (a.contains("response_mode"))
            cfg.flags.response_mode =
                response_mode_from_name(a.at("response_mode").get<std::string>());
        if (a.contains("training_mode")) {
            const std::string tm = a.at("training_mode").get<std::string>();
            if (tm == "joint") cfg.flags.training_mode = TrainingMode::joint;
            else if (tm == "separate") cfg.flags.training_mode = TrainingMode::separate;
            else throw config_error("unknown training mode: " + tm);
        }
    }
    if (j.contains("eval")) {
        const json& e = j.at("eval");
        maybe(e, "use_gold_domain", cfg.use_gold_domain);
        maybe(e, "gold_history", cfg.gold_history);
        maybe(e, "scorer", cfg.scorer);
        maybe(e, "split", cfg.split);
        maybe(e, "max_hops", cfg.max_hops);
        maybe(e, "include_inverse", cfg.include_inverse);
    }
    if (j.contains("split")) {
        const json& s = j.at("split");
        maybe(s, "train_frac", cfg.train_frac);
        maybe(s, "val_frac", cfg.val_frac);
    }
    maybe(j, "output_dir", cfg.output_dir);
    return cfg;
}

RunConfig RunConfig::load(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw config_error("cannot open config file: " + file);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_string(text);
}

void RunConfig::save(const std::string& file) const {
    std::ofstream out(file);
    if (!out) throw config_error("cannot write config file: " + file);
    out << to_json_string() << '\n';
}

void RunConfig::set_data_dir(const std::string& dir) {
    graph_file = dir + "/triples.tsv";
    labels_file = dir + "/labels.tsv";
    conversations_file = dir + "/conversations.jsonl";
    domains_file = dir + "/domains.txt";
}

void RunConfig::apply_env() {
    if (const char* env = std::getenv("PRALINE_SEED")) {
        try {
            hp.seed = std::stoull(env);
        } catch (const std::exception&) {
            throw config_error("PRALINE_SEED is not an integer: " + std::string(env));
        }
    }
}

void RunConfig::validate() const {
    for (const auto& [name, path] : {std::pair<const char*, const std::string&>{"graph", graph_file},
                                     {"labels", labels_file},
                                     {"conversations", conversations_file},
                                     {"domains", domains_file}}) {
        if (path.empty()) throw config_error(std::string("missing data file setting: ") + name);
        if (!std::filesystem::exists(path))
            throw config_error(std::string(name) + " file does not exist: " + path);
    }
    if (hp.epochs < 1 || hp.batch_size < 2 || hp.batch_size % 2 != 0)
        throw config_error("epochs must be >= 1 and batch_size even and >= 2");
    if (hp.margin < 0.0 || hp.margin >= 1.0) throw config_error("margin must be in [0, 1)");
    if (hp.lambda_dm < 0.0 || hp.lambda_rk < 0.0 || hp.lambda_dec < 0.0)
        throw config_error("loss weights must be non-negative");
    if (split != "train" && split != "val" && split != "test" && split != "all")
        throw config_error("split must be train, val, test or all");
    if (scorer != "model" && scorer != "random" && scorer != "oracle")
        throw config_error("scorer must be model, random or oracle");
    if (max_hops < 1 || max_hops > 3) throw config_error("max_hops must be 1, 2 or 3");
}

} // namespace praline
