#pragma once

#include "praline/trainer.hpp"

#include <string>

namespace praline {

// Declarative run description: data files, hyperparameters, ablation switches
// and evaluation options. CLI flags override file values and PRALINE_SEED
// overrides the seed last; the merged result is persisted next to every run
// so it can be replayed.
struct RunConfig {
    std::string graph_file;
    std::string labels_file;
    std::string conversations_file;
    std::string domains_file;

    Hyperparameters hp = Hyperparameters::desk_profile();
    AblationFlags flags;

    bool use_gold_domain = false;
    bool gold_history = false;
    std::string scorer = "model";
    std::string split = "test"; // train | val | test | all
    int max_hops = 3;
    bool include_inverse = false;

    double train_frac = 0.8;
    double val_frac = 0.1;

    std::string output_dir = "run";

    static RunConfig load(const std::string& file);
    void save(const std::string& file) const;
    std::string to_json_string() const;
    static RunConfig from_json_string(const std::string& text);

    // Points the four data files at dir/{triples.tsv,labels.tsv,...}.
    void set_data_dir(const std::string& dir);
    // PRALINE_SEED wins over both the file and the command line.
    void apply_env();
    void validate() const;
};

std::string history_mode_name(HistoryMode m);
HistoryMode history_mode_from_name(const std::string& name);
std::string response_mode_name(ResponseMode m);
ResponseMode response_mode_from_name(const std::string& name);

// Table-4 style ablation switch names used on the command line:
// none | w/o-full-conv | w/o-domain | w/o-fluent-resp | train-separately
void apply_ablation_name(AblationFlags& flags, const std::string& name);

} // namespace praline
