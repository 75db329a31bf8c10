#pragma once

#include "praline/corpus.hpp"
#include "praline/embedder.hpp"
#include "praline/model.hpp"

#include <string>
#include <vector>

namespace praline {

struct Hyperparameters {
    int epochs = 120;
    int batch_size = 32;
    double learning_rate = 1e-4;
    double dropout = 0.1;
    int dim = 768;
    int layers = 2;
    int heads = 4;
    int ffn_dim = 0; // 0 -> 2 * dim
    int v_max = kMaxTargetTokens;
    int s_max = kMaxInputTokens;
    double lambda_dm = 0.25;
    double lambda_rk = 1.0;
    double lambda_dec = 0.25;
    double margin = 0.1;
    double weight_decay = 0.01;
    double clip_norm = 5.0;
    std::uint64_t seed = 7;

    // Full-scale profile as documented; not runnable on a desk machine.
    static Hyperparameters paper_profile() { return Hyperparameters{}; }
    // Default working profile: same loss ratios, small model. The rate is
    // raised to fit the 30-epoch budget of a from-scratch 64-dim model.
    static Hyperparameters desk_profile() {
        Hyperparameters hp;
        hp.dim = 64;
        hp.epochs = 30;
        hp.batch_size = 16;
        hp.learning_rate = 2e-3;
        return hp;
    }

    int effective_ffn_dim() const { return ffn_dim > 0 ? ffn_dim : 2 * dim; }
    ModelConfig model_config(int vocab_size) const;
};

enum class TrainingMode { joint, separate };

struct AblationFlags {
    HistoryMode history_mode = HistoryMode::full;
    bool use_domain = true;
    ResponseMode response_mode = ResponseMode::fluent;
    TrainingMode training_mode = TrainingMode::joint;
};

// L = lambda1 * L_dm + lambda2 * L_rk + lambda3 * L_dec
double joint_loss(double loss_dm, double loss_rk, double loss_dec, double lambda1, double lambda2,
                  double lambda3);

struct TrainEpochRow {
    int epoch = 0;
    double loss = 0.0;
    double loss_dm = 0.0;
    double loss_rk = 0.0;
    double loss_dec = 0.0;
    double val_mrr = 0.0;
    double val_h5 = 0.0;
};

struct TrainLog {
    std::vector<TrainEpochRow> rows;
    void save_csv(const std::string& file) const;
};

struct TrainOptions {
    Hyperparameters hp;
    AblationFlags flags;
    std::string checkpoint_dir; // empty: keep everything in memory
    bool verbose = false;
};

struct TrainOutput {
    TrainLog log;
    int best_epoch = 0;
    double best_val_mrr = 0.0;
};

// One joint training run: teacher-forced decoding, pointer scoring and one
// contrastive pair per batch element, one AdamW step per batch.
// Deterministic given (seed, config, data).
TrainOutput train(Model& model, const std::vector<TrainingInstance>& train_set,
                  const std::vector<TrainingInstance>& val_set, const DomainVocabulary& domains,
                  const EmbeddingProvider& embedder, const KnowledgeGraph& graph,
                  const TrainOptions& opt);

// Ranking-only validation on prebuilt instances: candidates are each turn's
// stored path sets, the domain embedding comes from the pointer's prediction.
struct RankingValidation {
    double mrr = 0.0;
    double h5 = 0.0;
    int missing_gold = 0;
};
RankingValidation validate_ranking(const Model& model, const std::vector<TrainingInstance>& val_set,
                                   const DomainVocabulary& domains,
                                   const EmbeddingProvider& embedder, const KnowledgeGraph& graph,
                                   const AblationFlags& flags);

// Three independent parameter sets, one per loss, each with its own encoder.
// Returned in order {pointer, ranking, decoder}; inference stitches them.
struct SeparateTrainOutput {
    std::vector<Model> models;
    std::vector<TrainLog> logs;
};
SeparateTrainOutput train_separately(const Hyperparameters& hp, const AblationFlags& flags,
                                     int vocab_size, const std::vector<TrainingInstance>& train_set,
                                     const std::vector<TrainingInstance>& val_set,
                                     const DomainVocabulary& domains,
                                     const EmbeddingProvider& embedder, const KnowledgeGraph& graph,
                                     const std::string& checkpoint_dir);

struct GradCheckOptions {
    double fd_step = 1e-5;
    // When non-empty, the named parameter's analytic gradient is corrupted
    // before comparison; used to prove the check can detect a broken
    // backward pass.
    std::string mutate_param;
};

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::string worst_param;
    long checked_entries = 0;
    long skipped_kink_elements = 0;
};

// Central finite differences of the full joint loss against the analytic
// gradients, every entry of every parameter array. Rank elements sitting on
// the hinge kink are dropped from the comparison batch.
GradCheckReport check_gradients(Model& model, const std::vector<TrainingInstance>& instances,
                                const DomainVocabulary& domains, const EmbeddingProvider& embedder,
                                const KnowledgeGraph& graph, const Hyperparameters& hp,
                                const GradCheckOptions& opt = {});

} // namespace praline
