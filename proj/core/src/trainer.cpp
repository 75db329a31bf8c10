#include "praline/trainer.hpp"

#include "praline/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace praline {

ModelConfig Hyperparameters::model_config(int vocab_size) const {
    ModelConfig cfg;
    cfg.transformer.dim = dim;
    cfg.transformer.layers = layers;
    cfg.transformer.heads = heads;
    cfg.transformer.ffn_dim = effective_ffn_dim();
    cfg.transformer.dropout = dropout;
    cfg.transformer.max_input_len = s_max;
    cfg.transformer.max_target_len = v_max;
    cfg.transformer.vocab_size = vocab_size;
    cfg.kg_dim = 0;
    return cfg;
}

double joint_loss(double loss_dm, double loss_rk, double loss_dec, double lambda1, double lambda2,
                  double lambda3) {
    if (loss_dm < 0.0 || loss_rk < 0.0 || loss_dec < 0.0)
        throw model_error("negative component loss");
    return lambda1 * loss_dm + lambda2 * loss_rk + lambda3 * loss_dec;
}

void TrainLog::save_csv(const std::string& file) const {
    std::ofstream out(file);
    if (!out) throw parse_error("cannot write train log: " + file);
    out << "epoch,L,L_dm,L_rk,L_dec,val_mrr,val_h5\n";
    char buf[256];
    for (const TrainEpochRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", r.epoch, r.loss,
                      r.loss_dm, r.loss_rk, r.loss_dec, r.val_mrr, r.val_h5);
        out << buf;
    }
}

namespace {

class AdamW {
  public:
    AdamW(double lr, double weight_decay, double clip_norm)
        : lr_(lr), weight_decay_(weight_decay), clip_norm_(clip_norm) {}

    void step(ParamStore& store) {
        ++t_;
        if (clip_norm_ > 0.0) {
            double total_sq = 0.0;
            for (const auto& p : store.all())
                for (double g : p->grad.data) total_sq += g * g;
            const double norm = std::sqrt(total_sq);
            if (norm > clip_norm_) {
                const double scale = clip_norm_ / norm;
                for (const auto& p : store.all())
                    for (double& g : p->grad.data) g *= scale;
            }
        }
        const double bc1 = 1.0 - std::pow(beta1_, t_);
        const double bc2 = 1.0 - std::pow(beta2_, t_);
        for (const auto& p : store.all()) {
            for (std::size_t i = 0; i < p->value.data.size(); ++i) {
                const double g = p->grad.data[i];
                double& m = p->adam_m.data[i];
                double& v = p->adam_v.data[i];
                m = beta1_ * m + (1.0 - beta1_) * g;
                v = beta2_ * v + (1.0 - beta2_) * g * g;
                const double mhat = m / bc1;
                const double vhat = v / bc2;
                p->value.data[i] -=
                    lr_ * (mhat / (std::sqrt(vhat) + eps_) + weight_decay_ * p->value.data[i]);
            }
        }
    }

  private:
    double lr_;
    double weight_decay_;
    double clip_norm_;
    double beta1_ = 0.9;
    double beta2_ = 0.999;
    double eps_ = 1e-8;
    int t_ = 0;
};

struct BatchLosses {
    double dm = 0.0;  // mean over batch elements
    double rk = 0.0;  // mean over rank-eligible elements
    double dec = 0.0; // mean over batch elements
    int rank_count = 0;
};

// One joint pass over a batch: encode, teacher-forced decode, pointer scores,
// one contrastive pair per rank-eligible element. With compute_grads the
// lambda/batch-scaled gradients are accumulated in the store; the encoder
// receives the sum of decoder, pointer and tower signals.
BatchLosses batch_pass(Model& model, const Batch& batch, const DomainVocabulary& domains,
                       const EmbeddingProvider& embedder, const KnowledgeGraph& graph,
                       const Hyperparameters& hp, const AblationFlags& flags, bool compute_grads,
                       rng_t* dropout_rng) {
    BatchLosses out;
    const int b = static_cast<int>(batch.elements.size());
    for (const BatchElement& el : batch.elements)
        if (el.rank_label != 0) ++out.rank_count;

    const double lambda_dm = flags.use_domain ? hp.lambda_dm : 0.0;
    const double dm_scale = b > 0 ? lambda_dm / b : 0.0;
    const double dec_scale = b > 0 ? hp.lambda_dec / b : 0.0;
    const double rk_scale = out.rank_count > 0 ? hp.lambda_rk / out.rank_count : 0.0;

    for (const BatchElement& el : batch.elements) {
        const TrainingInstance& inst = *el.instance;

        EncoderTrace enc_tr;
        EncoderOutput enc = model.encoder().forward(inst.input_ids, compute_grads, dropout_rng, enc_tr);
        Mat d_hidden(enc.hidden.rows, enc.hidden.cols);

        if (hp.lambda_dec > 0.0) {
            DecoderTrace dec_tr;
            TeacherForcedResult dec = model.decoder().teacher_forced(
                enc.hidden, inst.target_ids, compute_grads, dropout_rng, dec_tr);
            out.dec += dec.loss / b;
            if (compute_grads) model.decoder().backward(dec_tr, enc.hidden, dec_scale, d_hidden);
        }

        PooledEncoder pooled = pool_encoder(enc);
        Vec d_pooled(pooled.values.size(), 0.0);

        if (lambda_dm > 0.0) {
            PointerTrace ptr_tr;
            Vec omega = score_domains(pooled.values, domains, model.pointer(), &ptr_tr);
            out.dm += pointer_loss(omega, inst.domain_id) / b;
            if (compute_grads)
                pointer_backward(ptr_tr, inst.domain_id, dm_scale, model.pointer(), d_pooled);
        }

        if (hp.lambda_rk > 0.0 && el.rank_label != 0) {
            const Vec h_path = embedder.embed_text(verbalize_path(*el.sampled_path, graph));
            const Vec h_dm = flags.use_domain ? domains.embedding(inst.domain_id) : Vec{};
            TowerTrace conv_tr, path_tr;
            Vec phi_c = conversation_embedding(pooled.values, h_dm, model.towers(), &conv_tr);
            Vec phi_p = path_embedding(h_path, model.towers(), &path_tr);
            out.rk += ranking_loss(phi_c, phi_p, el.rank_label, hp.margin) / out.rank_count;
            if (compute_grads) {
                const double dcos =
                    ranking_loss_dcos(phi_c, phi_p, el.rank_label, hp.margin) * rk_scale;
                if (dcos != 0.0) {
                    Vec d_phi_c(phi_c.size(), 0.0), d_phi_p(phi_p.size(), 0.0);
                    cosine_backward(phi_c, phi_p, dcos, d_phi_c, d_phi_p);
                    Vec d_conv_in(conv_tr.input.size(), 0.0);
                    conversation_tower_backward(d_phi_c, model.towers(), conv_tr, d_conv_in);
                    for (std::size_t j = 0; j < pooled.values.size(); ++j) d_pooled[j] += d_conv_in[j];
                    Vec d_path_in(path_tr.input.size(), 0.0); // frozen path vector, grads unused
                    path_tower_backward(d_phi_p, model.towers(), path_tr, d_path_in);
                }
            }
        }

        if (compute_grads) {
            for (std::size_t j = 0; j < d_pooled.size(); ++j)
                d_hidden.at(pooled.argmax_rows[j], static_cast<int>(j)) += d_pooled[j];
            model.encoder().backward(enc_tr, d_hidden);
        }
    }
    return out;
}

double epoch_joint_loss(const Hyperparameters& hp, const AblationFlags& flags, double dm, double rk,
                        double dec) {
    return joint_loss(dm, rk, dec, flags.use_domain ? hp.lambda_dm : 0.0, hp.lambda_rk,
                      hp.lambda_dec);
}

} // namespace

RankingValidation validate_ranking(const Model& model, const std::vector<TrainingInstance>& val_set,
                                   const DomainVocabulary& domains,
                                   const EmbeddingProvider& embedder, const KnowledgeGraph& graph,
                                   const AblationFlags& flags) {
    RankingValidation out;
    if (val_set.empty()) return out;
    double rr_sum = 0.0, h5_sum = 0.0;
    for (const TrainingInstance& inst : val_set) {
        EncoderOutput enc = model.encoder().forward(inst.input_ids);
        PooledEncoder pooled = pool_encoder(enc);

        Vec h_dm;
        if (flags.use_domain) {
            Vec omega = score_domains(pooled.values, domains, model.pointer());
            h_dm = domains.embedding(predict_domain(omega));
        }
        Vec phi_c = conversation_embedding(pooled.values, h_dm, model.towers());

        std::vector<ContextPath> candidates = inst.positives;
        candidates.insert(candidates.end(), inst.negatives.begin(), inst.negatives.end());
        std::sort(candidates.begin(), candidates.end());

        bool gold_reachable = false;
        for (const ContextPath& p : candidates)
            if (inst.gold_answers.count(p.endpoint())) gold_reachable = true;
        if (!gold_reachable) {
            ++out.missing_gold;
            continue; // counted as wrong: contributes 0 to both sums
        }

        std::vector<Vec> phis;
        phis.reserve(candidates.size());
        for (const ContextPath& p : candidates)
            phis.push_back(path_embedding(embedder.embed_text(verbalize_path(p, graph)),
                                          model.towers()));
        auto ranked = rank_candidates(phi_c, phis, candidates);

        std::set<std::string> seen;
        int rank = 0, gold_rank = 0;
        for (const RankedCandidate& rc : ranked) {
            if (!seen.insert(rc.path.endpoint()).second) continue;
            ++rank;
            if (inst.gold_answers.count(rc.path.endpoint())) {
                gold_rank = rank;
                break;
            }
        }
        if (gold_rank > 0) {
            rr_sum += 1.0 / gold_rank;
            if (gold_rank <= 5) h5_sum += 1.0;
        }
    }
    out.mrr = rr_sum / static_cast<double>(val_set.size());
    out.h5 = h5_sum / static_cast<double>(val_set.size());
    return out;
}

TrainOutput train(Model& model, const std::vector<TrainingInstance>& train_set,
                  const std::vector<TrainingInstance>& val_set, const DomainVocabulary& domains,
                  const EmbeddingProvider& embedder, const KnowledgeGraph& graph,
                  const TrainOptions& opt) {
    if (train_set.empty()) throw config_error("empty training set");
    bool any_paths = false;
    for (const auto& inst : train_set)
        if (!inst.positives.empty() || !inst.negatives.empty()) any_paths = true;
    if (!any_paths) throw config_error("no training instance has candidate paths");

    const Hyperparameters& hp = opt.hp;
    AdamW optimizer(hp.learning_rate, hp.weight_decay, hp.clip_norm);
    rng_t dropout_rng = make_rng(hp.seed, 0xd09);

    if (!opt.checkpoint_dir.empty()) std::filesystem::create_directories(opt.checkpoint_dir);

    TrainOutput out;
    out.best_val_mrr = -1.0;
    for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
        auto batches = make_batches(train_set, hp.batch_size,
                                    hashing::splitmix64(hp.seed) + static_cast<std::uint64_t>(epoch));
        double dm_sum = 0.0, dec_sum = 0.0, rk_sum = 0.0;
        long n_elems = 0, n_rank = 0;
        for (std::size_t bi = 0; bi < batches.size(); ++bi) {
            model.params().zero_grads();
            BatchLosses losses = batch_pass(model, batches[bi], domains, embedder, graph, hp,
                                            opt.flags, true, &dropout_rng);
            if (!std::isfinite(losses.dm) || !std::isfinite(losses.rk) || !std::isfinite(losses.dec))
                throw model_error("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                  std::to_string(bi));
            optimizer.step(model.params());

            const long bsz = static_cast<long>(batches[bi].elements.size());
            dm_sum += losses.dm * bsz;
            dec_sum += losses.dec * bsz;
            rk_sum += losses.rk * losses.rank_count;
            n_elems += bsz;
            n_rank += losses.rank_count;
        }

        if (!model.params().all_finite())
            throw model_error("non-finite parameter after epoch " + std::to_string(epoch));

        TrainEpochRow row;
        row.epoch = epoch;
        row.loss_dm = n_elems > 0 ? dm_sum / n_elems : 0.0;
        row.loss_dec = n_elems > 0 ? dec_sum / n_elems : 0.0;
        row.loss_rk = n_rank > 0 ? rk_sum / n_rank : 0.0;
        row.loss = epoch_joint_loss(hp, opt.flags, row.loss_dm, row.loss_rk, row.loss_dec);

        RankingValidation val = validate_ranking(model, val_set, domains, embedder, graph, opt.flags);
        row.val_mrr = val.mrr;
        row.val_h5 = val.h5;
        out.log.rows.push_back(row);

        if (!opt.checkpoint_dir.empty())
            model.save_checkpoint(opt.checkpoint_dir + "/checkpoint", epoch, hp.seed);
        if (row.val_mrr > out.best_val_mrr) {
            out.best_val_mrr = row.val_mrr;
            out.best_epoch = epoch;
            if (!opt.checkpoint_dir.empty())
                model.save_checkpoint(opt.checkpoint_dir + "/checkpoint_best", epoch, hp.seed);
        }
        if (opt.verbose)
            std::fprintf(stderr, "epoch %3d  L=%.4f  dm=%.4f  rk=%.4f  dec=%.4f  val_mrr=%.4f\n",
                         epoch, row.loss, row.loss_dm, row.loss_rk, row.loss_dec, row.val_mrr);
    }
    return out;
}

SeparateTrainOutput train_separately(const Hyperparameters& hp, const AblationFlags& flags,
                                     int vocab_size, const std::vector<TrainingInstance>& train_set,
                                     const std::vector<TrainingInstance>& val_set,
                                     const DomainVocabulary& domains,
                                     const EmbeddingProvider& embedder, const KnowledgeGraph& graph,
                                     const std::string& checkpoint_dir) {
    SeparateTrainOutput out;
    const char* names[3] = {"dm", "rank", "dec"};
    for (int k = 0; k < 3; ++k) {
        Hyperparameters hk = hp;
        hk.lambda_dm = k == 0 ? hp.lambda_dm : 0.0;
        hk.lambda_rk = k == 1 ? hp.lambda_rk : 0.0;
        hk.lambda_dec = k == 2 ? hp.lambda_dec : 0.0;

        Model model(hp.model_config(vocab_size), hashing::splitmix64(hp.seed) + static_cast<std::uint64_t>(k));
        TrainOptions topt;
        topt.hp = hk;
        topt.flags = flags;
        topt.flags.training_mode = TrainingMode::separate;
        if (!checkpoint_dir.empty()) topt.checkpoint_dir = checkpoint_dir + "/" + names[k];
        TrainOutput res = train(model, train_set, val_set, domains, embedder, graph, topt);
        out.logs.push_back(std::move(res.log));
        out.models.push_back(std::move(model));
    }
    return out;
}

GradCheckReport check_gradients(Model& model, const std::vector<TrainingInstance>& instances,
                                const DomainVocabulary& domains, const EmbeddingProvider& embedder,
                                const KnowledgeGraph& graph, const Hyperparameters& hp,
                                const GradCheckOptions& opt) {
    const std::size_t usable = instances.size() - instances.size() % 2;
    std::vector<TrainingInstance> subset(instances.begin(),
                                         instances.begin() + static_cast<long>(usable));
    auto batches = make_batches(subset, static_cast<int>(usable), hp.seed);
    Batch batch = batches.at(0);

    GradCheckReport report;

    // Drop rank elements sitting on the hinge kink: the loss is not
    // differentiable there, so finite differences are meaningless.
    for (BatchElement& el : batch.elements) {
        if (el.rank_label != -1) continue;
        EncoderOutput enc = model.encoder().forward(el.instance->input_ids);
        PooledEncoder pooled = pool_encoder(enc);
        const Vec h_dm = domains.embedding(el.instance->domain_id);
        Vec phi_c = conversation_embedding(pooled.values, h_dm, model.towers());
        Vec phi_p = path_embedding(
            embedder.embed_text(verbalize_path(*el.sampled_path, graph)), model.towers());
        if (std::abs(score(phi_c, phi_p) - hp.margin) < 1e-3) {
            el.rank_label = 0;
            el.sampled_path.reset();
            ++report.skipped_kink_elements;
        }
    }

    AblationFlags flags; // full configuration: every loss participates
    auto loss_fn = [&]() {
        BatchLosses l = batch_pass(model, batch, domains, embedder, graph, hp, flags, false, nullptr);
        return joint_loss(l.dm, l.rk, l.dec, hp.lambda_dm, hp.lambda_rk, hp.lambda_dec);
    };

    model.params().zero_grads();
    batch_pass(model, batch, domains, embedder, graph, hp, flags, true, nullptr);
    if (!opt.mutate_param.empty()) {
        Param* p = model.params().find(opt.mutate_param);
        if (!p) throw config_error("no such parameter: " + opt.mutate_param);
        for (double& g : p->grad.data) g += 0.05 * (std::abs(g) + 1e-2);
    }

    for (const auto& p : model.params().all()) {
        for (std::size_t i = 0; i < p->value.data.size(); ++i) {
            const double analytic = p->grad.data[i];
            const double saved = p->value.data[i];
            p->value.data[i] = saved + opt.fd_step;
            const double lp = loss_fn();
            p->value.data[i] = saved - opt.fd_step;
            const double lm = loss_fn();
            p->value.data[i] = saved;
            const double fd = (lp - lm) / (2.0 * opt.fd_step);
            const double denom = std::max({std::abs(analytic), std::abs(fd), 1e-5});
            const double rel = std::abs(analytic - fd) / denom;
            ++report.checked_entries;
            if (rel > report.max_rel_error) {
                report.max_rel_error = rel;
                report.worst_param = p->name;
            }
        }
    }
    return report;
}

} // namespace praline
