#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_helpers.hpp"

#include "praline/trainer.hpp"

#include <cmath>
#include <filesystem>

using namespace praline;

namespace {

Hyperparameters small_hp() {
    Hyperparameters hp = Hyperparameters::desk_profile();
    hp.dim = 16;
    hp.heads = 2;
    hp.ffn_dim = 32;
    hp.epochs = 10;
    hp.batch_size = 4;
    hp.dropout = 0.0;
    hp.seed = 17;
    return hp;
}

testing::World small_world(std::uint64_t seed = 5) {
    SynthSpec spec;
    spec.n_domains = 2;
    spec.n_entities = 20;
    spec.n_relations = 4;
    spec.n_conversations = 10;
    spec.turns_per_conversation = 2;
    spec.seed = seed;
    return testing::make_world(spec, 16);
}

} // namespace

TEST_CASE("joint_loss weighted sum") {
    CHECK(joint_loss(2.0, 0.5, 4.0, 0.25, 1.0, 0.25) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(joint_loss(0.0, 0.0, 0.0, 0.25, 1.0, 0.25) == doctest::Approx(0.0));
    CHECK(joint_loss(9.0, 0.3, 9.0, 0.0, 1.0, 0.0) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK_THROWS_AS(joint_loss(-0.1, 0.0, 0.0, 0.25, 1.0, 0.25), model_error);
}

TEST_CASE("teacher-forced loss strictly decreases over the first 10 epochs") {
    // 3 fixed seeds, decoder loss only, on a small fixed corpus.
    for (std::uint64_t seed : {3ull, 17ull, 90ull}) {
        auto world = small_world();
        Hyperparameters hp = small_hp();
        hp.seed = seed;
        hp.lambda_dm = 0.0;
        hp.lambda_rk = 0.0;
        hp.learning_rate = 1e-3;

        Model model(hp.model_config(world.vocab_size()), seed);
        TrainOptions opt;
        opt.hp = hp;
        TrainOutput out = train(model, world.instances, {}, *world.domains, *world.embedder,
                                world.graph, opt);
        REQUIRE(out.log.rows.size() == 10);
        for (std::size_t i = 1; i < out.log.rows.size(); ++i) {
            INFO("seed " << seed << " epoch " << i);
            CHECK(out.log.rows[i].loss_dec < out.log.rows[i - 1].loss_dec);
        }
    }
}

TEST_CASE("training is deterministic given the seed") {
    auto world = small_world();
    Hyperparameters hp = small_hp();
    hp.epochs = 4;
    hp.dropout = 0.1; // dropout must be seeded too

    auto run_once = [&]() {
        Model model(hp.model_config(world.vocab_size()), hp.seed);
        TrainOptions opt;
        opt.hp = hp;
        std::vector<TrainingInstance> val(world.instances.begin(), world.instances.begin() + 4);
        return train(model, world.instances, val, *world.domains, *world.embedder, world.graph, opt);
    };
    TrainOutput a = run_once();
    TrainOutput b = run_once();
    REQUIRE(a.log.rows.size() == b.log.rows.size());
    for (std::size_t i = 0; i < a.log.rows.size(); ++i) {
        CHECK(a.log.rows[i].loss == b.log.rows[i].loss);
        CHECK(a.log.rows[i].loss_dm == b.log.rows[i].loss_dm);
        CHECK(a.log.rows[i].loss_rk == b.log.rows[i].loss_rk);
        CHECK(a.log.rows[i].loss_dec == b.log.rows[i].loss_dec);
        CHECK(a.log.rows[i].val_mrr == b.log.rows[i].val_mrr);
    }
}

TEST_CASE("parameters stay finite through training") {
    auto world = small_world();
    Hyperparameters hp = small_hp();
    hp.epochs = 5;
    hp.learning_rate = 1e-2; // aggressive on purpose; the clip should hold it
    Model model(hp.model_config(world.vocab_size()), 1);
    TrainOptions opt;
    opt.hp = hp;
    train(model, world.instances, {}, *world.domains, *world.embedder, world.graph, opt);
    CHECK(model.params().all_finite());
}

TEST_CASE("checkpoint written by train reloads to identical validation metrics") {
    auto world = small_world();
    Hyperparameters hp = small_hp();
    hp.epochs = 3;
    const std::string dir = "/tmp/praline_train_ckpt_test";
    std::filesystem::remove_all(dir);

    Model model(hp.model_config(world.vocab_size()), hp.seed);
    TrainOptions opt;
    opt.hp = hp;
    opt.checkpoint_dir = dir;
    std::vector<TrainingInstance> val(world.instances.begin(), world.instances.begin() + 6);
    train(model, world.instances, val, *world.domains, *world.embedder, world.graph, opt);

    AblationFlags flags;
    RankingValidation direct =
        validate_ranking(model, val, *world.domains, *world.embedder, world.graph, flags);
    Model reloaded = Model::load_checkpoint(dir + "/checkpoint");
    RankingValidation loaded =
        validate_ranking(reloaded, val, *world.domains, *world.embedder, world.graph, flags);
    CHECK(direct.mrr == loaded.mrr);
    CHECK(direct.h5 == loaded.h5);
}

TEST_CASE("empty or pathless training data is rejected") {
    auto world = small_world();
    Hyperparameters hp = small_hp();
    Model model(hp.model_config(world.vocab_size()), 1);
    TrainOptions opt;
    opt.hp = hp;
    CHECK_THROWS_AS(train(model, {}, {}, *world.domains, *world.embedder, world.graph, opt),
                    config_error);

    auto stripped = world.instances;
    for (auto& inst : stripped) {
        inst.positives.clear();
        inst.negatives.clear();
    }
    CHECK_THROWS_AS(train(model, stripped, {}, *world.domains, *world.embedder, world.graph, opt),
                    config_error);
}

TEST_CASE("separate training yields three disjoint parameter sets that each learn") {
    auto world = small_world();
    Hyperparameters hp = small_hp();
    hp.learning_rate = 1e-3;
    SeparateTrainOutput out = train_separately(hp, AblationFlags{}, world.vocab_size(),
                                               world.instances, {}, *world.domains, *world.embedder,
                                               world.graph, "");
    REQUIRE(out.models.size() == 3);
    REQUIRE(out.logs.size() == 3);

    // distinct parameter identity: no shared arrays, different values
    const Param* a = out.models[0].params().find("token_emb");
    const Param* b = out.models[1].params().find("token_emb");
    CHECK(a != b);
    CHECK(a->value.data != b->value.data);

    // each loop's own loss decreases over its 10 epochs
    CHECK(out.logs[0].rows.back().loss_dm < out.logs[0].rows.front().loss_dm);
    CHECK(out.logs[1].rows.back().loss_rk < out.logs[1].rows.front().loss_rk);
    CHECK(out.logs[2].rows.back().loss_dec < out.logs[2].rows.front().loss_dec);
}

TEST_CASE("train log CSV layout") {
    TrainLog log;
    log.rows.push_back({1, 2.5, 1.0, 0.5, 4.0, 0.25, 0.5});
    const std::string path = "/tmp/praline_trainlog_test.csv";
    log.save_csv(path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "epoch,L,L_dm,L_rk,L_dec,val_mrr,val_h5");
    std::string row;
    std::getline(in, row);
    CHECK(row.substr(0, 2) == "1,");
}

TEST_CASE("joint loss trend and contrastive separation on a small benchmark") {
    SynthSpec spec;
    spec.n_domains = 2;
    spec.n_entities = 60;
    spec.n_relations = 6;
    spec.n_conversations = 60;
    spec.turns_per_conversation = 2;
    spec.seed = 7;

    for (std::uint64_t seed : {7ull, 8ull, 9ull}) {
        auto world = testing::make_world(spec, 32);
        Hyperparameters hp = Hyperparameters::desk_profile();
        hp.dim = 32;
        hp.ffn_dim = 64;
        hp.epochs = 12;
        hp.batch_size = 8;
        hp.seed = seed;

        Model model(hp.model_config(world.vocab_size()), seed);
        TrainOptions opt;
        opt.hp = hp;
        std::vector<TrainingInstance> val(world.instances.begin(), world.instances.begin() + 20);
        std::vector<TrainingInstance> tr(world.instances.begin() + 20, world.instances.end());
        TrainOutput out = train(model, tr, val, *world.domains, *world.embedder, world.graph, opt);

        // epoch-average joint loss non-increasing after warm-up
        for (std::size_t i = 3; i < out.log.rows.size(); ++i) {
            INFO("seed " << seed << " epoch " << i + 1);
            CHECK(out.log.rows[i].loss <= out.log.rows[i - 1].loss);
        }

        // positive pairs score higher than negative pairs by at least the
        // margin on held-out turns
        double pos_sum = 0.0, neg_sum = 0.0;
        long pos_n = 0, neg_n = 0;
        for (const TrainingInstance& inst : val) {
            EncoderOutput enc = model.encoder().forward(inst.input_ids);
            PooledEncoder pooled = pool_encoder(enc);
            Vec omega = score_domains(pooled.values, *world.domains, model.pointer());
            Vec h_dm = world.domains->embedding(predict_domain(omega));
            Vec phi_c = conversation_embedding(pooled.values, h_dm, model.towers());
            for (const ContextPath& p : inst.positives) {
                Vec phi_p = path_embedding(
                    world.embedder->embed_text(verbalize_path(p, world.graph)), model.towers());
                pos_sum += score(phi_c, phi_p);
                ++pos_n;
            }
            for (const ContextPath& p : inst.negatives) {
                Vec phi_p = path_embedding(
                    world.embedder->embed_text(verbalize_path(p, world.graph)), model.towers());
                neg_sum += score(phi_c, phi_p);
                ++neg_n;
            }
        }
        REQUIRE(pos_n > 0);
        REQUIRE(neg_n > 0);
        INFO("seed " << seed << ": mean positive " << pos_sum / pos_n << ", mean negative "
                     << neg_sum / neg_n);
        CHECK(pos_sum / pos_n - neg_sum / neg_n >= hp.margin);
    }
}

TEST_CASE("ranking pipeline runs unchanged with the trigram provider") {
    SynthSpec spec;
    spec.n_domains = 2;
    spec.n_entities = 20;
    spec.n_relations = 4;
    spec.n_conversations = 8;
    spec.turns_per_conversation = 2;
    spec.seed = 6;

    auto synth = generate_synthetic_benchmark(spec);
    KnowledgeGraph graph = KnowledgeGraph::from_triples(synth.triples, synth.labels);
    Tokenizer tok;
    for (const Conversation& c : synth.conversations)
        for (const Turn& t : c.turns) {
            tok.add_corpus_text(t.question);
            tok.add_corpus_text(t.fluent_response);
        }
    EmbeddingProvider trigram(EmbeddingProvider::Method::char_trigram_projection, 16, 6);
    DomainVocabulary domains(synth.domain_labels, trigram);
    auto convs = synth.conversations;
    attach_paths(convs, graph, 3);
    auto instances = build_training_instances(convs, tok, synth.domain_labels, HistoryMode::full,
                                              ResponseMode::fluent);

    Hyperparameters hp = small_hp();
    hp.epochs = 3;
    Model model(hp.model_config(tok.size()), 2);
    TrainOptions opt;
    opt.hp = hp;
    TrainOutput out = train(model, instances, instances, domains, trigram, graph, opt);
    for (const TrainEpochRow& row : out.log.rows) {
        CHECK(std::isfinite(row.loss));
        CHECK(row.loss >= 0.0);
    }
    CHECK(model.params().all_finite());
}
