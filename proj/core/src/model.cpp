#include "praline/model.hpp"

#include "praline/common.hpp"

#include <fstream>

#include <json.hpp>

namespace praline {

namespace {

bool keeps_constructed_init(const std::string& name) {
    static const char* suffixes[] = {".bq", ".bk", ".bv", ".bo", ".b1", ".b2", ".gain", ".bias"};
    for (const char* s : suffixes) {
        const std::string suf(s);
        if (name.size() >= suf.size() && name.compare(name.size() - suf.size(), suf.size(), suf) == 0)
            return true;
    }
    return false;
}

nlohmann::json config_to_json(const ModelConfig& cfg) {
    const TransformerConfig& t = cfg.transformer;
    return nlohmann::json{{"dim", t.dim},
                          {"layers", t.layers},
                          {"heads", t.heads},
                          {"ffn_dim", t.ffn_dim},
                          {"dropout", t.dropout},
                          {"max_input_len", t.max_input_len},
                          {"max_target_len", t.max_target_len},
                          {"vocab_size", t.vocab_size},
                          {"kg_dim", cfg.kg_dim}};
}

ModelConfig config_from_json(const nlohmann::json& j) {
    ModelConfig cfg;
    cfg.transformer.dim = j.at("dim").get<int>();
    cfg.transformer.layers = j.at("layers").get<int>();
    cfg.transformer.heads = j.at("heads").get<int>();
    cfg.transformer.ffn_dim = j.at("ffn_dim").get<int>();
    cfg.transformer.dropout = j.at("dropout").get<double>();
    cfg.transformer.max_input_len = j.at("max_input_len").get<int>();
    cfg.transformer.max_target_len = j.at("max_target_len").get<int>();
    cfg.transformer.vocab_size = j.at("vocab_size").get<int>();
    cfg.kg_dim = j.at("kg_dim").get<int>();
    return cfg;
}

} // namespace

void init_glorot(ParamStore& store, std::uint64_t seed) {
    rng_t rng = make_rng(seed, 0x1417);
    for (const auto& p : store.all()) {
        if (keeps_constructed_init(p->name)) continue;
        const double limit = std::sqrt(6.0 / (p->value.rows + p->value.cols));
        std::uniform_real_distribution<double> u(-limit, limit);
        for (double& v : p->value.data) v = u(rng);
    }
}

Model::Model(const ModelConfig& cfg, std::uint64_t init_seed) : cfg_(cfg) {
    if (cfg_.transformer.vocab_size < 6) throw config_error("vocabulary too small for a model");
    if (cfg_.transformer.dim % cfg_.transformer.heads != 0)
        throw config_error("model dim must be divisible by head count");
    store_ = std::make_unique<ParamStore>();
    token_embedding_ = store_->create("token_emb", cfg_.transformer.vocab_size, cfg_.transformer.dim);
    encoder_ = std::make_unique<Encoder>(*store_, cfg_.transformer, token_embedding_);
    decoder_ = std::make_unique<Decoder>(*store_, cfg_.transformer, token_embedding_);
    pointer_ = make_pointer_params(*store_, cfg_.dim(), cfg_.effective_kg_dim());
    towers_ = make_tower_params(*store_, cfg_.dim(), cfg_.effective_kg_dim());
    init_glorot(*store_, init_seed);
}

void Model::save_checkpoint(const std::string& prefix, int epoch, std::uint64_t seed) const {
    std::ofstream bin(prefix + ".bin", std::ios::binary);
    if (!bin) throw parse_error("cannot write checkpoint: " + prefix + ".bin");

    nlohmann::json arrays = nlohmann::json::object();
    std::uint64_t offset = 0;
    auto dump = [&](const std::string& name, const Mat& m) {
        arrays[name] = {{"rows", m.rows}, {"cols", m.cols}, {"offset", offset}};
        bin.write(reinterpret_cast<const char*>(m.data.data()),
                  static_cast<std::streamsize>(m.data.size() * sizeof(double)));
        offset += m.data.size() * sizeof(double);
    };
    for (const auto& p : store_->all()) {
        dump(p->name, p->value);
        dump(p->name + "#adam_m", p->adam_m);
        dump(p->name + "#adam_v", p->adam_v);
    }

    nlohmann::json manifest{{"format", "praline-checkpoint-v1"},
                            {"config", config_to_json(cfg_)},
                            {"epoch", epoch},
                            {"seed", seed},
                            {"arrays", arrays}};
    std::ofstream out(prefix + ".json");
    if (!out) throw parse_error("cannot write checkpoint manifest: " + prefix + ".json");
    out << manifest.dump(2) << '\n';
}

Model Model::load_checkpoint(const std::string& prefix) {
    std::ifstream in(prefix + ".json");
    if (!in) throw parse_error("cannot open checkpoint manifest: " + prefix + ".json");
    nlohmann::json manifest;
    in >> manifest;
    if (manifest.value("format", "") != "praline-checkpoint-v1")
        throw parse_error(prefix + ".json: unknown checkpoint format");

    Model model(config_from_json(manifest.at("config")), 0);

    std::ifstream bin(prefix + ".bin", std::ios::binary);
    if (!bin) throw parse_error("cannot open checkpoint data: " + prefix + ".bin");
    const nlohmann::json& arrays = manifest.at("arrays");
    auto read_into = [&](const std::string& name, Mat& m) {
        auto it = arrays.find(name);
        if (it == arrays.end()) throw parse_error("checkpoint missing array: " + name);
        if (it->at("rows").get<int>() != m.rows || it->at("cols").get<int>() != m.cols)
            throw parse_error("checkpoint shape mismatch for " + name);
        bin.seekg(static_cast<std::streamoff>(it->at("offset").get<std::uint64_t>()));
        bin.read(reinterpret_cast<char*>(m.data.data()),
                 static_cast<std::streamsize>(m.data.size() * sizeof(double)));
        if (!bin) throw parse_error("checkpoint truncated while reading " + name);
    };
    for (const auto& p : model.store_->all()) {
        read_into(p->name, p->value);
        read_into(p->name + "#adam_m", p->adam_m);
        read_into(p->name + "#adam_v", p->adam_v);
    }
    return model;
}

} // namespace praline
