#pragma once

#include "praline/params.hpp"
#include "praline/pointer.hpp"
#include "praline/ranker.hpp"
#include "praline/transformer.hpp"

#include <cstdint>
#include <memory>
#include <string>

namespace praline {

struct ModelConfig {
    TransformerConfig transformer;
    int kg_dim = 0; // 0 means "same as model dim"

    int dim() const { return transformer.dim; }
    int effective_kg_dim() const { return kg_dim > 0 ? kg_dim : transformer.dim; }
};

// Every trainable array of the system: shared token embeddings, encoder,
// decoder, domain pointer and the two ranking towers, all registered in one
// store so the optimizer, checkpointing and gradient checking can walk them
// uniformly.
class Model {
  public:
    Model(const ModelConfig& cfg, std::uint64_t init_seed);

    const ModelConfig& config() const { return cfg_; }
    ParamStore& params() { return *store_; }
    const ParamStore& params() const { return *store_; }

    const Encoder& encoder() const { return *encoder_; }
    const Decoder& decoder() const { return *decoder_; }
    const PointerParams& pointer() const { return pointer_; }
    const TowerParams& towers() const { return towers_; }
    Param* token_embedding() const { return token_embedding_; }

    // <prefix>.json manifest + <prefix>.bin block of little-endian 64-bit
    // floats covering values and optimizer moments.
    void save_checkpoint(const std::string& prefix, int epoch, std::uint64_t seed) const;
    static Model load_checkpoint(const std::string& prefix);

  private:
    ModelConfig cfg_;
    std::unique_ptr<ParamStore> store_;
    Param* token_embedding_;
    std::unique_ptr<Encoder> encoder_;
    std::unique_ptr<Decoder> decoder_;
    PointerParams pointer_;
    TowerParams towers_;
};

} // namespace praline
