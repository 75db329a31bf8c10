#pragma once

#include "praline/tensor.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace praline {

// Deterministic text-to-vector provider for verbalized paths and domain
// labels. Vectors are frozen preprocessing outputs: the trainable towers sit
// on top of them, the provider itself never learns.
//
// The computation pipeline ends with a float32 quantization step followed by
// a final 64-bit renormalization. The on-disk cache stores the quantized
// block, so a cache hit reproduces the cold-path output bit for bit while the
// returned vector stays unit-norm to double precision.
class EmbeddingProvider {
  public:
    enum class Method { hashed_bag_of_tokens, char_trigram_projection };

    EmbeddingProvider(Method method, int dim, std::uint64_t seed);

    int dim() const { return dim_; }
    std::uint64_t seed() const { return seed_; }
    const std::string& method_tag() const { return tag_; }

    Vec embed_text(const std::string& text) const;
    Mat embed_paths(const std::vector<std::string>& texts) const;
    Mat embed_domains(const std::vector<std::string>& labels) const;

    // Disk cache: <prefix>.json manifest + <prefix>.bin little-endian float32
    // blocks, keyed by text hash. A manifest whose provider tag, seed or
    // dimension differs is discarded.
    void load_cache(const std::string& prefix);
    void save_cache(const std::string& prefix) const;

  private:
    std::vector<float> quantized(const std::string& text) const;
    std::vector<float> compute_quantized(const std::string& text) const;

    Method method_;
    int dim_;
    std::uint64_t seed_;
    std::string tag_;
    mutable std::map<std::string, std::vector<float>> cache_;
};

} // namespace praline
