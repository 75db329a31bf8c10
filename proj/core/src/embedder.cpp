#include "praline/embedder.hpp"

#include "praline/common.hpp"
#include "praline/tokenizer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace praline {

namespace {

constexpr int kSlotsPerFeature = 8;

void accumulate_feature(Vec& v, std::uint64_t feature_hash, int dim) {
    for (int j = 0; j < kSlotsPerFeature; ++j) {
        const std::uint64_t r = hashing::splitmix64(feature_hash + static_cast<std::uint64_t>(j));
        const int slot = static_cast<int>(r % static_cast<std::uint64_t>(dim));
        v[static_cast<std::size_t>(slot)] += (r >> 63) ? -1.0 : 1.0;
    }
}

std::string hash_key(const std::string& text) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(hashing::fnv1a64(text)));
    return buf;
}

} // namespace

EmbeddingProvider::EmbeddingProvider(Method method, int dim, std::uint64_t seed)
    : method_(method), dim_(dim), seed_(seed),
      tag_(method == Method::hashed_bag_of_tokens ? "hashed-bow" : "char-trigram") {
    if (dim < 1) throw config_error("embedding dimension must be positive");
}

std::vector<float> EmbeddingProvider::compute_quantized(const std::string& text) const {
    Vec v(static_cast<std::size_t>(dim_), 0.0);
    if (method_ == Method::hashed_bag_of_tokens) {
        auto tokens = Tokenizer::split(text);
        if (tokens.empty()) throw model_error("empty embedding input");
        for (const auto& t : tokens) accumulate_feature(v, hashing::fnv1a64(t, seed_), dim_);
    } else {
        auto tokens = Tokenizer::split(text);
        if (tokens.empty()) throw model_error("empty embedding input");
        std::string joined = "^";
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (i) joined += ' ';
            joined += tokens[i];
        }
        joined += '$';
        if (joined.size() < 3) joined += "$$";
        for (std::size_t i = 0; i + 3 <= joined.size(); ++i)
            accumulate_feature(v, hashing::fnv1a64(joined.substr(i, 3), seed_ ^ 0x7215ull), dim_);
    }

    double norm = l2_norm(v);
    if (norm == 0.0) {
        v[hashing::fnv1a64(text, seed_) % static_cast<std::uint64_t>(dim_)] = 1.0;
        norm = 1.0;
    }
    std::vector<float> q(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) q[i] = static_cast<float>(v[i] / norm);
    return q;
}

std::vector<float> EmbeddingProvider::quantized(const std::string& text) const {
    auto it = cache_.find(hash_key(text));
    if (it != cache_.end()) return it->second;
    auto q = compute_quantized(text);
    cache_.emplace(hash_key(text), q);
    return q;
}

Vec EmbeddingProvider::embed_text(const std::string& text) const {
    const auto q = quantized(text);
    Vec v(q.begin(), q.end());
    const double norm = l2_norm(v);
    for (double& x : v) x /= norm;
    return v;
}

Mat EmbeddingProvider::embed_paths(const std::vector<std::string>& texts) const {
    Mat m(static_cast<int>(texts.size()), dim_);
    for (std::size_t i = 0; i < texts.size(); ++i) {
        const Vec v = embed_text(texts[i]);
        std::copy(v.begin(), v.end(), m.row(static_cast<int>(i)));
    }
    return m;
}

Mat EmbeddingProvider::embed_domains(const std::vector<std::string>& labels) const {
    return embed_paths(labels);
}

void EmbeddingProvider::load_cache(const std::string& prefix) {
    std::ifstream manifest(prefix + ".json");
    if (!manifest) return;
    nlohmann::json j;
    try {
        manifest >> j;
    } catch (const nlohmann::json::exception&) {
        return;
    }
    if (j.value("provider", "") != tag_ || j.value("seed", std::uint64_t(0)) != seed_ ||
        j.value("dim", -1) != dim_)
        return; // provider mismatch invalidates the cache

    std::ifstream bin(prefix + ".bin", std::ios::binary);
    if (!bin) return;
    for (const auto& entry : j.value("entries", nlohmann::json::array())) {
        const std::string key = entry.at("key").get<std::string>();
        const std::uint64_t offset = entry.at("offset").get<std::uint64_t>();
        bin.seekg(static_cast<std::streamoff>(offset));
        std::vector<float> q(static_cast<std::size_t>(dim_));
        bin.read(reinterpret_cast<char*>(q.data()),
                 static_cast<std::streamsize>(q.size() * sizeof(float)));
        if (!bin) return;
        cache_[key] = std::move(q);
    }
}

void EmbeddingProvider::save_cache(const std::string& prefix) const {
    std::ofstream bin(prefix + ".bin", std::ios::binary);
    if (!bin) throw parse_error("cannot write cache file: " + prefix + ".bin");
    nlohmann::json entries = nlohmann::json::array();
    std::uint64_t offset = 0;
    for (const auto& [key, q] : cache_) {
        entries.push_back({{"key", key}, {"offset", offset}});
        bin.write(reinterpret_cast<const char*>(q.data()),
                  static_cast<std::streamsize>(q.size() * sizeof(float)));
        offset += q.size() * sizeof(float);
    }
    nlohmann::json manifest{
        {"provider", tag_}, {"seed", seed_}, {"dim", dim_}, {"entries", entries}};
    std::ofstream out(prefix + ".json");
    if (!out) throw parse_error("cannot write cache manifest: " + prefix + ".json");
    out << manifest.dump(2) << '\n';
}

} // namespace praline
