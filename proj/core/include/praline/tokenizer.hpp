#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace praline {

// Whitespace + punctuation tokenizer with lowercasing. Special tokens occupy
// fixed ids so they stay stable across save/load and corpus changes.
class Tokenizer {
  public:
    static constexpr int pad_id = 0;
    static constexpr int bos_id = 1;
    static constexpr int eos_id = 2;
    static constexpr int unk_id = 3;
    static constexpr int sep_id = 4;
    static constexpr int ans_id = 5;

    Tokenizer();

    // Lowercases, splits on whitespace, and peels punctuation off word
    // boundaries. Bracketed special tokens pass through atomically.
    static std::vector<std::string> split(const std::string& text);

    void add_corpus_text(const std::string& text);

    std::vector<int> encode(const std::string& text) const;
    std::string decode(const std::vector<int>& ids) const;

    int token_id(const std::string& token) const; // unk_id when absent
    const std::string& token(int id) const;
    int size() const { return static_cast<int>(id_to_token_.size()); }

    void save(const std::string& file) const;
    static Tokenizer load(const std::string& file);

  private:
    void add_token(const std::string& t);

    std::vector<std::string> id_to_token_;
    std::unordered_map<std::string, int> token_to_id_;
};

} // namespace praline
