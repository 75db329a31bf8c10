#include "praline/tokenizer.hpp"

#include "praline/common.hpp"

#include <cctype>
#include <fstream>

namespace praline {

namespace {

const std::vector<std::string> kSpecials = {"[PAD]", "[BOS]", "[EOS]", "[UNK]", "[SEP]", "[ANS]"};

bool is_word_char(unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '\'' || static_cast<unsigned char>(c) >= 0x80;
}

bool is_special_at(const std::string& s, std::size_t i, std::size_t& len) {
    if (s[i] != '[') return false;
    for (const auto& sp : kSpecials) {
        if (s.compare(i, sp.size(), sp) == 0) {
            len = sp.size();
            return true;
        }
    }
    return false;
}

} // namespace

Tokenizer::Tokenizer() {
    for (const auto& sp : kSpecials) add_token(sp);
}

std::vector<std::string> Tokenizer::split(const std::string& text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        unsigned char c = text[i];
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        std::size_t sp_len = 0;
        if (is_special_at(text, i, sp_len)) {
            out.push_back(text.substr(i, sp_len));
            i += sp_len;
            continue;
        }
        if (is_word_char(c)) {
            std::size_t start = i;
            while (i < text.size() && is_word_char(static_cast<unsigned char>(text[i]))) ++i;
            std::string word = text.substr(start, i - start);
            for (char& ch : word) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
            out.push_back(std::move(word));
            continue;
        }
        out.push_back(std::string(1, static_cast<char>(c)));
        ++i;
    }
    return out;
}

void Tokenizer::add_corpus_text(const std::string& text) {
    for (const auto& t : split(text)) add_token(t);
}

void Tokenizer::add_token(const std::string& t) {
    if (token_to_id_.count(t)) return;
    token_to_id_[t] = static_cast<int>(id_to_token_.size());
    id_to_token_.push_back(t);
}

std::vector<int> Tokenizer::encode(const std::string& text) const {
    std::vector<int> ids;
    for (const auto& t : split(text)) ids.push_back(token_id(t));
    return ids;
}

std::string Tokenizer::decode(const std::vector<int>& ids) const {
    std::string out;
    for (int id : ids) {
        if (!out.empty()) out += ' ';
        out += token(id);
    }
    return out;
}

int Tokenizer::token_id(const std::string& t) const {
    auto it = token_to_id_.find(t);
    return it != token_to_id_.end() ? it->second : unk_id;
}

const std::string& Tokenizer::token(int id) const {
    if (id < 0 || id >= size()) throw model_error("token id out of range: " + std::to_string(id));
    return id_to_token_[static_cast<std::size_t>(id)];
}

void Tokenizer::save(const std::string& file) const {
    std::ofstream out(file);
    if (!out) throw parse_error("cannot write vocabulary file: " + file);
    for (const auto& t : id_to_token_) out << t << '\n';
}

Tokenizer Tokenizer::load(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw parse_error("cannot open vocabulary file: " + file);
    Tokenizer tok;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        if (lineno < static_cast<int>(kSpecials.size())) {
            if (line != kSpecials[static_cast<std::size_t>(lineno)])
                throw parse_error(file + ": special token order mismatch at line " +
                                  std::to_string(lineno + 1));
        } else if (!line.empty()) {
            tok.add_token(line);
        }
        ++lineno;
    }
    return tok;
}

} // namespace praline
