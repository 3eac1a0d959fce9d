#include "mlmstego/subword.hpp"

#include <fstream>

#include "mlmstego/digest.hpp"
#include "mlmstego/errors.hpp"
#include "mlmstego/segment.hpp"

namespace mlmstego {

WordPieceTokenizer WordPieceTokenizer::load(const std::filesystem::path& vocab_file) {
    std::ifstream in(vocab_file, std::ios::binary);
    if (!in) {
        fail(Errc::io_error, "cannot open vocab file " + vocab_file.string());
    }
    WordPieceTokenizer tok;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const int id = static_cast<int>(tok.pieces_.size());
        if (!tok.index_.emplace(line, id).second) {
            fail(Errc::invalid_config, "duplicate vocab piece: " + line);
        }
        tok.pieces_.push_back(line);
    }
    tok.pad_id_ = tok.piece_id("[PAD]");
    tok.unk_id_ = tok.piece_id("[UNK]");
    tok.cls_id_ = tok.piece_id("[CLS]");
    tok.sep_id_ = tok.piece_id("[SEP]");
    tok.mask_id_ = tok.piece_id("[MASK]");
    if (tok.pad_id_ < 0 || tok.unk_id_ < 0 || tok.cls_id_ < 0 || tok.sep_id_ < 0 ||
        tok.mask_id_ < 0) {
        fail(Errc::invalid_config, "vocab missing special tokens: " + vocab_file.string());
    }
    tok.vocab_digest_ = sha256_file(vocab_file);
    return tok;
}

const std::string& WordPieceTokenizer::piece(int id) const {
    if (id < 0 || id >= vocab_size()) {
        fail(Errc::unknown_vocab_id, "piece id " + std::to_string(id) + " out of range");
    }
    return pieces_[static_cast<size_t>(id)];
}

int WordPieceTokenizer::piece_id(std::string_view piece) const {
    auto it = index_.find(std::string(piece));
    return it == index_.end() ? -1 : it->second;
}

std::vector<int> WordPieceTokenizer::encode_word(std::string_view word) const {
    std::vector<int> out;
    if (word.empty()) return out;
    size_t start = 0;
    while (start < word.size()) {
        size_t end = word.size();
        int match = -1;
        while (end > start) {
            std::string candidate;
            if (start > 0) candidate = "##";
            candidate.append(word.substr(start, end - start));
            const int id = piece_id(candidate);
            if (id >= 0) {
                match = id;
                break;
            }
            --end;
        }
        if (match < 0) {
            return {unk_id_};
        }
        out.push_back(match);
        start = end;
    }
    return out;
}

bool WordPieceTokenizer::divisible(std::string_view word) const {
    return encode_word(word).size() > 1;
}

int WordPieceTokenizer::single_piece_id(std::string_view word) const {
    const auto pieces = encode_word(word);
    if (pieces.size() == 1 && pieces[0] != unk_id_) return pieces[0];
    return -1;
}

void annotate_divisibility(CoverDocument& doc, const WordPieceTokenizer& tokenizer) {
    for (auto& sentence : doc.sentences) {
        for (auto& token : sentence.tokens) {
            token.is_divisible = tokenizer.divisible(token.surface);
        }
    }
}

}  // namespace mlmstego
