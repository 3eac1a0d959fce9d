#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mlmstego {

struct CoverDocument;

/// Greedy longest-match wordpiece tokenizer over a fixed vocab file.
/// Continuation pieces carry a "##" prefix. Cased: surfaces are matched
/// exactly as written.
class WordPieceTokenizer {
public:
    static WordPieceTokenizer load(const std::filesystem::path& vocab_file);

    int vocab_size() const { return static_cast<int>(pieces_.size()); }
    const std::string& piece(int id) const;
    int piece_id(std::string_view piece) const;  // -1 when absent

    int pad_id() const { return pad_id_; }
    int unk_id() const { return unk_id_; }
    int cls_id() const { return cls_id_; }
    int sep_id() const { return sep_id_; }
    int mask_id() const { return mask_id_; }

    /// Pieces for one word. A word that cannot be composed is [UNK].
    std::vector<int> encode_word(std::string_view word) const;

    /// True iff the word splits into more than one piece.
    bool divisible(std::string_view word) const;

    /// The word's own vocab id when it is a single known piece, else -1.
    int single_piece_id(std::string_view word) const;

    /// Digest of the vocab file, pinned into plan fingerprints.
    const std::string& vocab_digest() const { return vocab_digest_; }

private:
    std::vector<std::string> pieces_;
    std::unordered_map<std::string, int> index_;
    std::string vocab_digest_;
    int pad_id_ = -1, unk_id_ = -1, cls_id_ = -1, sep_id_ = -1, mask_id_ = -1;
};

/// Fill Token::is_divisible across a document.
void annotate_divisibility(CoverDocument& doc, const WordPieceTokenizer& tokenizer);

}  // namespace mlmstego
