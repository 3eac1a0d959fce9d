#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "mlmstego/pos.hpp"

namespace mlmstego {

struct Token {
    std::string surface;
    UPos pos_tag = UPos::X;
    bool is_functional = false;
    // True iff the subword tokenizer splits the surface into more than one
    // piece. Filled by annotate_divisibility(); false until then.
    bool is_divisible = false;
    int token_index = 0;
    size_t begin = 0;  // char offsets into the document's raw_text
    size_t end = 0;
};

struct Sentence {
    int index = 0;
    std::vector<Token> tokens;
    size_t begin = 0;
    size_t end = 0;
    int word_count = 0;  // non-punctuation, non-symbol tokens

    std::string_view text_in(const std::string& raw_text) const {
        return std::string_view(raw_text).substr(begin, end - begin);
    }
};

struct CoverDocument {
    std::string raw_text;
    std::vector<Sentence> sentences;
    std::string source_id;
};

/// Split raw text into sentences and word-level tokens with char spans.
/// Sentence spans cover every non-whitespace byte, in order, so the document
/// reassembles byte-for-byte. Throws EmptyInput if there is no content.
CoverDocument segment(std::string raw_text, std::string source_id = "");

/// Corpus curation: keeps sentences with at least min_words words, drops
/// documents left with none, and rebuilds raw_text from the surviving spans.
std::vector<CoverDocument> filter_corpus(const std::vector<CoverDocument>& documents,
                                         int min_words);

}  // namespace mlmstego
