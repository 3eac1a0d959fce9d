#pragma once

#include <string>
#include <vector>

#include "mlmstego/key.hpp"
#include "mlmstego/segment.hpp"
#include "mlmstego/subword.hpp"

namespace mlmstego {

struct EmbeddingSite {
    int sentence_index = 0;
    int token_index = 0;
    std::string original_word;
    int vocab_id = -1;

    bool operator==(const EmbeddingSite& other) const = default;
};

struct EmbeddingPlan {
    std::vector<EmbeddingSite> sites;
    int capacity_bits = 0;
    std::string plan_fingerprint;

    bool operator==(const EmbeddingPlan& other) const = default;
};

/// Choose embedding positions: per sentence, the first k eligible words in
/// left-to-right order whose POS class matches the strategy. Eligible words
/// are single-piece under the tokenizer (indivisible) and not punctuation or
/// symbols. Sentences shorter than key.min_sentence_words are skipped.
/// Throws NoCapacity when no site exists anywhere.
EmbeddingPlan locate(const CoverDocument& doc, const StegoKey& key,
                     const WordPieceTokenizer& tokenizer);

std::string plan_to_json(const EmbeddingPlan& plan);
EmbeddingPlan plan_from_json(const std::string& text);

}  // namespace mlmstego
