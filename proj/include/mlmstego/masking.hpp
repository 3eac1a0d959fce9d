#pragma once

#include <iosfwd>
#include <vector>

#include "mlmstego/coding.hpp"
#include "mlmstego/plan.hpp"
#include "mlmstego/segment.hpp"
#include "mlmstego/subword.hpp"

namespace mlmstego {

struct MaskedPosition {
    int piece_offset = 0;  // offset into MaskedSample::piece_ids
    EmbeddingSite site;
    int label = -1;  // target vocab id, filled by the trainer
};

/// One masked sentence: the sentence's piece sequence with mask tokens
/// substituted at embedding sites. No [CLS]/[SEP] wrapping here; the model
/// backend adds those.
struct MaskedSample {
    int sentence_index = 0;
    std::vector<int> piece_ids;
    std::vector<MaskedPosition> masked_positions;
};

/// Full-position masking: one sample per sentence with sites, all of that
/// sentence's sites masked at once.
std::vector<MaskedSample> build_fpm(const CoverDocument& doc, const EmbeddingPlan& plan,
                                    const WordPieceTokenizer& tokenizer);

/// Single-position masking: one sample per site; each sample masks exactly
/// one site and keeps the rest of the sentence intact.
std::vector<MaskedSample> build_spam(const CoverDocument& doc, const EmbeddingPlan& plan,
                                     const WordPieceTokenizer& tokenizer);

// Line-delimited record serialization, one JSON object per sample.
void write_samples(std::ostream& out, const std::vector<MaskedSample>& samples);
std::vector<MaskedSample> read_samples(std::istream& in);

}  // namespace mlmstego
