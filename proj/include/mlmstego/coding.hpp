#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mlmstego/plan.hpp"
#include "mlmstego/subword.hpp"

namespace mlmstego {

struct DistEntry {
    int vocab_id = -1;
    double probability = 0.0;
};

/// Vocabulary probabilities at one masked position, sorted by probability
/// descending with ties broken by ascending vocab id. The sort is total, so
/// ranks are identical on the embedding and extraction sides.
struct PredictionDistribution {
    std::vector<DistEntry> entries;
    EmbeddingSite site;
};

/// Build a distribution from per-id probabilities (index = vocab id).
/// Validates non-negativity and normalization (|sum - 1| <= 1e-4).
PredictionDistribution make_distribution(const std::vector<double>& probs_by_id,
                                         EmbeddingSite site);

/// 1-based rank of vocab_id under the deterministic sort.
int rank_of(const PredictionDistribution& dist, int vocab_id);

struct CodingOutcome {
    EmbeddingSite site;
    int rank_of_original = 0;
    int decoded_bit = 0;
};

/// The coding rule: bit 0 iff the site's original word is top-ranked.
CodingOutcome decode_bit(const PredictionDistribution& dist, const EmbeddingSite& site);

/// True iff the distribution already encodes the wanted bit.
bool satisfies_target(const PredictionDistribution& dist, const EmbeddingSite& site, int bit);

/// Supervision label that steers fine-tuning toward the wanted bit:
///   bit 0                    -> the original word
///   bit 1, original top-1    -> the runner-up (skipping case variants of the
///                               original word, which would not move mass away
///                               from it)
///   bit 1, original not top  -> the current top word, reinforced
int target_word(const PredictionDistribution& dist, const EmbeddingSite& site, int bit,
                const WordPieceTokenizer& tokenizer);

struct BitMessage {
    std::vector<uint8_t> bits;  // each 0 or 1
    int declared_length = 0;

    static BitMessage from_bit_string(const std::string& text);
    /// Hex form carries an explicit bit length: "<hex>:<bits>", MSB-first.
    static BitMessage from_hex(const std::string& text);

    std::string to_bit_string() const;
    std::string to_hex() const;

    bool operator==(const BitMessage& other) const = default;
};

struct BitAssignment {
    std::vector<std::pair<EmbeddingSite, int>> assigned;  // plan order
    std::vector<EmbeddingSite> unused;                    // trailing sites
};

/// Map message bits to plan sites in order. Throws CapacityExceeded when the
/// message is longer than the plan.
BitAssignment assign_bits(const EmbeddingPlan& plan, const BitMessage& message);

}  // namespace mlmstego
