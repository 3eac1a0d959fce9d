#pragma once

#include <string>
#include <vector>

#include "mlmstego/coding.hpp"
#include "mlmstego/key.hpp"
#include "mlmstego/model_backend.hpp"
#include "mlmstego/trainer.hpp"

namespace mlmstego {

/// Recover the message from an unmodified stego text. Recomputes the
/// embedding plan from (stego_text, key) and refuses to proceed unless its
/// fingerprint matches the artifact's. Returns exactly declared_length bits.
BitMessage extract(const std::string& stego_text, const StegoKey& key,
                   const ModelArtifact& artifact, const ModelRegistry& registry);

struct TimedExtractResult {
    std::vector<BitMessage> messages;
    double et_seconds_per_sentence = 0.0;
    std::vector<double> sentence_seconds;  // all timed sentences, text order
};

/// extract() over several texts with per-sentence wall-clock timing.
/// ET = (sum of per-sentence times) / (number of sentences carrying bits).
TimedExtractResult timed_extract(const std::vector<std::string>& stego_texts,
                                 const StegoKey& key, const ModelArtifact& artifact,
                                 const ModelRegistry& registry);

}  // namespace mlmstego
