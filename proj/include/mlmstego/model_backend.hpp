#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "mlmstego/coding.hpp"
#include "mlmstego/masking.hpp"
#include "mlmstego/subword.hpp"
#include "mlmstego/transformer.hpp"

namespace mlmstego {

/// Resolves model and tokenizer ids to directories under a root. The root
/// comes from configuration (CLI flag or MLMSTEGO_MODEL_DIR); nothing is
/// fetched over the network.
struct ModelRegistry {
    std::filesystem::path root;

    std::filesystem::path model_dir(const std::string& model_id) const;
    TransformerConfig load_config(const std::string& model_id) const;
    std::filesystem::path vocab_path(const std::string& tokenizer_id) const;
};

struct ModelHandle {
    enum class Mode { inference, training };

    std::shared_ptr<TransformerModel> model;
    std::shared_ptr<const WordPieceTokenizer> tokenizer;
    std::string model_id;
    std::string tokenizer_id;
    int vocab_size = 0;
    int max_sequence_length = 0;
    Mode mode = Mode::inference;

    /// Base model with deterministic weights derived from the model config.
    static ModelHandle load(const ModelRegistry& registry, const std::string& model_id,
                            const std::string& tokenizer_id, Mode mode);

    /// Same architecture with weights restored from a file.
    static ModelHandle load_weights(const ModelRegistry& registry, const std::string& model_id,
                                    const std::string& tokenizer_id,
                                    const std::filesystem::path& weights, Mode mode);
};

/// One sorted, normalized distribution per masked position. FPM samples get
/// all their positions from a single forward pass. Sequences beyond the model
/// length are truncated symmetrically around the leftmost mask; a mask that
/// still falls outside is SequenceTooLong.
std::vector<PredictionDistribution> predict(const ModelHandle& handle,
                                            const MaskedSample& sample);

std::vector<std::vector<PredictionDistribution>> batch_predict(
    const ModelHandle& handle, const std::vector<MaskedSample>& samples);

}  // namespace mlmstego
