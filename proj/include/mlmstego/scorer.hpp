#pragma once

#include <memory>
#include <string>

#include "mlmstego/model_backend.hpp"

namespace mlmstego {

/// Produces a per-sentence base-2 log probability for perplexity reports.
class SentenceScorer {
public:
    virtual ~SentenceScorer() = default;
    virtual double log2_probability(const std::string& sentence) = 0;
    virtual std::string id() const = 0;
};

/// Left-to-right transformer scorer over the shared wordpiece vocabulary.
/// Pinned by model id; deterministic, so identical texts always score
/// identically.
class CausalLmScorer : public SentenceScorer {
public:
    CausalLmScorer(const ModelRegistry& registry, const std::string& model_id);

    double log2_probability(const std::string& sentence) override;
    std::string id() const override { return model_id_; }

private:
    std::string model_id_;
    std::shared_ptr<TransformerModel> model_;
    std::shared_ptr<const WordPieceTokenizer> tokenizer_;
};

}  // namespace mlmstego
