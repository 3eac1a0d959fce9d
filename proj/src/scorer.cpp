#include "mlmstego/scorer.hpp"

#include <cmath>

#include "mlmstego/errors.hpp"
#include "mlmstego/segment.hpp"

namespace mlmstego {

CausalLmScorer::CausalLmScorer(const ModelRegistry& registry, const std::string& model_id)
    : model_id_(model_id) {
    const TransformerConfig config = registry.load_config(model_id);
    if (!config.causal) {
        fail(Errc::invalid_config, "scorer model must be causal: " + model_id);
    }
    model_ = std::make_shared<TransformerModel>(TransformerModel::deterministic_init(config));
    tokenizer_ = std::make_shared<WordPieceTokenizer>(
        WordPieceTokenizer::load(registry.vocab_path(model_id)));
    if (tokenizer_->vocab_size() != config.vocab_size) {
        fail(Errc::invalid_config, "scorer vocab does not match model");
    }
}

double CausalLmScorer::log2_probability(const std::string& sentence) {
    if (sentence.empty()) {
        fail(Errc::scorer_failure, "cannot score an empty sentence");
    }
    // [CLS] w1 w2 ... ; position t-1 predicts piece t.
    std::vector<int> ids{tokenizer_->cls_id()};
    const CoverDocument doc = segment(sentence);
    for (const auto& s : doc.sentences) {
        for (const auto& token : s.tokens) {
            const auto pieces = tokenizer_->encode_word(token.surface);
            ids.insert(ids.end(), pieces.begin(), pieces.end());
        }
    }
    const int max_seq = model_->config().max_seq;
    if (static_cast<int>(ids.size()) > max_seq) {
        ids.resize(static_cast<size_t>(max_seq));
    }
    if (ids.size() < 2) {
        fail(Errc::scorer_failure, "sentence has no scoreable tokens");
    }

    std::vector<int> offsets(ids.size() - 1);
    for (size_t i = 0; i + 1 < ids.size(); ++i) offsets[i] = static_cast<int>(i);
    const auto probs = model_->predict_positions(ids, offsets);

    double log2_sum = 0.0;
    for (size_t t = 1; t < ids.size(); ++t) {
        const double p = probs[t - 1](ids[t]);
        log2_sum += std::log2(std::max(p, 1e-300));
    }
    return log2_sum;
}

}  // namespace mlmstego
