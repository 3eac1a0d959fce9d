#include "mlmstego/model_backend.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mlmstego/errors.hpp"

namespace mlmstego {

using nlohmann::json;

std::filesystem::path ModelRegistry::model_dir(const std::string& model_id) const {
    const auto dir = root / model_id;
    if (!std::filesystem::is_directory(dir)) {
        fail(Errc::invalid_config, "model directory not found: " + dir.string());
    }
    return dir;
}

TransformerConfig ModelRegistry::load_config(const std::string& model_id) const {
    const auto path = model_dir(model_id) / "config.json";
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(Errc::io_error, "cannot read model config " + path.string());
    }
    try {
        const json j = json::parse(in);
        TransformerConfig config;
        config.arch = j.at("arch").get<std::string>();
        if (config.arch != "mini-transformer-v1") {
            fail(Errc::invalid_config, "unsupported model arch: " + config.arch);
        }
        config.hidden = j.at("hidden").get<int>();
        config.layers = j.at("layers").get<int>();
        config.heads = j.at("heads").get<int>();
        config.ffn = j.at("ffn").get<int>();
        config.max_seq = j.at("max_seq").get<int>();
        config.causal = j.value("causal", false);
        config.init_seed = j.at("init_seed").get<uint64_t>();
        // vocab_size is fixed by the tokenizer_id referenced in the config.
        const auto vocab = model_dir(model_id) / j.at("vocab_file").get<std::string>();
        config.vocab_size = 0;
        std::ifstream vin(vocab, std::ios::binary);
        if (!vin) {
            fail(Errc::io_error, "cannot read vocab file " + vocab.string());
        }
        std::string line;
        while (std::getline(vin, line)) {
            if (!line.empty() && line != "\r") ++config.vocab_size;
        }
        return config;
    } catch (const json::exception& e) {
        fail(Errc::invalid_config, std::string("malformed model config: ") + e.what());
    }
}

std::filesystem::path ModelRegistry::vocab_path(const std::string& tokenizer_id) const {
    const auto dir = model_dir(tokenizer_id);
    const auto config_path = dir / "config.json";
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        fail(Errc::io_error, "cannot read model config " + config_path.string());
    }
    try {
        const json j = json::parse(in);
        return dir / j.at("vocab_file").get<std::string>();
    } catch (const json::exception& e) {
        fail(Errc::invalid_config, std::string("malformed model config: ") + e.what());
    }
}

namespace {

ModelHandle make_handle(const ModelRegistry& registry, const std::string& model_id,
                        const std::string& tokenizer_id, ModelHandle::Mode mode,
                        const std::filesystem::path* weights) {
    const TransformerConfig config = registry.load_config(model_id);
    auto tokenizer = std::make_shared<WordPieceTokenizer>(
        WordPieceTokenizer::load(registry.vocab_path(tokenizer_id)));
    if (tokenizer->vocab_size() != config.vocab_size) {
        fail(Errc::invalid_config, "tokenizer vocab does not match model vocab size");
    }
    ModelHandle handle;
    if (weights) {
        handle.model = std::make_shared<TransformerModel>(
            TransformerModel::load(config, *weights));
    } else {
        handle.model = std::make_shared<TransformerModel>(
            TransformerModel::deterministic_init(config));
    }
    handle.tokenizer = std::move(tokenizer);
    handle.model_id = model_id;
    handle.tokenizer_id = tokenizer_id;
    handle.vocab_size = config.vocab_size;
    handle.max_sequence_length = config.max_seq;
    handle.mode = mode;
    return handle;
}

}  // namespace

ModelHandle ModelHandle::load(const ModelRegistry& registry, const std::string& model_id,
                              const std::string& tokenizer_id, Mode mode) {
    return make_handle(registry, model_id, tokenizer_id, mode, nullptr);
}

ModelHandle ModelHandle::load_weights(const ModelRegistry& registry, const std::string& model_id,
                                      const std::string& tokenizer_id,
                                      const std::filesystem::path& weights, Mode mode) {
    return make_handle(registry, model_id, tokenizer_id, mode, &weights);
}

std::vector<PredictionDistribution> predict(const ModelHandle& handle,
                                            const MaskedSample& sample) {
    if (!handle.model || !handle.tokenizer) {
        fail(Errc::backend_failure, "model handle not loaded");
    }
    const auto& tok = *handle.tokenizer;
    const int body_budget = handle.max_sequence_length - 2;  // [CLS] ... [SEP]
    if (body_budget < 1) {
        fail(Errc::invalid_config, "model max sequence length too small");
    }
    if (sample.masked_positions.empty()) {
        return {};
    }

    int window_begin = 0;
    int window_end = static_cast<int>(sample.piece_ids.size());
    if (window_end - window_begin > body_budget) {
        // Symmetric window around the leftmost mask.
        int leftmost = window_end;
        for (const auto& pos : sample.masked_positions) {
            leftmost = std::min(leftmost, pos.piece_offset);
        }
        window_begin = leftmost - body_budget / 2;
        window_begin = std::max(0, window_begin);
        window_end = window_begin + body_budget;
        if (window_end > static_cast<int>(sample.piece_ids.size())) {
            window_end = static_cast<int>(sample.piece_ids.size());
            window_begin = window_end - body_budget;
        }
    }

    std::vector<int> ids;
    ids.reserve(static_cast<size_t>(window_end - window_begin) + 2);
    ids.push_back(tok.cls_id());
    for (int i = window_begin; i < window_end; ++i) {
        ids.push_back(sample.piece_ids[static_cast<size_t>(i)]);
    }
    ids.push_back(tok.sep_id());

    std::vector<int> offsets;
    offsets.reserve(sample.masked_positions.size());
    for (const auto& pos : sample.masked_positions) {
        if (pos.piece_offset < window_begin || pos.piece_offset >= window_end) {
            fail(Errc::sequence_too_long,
                 "mask at piece " + std::to_string(pos.piece_offset) +
                     " does not fit the model window");
        }
        offsets.push_back(pos.piece_offset - window_begin + 1);  // +1 for [CLS]
    }

    const auto probs = handle.model->predict_positions(ids, offsets);
    std::vector<PredictionDistribution> result;
    result.reserve(probs.size());
    for (size_t i = 0; i < probs.size(); ++i) {
        std::vector<double> by_id(probs[i].data(), probs[i].data() + probs[i].size());
        result.push_back(make_distribution(by_id, sample.masked_positions[i].site));
    }
    return result;
}

std::vector<std::vector<PredictionDistribution>> batch_predict(
    const ModelHandle& handle, const std::vector<MaskedSample>& samples) {
    std::vector<std::vector<PredictionDistribution>> result;
    result.reserve(samples.size());
    for (const auto& sample : samples) {
        result.push_back(predict(handle, sample));
    }
    return result;
}

}  // namespace mlmstego
