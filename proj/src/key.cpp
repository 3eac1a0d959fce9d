#include "mlmstego/key.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "mlmstego/errors.hpp"

namespace mlmstego {

using nlohmann::json;

const char* locating_strategy_name(LocatingStrategy s) {
    switch (s) {
        case LocatingStrategy::NFW: return "NFW";
        case LocatingStrategy::FW: return "FW";
        case LocatingStrategy::AW: return "AW";
    }
    return "NFW";
}

LocatingStrategy locating_strategy_from_name(const std::string& name) {
    if (name == "NFW") return LocatingStrategy::NFW;
    if (name == "FW") return LocatingStrategy::FW;
    if (name == "AW") return LocatingStrategy::AW;
    fail(Errc::invalid_config, "unknown locating strategy: " + name);
}

const char* masking_strategy_name(MaskingStrategy s) {
    return s == MaskingStrategy::FPM ? "FPM" : "SPAM";
}

MaskingStrategy masking_strategy_from_name(const std::string& name) {
    if (name == "FPM") return MaskingStrategy::FPM;
    if (name == "SPAM") return MaskingStrategy::SPAM;
    fail(Errc::invalid_config, "unknown masking strategy: " + name);
}

void StegoKey::validate() const {
    if (k <= 0 && k != kAllPositions) {
        fail(Errc::invalid_config, "k must be a positive integer or \"all\"");
    }
    if (min_sentence_words < 1) {
        fail(Errc::invalid_config, "min_sentence_words must be >= 1");
    }
    if (model_id.empty() || tokenizer_id.empty()) {
        fail(Errc::invalid_config, "model_id and tokenizer_id must be set");
    }
    if (finetune.learning_rate <= 0 || finetune.batch_size < 1 || finetune.max_epochs < 1 ||
        finetune.weight_decay < 0) {
        fail(Errc::invalid_config, "invalid fine-tuning hyperparameters");
    }
}

std::string key_to_json(const StegoKey& key) {
    json j;
    j["schema_version"] = kKeySchemaVersion;
    j["version"] = key.version;
    j["locating_strategy"] = locating_strategy_name(key.locating_strategy);
    if (key.k_is_all()) {
        j["k"] = "all";
    } else {
        j["k"] = key.k;
    }
    j["model_id"] = key.model_id;
    j["tokenizer_id"] = key.tokenizer_id;
    j["min_sentence_words"] = key.min_sentence_words;
    j["masking_strategy"] = masking_strategy_name(key.masking_strategy);
    j["finetune"] = {
        {"learning_rate", key.finetune.learning_rate},
        {"batch_size", key.finetune.batch_size},
        {"weight_decay", key.finetune.weight_decay},
        {"max_epochs", key.finetune.max_epochs},
        {"seed", key.finetune.seed},
    };
    return j.dump(2) + "\n";
}

StegoKey key_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(Errc::invalid_config, std::string("key file is not valid JSON: ") + e.what());
    }
    try {
        const int schema = j.at("schema_version").get<int>();
        if (schema != kKeySchemaVersion) {
            fail(Errc::invalid_config,
                 "unsupported key schema_version " + std::to_string(schema));
        }
        StegoKey key;
        key.version = j.at("version").get<int>();
        key.locating_strategy =
            locating_strategy_from_name(j.at("locating_strategy").get<std::string>());
        const auto& kv = j.at("k");
        if (kv.is_string()) {
            if (kv.get<std::string>() != "all") {
                fail(Errc::invalid_config, "k must be an integer or \"all\"");
            }
            key.k = StegoKey::kAllPositions;
        } else {
            key.k = kv.get<int>();
        }
        key.model_id = j.at("model_id").get<std::string>();
        key.tokenizer_id = j.at("tokenizer_id").get<std::string>();
        key.min_sentence_words = j.at("min_sentence_words").get<int>();
        key.masking_strategy =
            masking_strategy_from_name(j.at("masking_strategy").get<std::string>());
        const auto& ft = j.at("finetune");
        key.finetune.learning_rate = ft.at("learning_rate").get<double>();
        key.finetune.batch_size = ft.at("batch_size").get<int>();
        key.finetune.weight_decay = ft.at("weight_decay").get<double>();
        key.finetune.max_epochs = ft.at("max_epochs").get<int>();
        key.finetune.seed = ft.at("seed").get<uint64_t>();
        key.validate();
        return key;
    } catch (const json::exception& e) {
        fail(Errc::invalid_config, std::string("malformed key file: ") + e.what());
    }
}

void save_key(const StegoKey& key, const std::filesystem::path& path) {
    key.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(Errc::io_error, "cannot write key file " + path.string());
    }
    out << key_to_json(key);
}

StegoKey load_key(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(Errc::io_error, "cannot read key file " + path.string());
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return key_from_json(text);
}

}  // namespace mlmstego
