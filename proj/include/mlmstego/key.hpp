#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace mlmstego {

enum class LocatingStrategy { NFW, FW, AW };
enum class MaskingStrategy { FPM, SPAM };

const char* locating_strategy_name(LocatingStrategy s);
LocatingStrategy locating_strategy_from_name(const std::string& name);
const char* masking_strategy_name(MaskingStrategy s);
MaskingStrategy masking_strategy_from_name(const std::string& name);

struct FinetuneConfig {
    double learning_rate = 1e-3;
    int batch_size = 32;
    double weight_decay = 0.01;
    int max_epochs = 30;
    uint64_t seed = 42;
};

/// Shared secret configuration. Equal keys + equal cover text give identical
/// embedding plans on both sides of the channel.
struct StegoKey {
    static constexpr int kAllPositions = -1;

    LocatingStrategy locating_strategy = LocatingStrategy::NFW;
    int k = 2;  // kAllPositions selects every eligible word
    std::string model_id = "tiny-mlm-v1";
    std::string tokenizer_id = "tiny-mlm-v1";
    int min_sentence_words = 10;
    FinetuneConfig finetune;
    MaskingStrategy masking_strategy = MaskingStrategy::SPAM;
    int version = 1;

    bool k_is_all() const { return k == kAllPositions; }
    void validate() const;  // throws InvalidConfig
};

inline constexpr int kKeySchemaVersion = 1;

void save_key(const StegoKey& key, const std::filesystem::path& path);
StegoKey load_key(const std::filesystem::path& path);

std::string key_to_json(const StegoKey& key);
StegoKey key_from_json(const std::string& text);

}  // namespace mlmstego
