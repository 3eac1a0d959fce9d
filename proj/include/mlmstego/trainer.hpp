#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mlmstego/coding.hpp"
#include "mlmstego/key.hpp"
#include "mlmstego/masking.hpp"
#include "mlmstego/model_backend.hpp"
#include "mlmstego/plan.hpp"
#include "mlmstego/segment.hpp"

namespace mlmstego {

/// Per-site training goal. Message-bearing sites carry their assigned bit;
/// trailing unused sites carry the bit they already decode to, so training
/// labels keep them in place.
struct SiteGoal {
    EmbeddingSite site;
    int bit = 0;
    bool used = false;  // carries a message bit
};

struct LabeledDataset {
    std::vector<MaskedSample> samples;  // labels filled on every position
    std::vector<SiteGoal> goals;        // plan order
    MaskingStrategy strategy = MaskingStrategy::SPAM;
    std::string plan_fingerprint;
    std::string message_digest;
};

struct TrainingReport {
    int epochs_run = 0;
    std::vector<double> esr_by_epoch;
    bool converged = false;
    double final_loss = 0.0;
};

inline constexpr int kArtifactSchemaVersion = 1;

/// Fine-tuned weights plus the manifest binding them to one (cover, key)
/// pair. The manifest is the compatibility contract for extraction.
struct ModelArtifact {
    std::filesystem::path dir;
    std::string base_model_id;
    std::string tokenizer_id;
    std::string plan_fingerprint;
    int declared_length = 0;
    MaskingStrategy masking_strategy = MaskingStrategy::SPAM;
    int key_version = 1;
    std::string cover_sha256;
    std::string weights_sha256;
    std::string manifest_digest;

    std::filesystem::path weights_path() const { return dir / "weights.bin"; }
    std::filesystem::path manifest_path() const { return dir / "manifest.json"; }

    /// Parses and verifies manifest digest and weights digest.
    /// Throws ArtifactCorrupt on any mismatch.
    static ModelArtifact load(const std::filesystem::path& dir);
};

/// Computes the base model's distributions with the key's masking strategy
/// and fills one target-word label per masked position. base must be in
/// inference mode.
LabeledDataset build_labeled_dataset(const CoverDocument& doc, const EmbeddingPlan& plan,
                                     const BitMessage& message, const StegoKey& key,
                                     const ModelHandle& base);

/// AdamW fine-tuning with epoch-end verification. Stops as soon as every
/// goal decodes correctly (message sites and stability sites alike) or at
/// max_epochs. The artifact is saved either way; converged says which.
std::pair<ModelArtifact, TrainingReport> fine_tune(ModelHandle& handle,
                                                   const LabeledDataset& dataset,
                                                   const StegoKey& key,
                                                   const std::string& cover_sha256,
                                                   const std::filesystem::path& out_dir);

struct EmbedResult {
    std::string stego_text;  // byte-identical to the cover text
    ModelArtifact artifact;
    TrainingReport report;
    int capacity_bits = 0;
};

/// Full embedding pipeline. Never modifies the cover text.
EmbedResult embed(const std::string& raw_text, const BitMessage& message, const StegoKey& key,
                  const ModelRegistry& registry, const std::filesystem::path& out_dir);

/// Decode a dataset's goals with the current weights; returns the fraction
/// layout used for reports: (ESR over used goals, all goals satisfied).
std::pair<double, bool> verify_goals(const ModelHandle& handle, const LabeledDataset& dataset);

std::string report_to_json(const TrainingReport& report);

}  // namespace mlmstego
