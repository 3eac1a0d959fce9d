#include "mlmstego/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "mlmstego/digest.hpp"
#include "mlmstego/errors.hpp"
#include "mlmstego/rng.hpp"
#include "mlmstego/transformer.hpp"

namespace mlmstego {

using nlohmann::json;

namespace {

// [CLS] body [SEP] with the same window policy as predict().
struct WrappedSample {
    std::vector<int> ids;
    std::vector<int> offsets;  // aligned with sample.masked_positions
};

WrappedSample wrap_sample(const ModelHandle& handle, const MaskedSample& sample) {
    const auto& tok = *handle.tokenizer;
    const int body_budget = handle.max_sequence_length - 2;
    int window_begin = 0;
    int window_end = static_cast<int>(sample.piece_ids.size());
    if (window_end - window_begin > body_budget) {
        int leftmost = window_end;
        for (const auto& pos : sample.masked_positions) {
            leftmost = std::min(leftmost, pos.piece_offset);
        }
        window_begin = std::max(0, leftmost - body_budget / 2);
        window_end = window_begin + body_budget;
        if (window_end > static_cast<int>(sample.piece_ids.size())) {
            window_end = static_cast<int>(sample.piece_ids.size());
            window_begin = window_end - body_budget;
        }
    }
    WrappedSample wrapped;
    wrapped.ids.reserve(static_cast<size_t>(window_end - window_begin) + 2);
    wrapped.ids.push_back(tok.cls_id());
    for (int i = window_begin; i < window_end; ++i) {
        wrapped.ids.push_back(sample.piece_ids[static_cast<size_t>(i)]);
    }
    wrapped.ids.push_back(tok.sep_id());
    for (const auto& pos : sample.masked_positions) {
        if (pos.piece_offset < window_begin || pos.piece_offset >= window_end) {
            fail(Errc::sequence_too_long, "mask does not fit the model window");
        }
        wrapped.offsets.push_back(pos.piece_offset - window_begin + 1);
    }
    return wrapped;
}

std::string write_manifest(const ModelArtifact& artifact) {
    json j;
    j["schema_version"] = kArtifactSchemaVersion;
    j["base_model_id"] = artifact.base_model_id;
    j["tokenizer_id"] = artifact.tokenizer_id;
    j["plan_fingerprint"] = artifact.plan_fingerprint;
    j["declared_length"] = artifact.declared_length;
    j["masking_strategy"] = masking_strategy_name(artifact.masking_strategy);
    j["key_version"] = artifact.key_version;
    j["cover_sha256"] = artifact.cover_sha256;
    j["weights_file"] = "weights.bin";
    j["weights_sha256"] = artifact.weights_sha256;
    return j.dump(2);
}

}  // namespace

ModelArtifact ModelArtifact::load(const std::filesystem::path& dir) {
    ModelArtifact artifact;
    artifact.dir = dir;
    std::ifstream in(artifact.manifest_path(), std::ios::binary);
    if (!in) {
        fail(Errc::artifact_corrupt, "missing manifest: " + artifact.manifest_path().string());
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        const json j = json::parse(text);
        const int schema = j.at("schema_version").get<int>();
        if (schema != kArtifactSchemaVersion) {
            fail(Errc::artifact_corrupt,
                 "unsupported artifact schema_version " + std::to_string(schema));
        }
        artifact.base_model_id = j.at("base_model_id").get<std::string>();
        artifact.tokenizer_id = j.at("tokenizer_id").get<std::string>();
        artifact.plan_fingerprint = j.at("plan_fingerprint").get<std::string>();
        artifact.declared_length = j.at("declared_length").get<int>();
        artifact.masking_strategy =
            masking_strategy_from_name(j.at("masking_strategy").get<std::string>());
        artifact.key_version = j.at("key_version").get<int>();
        artifact.cover_sha256 = j.at("cover_sha256").get<std::string>();
        artifact.weights_sha256 = j.at("weights_sha256").get<std::string>();
        artifact.manifest_digest = j.at("manifest_digest").get<std::string>();
    } catch (const json::exception& e) {
        fail(Errc::artifact_corrupt, std::string("malformed manifest: ") + e.what());
    }
    // Digest covers the manifest body without the digest field itself.
    ModelArtifact canonical = artifact;
    const std::string body = write_manifest(canonical);
    if (sha256_hex(body) != artifact.manifest_digest) {
        fail(Errc::artifact_corrupt, "manifest digest mismatch");
    }
    if (sha256_file(artifact.weights_path()) != artifact.weights_sha256) {
        fail(Errc::artifact_corrupt, "weights digest mismatch");
    }
    if (artifact.declared_length < 0) {
        fail(Errc::artifact_corrupt, "negative declared length");
    }
    return artifact;
}

LabeledDataset build_labeled_dataset(const CoverDocument& doc, const EmbeddingPlan& plan,
                                     const BitMessage& message, const StegoKey& key,
                                     const ModelHandle& base) {
    if (base.mode != ModelHandle::Mode::inference) {
        fail(Errc::invalid_config, "label selection requires an inference-mode handle");
    }
    const BitAssignment assignment = assign_bits(plan, message);

    LabeledDataset dataset;
    dataset.strategy = key.masking_strategy;
    dataset.plan_fingerprint = plan.plan_fingerprint;
    dataset.message_digest = sha256_hex(message.to_bit_string());
    dataset.samples = key.masking_strategy == MaskingStrategy::FPM
                          ? build_fpm(doc, plan, *base.tokenizer)
                          : build_spam(doc, plan, *base.tokenizer);

    // Target bits per site: assigned message bits, then current decoded bits
    // for the trailing unused sites so training does not disturb them.
    std::map<std::pair<int, int>, SiteGoal*> goal_index;
    dataset.goals.reserve(plan.sites.size());
    for (const auto& [site, bit] : assignment.assigned) {
        dataset.goals.push_back({site, bit, true});
    }
    for (const auto& site : assignment.unused) {
        dataset.goals.push_back({site, -1, false});
    }
    for (auto& goal : dataset.goals) {
        goal_index[{goal.site.sentence_index, goal.site.token_index}] = &goal;
    }

    for (auto& sample : dataset.samples) {
        const auto distributions = predict(base, sample);
        for (size_t i = 0; i < sample.masked_positions.size(); ++i) {
            auto& pos = sample.masked_positions[i];
            SiteGoal* goal = goal_index.at({pos.site.sentence_index, pos.site.token_index});
            const auto& dist = distributions[i];
            if (!goal->used && goal->bit < 0) {
                goal->bit = decode_bit(dist, pos.site).decoded_bit;
            }
            pos.label = target_word(dist, pos.site, goal->bit, *base.tokenizer);
        }
    }
    return dataset;
}

std::pair<double, bool> verify_goals(const ModelHandle& handle, const LabeledDataset& dataset) {
    std::map<std::pair<int, int>, const SiteGoal*> goal_index;
    for (const auto& goal : dataset.goals) {
        goal_index[{goal.site.sentence_index, goal.site.token_index}] = &goal;
    }

    // Per-sentence counts over message-bearing sites, all-goal flag overall.
    std::map<int, std::pair<int, int>> per_sentence;  // sentence -> (correct, total)
    bool all_satisfied = true;
    for (const auto& sample : dataset.samples) {
        const auto distributions = predict(handle, sample);
        for (size_t i = 0; i < sample.masked_positions.size(); ++i) {
            const auto& pos = sample.masked_positions[i];
            const SiteGoal* goal = goal_index.at({pos.site.sentence_index, pos.site.token_index});
            const int decoded = decode_bit(distributions[i], pos.site).decoded_bit;
            const bool ok = decoded == goal->bit;
            if (!ok) all_satisfied = false;
            if (goal->used) {
                auto& [correct, total] = per_sentence[pos.site.sentence_index];
                if (ok) ++correct;
                ++total;
            }
        }
    }
    if (per_sentence.empty()) {
        return {1.0, all_satisfied};  // empty message: vacuously extracted
    }
    double sum = 0.0;
    for (const auto& [sentence, counts] : per_sentence) {
        sum += static_cast<double>(counts.first) / static_cast<double>(counts.second);
    }
    return {sum / static_cast<double>(per_sentence.size()), all_satisfied};
}

std::pair<ModelArtifact, TrainingReport> fine_tune(ModelHandle& handle,
                                                   const LabeledDataset& dataset,
                                                   const StegoKey& key,
                                                   const std::string& cover_sha256,
                                                   const std::filesystem::path& out_dir) {
    if (dataset.samples.empty()) {
        fail(Errc::invalid_config, "cannot fine-tune on an empty dataset");
    }
    for (const auto& sample : dataset.samples) {
        for (const auto& pos : sample.masked_positions) {
            if (pos.label < 0) {
                fail(Errc::invalid_config, "dataset has unlabeled masked positions");
            }
        }
    }

    TrainingReport report;
    handle.mode = ModelHandle::Mode::training;

    // Wrap once; windows do not change during training.
    std::vector<WrappedSample> wrapped;
    wrapped.reserve(dataset.samples.size());
    std::vector<std::vector<int>> labels(dataset.samples.size());
    for (size_t i = 0; i < dataset.samples.size(); ++i) {
        wrapped.push_back(wrap_sample(handle, dataset.samples[i]));
        for (const auto& pos : dataset.samples[i].masked_positions) {
            labels[i].push_back(pos.label);
        }
    }

    AdamW optimizer(*handle.model);
    SplitMix64 rng(key.finetune.seed);
    std::vector<size_t> order(dataset.samples.size());
    std::iota(order.begin(), order.end(), size_t{0});

    // Epoch 0 check: nothing to do when every goal already decodes correctly.
    handle.mode = ModelHandle::Mode::inference;
    if (verify_goals(handle, dataset).second) {
        report.converged = true;
    }

    const int max_epochs = key.finetune.max_epochs;
    const int batch_size = std::max(1, key.finetune.batch_size);
    while (!report.converged && report.epochs_run < max_epochs) {
        handle.mode = ModelHandle::Mode::training;
        deterministic_shuffle(order, rng);
        double epoch_loss = 0.0;
        long epoch_positions = 0;
        for (size_t begin = 0; begin < order.size(); begin += static_cast<size_t>(batch_size)) {
            const size_t end = std::min(order.size(), begin + static_cast<size_t>(batch_size));
            handle.model->zero_gradients();
            long positions = 0;
            double batch_loss = 0.0;
            for (size_t i = begin; i < end; ++i) {
                const size_t idx = order[i];
                batch_loss += handle.model->accumulate_gradients(
                    wrapped[idx].ids, wrapped[idx].offsets, labels[idx]);
                positions += static_cast<long>(labels[idx].size());
            }
            handle.model->scale_gradients(1.0 / static_cast<double>(positions));
            optimizer.step(*handle.model, key.finetune.learning_rate,
                           key.finetune.weight_decay);
            epoch_loss += batch_loss;
            epoch_positions += positions;
        }
        ++report.epochs_run;
        report.final_loss = epoch_loss / static_cast<double>(epoch_positions);

        handle.mode = ModelHandle::Mode::inference;
        const auto [esr, all_ok] = verify_goals(handle, dataset);
        report.esr_by_epoch.push_back(esr);
        if (all_ok) {
            report.converged = true;
        }
    }
    handle.mode = ModelHandle::Mode::inference;

    std::filesystem::create_directories(out_dir);
    ModelArtifact artifact;
    artifact.dir = out_dir;
    artifact.base_model_id = handle.model_id;
    artifact.tokenizer_id = handle.tokenizer_id;
    artifact.plan_fingerprint = dataset.plan_fingerprint;
    artifact.declared_length = static_cast<int>(
        std::count_if(dataset.goals.begin(), dataset.goals.end(),
                      [](const SiteGoal& g) { return g.used; }));
    artifact.masking_strategy = dataset.strategy;
    artifact.key_version = key.version;
    artifact.cover_sha256 = cover_sha256;
    handle.model->save(artifact.weights_path());
    artifact.weights_sha256 = sha256_file(artifact.weights_path());
    const std::string body = write_manifest(artifact);
    artifact.manifest_digest = sha256_hex(body);
    {
        json j = json::parse(body);
        j["manifest_digest"] = artifact.manifest_digest;
        std::ofstream out(artifact.manifest_path(), std::ios::binary);
        if (!out) {
            fail(Errc::io_error, "cannot write manifest to " + out_dir.string());
        }
        out << j.dump(2) << '\n';
    }
    return {artifact, report};
}

EmbedResult embed(const std::string& raw_text, const BitMessage& message, const StegoKey& key,
                  const ModelRegistry& registry, const std::filesystem::path& out_dir) {
    key.validate();
    CoverDocument doc = segment(raw_text);
    ModelHandle handle =
        ModelHandle::load(registry, key.model_id, key.tokenizer_id, ModelHandle::Mode::inference);
    annotate_divisibility(doc, *handle.tokenizer);
    const EmbeddingPlan plan = locate(doc, key, *handle.tokenizer);
    const LabeledDataset dataset = build_labeled_dataset(doc, plan, message, key, handle);
    auto [artifact, report] = fine_tune(handle, dataset, key, sha256_hex(raw_text), out_dir);

    EmbedResult result;
    result.stego_text = raw_text;  // the whole point: the text is untouched
    result.artifact = std::move(artifact);
    result.report = std::move(report);
    result.capacity_bits = plan.capacity_bits;
    return result;
}

std::string report_to_json(const TrainingReport& report) {
    json j{
        {"epochs_run", report.epochs_run},
        {"esr_by_epoch", report.esr_by_epoch},
        {"converged", report.converged},
        {"final_loss", report.final_loss},
    };
    return j.dump(2) + "\n";
}

}  // namespace mlmstego
