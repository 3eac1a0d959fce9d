#include "mlmstego/extractor.hpp"

#include <algorithm>
#include <chrono>
#include <map>

#include "mlmstego/errors.hpp"

namespace mlmstego {

namespace {

struct SentenceWork {
    int sentence_index = 0;
    std::vector<MaskedSample> samples;      // 1 for FPM, one per used site for SPAM
    std::vector<EmbeddingSite> used_sites;  // plan order within the sentence
};

// Decoding is organized per sentence so extraction can be timed per sentence.
std::vector<SentenceWork> plan_work(const CoverDocument& doc, const EmbeddingPlan& plan,
                                    int declared_length, MaskingStrategy strategy,
                                    const WordPieceTokenizer& tokenizer) {
    EmbeddingPlan used;
    used.sites.assign(plan.sites.begin(), plan.sites.begin() + declared_length);
    used.capacity_bits = declared_length;
    used.plan_fingerprint = plan.plan_fingerprint;

    std::map<int, SentenceWork> by_sentence;
    for (const auto& site : used.sites) {
        by_sentence[site.sentence_index].used_sites.push_back(site);
    }

    if (strategy == MaskingStrategy::SPAM) {
        // One sample per used site, all other words intact.
        const auto samples = build_spam(doc, used, tokenizer);
        for (const auto& sample : samples) {
            by_sentence[sample.sentence_index].samples.push_back(sample);
        }
    } else {
        // Full-position parity with training: mask every plan site of the
        // sentence, even ones beyond the message, then decode the used ones.
        const auto samples = build_fpm(doc, plan, tokenizer);
        for (const auto& sample : samples) {
            auto it = by_sentence.find(sample.sentence_index);
            if (it != by_sentence.end()) {
                it->second.samples.push_back(sample);
            }
        }
    }

    std::vector<SentenceWork> work;
    work.reserve(by_sentence.size());
    for (auto& [index, entry] : by_sentence) {
        entry.sentence_index = index;
        work.push_back(std::move(entry));
    }
    return work;
}

// Bits for one sentence, keyed by (sentence, token) for reassembly.
std::map<std::pair<int, int>, int> decode_sentence(const ModelHandle& handle,
                                                   const SentenceWork& work) {
    std::map<std::pair<int, int>, int> bits;
    for (const auto& sample : work.samples) {
        const auto distributions = predict(handle, sample);
        for (size_t i = 0; i < sample.masked_positions.size(); ++i) {
            const auto& pos = sample.masked_positions[i];
            const auto key = std::make_pair(pos.site.sentence_index, pos.site.token_index);
            const bool wanted = std::any_of(
                work.used_sites.begin(), work.used_sites.end(), [&](const EmbeddingSite& s) {
                    return s.sentence_index == pos.site.sentence_index &&
                           s.token_index == pos.site.token_index;
                });
            if (!wanted) continue;  // FPM masks trailing sites too
            bits[key] = decode_bit(distributions[i], pos.site).decoded_bit;
        }
    }
    return bits;
}

BitMessage extract_one(const std::string& stego_text, const StegoKey& key,
                       const ModelArtifact& artifact, const ModelHandle& handle,
                       std::vector<double>* sentence_seconds) {
    CoverDocument doc = segment(stego_text);
    annotate_divisibility(doc, *handle.tokenizer);
    const EmbeddingPlan plan = locate(doc, key, *handle.tokenizer);
    if (plan.plan_fingerprint != artifact.plan_fingerprint) {
        fail(Errc::fingerprint_mismatch,
             "stego text or key does not match the artifact's embedding plan");
    }
    if (artifact.declared_length > plan.capacity_bits) {
        fail(Errc::artifact_corrupt, "declared length exceeds plan capacity");
    }

    BitMessage message;
    message.declared_length = artifact.declared_length;
    if (artifact.declared_length == 0) {
        return message;
    }

    const auto work = plan_work(doc, plan, artifact.declared_length,
                                artifact.masking_strategy, *handle.tokenizer);
    std::map<std::pair<int, int>, int> all_bits;
    for (const auto& sentence : work) {
        const auto start = std::chrono::steady_clock::now();
        auto bits = decode_sentence(handle, sentence);
        const auto stop = std::chrono::steady_clock::now();
        if (sentence_seconds) {
            sentence_seconds->push_back(std::chrono::duration<double>(stop - start).count());
        }
        all_bits.merge(bits);
    }

    for (int i = 0; i < artifact.declared_length; ++i) {
        const auto& site = plan.sites[static_cast<size_t>(i)];
        const auto it = all_bits.find({site.sentence_index, site.token_index});
        if (it == all_bits.end()) {
            fail(Errc::backend_failure, "missing decoded bit for a planned site");
        }
        message.bits.push_back(static_cast<uint8_t>(it->second));
    }
    return message;
}

ModelHandle load_artifact_model(const StegoKey& key, const ModelArtifact& artifact,
                                const ModelRegistry& registry) {
    if (artifact.base_model_id != key.model_id || artifact.tokenizer_id != key.tokenizer_id ||
        artifact.key_version != key.version ||
        artifact.masking_strategy != key.masking_strategy) {
        fail(Errc::fingerprint_mismatch, "key does not match the artifact manifest");
    }
    return ModelHandle::load_weights(registry, artifact.base_model_id, artifact.tokenizer_id,
                                     artifact.weights_path(), ModelHandle::Mode::inference);
}

}  // namespace

BitMessage extract(const std::string& stego_text, const StegoKey& key,
                   const ModelArtifact& artifact, const ModelRegistry& registry) {
    const ModelHandle handle = load_artifact_model(key, artifact, registry);
    return extract_one(stego_text, key, artifact, handle, nullptr);
}

TimedExtractResult timed_extract(const std::vector<std::string>& stego_texts,
                                 const StegoKey& key, const ModelArtifact& artifact,
                                 const ModelRegistry& registry) {
    const ModelHandle handle = load_artifact_model(key, artifact, registry);
    TimedExtractResult result;
    for (const auto& text : stego_texts) {
        result.messages.push_back(
            extract_one(text, key, artifact, handle, &result.sentence_seconds));
    }
    if (result.sentence_seconds.empty()) {
        result.et_seconds_per_sentence = 0.0;
    } else {
        double total = 0.0;
        for (double t : result.sentence_seconds) total += t;
        result.et_seconds_per_sentence = total / static_cast<double>(result.sentence_seconds.size());
    }
    return result;
}

}  // namespace mlmstego
