#include "mlmstego/plan.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "mlmstego/digest.hpp"
#include "mlmstego/errors.hpp"
#include "mlmstego/pos.hpp"

namespace mlmstego {

using nlohmann::json;

namespace {

bool class_matches(const Token& token, LocatingStrategy strategy) {
    // Punctuation and symbols are not words and are never embedding sites.
    if (token.pos_tag == UPos::PUNCT || token.pos_tag == UPos::SYM) return false;
    switch (strategy) {
        case LocatingStrategy::NFW: return !token.is_functional;
        case LocatingStrategy::FW: return token.is_functional;
        case LocatingStrategy::AW: return true;
    }
    return false;
}

std::string fingerprint(const CoverDocument& doc, const StegoKey& key,
                        const WordPieceTokenizer& tokenizer) {
    std::ostringstream canon;
    canon << "plan-fp-v1\n"
          << sha256_hex(doc.raw_text) << '\n'
          << locating_strategy_name(key.locating_strategy) << '\n'
          << (key.k_is_all() ? std::string("all") : std::to_string(key.k)) << '\n'
          << key.model_id << '\n'
          << key.tokenizer_id << '\n'
          << key.min_sentence_words << '\n'
          << key.version << '\n'
          << kSegmenterVersion << '\n'
          << kTaggerVersion << '\n'
          << tokenizer.vocab_digest() << '\n';
    return sha256_hex(canon.str());
}

}  // namespace

EmbeddingPlan locate(const CoverDocument& doc, const StegoKey& key,
                     const WordPieceTokenizer& tokenizer) {
    key.validate();
    EmbeddingPlan plan;
    for (const auto& sentence : doc.sentences) {
        if (sentence.word_count < key.min_sentence_words) continue;
        int taken = 0;
        for (const auto& token : sentence.tokens) {
            if (!key.k_is_all() && taken >= key.k) break;
            if (!class_matches(token, key.locating_strategy)) continue;
            const int vocab_id = tokenizer.single_piece_id(token.surface);
            if (vocab_id < 0) continue;  // divisible or unknown word
            EmbeddingSite site;
            site.sentence_index = sentence.index;
            site.token_index = token.token_index;
            site.original_word = token.surface;
            site.vocab_id = vocab_id;
            plan.sites.push_back(std::move(site));
            ++taken;
        }
    }
    if (plan.sites.empty()) {
        fail(Errc::no_capacity, "no eligible embedding position in document");
    }
    plan.capacity_bits = static_cast<int>(plan.sites.size());
    plan.plan_fingerprint = fingerprint(doc, key, tokenizer);
    return plan;
}

std::string plan_to_json(const EmbeddingPlan& plan) {
    json sites = json::array();
    for (const auto& site : plan.sites) {
        sites.push_back({
            {"sentence_index", site.sentence_index},
            {"token_index", site.token_index},
            {"original_word", site.original_word},
            {"vocab_id", site.vocab_id},
        });
    }
    json j{
        {"sites", std::move(sites)},
        {"capacity_bits", plan.capacity_bits},
        {"plan_fingerprint", plan.plan_fingerprint},
    };
    return j.dump(2) + "\n";
}

EmbeddingPlan plan_from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        EmbeddingPlan plan;
        for (const auto& s : j.at("sites")) {
            EmbeddingSite site;
            site.sentence_index = s.at("sentence_index").get<int>();
            site.token_index = s.at("token_index").get<int>();
            site.original_word = s.at("original_word").get<std::string>();
            site.vocab_id = s.at("vocab_id").get<int>();
            plan.sites.push_back(std::move(site));
        }
        plan.capacity_bits = j.at("capacity_bits").get<int>();
        plan.plan_fingerprint = j.at("plan_fingerprint").get<std::string>();
        if (plan.capacity_bits != static_cast<int>(plan.sites.size())) {
            fail(Errc::invalid_config, "plan capacity does not match site count");
        }
        return plan;
    } catch (const json::exception& e) {
        fail(Errc::invalid_config, std::string("malformed plan JSON: ") + e.what());
    }
}

}  // namespace mlmstego
