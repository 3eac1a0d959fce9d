#include "mlmstego/masking.hpp"

#include <istream>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>

#include "mlmstego/errors.hpp"

namespace mlmstego {

using nlohmann::json;

namespace {

struct SentencePieces {
    std::vector<int> piece_ids;
    // token index -> offset of that token's first piece, and piece count
    std::vector<std::pair<int, int>> token_pieces;
};

SentencePieces encode_sentence(const Sentence& sentence, const WordPieceTokenizer& tokenizer) {
    SentencePieces out;
    out.token_pieces.reserve(sentence.tokens.size());
    for (const auto& token : sentence.tokens) {
        const auto pieces = tokenizer.encode_word(token.surface);
        out.token_pieces.emplace_back(static_cast<int>(out.piece_ids.size()),
                                      static_cast<int>(pieces.size()));
        out.piece_ids.insert(out.piece_ids.end(), pieces.begin(), pieces.end());
    }
    return out;
}

void check_site(const CoverDocument& doc, const EmbeddingSite& site,
                const WordPieceTokenizer& tokenizer) {
    if (site.sentence_index < 0 ||
        site.sentence_index >= static_cast<int>(doc.sentences.size())) {
        fail(Errc::plan_mismatch, "site sentence index out of range");
    }
    const auto& sentence = doc.sentences[static_cast<size_t>(site.sentence_index)];
    if (site.token_index < 0 || site.token_index >= static_cast<int>(sentence.tokens.size())) {
        fail(Errc::plan_mismatch, "site token index out of range");
    }
    const auto& token = sentence.tokens[static_cast<size_t>(site.token_index)];
    if (token.surface != site.original_word) {
        fail(Errc::plan_mismatch, "site word '" + site.original_word +
                                      "' does not match document word '" + token.surface + "'");
    }
    if (tokenizer.single_piece_id(token.surface) != site.vocab_id) {
        fail(Errc::plan_mismatch, "site vocab id does not match tokenizer");
    }
}

std::map<int, std::vector<const EmbeddingSite*>> sites_by_sentence(const EmbeddingPlan& plan) {
    std::map<int, std::vector<const EmbeddingSite*>> grouped;
    for (const auto& site : plan.sites) {
        grouped[site.sentence_index].push_back(&site);
    }
    return grouped;
}

}  // namespace

std::vector<MaskedSample> build_fpm(const CoverDocument& doc, const EmbeddingPlan& plan,
                                    const WordPieceTokenizer& tokenizer) {
    std::vector<MaskedSample> samples;
    for (const auto& [sentence_index, sites] : sites_by_sentence(plan)) {
        const auto& sentence = doc.sentences[static_cast<size_t>(sentence_index)];
        SentencePieces encoded = encode_sentence(sentence, tokenizer);
        MaskedSample sample;
        sample.sentence_index = sentence_index;
        sample.piece_ids = encoded.piece_ids;
        for (const EmbeddingSite* site : sites) {
            check_site(doc, *site, tokenizer);
            const auto [offset, count] = encoded.token_pieces[static_cast<size_t>(site->token_index)];
            if (count != 1) {
                fail(Errc::plan_mismatch, "site word is not a single piece");
            }
            sample.piece_ids[static_cast<size_t>(offset)] = tokenizer.mask_id();
            sample.masked_positions.push_back({offset, *site, -1});
        }
        samples.push_back(std::move(sample));
    }
    return samples;
}

std::vector<MaskedSample> build_spam(const CoverDocument& doc, const EmbeddingPlan& plan,
                                     const WordPieceTokenizer& tokenizer) {
    std::vector<MaskedSample> samples;
    samples.reserve(plan.sites.size());
    for (const auto& site : plan.sites) {
        check_site(doc, site, tokenizer);
        const auto& sentence = doc.sentences[static_cast<size_t>(site.sentence_index)];
        SentencePieces encoded = encode_sentence(sentence, tokenizer);
        const auto [offset, count] = encoded.token_pieces[static_cast<size_t>(site.token_index)];
        if (count != 1) {
            fail(Errc::plan_mismatch, "site word is not a single piece");
        }
        MaskedSample sample;
        sample.sentence_index = site.sentence_index;
        sample.piece_ids = std::move(encoded.piece_ids);
        sample.piece_ids[static_cast<size_t>(offset)] = tokenizer.mask_id();
        sample.masked_positions.push_back({offset, site, -1});
        samples.push_back(std::move(sample));
    }
    return samples;
}

void write_samples(std::ostream& out, const std::vector<MaskedSample>& samples) {
    for (const auto& sample : samples) {
        json positions = json::array();
        for (const auto& pos : sample.masked_positions) {
            json p{
                {"piece_offset", pos.piece_offset},
                {"site",
                 {{"sentence_index", pos.site.sentence_index},
                  {"token_index", pos.site.token_index},
                  {"original_word", pos.site.original_word},
                  {"vocab_id", pos.site.vocab_id}}},
            };
            if (pos.label >= 0) p["label"] = pos.label;
            positions.push_back(std::move(p));
        }
        json j{
            {"sentence_index", sample.sentence_index},
            {"piece_ids", sample.piece_ids},
            {"masked_positions", std::move(positions)},
        };
        out << j.dump() << '\n';
    }
}

std::vector<MaskedSample> read_samples(std::istream& in) {
    std::vector<MaskedSample> samples;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            MaskedSample sample;
            sample.sentence_index = j.at("sentence_index").get<int>();
            sample.piece_ids = j.at("piece_ids").get<std::vector<int>>();
            for (const auto& p : j.at("masked_positions")) {
                MaskedPosition pos;
                pos.piece_offset = p.at("piece_offset").get<int>();
                const auto& s = p.at("site");
                pos.site.sentence_index = s.at("sentence_index").get<int>();
                pos.site.token_index = s.at("token_index").get<int>();
                pos.site.original_word = s.at("original_word").get<std::string>();
                pos.site.vocab_id = s.at("vocab_id").get<int>();
                pos.label = p.value("label", -1);
                sample.masked_positions.push_back(std::move(pos));
            }
            samples.push_back(std::move(sample));
        } catch (const json::exception& e) {
            fail(Errc::invalid_config, std::string("malformed sample record: ") + e.what());
        }
    }
    return samples;
}

}  // namespace mlmstego
