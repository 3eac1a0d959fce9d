#include "mlmstego/coding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "mlmstego/errors.hpp"

namespace mlmstego {

namespace {

/// Case-insensitive surface with any continuation prefix stripped, used to
/// detect labels that are just another form of the same word.
std::string normalized_form(const std::string& piece) {
    std::string s = piece;
    if (s.rfind("##", 0) == 0) s.erase(0, 2);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

PredictionDistribution make_distribution(const std::vector<double>& probs_by_id,
                                         EmbeddingSite site) {
    double sum = 0.0;
    PredictionDistribution dist;
    dist.site = std::move(site);
    dist.entries.reserve(probs_by_id.size());
    for (size_t id = 0; id < probs_by_id.size(); ++id) {
        const double p = probs_by_id[id];
        if (p < 0.0 || !std::isfinite(p)) {
            fail(Errc::backend_failure, "negative or non-finite probability");
        }
        sum += p;
        dist.entries.push_back({static_cast<int>(id), p});
    }
    if (std::abs(sum - 1.0) > 1e-4) {
        fail(Errc::backend_failure,
             "distribution not normalized, sum = " + std::to_string(sum));
    }
    std::sort(dist.entries.begin(), dist.entries.end(), [](const DistEntry& a, const DistEntry& b) {
        if (a.probability != b.probability) return a.probability > b.probability;
        return a.vocab_id < b.vocab_id;
    });
    return dist;
}

int rank_of(const PredictionDistribution& dist, int vocab_id) {
    for (size_t i = 0; i < dist.entries.size(); ++i) {
        if (dist.entries[i].vocab_id == vocab_id) return static_cast<int>(i) + 1;
    }
    fail(Errc::unknown_vocab_id,
         "vocab id " + std::to_string(vocab_id) + " not present in distribution");
}

CodingOutcome decode_bit(const PredictionDistribution& dist, const EmbeddingSite& site) {
    CodingOutcome outcome;
    outcome.site = site;
    outcome.rank_of_original = rank_of(dist, site.vocab_id);
    outcome.decoded_bit = outcome.rank_of_original == 1 ? 0 : 1;
    return outcome;
}

bool satisfies_target(const PredictionDistribution& dist, const EmbeddingSite& site, int bit) {
    return decode_bit(dist, site).decoded_bit == bit;
}

int target_word(const PredictionDistribution& dist, const EmbeddingSite& site, int bit,
                const WordPieceTokenizer& tokenizer) {
    if (dist.entries.size() < 2) {
        fail(Errc::degenerate_distribution, "need at least 2 entries to pick a target word");
    }
    if (bit == 0) {
        return site.vocab_id;
    }
    const int original_rank = rank_of(dist, site.vocab_id);
    if (original_rank != 1) {
        // Reinforce the current top word.
        return dist.entries[0].vocab_id;
    }
    // Displace the original: first entry that is neither the original word nor
    // one of its case/piece variants.
    const std::string original_form = normalized_form(tokenizer.piece(site.vocab_id));
    for (const auto& entry : dist.entries) {
        if (entry.vocab_id == site.vocab_id) continue;
        if (normalized_form(tokenizer.piece(entry.vocab_id)) == original_form) continue;
        return entry.vocab_id;
    }
    fail(Errc::degenerate_distribution, "no usable displacement target");
}

BitMessage BitMessage::from_bit_string(const std::string& text) {
    BitMessage msg;
    msg.bits.reserve(text.size());
    for (char c : text) {
        if (c == '0') {
            msg.bits.push_back(0);
        } else if (c == '1') {
            msg.bits.push_back(1);
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            fail(Errc::invalid_config, std::string("invalid bit character '") + c + "'");
        }
    }
    msg.declared_length = static_cast<int>(msg.bits.size());
    return msg;
}

BitMessage BitMessage::from_hex(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        fail(Errc::invalid_config, "hex message must be <hex>:<bit count>");
    }
    const std::string hex = text.substr(0, colon);
    int length = 0;
    try {
        length = std::stoi(text.substr(colon + 1));
    } catch (const std::exception&) {
        fail(Errc::invalid_config, "invalid bit count in hex message");
    }
    if (length < 0 || static_cast<size_t>(length) > hex.size() * 4) {
        fail(Errc::invalid_config, "bit count exceeds hex digits");
    }
    std::vector<uint8_t> all;
    all.reserve(hex.size() * 4);
    for (char c : hex) {
        int v;
        if (c >= '0' && c <= '9') {
            v = c - '0';
        } else if (c >= 'a' && c <= 'f') {
            v = c - 'a' + 10;
        } else if (c >= 'A' && c <= 'F') {
            v = c - 'A' + 10;
        } else {
            fail(Errc::invalid_config, std::string("invalid hex digit '") + c + "'");
        }
        for (int b = 3; b >= 0; --b) {
            all.push_back(static_cast<uint8_t>((v >> b) & 1));
        }
    }
    BitMessage msg;
    msg.bits.assign(all.begin(), all.begin() + length);
    msg.declared_length = length;
    return msg;
}

std::string BitMessage::to_bit_string() const {
    std::string out;
    out.reserve(bits.size());
    for (uint8_t b : bits) out.push_back(b ? '1' : '0');
    return out;
}

std::string BitMessage::to_hex() const {
    static const char* kHex = "0123456789abcdef";
    std::string out;
    for (size_t i = 0; i < bits.size(); i += 4) {
        int v = 0;
        for (size_t j = 0; j < 4; ++j) {
            v <<= 1;
            if (i + j < bits.size()) v |= bits[i + j];
        }
        out.push_back(kHex[v]);
    }
    out.push_back(':');
    out += std::to_string(declared_length);
    return out;
}

BitAssignment assign_bits(const EmbeddingPlan& plan, const BitMessage& message) {
    if (static_cast<int>(message.bits.size()) > plan.capacity_bits) {
        fail(Errc::capacity_exceeded,
             "message needs " + std::to_string(message.bits.size()) + " bits, plan holds " +
                 std::to_string(plan.capacity_bits));
    }
    BitAssignment assignment;
    assignment.assigned.reserve(message.bits.size());
    for (size_t i = 0; i < plan.sites.size(); ++i) {
        if (i < message.bits.size()) {
            assignment.assigned.emplace_back(plan.sites[i], static_cast<int>(message.bits[i]));
        } else {
            assignment.unused.push_back(plan.sites[i]);
        }
    }
    return assignment;
}

}  // namespace mlmstego
