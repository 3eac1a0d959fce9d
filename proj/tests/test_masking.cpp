#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <sstream>

#include "mlmstego/errors.hpp"
#include "mlmstego/masking.hpp"
#include "testutil.hpp"

using namespace mlmstego;

namespace {

struct Fixture {
    CoverDocument doc;
    EmbeddingPlan plan;
    StegoKey key;

    explicit Fixture(const std::string& text, int k = 2,
                     LocatingStrategy strategy = LocatingStrategy::NFW) {
        key.min_sentence_words = 1;
        key.k = k;
        key.locating_strategy = strategy;
        doc = segment(text);
        plan = locate(doc, key, testutil::tokenizer());
    }
};

std::vector<int> sentence_pieces(const CoverDocument& doc, int index) {
    std::vector<int> ids;
    for (const auto& token : doc.sentences[static_cast<size_t>(index)].tokens) {
        const auto pieces = testutil::tokenizer().encode_word(token.surface);
        ids.insert(ids.end(), pieces.begin(), pieces.end());
    }
    return ids;
}

}  // namespace

TEST_CASE("FPM masks all of a sentence's sites in one sample") {
    Fixture fx("The hungry cat climbed the tall tree quickly today.");
    const auto samples = build_fpm(fx.doc, fx.plan, testutil::tokenizer());
    REQUIRE(samples.size() == 1);
    CHECK(samples[0].masked_positions.size() == 2);

    int masks = 0;
    for (int id : samples[0].piece_ids) {
        if (id == testutil::tokenizer().mask_id()) ++masks;
    }
    CHECK(masks == 2);
}

TEST_CASE("SPAM emits one sample per site with a single mask each") {
    Fixture fx("The hungry cat climbed the tall tree quickly. Maria planted fresh tomatoes behind the fence.");
    REQUIRE(fx.plan.sites.size() == 4);  // 2 sentences x k=2
    const auto samples = build_spam(fx.doc, fx.plan, testutil::tokenizer());
    REQUIRE(samples.size() == 4);
    for (const auto& sample : samples) {
        int masks = 0;
        for (int id : sample.piece_ids) {
            if (id == testutil::tokenizer().mask_id()) ++masks;
        }
        CHECK(masks == 1);
        CHECK(sample.masked_positions.size() == 1);
    }
}

TEST_CASE("counts follow the plan across ragged sentences") {
    // Sentence 1 has sites, sentence 2 is function words only, sentence 3 has sites.
    Fixture fx("The hungry cat climbed the tall tree. It is on the. The tired baker kneaded soft dough slowly.",
               3);
    std::map<int, int> per_sentence;
    for (const auto& site : fx.plan.sites) per_sentence[site.sentence_index]++;
    CHECK(per_sentence.count(1) == 0);

    const auto fpm = build_fpm(fx.doc, fx.plan, testutil::tokenizer());
    CHECK(fpm.size() == per_sentence.size());

    const auto spam = build_spam(fx.doc, fx.plan, testutil::tokenizer());
    CHECK(spam.size() == fx.plan.sites.size());

    size_t fpm_masks = 0;
    for (const auto& s : fpm) fpm_masks += s.masked_positions.size();
    CHECK(fpm_masks == fx.plan.sites.size());
}

TEST_CASE("single-site sentences make FPM and SPAM coincide") {
    Fixture fx("The hungry cat climbed the tall tree quickly.", 1);
    const auto fpm = build_fpm(fx.doc, fx.plan, testutil::tokenizer());
    const auto spam = build_spam(fx.doc, fx.plan, testutil::tokenizer());
    REQUIRE(fpm.size() == 1);
    REQUIRE(spam.size() == 1);
    CHECK(fpm[0].piece_ids == spam[0].piece_ids);
    CHECK(fpm[0].masked_positions[0].piece_offset == spam[0].masked_positions[0].piece_offset);
}

TEST_CASE("unmasking restores the original tokenization (round trip)") {
    Fixture fx("Maria planted fresh tomatoes behind the wooden fence while her brother watered the young trees.",
               3);
    const auto original = sentence_pieces(fx.doc, 0);
    for (const auto& samples : {build_fpm(fx.doc, fx.plan, testutil::tokenizer()),
                                build_spam(fx.doc, fx.plan, testutil::tokenizer())}) {
        for (const auto& sample : samples) {
            auto restored = sample.piece_ids;
            for (const auto& pos : sample.masked_positions) {
                restored[static_cast<size_t>(pos.piece_offset)] = pos.site.vocab_id;
            }
            CHECK(restored == original);
        }
    }
}

TEST_CASE("SPAM keeps every non-masked piece of the context") {
    Fixture fx("The watchful owl studied the dark meadow patiently tonight.", 2);
    const auto original = sentence_pieces(fx.doc, 0);
    const auto samples = build_spam(fx.doc, fx.plan, testutil::tokenizer());
    for (const auto& sample : samples) {
        REQUIRE(sample.piece_ids.size() == original.size());
        int differences = 0;
        for (size_t i = 0; i < original.size(); ++i) {
            if (sample.piece_ids[i] != original[i]) ++differences;
        }
        CHECK(differences == 1);
    }
}

TEST_CASE("a stale plan is rejected") {
    Fixture fx("The hungry cat climbed the tall tree quickly.");
    auto other = segment("The hungry dog climbed the tall tree quickly.");
    CHECK_THROWS_MATCHES(build_fpm(other, fx.plan, testutil::tokenizer()), StegError,
                         Catch::Matchers::Predicate<StegError>([](const StegError& e) {
                             return e.code() == Errc::plan_mismatch;
                         }));
    CHECK_THROWS_AS(build_spam(other, fx.plan, testutil::tokenizer()), StegError);
}

TEST_CASE("masked samples round-trip through the line-delimited format") {
    Fixture fx("The tired baker kneaded soft dough before dawn and filled the warm kitchen.");
    auto samples = build_spam(fx.doc, fx.plan, testutil::tokenizer());
    samples[0].masked_positions[0].label = 42;

    std::stringstream buffer;
    write_samples(buffer, samples);
    const auto restored = read_samples(buffer);
    REQUIRE(restored.size() == samples.size());
    for (size_t i = 0; i < samples.size(); ++i) {
        CHECK(restored[i].sentence_index == samples[i].sentence_index);
        CHECK(restored[i].piece_ids == samples[i].piece_ids);
        REQUIRE(restored[i].masked_positions.size() == samples[i].masked_positions.size());
        for (size_t p = 0; p < samples[i].masked_positions.size(); ++p) {
            CHECK(restored[i].masked_positions[p].piece_offset ==
                  samples[i].masked_positions[p].piece_offset);
            CHECK(restored[i].masked_positions[p].site == samples[i].masked_positions[p].site);
            CHECK(restored[i].masked_positions[p].label ==
                  samples[i].masked_positions[p].label);
        }
    }
}
