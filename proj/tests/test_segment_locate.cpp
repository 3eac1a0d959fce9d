#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "mlmstego/errors.hpp"
#include "mlmstego/plan.hpp"
#include "mlmstego/pos.hpp"
#include "mlmstego/rng.hpp"
#include "mlmstego/segment.hpp"
#include "testutil.hpp"

using namespace mlmstego;

TEST_CASE("segment splits simple two-sentence input") {
    const auto doc = segment("Hello world. Bye now.");
    REQUIRE(doc.sentences.size() == 2);
    CHECK(doc.sentences[0].text_in(doc.raw_text) == "Hello world.");
    CHECK(doc.sentences[1].text_in(doc.raw_text) == "Bye now.");
}

TEST_CASE("segment rejects empty input") {
    CHECK_THROWS_MATCHES(segment(""), StegError, Catch::Matchers::Predicate<StegError>(
        [](const StegError& e) { return e.code() == Errc::empty_input; }));
    CHECK_THROWS_AS(segment("   \n\t  "), StegError);
}

TEST_CASE("segment keeps abbreviations and terminator runs together") {
    const auto doc = segment("Dr. Smith arrived late. What a day!");
    REQUIRE(doc.sentences.size() == 2);
    CHECK(doc.sentences[0].text_in(doc.raw_text) == "Dr. Smith arrived late.");
    CHECK(doc.sentences[1].text_in(doc.raw_text) == "What a day!");
}

TEST_CASE("sentence spans reassemble the raw text byte-for-byte") {
    // Everything outside sentence spans must be whitespace, so splicing the
    // spans back with the recorded gaps reproduces the input.
    const std::string& corpus = testutil::desk_corpus();
    const auto doc = segment(corpus);
    CHECK(doc.sentences.size() == 50);

    std::string rebuilt;
    size_t cursor = 0;
    for (const auto& sentence : doc.sentences) {
        REQUIRE(sentence.begin >= cursor);
        const std::string gap = corpus.substr(cursor, sentence.begin - cursor);
        CHECK(std::all_of(gap.begin(), gap.end(), [](unsigned char c) { return std::isspace(c); }));
        rebuilt += gap;
        rebuilt += corpus.substr(sentence.begin, sentence.end - sentence.begin);
        cursor = sentence.end;
    }
    rebuilt += corpus.substr(cursor);
    CHECK(rebuilt == corpus);

    for (const auto& sentence : doc.sentences) {
        REQUIRE(!sentence.tokens.empty());
        for (size_t t = 1; t < sentence.tokens.size(); ++t) {
            CHECK(sentence.tokens[t - 1].end <= sentence.tokens[t].begin);
        }
    }
}

TEST_CASE("tagger fixes the expected classes on a plain sentence") {
    const auto doc = segment("The cat sat on the mat.");
    const auto& toks = doc.sentences[0].tokens;
    REQUIRE(toks.size() == 7);
    CHECK(toks[0].pos_tag == UPos::DET);
    CHECK(toks[1].pos_tag == UPos::NOUN);
    CHECK(toks[2].pos_tag == UPos::VERB);
    CHECK(toks[3].pos_tag == UPos::ADP);
    CHECK(toks[4].pos_tag == UPos::DET);
    CHECK(toks[5].pos_tag == UPos::NOUN);
    CHECK(toks[6].pos_tag == UPos::PUNCT);
    CHECK(toks[0].is_functional);
    CHECK_FALSE(toks[1].is_functional);
}

TEST_CASE("locate picks the first k words of the wanted class") {
    auto doc = segment("The cat sat on the mat.");
    StegoKey key;
    key.min_sentence_words = 1;
    key.k = 2;

    SECTION("non-function words") {
        const auto plan = locate(doc, key, testutil::tokenizer());
        REQUIRE(plan.sites.size() == 2);
        CHECK(plan.sites[0].original_word == "cat");
        CHECK(plan.sites[1].original_word == "sat");
        CHECK(plan.capacity_bits == 2);
    }
    SECTION("function words") {
        key.locating_strategy = LocatingStrategy::FW;
        const auto plan = locate(doc, key, testutil::tokenizer());
        REQUIRE(plan.sites.size() == 2);
        CHECK(plan.sites[0].original_word == "The");
        CHECK(plan.sites[1].original_word == "on");
    }
    SECTION("any word takes them in order") {
        key.locating_strategy = LocatingStrategy::AW;
        const auto plan = locate(doc, key, testutil::tokenizer());
        REQUIRE(plan.sites.size() == 2);
        CHECK(plan.sites[0].original_word == "The");
        CHECK(plan.sites[1].original_word == "cat");
    }
}

TEST_CASE("locate skips sentences made of function words and errors on zero capacity") {
    StegoKey key;
    key.min_sentence_words = 1;
    // Only function words and punctuation: no NFW site anywhere.
    auto doc = segment("It is on the. He was by them.");
    CHECK_THROWS_MATCHES(locate(doc, key, testutil::tokenizer()), StegError,
                         Catch::Matchers::Predicate<StegError>([](const StegError& e) {
                             return e.code() == Errc::no_capacity;
                         }));
}

TEST_CASE("locate skips divisible words") {
    // "kaleidoscope" is not in the vocab and splits into pieces.
    auto doc = segment("The kaleidoscope cat sat on the mat.");
    StegoKey key;
    key.min_sentence_words = 1;
    key.k = 2;
    const auto plan = locate(doc, key, testutil::tokenizer());
    REQUIRE(plan.sites.size() == 2);
    CHECK(plan.sites[0].original_word == "cat");
    CHECK(plan.sites[1].original_word == "sat");
}

TEST_CASE("locate respects min_sentence_words and k=all") {
    auto doc = segment("Short one here. The busy farmer loaded ripe apples onto the green truck and drove slowly away.");
    StegoKey key;
    key.min_sentence_words = 10;
    key.k = StegoKey::kAllPositions;
    const auto plan = locate(doc, key, testutil::tokenizer());
    for (const auto& site : plan.sites) {
        CHECK(site.sentence_index == 1);  // the short sentence is excluded
    }
    CHECK(plan.sites.size() >= 8);
}

TEST_CASE("locate is deterministic and ordered") {
    StegoKey key;
    const auto doc = segment(testutil::desk_corpus());
    const auto plan_a = locate(doc, key, testutil::tokenizer());
    const auto plan_b = locate(doc, key, testutil::tokenizer());
    CHECK(plan_a == plan_b);

    for (size_t i = 1; i < plan_a.sites.size(); ++i) {
        const auto& prev = plan_a.sites[i - 1];
        const auto& next = plan_a.sites[i];
        const bool increasing = prev.sentence_index < next.sentence_index ||
                                (prev.sentence_index == next.sentence_index &&
                                 prev.token_index < next.token_index);
        CHECK(increasing);
    }
}

TEST_CASE("byte-identical texts give identical plans, edits change the fingerprint") {
    StegoKey key;
    const std::string cover = testutil::desk_corpus();
    std::string copy = cover;
    const auto plan_a = locate(segment(cover), key, testutil::tokenizer());
    const auto plan_b = locate(segment(copy), key, testutil::tokenizer());
    CHECK(plan_a == plan_b);

    std::string tampered = cover;
    tampered[tampered.find("fisherman")] = 'F';
    const auto plan_c = locate(segment(tampered), key, testutil::tokenizer());
    CHECK(plan_c.plan_fingerprint != plan_a.plan_fingerprint);

    StegoKey other = key;
    other.k = 3;
    const auto plan_d = locate(segment(cover), other, testutil::tokenizer());
    CHECK(plan_d.plan_fingerprint != plan_a.plan_fingerprint);
}

TEST_CASE("plan JSON round-trips") {
    StegoKey key;
    const auto doc = segment(testutil::desk_corpus());
    const auto plan = locate(doc, key, testutil::tokenizer());
    const auto round = plan_from_json(plan_to_json(plan));
    CHECK(round == plan);
}

TEST_CASE("segmentation invariants hold on fuzzed inputs") {
    // Random byte soup (words, punctuation, newlines, some multibyte UTF-8):
    // every non-whitespace byte must land inside exactly one sentence span,
    // spans must be ordered, and re-segmentation must be stable.
    SplitMix64 rng(20240810);
    const std::string alphabet =
        "abc defgh  IJKLm.nopq!?  rst,uv;wx 0123 \n\t().\"'  \xc3\xa9\xe2\x82\xac";
    for (int round = 0; round < 200; ++round) {
        std::string text;
        const size_t len = rng.next_below(120);
        for (size_t i = 0; i < len; ++i) {
            text.push_back(alphabet[static_cast<size_t>(rng.next_below(alphabet.size()))]);
        }
        CoverDocument doc;
        try {
            doc = segment(text);
        } catch (const StegError& e) {
            REQUIRE(e.code() == Errc::empty_input);
            const bool blank = std::all_of(text.begin(), text.end(), [](unsigned char c) {
                return std::isspace(c);
            });
            REQUIRE(blank);
            continue;
        }
        size_t cursor = 0;
        for (const auto& sentence : doc.sentences) {
            REQUIRE(sentence.begin >= cursor);
            for (size_t i = cursor; i < sentence.begin; ++i) {
                REQUIRE(std::isspace(static_cast<unsigned char>(text[i])) != 0);
            }
            REQUIRE(sentence.end <= text.size());
            REQUIRE(sentence.begin < sentence.end);
            cursor = sentence.end;
        }
        for (size_t i = cursor; i < text.size(); ++i) {
            REQUIRE(std::isspace(static_cast<unsigned char>(text[i])) != 0);
        }
        const auto again = segment(text);
        REQUIRE(again.sentences.size() == doc.sentences.size());
        for (size_t s = 0; s < doc.sentences.size(); ++s) {
            REQUIRE(again.sentences[s].begin == doc.sentences[s].begin);
            REQUIRE(again.sentences[s].end == doc.sentences[s].end);
        }
    }
}

TEST_CASE("filter_corpus drops short sentences and rebuilds text") {
    const auto doc = segment("Tiny one. The quiet librarian sorted returned books all morning with great care. Also small.");
    const auto kept = filter_corpus({doc}, 10);
    REQUIRE(kept.size() == 1);
    REQUIRE(kept[0].sentences.size() == 1);
    CHECK(kept[0].sentences[0].word_count >= 10);
    CHECK(kept[0].raw_text ==
          "The quiet librarian sorted returned books all morning with great care.");

    // Exact boundary is kept.
    const auto boundary = segment("One two three four five six seven eight nine ten.");
    REQUIRE(boundary.sentences[0].word_count == 10);
    CHECK(filter_corpus({boundary}, 10).size() == 1);

    // A nine-word sentence is dropped.
    const auto nine = segment("One two three four five six seven eight nine.");
    CHECK(filter_corpus({nine}, 10).empty());

    // Recount across a mixed corpus.
    const auto mixed = filter_corpus({doc, nine, boundary}, 10);
    for (const auto& d : mixed) {
        for (const auto& s : d.sentences) {
            CHECK(s.word_count >= 10);
        }
    }
    CHECK(mixed.size() == 2);
}
