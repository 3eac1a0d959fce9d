#pragma once

#include <string>
#include <string_view>

namespace mlmstego {

/// Universal POS categories.
enum class UPos {
    ADJ,
    ADP,
    ADV,
    AUX,
    CCONJ,
    DET,
    INTJ,
    NOUN,
    NUM,
    PART,
    PRON,
    PROPN,
    PUNCT,
    SCONJ,
    SYM,
    VERB,
    X,
};

const char* upos_name(UPos tag);

// Fixed tag partition. Function words: determiners, adpositions, pronouns,
// conjunctions, auxiliaries, particles, interjections, punctuation, symbols,
// numerals. Content words: nouns, proper nouns, verbs, adjectives, adverbs.
bool is_functional(UPos tag);

/// Deterministic lexicon/suffix tagger for English prose. One tag per
/// surface; sentence_initial affects only capitalization handling.
UPos tag_word(std::string_view surface, bool sentence_initial);

// Version strings recorded in plan fingerprints so embed/extract sides can
// detect toolchain drift.
inline constexpr const char* kTaggerVersion = "lexpos-1";
inline constexpr const char* kSegmenterVersion = "seg-1";

}  // namespace mlmstego
