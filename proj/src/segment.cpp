#include "mlmstego/segment.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "mlmstego/errors.hpp"

namespace mlmstego {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

// Abbreviations whose trailing period does not end a sentence.
const std::unordered_set<std::string>& abbreviations() {
    static const std::unordered_set<std::string> kAbbrev = {
        "Mr", "Mrs", "Ms", "Dr", "Prof", "St", "Jr", "Sr", "vs", "etc", "Inc",
        "Ltd", "Co", "No", "Vol", "Fig", "approx", "dept", "est",
    };
    return kAbbrev;
}

// A terminator run [.!?]+ at position i ends a sentence if followed by
// whitespace and then an uppercase letter, opening quote, digit, or EOF.
bool ends_sentence(const std::string& text, size_t term_begin, size_t term_end) {
    if (text[term_begin] == '.') {
        // Single period after an abbreviation or an initial does not split.
        size_t w = term_begin;
        while (w > 0 && (is_alpha(text[w - 1]) || text[w - 1] == '.')) --w;
        std::string prev = text.substr(w, term_begin - w);
        if (!prev.empty() && prev.find('.') == std::string::npos) {
            if (abbreviations().count(prev)) return false;
            if (prev.size() == 1 && std::isupper(static_cast<unsigned char>(prev[0]))) return false;
        }
    }
    size_t j = term_end;
    if (j >= text.size()) return true;
    if (!is_space(text[j])) return false;
    while (j < text.size() && is_space(text[j])) ++j;
    if (j >= text.size()) return true;
    const char c = text[j];
    return std::isupper(static_cast<unsigned char>(c)) || is_digit(c) || c == '"' ||
           c == '\'' || c == '(';
}

// Word scanner: letter runs with internal apostrophes, digit runs with
// internal [.,], everything else one char at a time.
std::vector<std::pair<size_t, size_t>> scan_tokens(std::string_view text, size_t base) {
    std::vector<std::pair<size_t, size_t>> spans;
    size_t i = 0;
    const size_t n = text.size();
    while (i < n) {
        const char c = text[i];
        if (is_space(c)) {
            ++i;
            continue;
        }
        size_t j = i;
        if (is_alpha(c)) {
            ++j;
            while (j < n) {
                if (is_alpha(text[j])) {
                    ++j;
                } else if (text[j] == '\'' && j + 1 < n && is_alpha(text[j + 1])) {
                    j += 2;
                } else {
                    break;
                }
            }
        } else if (is_digit(c)) {
            ++j;
            while (j < n) {
                if (is_digit(text[j])) {
                    ++j;
                } else if ((text[j] == '.' || text[j] == ',') && j + 1 < n && is_digit(text[j + 1])) {
                    j += 2;
                } else {
                    break;
                }
            }
            // "3rd", "1990s"
            while (j < n && is_alpha(text[j])) ++j;
        } else {
            ++j;
        }
        spans.emplace_back(base + i, base + j);
        i = j;
    }
    return spans;
}

Sentence build_sentence(const std::string& raw, size_t begin, size_t end, int index) {
    Sentence sentence;
    sentence.index = index;
    sentence.begin = begin;
    sentence.end = end;
    const auto spans = scan_tokens(std::string_view(raw).substr(begin, end - begin), begin);
    sentence.tokens.reserve(spans.size());
    int word_count = 0;
    for (size_t t = 0; t < spans.size(); ++t) {
        Token token;
        token.begin = spans[t].first;
        token.end = spans[t].second;
        token.surface = raw.substr(token.begin, token.end - token.begin);
        token.token_index = static_cast<int>(t);
        token.pos_tag = tag_word(token.surface, /*sentence_initial=*/word_count == 0);
        token.is_functional = is_functional(token.pos_tag);
        if (token.pos_tag != UPos::PUNCT && token.pos_tag != UPos::SYM) ++word_count;
        sentence.tokens.push_back(std::move(token));
    }
    sentence.word_count = word_count;
    return sentence;
}

}  // namespace

CoverDocument segment(std::string raw_text, std::string source_id) {
    const bool has_content = std::any_of(raw_text.begin(), raw_text.end(),
                                         [](char c) { return !is_space(c); });
    if (!has_content) {
        fail(Errc::empty_input, "no sentence-like content");
    }

    CoverDocument doc;
    doc.raw_text = std::move(raw_text);
    doc.source_id = std::move(source_id);
    const std::string& text = doc.raw_text;

    size_t pos = 0;
    int index = 0;
    while (pos < text.size()) {
        while (pos < text.size() && is_space(text[pos])) ++pos;
        if (pos >= text.size()) break;
        const size_t start = pos;
        size_t end = text.size();
        size_t i = start;
        while (i < text.size()) {
            const char c = text[i];
            if (c == '.' || c == '!' || c == '?') {
                size_t term_end = i + 1;
                while (term_end < text.size() &&
                       (text[term_end] == '.' || text[term_end] == '!' || text[term_end] == '?')) {
                    ++term_end;
                }
                // Trailing close-quote belongs to the sentence.
                size_t close = term_end;
                while (close < text.size() && (text[close] == '"' || text[close] == '\'')) ++close;
                if (ends_sentence(text, i, close)) {
                    end = close;
                    break;
                }
                i = term_end;
            } else if (c == '\n' && i + 1 < text.size() && text[i + 1] == '\n') {
                // Paragraph break ends an unterminated sentence.
                end = i;
                break;
            } else {
                ++i;
            }
        }
        size_t trimmed = std::min(end, text.size());
        while (trimmed > start && is_space(text[trimmed - 1])) --trimmed;
        if (trimmed > start) {
            Sentence sentence = build_sentence(text, start, trimmed, index);
            if (!sentence.tokens.empty()) {
                doc.sentences.push_back(std::move(sentence));
                ++index;
            }
        }
        pos = std::max(end, trimmed);
        if (pos <= start) pos = start + 1;  // never stall
    }

    if (doc.sentences.empty()) {
        fail(Errc::empty_input, "no sentence-like content");
    }
    return doc;
}

std::vector<CoverDocument> filter_corpus(const std::vector<CoverDocument>& documents,
                                         int min_words) {
    if (min_words < 1) {
        fail(Errc::invalid_config, "min_words must be >= 1");
    }
    std::vector<CoverDocument> kept;
    for (const auto& doc : documents) {
        std::string rebuilt;
        size_t last_end = 0;
        bool first = true;
        bool prev_kept_adjacent = false;
        int prev_index = -2;
        for (const auto& sentence : doc.sentences) {
            if (sentence.word_count < min_words) continue;
            if (!first) {
                if (prev_index + 1 == sentence.index && prev_kept_adjacent) {
                    // Preserve the original inter-sentence gap.
                    rebuilt.append(doc.raw_text, last_end, sentence.begin - last_end);
                } else {
                    rebuilt.push_back(' ');
                }
            }
            rebuilt.append(doc.raw_text, sentence.begin, sentence.end - sentence.begin);
            last_end = sentence.end;
            prev_index = sentence.index;
            prev_kept_adjacent = true;
            first = false;
        }
        if (first) continue;  // nothing survived
        kept.push_back(segment(std::move(rebuilt), doc.source_id));
    }
    return kept;
}

}  // namespace mlmstego
