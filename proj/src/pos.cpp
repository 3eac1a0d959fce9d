#include "mlmstego/pos.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace mlmstego {

namespace {

using Lexicon = std::unordered_set<std::string>;

const Lexicon kDeterminers = {
    "the", "a", "an", "this", "that", "these", "those", "some", "any", "each", "every",
    "no", "either", "neither", "both", "all", "half", "such", "another", "which",
    "whichever", "whatever", "enough", "several", "many", "much", "few", "fewer",
    "little", "less", "least", "most", "more", "certain", "various",
};

const Lexicon kAdpositions = {
    "of", "in", "on", "at", "by", "for", "with", "about", "against", "between",
    "into", "through", "during", "before", "after", "above", "below", "to", "from",
    "up", "down", "under", "over", "near", "off", "across", "behind", "beyond",
    "within", "without", "along", "around", "among", "amongst", "upon", "toward",
    "towards", "inside", "outside", "despite", "per", "via", "until", "till",
    "onto", "beneath", "beside", "besides", "amid", "throughout", "concerning",
    "regarding", "past", "underneath", "alongside", "atop", "except",
};

const Lexicon kPronouns = {
    "i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us", "them",
    "my", "your", "his", "its", "our", "their", "mine", "yours", "hers", "ours",
    "theirs", "myself", "yourself", "himself", "herself", "itself", "ourselves",
    "yourselves", "themselves", "who", "whom", "whose", "someone", "anyone",
    "everyone", "nobody", "somebody", "anybody", "everybody", "something",
    "anything", "everything", "nothing", "none", "oneself", "one's",
    // Common pronoun-led contractions.
    "i'm", "i've", "i'll", "i'd", "you're", "you've", "you'll", "you'd", "he's",
    "he'll", "he'd", "she's", "she'll", "she'd", "it's", "it'll", "we're", "we've",
    "we'll", "we'd", "they're", "they've", "they'll", "they'd", "that's", "there's",
    "here's", "what's", "who's", "let's",
};

const Lexicon kAuxiliaries = {
    "be", "am", "is", "are", "was", "were", "been", "being", "have", "has", "had",
    "having", "do", "does", "did", "will", "would", "shall", "should", "can",
    "could", "may", "might", "must", "ought",
    "isn't", "aren't", "wasn't", "weren't", "hasn't", "haven't", "hadn't", "don't",
    "doesn't", "didn't", "won't", "wouldn't", "shan't", "shouldn't", "can't",
    "cannot", "couldn't", "mayn't", "mightn't", "mustn't",
};

const Lexicon kCoordConj = {"and", "or", "but", "nor", "yet", "plus"};

const Lexicon kSubordConj = {
    "because", "although", "though", "while", "whereas", "if", "unless", "since",
    "when", "whenever", "where", "wherever", "once", "as", "whether", "than",
    "albeit", "lest", "whereby", "unlike",
};

const Lexicon kParticles = {"not", "n't", "'s", "so"};

const Lexicon kInterjections = {
    "oh", "ah", "wow", "hey", "hello", "hi", "yes", "yeah", "please", "thanks",
    "ok", "okay", "alas", "hmm",
};

const Lexicon kNumberWords = {
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine",
    "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen",
    "seventeen", "eighteen", "nineteen", "twenty", "thirty", "forty", "fifty",
    "sixty", "seventy", "eighty", "ninety", "hundred", "thousand", "million",
    "billion", "dozen", "first", "second", "third",
};

// Adverbs that do not end in -ly.
const Lexicon kAdverbs = {
    "very", "quite", "too", "also", "often", "never", "always", "soon", "now",
    "then", "here", "there", "almost", "again", "perhaps", "maybe", "rather",
    "really", "still", "just", "even", "ever", "far", "fast", "hard", "early",
    "late", "today", "tomorrow", "yesterday", "already", "sometimes", "together",
    "away", "back", "forward", "instead", "meanwhile", "moreover", "nearby",
    "seldom", "somewhat", "twice", "everywhere", "somewhere", "anywhere",
    "abroad", "ahead", "aside", "indoors", "outdoors", "overhead", "upstairs",
    "downstairs", "anymore", "forever", "hardly", "indeed", "later", "longer",
    "better", "best", "worse", "worst", "sooner", "farther", "further",
};

// Frequent verb stems, including irregular past forms, so the tagger can tell
// verbs from nouns without morphology. Content-class mistakes (verb vs noun)
// never cross the functional boundary, so this list only needs to be decent,
// not exhaustive.
const Lexicon kVerbStems = {
    "accept", "add", "agree", "allow", "answer", "appear", "argue", "arrive", "ask",
    "ate", "bake", "became", "become", "began", "begin", "believe", "belong",
    "bent", "bend", "bought", "bring", "brought", "build", "built", "buy", "call",
    "came", "carry", "carried", "catch", "caught", "change", "check", "choose",
    "chose", "climb", "close", "collect", "come", "compare", "consider", "contain",
    "continue", "cook", "copy", "cost", "count", "cover", "create", "cross", "cut",
    "dance", "decide", "deliver", "describe", "design", "develop", "die", "dig",
    "discover", "discuss", "draw", "drank", "dream", "dress", "drew", "drink",
    "drive", "drove", "drop", "dug", "earn", "eat", "end", "enjoy", "enter",
    "expect", "explain", "fall", "fell", "feed", "fed", "feel", "felt", "fetch",
    "fill", "find", "finish", "fit", "fix", "flew", "fly", "fold", "follow",
    "forget", "forgot", "found", "gather", "gave", "get", "give", "glow", "go",
    "goes", "gone", "got", "grabbed", "grab", "grew", "grow", "guess", "handed",
    "hand", "hang", "happen", "hate", "hear", "heard", "held", "help", "hid",
    "hide", "hit", "hold", "hope", "hung", "hurt", "imagine", "improve", "include",
    "invite", "join", "jump", "keep", "kept", "kick", "knew", "know", "laugh",
    "lay", "laid", "lead", "led", "learn", "leave", "left", "lend", "lent", "let",
    "lift", "like", "listen", "live", "look", "lose", "lost", "love", "made",
    "make", "manage", "mean", "meant", "measure", "meet", "met", "mention", "miss",
    "mix", "move", "need", "notice", "offer", "open", "order", "own", "paid",
    "paint", "pass", "pay", "pick", "place", "plan", "plant", "play", "point",
    "pour", "practice", "prefer", "prepare", "press", "print", "promise", "pull",
    "push", "put", "ran", "rang", "reach", "read", "realize", "receive",
    "remember", "remain", "remind", "remove", "repair", "repeat", "reply",
    "return", "ride", "ring", "rise", "rode", "rose", "run", "said", "sang",
    "sat", "save", "saw", "say", "see", "seem", "sell", "send", "sent", "serve",
    "set", "sew", "shake", "share", "shine", "shone", "shook", "shout", "show",
    "shut", "sing", "sit", "sleep", "slept", "smell", "smile", "sold", "solve",
    "sort", "sound", "speak", "spend", "spent", "spoke", "stand", "start", "stay",
    "step", "stood", "stop", "store", "study", "studied", "succeed", "suggest",
    "swam", "swim", "take", "talk", "taste", "taught", "teach", "tell", "thank",
    "think", "thought", "threw", "throw", "tidy", "told", "took", "touch",
    "train", "travel", "tried", "try", "turn", "understand", "understood", "use",
    "visit", "wait", "wake", "walk", "want", "warm", "wash", "watch", "water",
    "wear", "went", "wish", "woke", "won", "wonder", "wore", "work", "wrote",
    "write", "visited", "whisper", "repaired",
};

// Frequent adjectives without a telltale suffix.
const Lexicon kAdjectives = {
    "big", "small", "large", "long", "short", "tall", "old", "young", "new",
    "good", "bad", "great", "high", "low", "hot", "cold", "warm", "cool", "dark",
    "bright", "light", "heavy", "quick", "slow", "quiet", "loud", "clean", "dirty",
    "dry", "wet", "empty", "full", "fresh", "ripe", "raw", "soft", "firm",
    "strong", "weak", "thick", "thin", "wide", "narrow", "deep", "shallow",
    "near", "distant", "early", "late", "cheap", "expensive", "rich", "poor",
    "happy", "sad", "angry", "calm", "busy", "free", "easy", "simple", "clear",
    "plain", "fine", "nice", "kind", "gentle", "sharp", "blunt", "smooth",
    "rough", "steep", "flat", "round", "square", "red", "green", "blue", "white",
    "black", "brown", "grey", "gray", "yellow", "orange", "purple", "pink",
    "golden", "silver", "wooden", "stone", "tiny", "huge", "broad", "proud",
    "tired", "hungry", "thirsty", "sweet", "sour", "bitter", "salty", "spicy",
    "tidy", "neat", "silent", "noisy", "crowded", "urgent", "steady", "sturdy",
    "shiny", "dusty", "rainy", "sunny", "windy", "cloudy", "foggy", "snowy",
    "icy", "muddy", "sandy", "rocky", "grassy", "leafy", "bumpy", "sleepy",
    "lively", "friendly", "local", "main", "whole", "extra", "spare", "final",
    "next", "last", "same", "other", "different", "ready", "safe", "dangerous",
    "pale", "dim", "crisp", "faint", "stale", "worn", "patient",
};

bool all_of_chars(std::string_view s, int (*pred)(int)) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [pred](char c) {
        return pred(static_cast<unsigned char>(c)) != 0;
    });
}

bool is_punct_char(char c) {
    switch (c) {
        case '.': case ',': case ';': case ':': case '!': case '?': case '\'':
        case '"': case '(': case ')': case '[': case ']': case '{': case '}':
        case '-': case '/': case '\\': case '`': case '*': case '_':
            return true;
        default:
            return false;
    }
}

bool is_symbol_char(char c) {
    switch (c) {
        case '$': case '%': case '&': case '+': case '=': case '<': case '>':
        case '@': case '#': case '^': case '~': case '|':
            return true;
        default:
            return false;
    }
}

std::string lower_copy(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool verb_by_morphology(const std::string& w) {
    if (kVerbStems.count(w)) return true;
    // strips: walked -> walk, walking -> walk, walks -> walk, hoped -> hope,
    // stopped -> stop, carries -> carry.
    auto in_stems = [](std::string stem) {
        if (kVerbStems.count(stem)) return true;
        stem.push_back('e');  // hoped -> hop + e
        return kVerbStems.count(stem) > 0;
    };
    if (ends_with(w, "ing") && w.size() > 4) {
        std::string stem = w.substr(0, w.size() - 3);
        if (in_stems(stem)) return true;
        if (stem.size() > 2 && stem[stem.size() - 1] == stem[stem.size() - 2] &&
            in_stems(stem.substr(0, stem.size() - 1))) {
            return true;
        }
    }
    if (ends_with(w, "ed") && w.size() > 3) {
        std::string stem = w.substr(0, w.size() - 2);
        if (in_stems(stem)) return true;
        if (stem.size() > 2 && stem[stem.size() - 1] == stem[stem.size() - 2] &&
            in_stems(stem.substr(0, stem.size() - 1))) {
            return true;
        }
        if (kVerbStems.count(stem + "y") && ends_with(stem, "i")) return true;
    }
    if (ends_with(w, "ies") && w.size() > 4 &&
        kVerbStems.count(w.substr(0, w.size() - 3) + "y")) {
        return true;
    }
    if (ends_with(w, "es") && w.size() > 3 && kVerbStems.count(w.substr(0, w.size() - 2))) {
        return true;
    }
    if (ends_with(w, "s") && w.size() > 2 && kVerbStems.count(w.substr(0, w.size() - 1))) {
        return true;
    }
    return false;
}

bool adjective_by_morphology(const std::string& w) {
    if (kAdjectives.count(w)) return true;
    static const char* kSuffixes[] = {"ous", "ful", "ive", "able", "ible", "ish", "less", "ant", "ent"};
    for (const char* suf : kSuffixes) {
        if (ends_with(w, suf) && w.size() > std::string_view(suf).size() + 2) return true;
    }
    return false;
}

}  // namespace

const char* upos_name(UPos tag) {
    switch (tag) {
        case UPos::ADJ: return "ADJ";
        case UPos::ADP: return "ADP";
        case UPos::ADV: return "ADV";
        case UPos::AUX: return "AUX";
        case UPos::CCONJ: return "CCONJ";
        case UPos::DET: return "DET";
        case UPos::INTJ: return "INTJ";
        case UPos::NOUN: return "NOUN";
        case UPos::NUM: return "NUM";
        case UPos::PART: return "PART";
        case UPos::PRON: return "PRON";
        case UPos::PROPN: return "PROPN";
        case UPos::PUNCT: return "PUNCT";
        case UPos::SCONJ: return "SCONJ";
        case UPos::SYM: return "SYM";
        case UPos::VERB: return "VERB";
        case UPos::X: return "X";
    }
    return "X";
}

bool is_functional(UPos tag) {
    switch (tag) {
        case UPos::DET:
        case UPos::ADP:
        case UPos::PRON:
        case UPos::CCONJ:
        case UPos::SCONJ:
        case UPos::AUX:
        case UPos::PART:
        case UPos::INTJ:
        case UPos::PUNCT:
        case UPos::SYM:
        case UPos::NUM:
            return true;
        case UPos::ADJ:
        case UPos::ADV:
        case UPos::NOUN:
        case UPos::PROPN:
        case UPos::VERB:
        case UPos::X:
            return false;
    }
    return false;
}

UPos tag_word(std::string_view surface, bool sentence_initial) {
    if (surface.empty()) return UPos::X;

    const bool has_alpha = std::any_of(surface.begin(), surface.end(), [](char c) {
        return std::isalpha(static_cast<unsigned char>(c)) != 0;
    });
    const bool has_digit = std::any_of(surface.begin(), surface.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c)) != 0;
    });

    if (!has_alpha && !has_digit) {
        if (all_of_chars(surface, [](int c) { return is_symbol_char(static_cast<char>(c)) ? 1 : 0; })) {
            return UPos::SYM;
        }
        return UPos::PUNCT;
    }
    if (has_digit && !has_alpha) return UPos::NUM;
    if (has_digit && has_alpha) return UPos::NUM;  // "3rd", "1990s"

    const std::string w = lower_copy(surface);

    // Closed classes first; fixed precedence keeps tagging total and stable.
    if (kDeterminers.count(w)) return UPos::DET;
    if (kPronouns.count(w)) return UPos::PRON;
    if (kAdpositions.count(w)) return UPos::ADP;
    if (kAuxiliaries.count(w)) return UPos::AUX;
    if (kCoordConj.count(w)) return UPos::CCONJ;
    if (kSubordConj.count(w)) return UPos::SCONJ;
    if (kParticles.count(w)) return UPos::PART;
    if (kNumberWords.count(w)) return UPos::NUM;
    if (kInterjections.count(w)) return UPos::INTJ;

    if (kAdverbs.count(w)) return UPos::ADV;
    if (ends_with(w, "ly") && w.size() > 3) return UPos::ADV;
    if (verb_by_morphology(w)) return UPos::VERB;
    if (adjective_by_morphology(w)) return UPos::ADJ;

    const bool capitalized = std::isupper(static_cast<unsigned char>(surface.front())) != 0;
    if (capitalized && !sentence_initial) return UPos::PROPN;
    return UPos::NOUN;
}

}  // namespace mlmstego
