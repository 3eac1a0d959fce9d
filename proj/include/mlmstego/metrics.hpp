#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mlmstego/scorer.hpp"

namespace mlmstego {

/// Extraction success rate: mean over sentences of E_i / B_i.
/// Entries are (correct bits E_i, embedded bits B_i); B_i = 0 rows are
/// skipped. Throws EmptyInput when nothing remains.
double esr(const std::vector<std::pair<int, int>>& per_sentence);

/// Embedding rate: mean over sentences of B_i / L_i for (bits B_i, words L_i).
double er(const std::vector<std::pair<int, int>>& per_sentence);

/// Mean extraction seconds per sentence.
double et(const std::vector<double>& times);

/// 2^(-(1/N) * sum of per-sentence base-2 log probabilities).
double ppl(const std::vector<std::string>& texts, SentenceScorer& scorer);

/// Kullback-Leibler divergence in bits: sum p * log2(p/q).
/// Throws SupportMismatch unless sizes match and q > 0 wherever p > 0.
double kl_divergence(const std::vector<double>& p, const std::vector<double>& q);

struct DetectionResult {
    double accuracy = 0.0;
    double f1 = 0.0;
};

/// Sparse (feature id, value) pairs for one text.
using FeatureExtractor =
    std::function<std::vector<std::pair<int, double>>(const std::string&)>;

/// Hashed bag of word tokens and character trigrams; the default classifier
/// input.
std::vector<std::pair<int, double>> default_text_features(const std::string& text);

/// Trains a seeded logistic-regression steganalyzer on cover-vs-stego and
/// reports held-out accuracy and F1 (stego = positive). Needs at least 20
/// texts per side. Equal-size inputs are split pairwise so a text never
/// lands in train on one side and test on the other.
DetectionResult detection_harness(const std::vector<std::string>& cover,
                                  const std::vector<std::string>& stego, uint64_t seed,
                                  const FeatureExtractor& features = default_text_features);

struct EvalReport {
    double esr = 0.0;
    double er = 0.0;
    double et = 0.0;
    double ppl = 0.0;
    double kl_cover_stego = 0.0;
    std::optional<DetectionResult> detection;
};

std::string eval_report_to_json(const EvalReport& report);

}  // namespace mlmstego
