#include "mlmstego/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "mlmstego/errors.hpp"
#include "mlmstego/rng.hpp"

namespace mlmstego {

using nlohmann::json;

double esr(const std::vector<std::pair<int, int>>& per_sentence) {
    double sum = 0.0;
    int counted = 0;
    for (const auto& [correct, embedded] : per_sentence) {
        if (embedded == 0) continue;
        if (embedded < 0 || correct < 0 || correct > embedded) {
            fail(Errc::invalid_config, "bad (E_i, B_i) pair");
        }
        sum += static_cast<double>(correct) / static_cast<double>(embedded);
        ++counted;
    }
    if (counted == 0) {
        fail(Errc::empty_input, "no sentences with embedded bits");
    }
    return sum / static_cast<double>(counted);
}

double er(const std::vector<std::pair<int, int>>& per_sentence) {
    if (per_sentence.empty()) {
        fail(Errc::empty_input, "no sentences");
    }
    double sum = 0.0;
    for (const auto& [bits, words] : per_sentence) {
        if (words < 1 || bits < 0) {
            fail(Errc::invalid_config, "bad (B_i, L_i) pair");
        }
        sum += static_cast<double>(bits) / static_cast<double>(words);
    }
    return sum / static_cast<double>(per_sentence.size());
}

double et(const std::vector<double>& times) {
    if (times.empty()) {
        fail(Errc::empty_input, "no timing samples");
    }
    return std::accumulate(times.begin(), times.end(), 0.0) /
           static_cast<double>(times.size());
}

double ppl(const std::vector<std::string>& texts, SentenceScorer& scorer) {
    if (texts.empty()) {
        fail(Errc::empty_input, "no texts to score");
    }
    double sum = 0.0;
    for (const auto& text : texts) {
        try {
            sum += scorer.log2_probability(text);
        } catch (const StegError&) {
            throw;
        } catch (const std::exception& e) {
            fail(Errc::scorer_failure, e.what());
        }
    }
    return std::exp2(-sum / static_cast<double>(texts.size()));
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) {
        fail(Errc::support_mismatch, "distributions have different sizes");
    }
    double sum = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        if (p[i] < 0.0 || q[i] < 0.0) {
            fail(Errc::support_mismatch, "negative probability");
        }
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) {
            fail(Errc::support_mismatch, "q is zero where p is positive");
        }
        sum += p[i] * std::log2(p[i] / q[i]);
    }
    return sum;
}

namespace {

constexpr int kFeatureDim = 2048;

int hash_feature(std::string_view s) {
    // FNV-1a, folded into the feature dimension.
    uint64_t h = 1469598103934665603ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return static_cast<int>(h % kFeatureDim);
}

struct LogisticModel {
    std::vector<double> weights;
    double bias = 0.0;

    double score(const std::vector<std::pair<int, double>>& x) const {
        double z = bias;
        for (const auto& [id, v] : x) z += weights[static_cast<size_t>(id)] * v;
        return 1.0 / (1.0 + std::exp(-z));
    }
};

LogisticModel train_logistic(const std::vector<std::vector<std::pair<int, double>>>& features,
                             const std::vector<int>& labels) {
    LogisticModel model;
    model.weights.assign(kFeatureDim, 0.0);
    const double lr = 0.5;
    const double l2 = 1e-3;
    const int iterations = 300;
    const double n = static_cast<double>(features.size());
    for (int it = 0; it < iterations; ++it) {
        std::vector<double> grad(kFeatureDim, 0.0);
        double grad_bias = 0.0;
        for (size_t i = 0; i < features.size(); ++i) {
            const double err = model.score(features[i]) - labels[i];
            for (const auto& [id, v] : features[i]) grad[static_cast<size_t>(id)] += err * v;
            grad_bias += err;
        }
        for (int d = 0; d < kFeatureDim; ++d) {
            model.weights[static_cast<size_t>(d)] -=
                lr * (grad[static_cast<size_t>(d)] / n + l2 * model.weights[static_cast<size_t>(d)]);
        }
        model.bias -= lr * grad_bias / n;
    }
    return model;
}

}  // namespace

std::vector<std::pair<int, double>> default_text_features(const std::string& text) {
    std::vector<double> counts(kFeatureDim, 0.0);
    std::string word;
    auto flush = [&](std::string& w) {
        if (w.empty()) return;
        counts[static_cast<size_t>(hash_feature("w:" + w))] += 1.0;
        for (size_t i = 0; i + 3 <= w.size(); ++i) {
            counts[static_cast<size_t>(hash_feature("c:" + w.substr(i, 3)))] += 1.0;
        }
        w.clear();
    };
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else {
            flush(word);
        }
    }
    flush(word);

    double norm = 0.0;
    for (double v : counts) norm += v * v;
    norm = norm > 0.0 ? std::sqrt(norm) : 1.0;
    std::vector<std::pair<int, double>> sparse;
    for (int d = 0; d < kFeatureDim; ++d) {
        if (counts[static_cast<size_t>(d)] != 0.0) {
            sparse.emplace_back(d, counts[static_cast<size_t>(d)] / norm);
        }
    }
    return sparse;
}

DetectionResult detection_harness(const std::vector<std::string>& cover,
                                  const std::vector<std::string>& stego, uint64_t seed,
                                  const FeatureExtractor& features) {
    if (cover.size() < 20 || stego.size() < 20) {
        fail(Errc::insufficient_data, "need at least 20 cover and 20 stego texts");
    }

    std::vector<size_t> cover_order(cover.size());
    std::vector<size_t> stego_order(stego.size());
    std::iota(cover_order.begin(), cover_order.end(), size_t{0});
    std::iota(stego_order.begin(), stego_order.end(), size_t{0});
    SplitMix64 rng(seed);
    if (cover.size() == stego.size()) {
        // Pairwise split: item i stays in the same fold on both sides.
        deterministic_shuffle(cover_order, rng);
        stego_order = cover_order;
    } else {
        deterministic_shuffle(cover_order, rng);
        deterministic_shuffle(stego_order, rng);
    }
    const size_t cover_test = std::max<size_t>(1, cover.size() / 4);
    const size_t stego_test = std::max<size_t>(1, stego.size() / 4);

    std::vector<std::vector<std::pair<int, double>>> train_x;
    std::vector<int> train_y;
    std::vector<std::vector<std::pair<int, double>>> test_x;
    std::vector<int> test_y;
    for (size_t i = 0; i < cover_order.size(); ++i) {
        auto x = features(cover[cover_order[i]]);
        if (i < cover_test) {
            test_x.push_back(std::move(x));
            test_y.push_back(0);
        } else {
            train_x.push_back(std::move(x));
            train_y.push_back(0);
        }
    }
    for (size_t i = 0; i < stego_order.size(); ++i) {
        auto x = features(stego[stego_order[i]]);
        if (i < stego_test) {
            test_x.push_back(std::move(x));
            test_y.push_back(1);
        } else {
            train_x.push_back(std::move(x));
            train_y.push_back(1);
        }
    }

    const LogisticModel model = train_logistic(train_x, train_y);

    int tp = 0, tn = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < test_x.size(); ++i) {
        const int predicted = model.score(test_x[i]) >= 0.5 ? 1 : 0;
        if (predicted == 1 && test_y[i] == 1) ++tp;
        if (predicted == 0 && test_y[i] == 0) ++tn;
        if (predicted == 1 && test_y[i] == 0) ++fp;
        if (predicted == 0 && test_y[i] == 1) ++fn;
    }
    DetectionResult result;
    result.accuracy = static_cast<double>(tp + tn) / static_cast<double>(test_x.size());
    result.f1 = (2 * tp + fp + fn) > 0
                    ? 2.0 * tp / static_cast<double>(2 * tp + fp + fn)
                    : 0.0;
    return result;
}

std::string eval_report_to_json(const EvalReport& report) {
    json j{
        {"esr", report.esr},
        {"er", report.er},
        {"et", report.et},
        {"ppl", report.ppl},
        {"kl_cover_stego", report.kl_cover_stego},
    };
    if (report.detection) {
        j["detection"] = {{"accuracy", report.detection->accuracy},
                          {"f1", report.detection->f1}};
    }
    return j.dump(2) + "\n";
}

}  // namespace mlmstego
