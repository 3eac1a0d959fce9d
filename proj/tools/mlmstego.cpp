#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mlmstego/coding.hpp"
#include "mlmstego/digest.hpp"
#include "mlmstego/errors.hpp"
#include "mlmstego/extractor.hpp"
#include "mlmstego/key.hpp"
#include "mlmstego/metrics.hpp"
#include "mlmstego/rng.hpp"
#include "mlmstego/scorer.hpp"
#include "mlmstego/trainer.hpp"

namespace fs = std::filesystem;
using namespace mlmstego;
using nlohmann::json;

namespace {

// Stable CLI exit codes.
constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInvalidConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitCapacityExceeded = 4;
constexpr int kExitNonConvergence = 5;
constexpr int kExitFingerprintMismatch = 6;
constexpr int kExitArtifactCorrupt = 7;

int exit_code_for(const StegError& e) {
    switch (e.code()) {
        case Errc::invalid_config:
        case Errc::empty_input:
        case Errc::no_capacity:
            return kExitInvalidConfig;
        case Errc::io_error:
            return kExitIo;
        case Errc::capacity_exceeded:
            return kExitCapacityExceeded;
        case Errc::fingerprint_mismatch:
            return kExitFingerprintMismatch;
        case Errc::artifact_corrupt:
            return kExitArtifactCorrupt;
        default:
            return kExitFailure;
    }
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(Errc::io_error, "cannot read " + path.string());
    }
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

fs::path resolve_models_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("MLMSTEGO_MODEL_DIR"); env && *env) return env;
    return "models";
}

int parse_k(const std::string& text) {
    if (text == "all" || text == "ALL") return StegoKey::kAllPositions;
    try {
        return std::stoi(text);
    } catch (const std::exception&) {
        fail(Errc::invalid_config, "k must be a positive integer or \"all\"");
    }
}

BitMessage message_from_flags(const std::string& bits, const std::string& hex) {
    if (!bits.empty() && !hex.empty()) {
        fail(Errc::invalid_config, "use either --message or --message-hex, not both");
    }
    if (!hex.empty()) return BitMessage::from_hex(hex);
    return BitMessage::from_bit_string(bits);
}

// Word-unigram distribution over the union vocabulary of both texts, used
// for the cover/stego divergence report.
std::pair<std::vector<double>, std::vector<double>> unigram_pair(const std::string& a,
                                                                 const std::string& b) {
    auto words = [](const std::string& text) {
        std::map<std::string, double> counts;
        std::string word;
        for (char c : text) {
            if (std::isalnum(static_cast<unsigned char>(c))) {
                word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            } else if (!word.empty()) {
                counts[word] += 1.0;
                word.clear();
            }
        }
        if (!word.empty()) counts[word] += 1.0;
        return counts;
    };
    auto ca = words(a);
    auto cb = words(b);
    std::map<std::string, std::pair<double, double>> merged;
    for (const auto& [w, n] : ca) merged[w].first = n;
    for (const auto& [w, n] : cb) merged[w].second = n;
    double ta = 0, tb = 0;
    for (const auto& [w, n] : merged) {
        ta += n.first;
        tb += n.second;
    }
    std::vector<double> pa, pb;
    for (const auto& [w, n] : merged) {
        pa.push_back(n.first / ta);
        pb.push_back(n.second / tb);
    }
    return {pa, pb};
}

struct EvalCell {
    LocatingStrategy strategy;
    MaskingStrategy masking;
    int k;
    uint64_t seed;

    std::string name() const {
        std::string k_text = k == StegoKey::kAllPositions ? "all" : std::to_string(k);
        return std::string(locating_strategy_name(strategy)) + "_" +
               masking_strategy_name(masking) + "_k" + k_text + "_seed" + std::to_string(seed);
    }
};

int cmd_keygen(const std::string& out, const StegoKey& key) {
    save_key(key, out);
    std::cout << "wrote key " << out << " (" << locating_strategy_name(key.locating_strategy)
              << ", k=" << (key.k_is_all() ? std::string("all") : std::to_string(key.k)) << ", "
              << masking_strategy_name(key.masking_strategy) << ")\n";
    return kExitOk;
}

int cmd_embed(const fs::path& cover_path, const BitMessage& message, const fs::path& key_path,
              const fs::path& out_dir, const fs::path& models_dir, int max_epochs_override,
              const std::string& report_path) {
    StegoKey key = load_key(key_path);
    if (max_epochs_override > 0) key.finetune.max_epochs = max_epochs_override;
    const std::string cover = read_text_file(cover_path);
    const ModelRegistry registry{models_dir};

    const EmbedResult result = embed(cover, message, key, registry, out_dir);

    // The cover file is never rewritten; stego output is the same bytes.
    if (result.stego_text != cover) {
        fail(Errc::backend_failure, "internal error: cover text was altered");
    }

    const fs::path report_file =
        report_path.empty() ? out_dir / "report.json" : fs::path(report_path);
    std::ofstream report(report_file, std::ios::binary);
    if (!report) {
        fail(Errc::io_error, "cannot write report " + report_file.string());
    }
    report << report_to_json(result.report);

    std::cout << "capacity_bits: " << result.capacity_bits << "\n"
              << "message_bits: " << message.declared_length << "\n"
              << "epochs: " << result.report.epochs_run << "\n"
              << "converged: " << (result.report.converged ? "true" : "false") << "\n"
              << "artifact: " << out_dir.string() << "\n";
    if (!result.report.converged) {
        std::cerr << "NonConvergence: extraction is not guaranteed for this artifact\n";
        return kExitNonConvergence;
    }
    return kExitOk;
}

int cmd_extract(const fs::path& stego_path, const fs::path& key_path, const fs::path& artifact_dir,
                const fs::path& models_dir, bool hex_output) {
    const StegoKey key = load_key(key_path);
    const std::string stego = read_text_file(stego_path);
    const ModelRegistry registry{models_dir};
    const ModelArtifact artifact = ModelArtifact::load(artifact_dir);

    const BitMessage message = extract(stego, key, artifact, registry);
    std::cout << (hex_output ? message.to_hex() : message.to_bit_string()) << "\n";
    std::cerr << "bits: " << message.declared_length << " hex: " << message.to_hex() << "\n";
    return kExitOk;
}

struct EvalOptions {
    fs::path cover_path;
    fs::path out_dir;
    fs::path models_dir;
    std::vector<std::string> strategies{"NFW"};
    std::vector<std::string> maskings{"SPAM"};
    std::vector<std::string> ks{"2"};
    std::vector<uint64_t> seeds{42};
    int message_bits = 0;  // 0 = full capacity
    int max_epochs = 30;
    double learning_rate = 1e-3;
    bool with_ppl = false;
    bool with_detection = false;
    std::string report_path;
};

json run_eval_cell(const EvalCell& cell, const std::string& cover, const EvalOptions& opts) {
    StegoKey key;
    key.locating_strategy = cell.strategy;
    key.masking_strategy = cell.masking;
    key.k = cell.k;
    key.finetune.seed = cell.seed;
    key.finetune.max_epochs = opts.max_epochs;
    key.finetune.learning_rate = opts.learning_rate;

    const ModelRegistry registry{opts.models_dir};
    ModelHandle probe =
        ModelHandle::load(registry, key.model_id, key.tokenizer_id, ModelHandle::Mode::inference);

    CoverDocument doc = segment(cover);
    auto filtered = filter_corpus({doc}, key.min_sentence_words);
    if (filtered.empty()) {
        fail(Errc::empty_input, "no sentence satisfies the corpus word minimum");
    }
    const std::string text = filtered[0].raw_text;
    CoverDocument prepared = std::move(filtered[0]);
    annotate_divisibility(prepared, *probe.tokenizer);
    const EmbeddingPlan plan = locate(prepared, key, *probe.tokenizer);

    int bits = opts.message_bits > 0 ? std::min(opts.message_bits, plan.capacity_bits)
                                     : plan.capacity_bits;
    BitMessage message;
    SplitMix64 rng(cell.seed * 1000003ULL + static_cast<uint64_t>(plan.capacity_bits));
    for (int i = 0; i < bits; ++i) message.bits.push_back(static_cast<uint8_t>(rng.next_bit()));
    message.declared_length = bits;

    const fs::path cell_dir = opts.out_dir / cell.name();
    const EmbedResult embedded = embed(text, message, key, registry, cell_dir);
    const ModelArtifact artifact = ModelArtifact::load(cell_dir);

    const TimedExtractResult timed = timed_extract({text}, key, artifact, registry);
    const BitMessage& recovered = timed.messages.at(0);

    // Per-sentence tallies for ESR and ER.
    std::map<int, std::pair<int, int>> site_counts;  // sentence -> (correct, embedded)
    for (int i = 0; i < bits; ++i) {
        auto& [correct, embedded_bits] = site_counts[plan.sites[static_cast<size_t>(i)].sentence_index];
        ++embedded_bits;
        if (i < static_cast<int>(recovered.bits.size()) && recovered.bits[i] == message.bits[i]) {
            ++correct;
        }
    }
    std::vector<std::pair<int, int>> esr_rows;
    for (const auto& [sentence, counts] : site_counts) {
        esr_rows.emplace_back(counts.first, counts.second);
    }
    std::vector<std::pair<int, int>> er_rows;
    for (const auto& sentence : prepared.sentences) {
        const auto it = site_counts.find(sentence.index);
        er_rows.emplace_back(it == site_counts.end() ? 0 : it->second.second,
                             sentence.word_count);
    }

    EvalReport report;
    report.esr = esr(esr_rows);
    report.er = er(er_rows);
    report.et = timed.et_seconds_per_sentence;
    const auto [pc, ps] = unigram_pair(text, text);  // stego text == cover text
    report.kl_cover_stego = kl_divergence(pc, ps);
    if (opts.with_ppl) {
        CausalLmScorer scorer(registry, "tiny-clm-v1");
        std::vector<std::string> sentences;
        for (const auto& s : prepared.sentences) sentences.emplace_back(s.text_in(text));
        report.ppl = ppl(sentences, scorer);
    }
    if (opts.with_detection) {
        std::vector<std::string> sentences;
        for (const auto& s : prepared.sentences) sentences.emplace_back(s.text_in(text));
        report.detection = detection_harness(sentences, sentences, cell.seed);
    }

    json cell_json = json::parse(eval_report_to_json(report));
    cell_json["cell"] = cell.name();
    cell_json["capacity_bits"] = plan.capacity_bits;
    cell_json["message_bits"] = bits;
    cell_json["epochs"] = embedded.report.epochs_run;
    cell_json["converged"] = embedded.report.converged;
    cell_json["esr_by_epoch"] = embedded.report.esr_by_epoch;
    cell_json["extract_bit_exact"] = recovered.bits == message.bits;

    std::ofstream out(cell_dir / "eval.json", std::ios::binary);
    out << cell_json.dump(2) << "\n";
    return cell_json;
}

int cmd_eval(const EvalOptions& opts) {
    const std::string cover = read_text_file(opts.cover_path);
    fs::create_directories(opts.out_dir);

    json summary = json::array();
    for (const auto& strategy : opts.strategies) {
        for (const auto& masking : opts.maskings) {
            for (const auto& k_text : opts.ks) {
                for (uint64_t seed : opts.seeds) {
                    EvalCell cell{locating_strategy_from_name(strategy),
                                  masking_strategy_from_name(masking), parse_k(k_text), seed};
                    try {
                        summary.push_back(run_eval_cell(cell, cover, opts));
                        const auto& row = summary.back();
                        std::cout << std::left << std::setw(26) << cell.name()
                                  << " esr=" << std::fixed << std::setprecision(4)
                                  << row["esr"].get<double>()
                                  << " er=" << row["er"].get<double>()
                                  << " et=" << std::setprecision(6) << row["et"].get<double>()
                                  << " epochs=" << row["epochs"].get<int>()
                                  << (row["converged"].get<bool>() ? "" : " (not converged)")
                                  << "\n";
                    } catch (const StegError& e) {
                        // Keep partial results; report the failed cell.
                        json row{{"cell", cell.name()}, {"error", e.what()}};
                        summary.push_back(row);
                        std::cout << std::left << std::setw(26) << cell.name()
                                  << " error: " << e.what() << "\n";
                    }
                }
            }
        }
    }

    const fs::path summary_path = opts.report_path.empty() ? opts.out_dir / "summary.json"
                                                           : fs::path(opts.report_path);
    std::ofstream out(summary_path, std::ios::binary);
    if (!out) {
        fail(Errc::io_error, "cannot write summary " + summary_path.string());
    }
    out << summary.dump(2) << "\n";
    std::cout << "summary: " << summary_path.string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Text steganography that never edits the carrier: bits live in the rank "
                 "behavior of a fine-tuned masked language model"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string models_dir_flag;
    app.add_option("--models-dir", models_dir_flag,
                   "model registry root (default: $MLMSTEGO_MODEL_DIR or ./models)");

    // keygen
    auto* keygen = app.add_subcommand("keygen", "write a key file");
    std::string kg_out = "key.json";
    std::string kg_strategy = "NFW";
    std::string kg_k = "2";
    std::string kg_masking = "SPAM";
    StegoKey kg_key;
    keygen->add_option("--out", kg_out, "output path");
    keygen->add_option("--strategy", kg_strategy, "NFW | FW | AW");
    keygen->add_option("--k", kg_k, "positions per sentence, integer or 'all'");
    keygen->add_option("--masking", kg_masking, "FPM | SPAM");
    keygen->add_option("--model", kg_key.model_id, "base model id");
    keygen->add_option("--tokenizer", kg_key.tokenizer_id, "tokenizer id");
    keygen->add_option("--min-words", kg_key.min_sentence_words, "sentence word minimum");
    keygen->add_option("--lr", kg_key.finetune.learning_rate, "fine-tune learning rate");
    keygen->add_option("--batch", kg_key.finetune.batch_size, "fine-tune batch size");
    keygen->add_option("--wd", kg_key.finetune.weight_decay, "weight decay");
    keygen->add_option("--max-epochs", kg_key.finetune.max_epochs, "fine-tune epoch cap");
    keygen->add_option("--seed", kg_key.finetune.seed, "training seed");

    // embed
    auto* embed_cmd = app.add_subcommand("embed", "fine-tune an artifact that hides a message");
    std::string em_cover, em_message, em_message_hex, em_key, em_out, em_report;
    int em_max_epochs = 0;
    embed_cmd->add_option("--cover", em_cover, "cover text file")->required();
    embed_cmd->add_option("--message", em_message, "message as a 0/1 string");
    embed_cmd->add_option("--message-hex", em_message_hex, "message as <hex>:<bits>");
    embed_cmd->add_option("--key", em_key, "key file")->required();
    embed_cmd->add_option("--out", em_out, "artifact output directory")->required();
    embed_cmd->add_option("--max-epochs", em_max_epochs, "override the key's epoch cap");
    embed_cmd->add_option("--report", em_report, "training report path");

    // extract
    auto* extract_cmd = app.add_subcommand("extract", "recover the message from a stego text");
    std::string ex_stego, ex_key, ex_artifact;
    bool ex_hex = false;
    extract_cmd->add_option("--stego", ex_stego, "stego text file")->required();
    extract_cmd->add_option("--key", ex_key, "key file")->required();
    extract_cmd->add_option("--artifact", ex_artifact, "artifact directory")->required();
    extract_cmd->add_flag("--hex", ex_hex, "print the hex form instead of bits");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "run an embed/extract sweep and report metrics");
    EvalOptions ev;
    std::string ev_cover, ev_out;
    std::string ev_strategies = "NFW", ev_maskings = "SPAM", ev_ks = "2", ev_seeds = "42";
    eval_cmd->add_option("--cover", ev_cover, "corpus file")->required();
    eval_cmd->add_option("--out", ev_out, "output directory")->required();
    eval_cmd->add_option("--strategy", ev_strategies, "comma list: NFW,FW,AW");
    eval_cmd->add_option("--masking", ev_maskings, "comma list: FPM,SPAM");
    eval_cmd->add_option("--k", ev_ks, "comma list: 1,2,4,8,all");
    eval_cmd->add_option("--seeds,--seed", ev_seeds, "comma list of seeds");
    eval_cmd->add_option("--message-bits", ev.message_bits, "bits per cell (0 = full capacity)");
    eval_cmd->add_option("--max-epochs", ev.max_epochs, "fine-tune epoch cap");
    eval_cmd->add_option("--lr", ev.learning_rate, "fine-tune learning rate");
    eval_cmd->add_flag("--with-ppl", ev.with_ppl, "score perplexity of the stego text");
    eval_cmd->add_flag("--with-detection", ev.with_detection, "run the steganalysis harness");
    eval_cmd->add_option("--report", ev.report_path, "summary path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalidConfig;
    }

    const fs::path models_dir = resolve_models_dir(models_dir_flag);
    auto split_list = [](const std::string& text) {
        std::vector<std::string> out;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (!item.empty()) out.push_back(item);
        }
        return out;
    };

    try {
        if (keygen->parsed()) {
            kg_key.locating_strategy = locating_strategy_from_name(kg_strategy);
            kg_key.masking_strategy = masking_strategy_from_name(kg_masking);
            kg_key.k = parse_k(kg_k);
            kg_key.validate();
            return cmd_keygen(kg_out, kg_key);
        }
        if (embed_cmd->parsed()) {
            return cmd_embed(em_cover, message_from_flags(em_message, em_message_hex), em_key,
                             em_out, models_dir, em_max_epochs, em_report);
        }
        if (extract_cmd->parsed()) {
            return cmd_extract(ex_stego, ex_key, ex_artifact, models_dir, ex_hex);
        }
        if (eval_cmd->parsed()) {
            ev.cover_path = ev_cover;
            ev.out_dir = ev_out;
            ev.models_dir = models_dir;
            ev.strategies = split_list(ev_strategies);
            ev.maskings = split_list(ev_maskings);
            ev.ks = split_list(ev_ks);
            ev.seeds.clear();
            for (const auto& s : split_list(ev_seeds)) ev.seeds.push_back(std::stoull(s));
            return cmd_eval(ev);
        }
    } catch (const StegError& e) {
        std::cerr << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitInvalidConfig;
}
