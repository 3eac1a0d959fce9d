#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mlmstego/segment.hpp"
#include "testutil.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::string& args, const fs::path& workdir) {
    const fs::path out_file = workdir / "stdout.txt";
    const fs::path err_file = workdir / "stderr.txt";
    const std::string command = std::string("cd '") + workdir.string() + "' && '" +
                                MLMSTEGO_CLI_PATH + "' " + args + " > '" + out_file.string() +
                                "' 2> '" + err_file.string() + "'";
    const int status = std::system(command.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = testutil::read_file(out_file);
    result.err = testutil::read_file(err_file);
    return result;
}

std::string first_line(const std::string& text) {
    const auto nl = text.find('\n');
    return nl == std::string::npos ? text : text.substr(0, nl);
}

// Small cover: first four corpus sentences.
fs::path write_toy_cover(const fs::path& dir) {
    const auto doc = mlmstego::segment(testutil::desk_corpus());
    std::string text;
    for (int i = 0; i < 4; ++i) {
        text += std::string(doc.sentences[static_cast<size_t>(i)].text_in(doc.raw_text));
        text.push_back('\n');
    }
    const fs::path path = dir / "cover.txt";
    std::ofstream(path, std::ios::binary) << text;
    return path;
}

std::string models_flag() {
    return "--models-dir '" + testutil::models_dir().string() + "'";
}

}  // namespace

TEST_CASE("cli: keygen writes usable defaults and rejects bad k") {
    const auto dir = testutil::fresh_temp_dir("cli_keygen");
    auto result = run_cli("keygen --out key.json", dir);
    REQUIRE(result.exit_code == 0);

    const json key = json::parse(testutil::read_file(dir / "key.json"));
    CHECK(key.at("locating_strategy") == "NFW");
    CHECK(key.at("k") == 2);
    CHECK(key.at("masking_strategy") == "SPAM");
    CHECK(key.at("schema_version") == 1);

    CHECK(run_cli("keygen --out bad.json --k 0", dir).exit_code == 2);

    auto all_aw = run_cli("keygen --out aw.json --strategy AW --k all", dir);
    REQUIRE(all_aw.exit_code == 0);
    const json aw = json::parse(testutil::read_file(dir / "aw.json"));
    CHECK(aw.at("k") == "all");
    CHECK(aw.at("locating_strategy") == "AW");
}

TEST_CASE("cli: embed/extract round trip, idempotent and byte-preserving") {
    const auto dir = testutil::fresh_temp_dir("cli_roundtrip");
    const auto cover = write_toy_cover(dir);
    const std::string cover_before = testutil::read_file(cover);

    REQUIRE(run_cli("keygen --out key.json --max-epochs 25", dir).exit_code == 0);

    const std::string message = "10110100";
    auto embed = run_cli("embed --cover cover.txt --message " + message +
                             " --key key.json --out artifact " + models_flag(),
                         dir);
    INFO(embed.err);
    REQUIRE(embed.exit_code == 0);
    CHECK(embed.out.find("capacity_bits: 8") != std::string::npos);
    CHECK(embed.out.find("converged: true") != std::string::npos);
    CHECK(testutil::read_file(cover) == cover_before);  // cover never rewritten
    CHECK(fs::exists(dir / "artifact" / "manifest.json"));
    CHECK(fs::exists(dir / "artifact" / "weights.bin"));
    CHECK(fs::exists(dir / "artifact" / "report.json"));

    auto extract1 = run_cli("extract --stego cover.txt --key key.json --artifact artifact " +
                                models_flag(),
                            dir);
    REQUIRE(extract1.exit_code == 0);
    CHECK(first_line(extract1.out) == message);

    auto extract2 = run_cli("extract --stego cover.txt --key key.json --artifact artifact " +
                                models_flag(),
                            dir);
    CHECK(extract2.out == extract1.out);

    auto hex = run_cli("extract --stego cover.txt --key key.json --artifact artifact --hex " +
                           models_flag(),
                       dir);
    REQUIRE(hex.exit_code == 0);
    CHECK(first_line(hex.out) == "b4:8");
}

TEST_CASE("cli: embedding is deterministic across processes") {
    const auto dir = testutil::fresh_temp_dir("cli_determinism");
    write_toy_cover(dir);
    REQUIRE(run_cli("keygen --out key.json --max-epochs 25", dir).exit_code == 0);

    const std::string args = "embed --cover cover.txt --message 1011 --key key.json ";
    REQUIRE(run_cli(args + "--out a --report a_report.json " + models_flag(), dir).exit_code == 0);
    REQUIRE(run_cli(args + "--out b " + models_flag(), dir).exit_code == 0);

    const json ma = json::parse(testutil::read_file(dir / "a" / "manifest.json"));
    const json mb = json::parse(testutil::read_file(dir / "b" / "manifest.json"));
    CHECK(ma.at("weights_sha256") == mb.at("weights_sha256"));
    CHECK(ma.at("plan_fingerprint") == mb.at("plan_fingerprint"));
    CHECK(fs::exists(dir / "a_report.json"));  // --report override path
}

TEST_CASE("cli: error paths use distinct exit codes") {
    const auto dir = testutil::fresh_temp_dir("cli_errors");
    const auto cover = write_toy_cover(dir);
    REQUIRE(run_cli("keygen --out key.json --max-epochs 25", dir).exit_code == 0);

    // Message longer than the 8-bit capacity.
    auto overflow = run_cli("embed --cover cover.txt --message 111111111 --key key.json "
                            "--out artifact " + models_flag(),
                            dir);
    CHECK(overflow.exit_code == 4);

    // Unreadable cover path.
    auto missing = run_cli("embed --cover nope.txt --message 1 --key key.json --out artifact " +
                               models_flag(),
                           dir);
    CHECK(missing.exit_code == 3);

    // Build one artifact, then extract with a drifted key.
    REQUIRE(run_cli("embed --cover cover.txt --message 1011 --key key.json --out artifact " +
                        models_flag(),
                    dir).exit_code == 0);
    REQUIRE(run_cli("keygen --out other.json --k 3 --max-epochs 25", dir).exit_code == 0);
    auto mismatch = run_cli("extract --stego cover.txt --key other.json --artifact artifact " +
                                models_flag(),
                            dir);
    CHECK(mismatch.exit_code == 6);

    // Tamper with a manifest value; the manifest digest must catch it.
    {
        auto manifest = json::parse(testutil::read_file(dir / "artifact" / "manifest.json"));
        manifest["declared_length"] = manifest["declared_length"].get<int>() + 1;
        std::ofstream out(dir / "artifact" / "manifest.json", std::ios::binary);
        out << manifest.dump(2) << "\n";
    }
    auto corrupt = run_cli("extract --stego cover.txt --key key.json --artifact artifact " +
                               models_flag(),
                           dir);
    CHECK(corrupt.exit_code == 7);
}

TEST_CASE("cli: non-convergence exits distinctly but still saves the artifact") {
    const auto dir = testutil::fresh_temp_dir("cli_nonconv");
    write_toy_cover(dir);
    REQUIRE(run_cli("keygen --out key.json", dir).exit_code == 0);

    // One epoch cannot flip eight sites to rank 1.
    auto embed = run_cli("embed --cover cover.txt --message 00000000 --key key.json "
                         "--out artifact --max-epochs 1 " + models_flag(),
                         dir);
    CHECK(embed.exit_code == 5);
    CHECK(embed.out.find("converged: false") != std::string::npos);
    CHECK(fs::exists(dir / "artifact" / "manifest.json"));
    CHECK(fs::exists(dir / "artifact" / "weights.bin"));
    CHECK(fs::exists(dir / "artifact" / "report.json"));
    const json report = json::parse(testutil::read_file(dir / "artifact" / "report.json"));
    CHECK(report.at("converged") == false);
    CHECK(report.at("epochs_run") == 1);
}

TEST_CASE("cli: empty message artifact extracts an empty line") {
    const auto dir = testutil::fresh_temp_dir("cli_empty");
    write_toy_cover(dir);
    REQUIRE(run_cli("keygen --out key.json --max-epochs 25", dir).exit_code == 0);
    REQUIRE(run_cli("embed --cover cover.txt --message \"\" --key key.json --out artifact " +
                        models_flag(),
                    dir).exit_code == 0);
    auto extracted = run_cli("extract --stego cover.txt --key key.json --artifact artifact " +
                                 models_flag(),
                             dir);
    REQUIRE(extracted.exit_code == 0);
    CHECK(first_line(extracted.out).empty());
}

TEST_CASE("cli: eval emits per-cell reports and a summary") {
    const auto dir = testutil::fresh_temp_dir("cli_eval");
    const fs::path cover = dir / "corpus.txt";
    {
        const auto doc = mlmstego::segment(testutil::desk_corpus());
        std::string text;
        for (int i = 0; i < 6; ++i) {
            text += std::string(doc.sentences[static_cast<size_t>(i)].text_in(doc.raw_text));
            text.push_back('\n');
        }
        std::ofstream(cover, std::ios::binary) << text;
    }

    auto eval = run_cli("eval --cover corpus.txt --out evalout --k 1,2 --seeds 7 "
                        "--message-bits 6 --max-epochs 25 " + models_flag(),
                        dir);
    INFO(eval.out + eval.err);
    REQUIRE(eval.exit_code == 0);

    const json summary = json::parse(testutil::read_file(dir / "evalout" / "summary.json"));
    REQUIRE(summary.size() == 2);
    for (const auto& cell : summary) {
        REQUIRE(!cell.contains("error"));
        CHECK(cell.at("esr") == 1.0);
        CHECK(cell.at("extract_bit_exact") == true);
        CHECK(cell.at("kl_cover_stego") == 0.0);
    }
    CHECK(fs::exists(dir / "evalout" / "NFW_SPAM_k1_seed7" / "eval.json"));
    CHECK(fs::exists(dir / "evalout" / "NFW_SPAM_k2_seed7" / "eval.json"));
}
