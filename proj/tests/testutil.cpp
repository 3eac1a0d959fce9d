#include "testutil.hpp"

#include <unistd.h>

#include <atomic>
#include <fstream>
#include <sstream>

namespace testutil {

namespace fs = std::filesystem;

fs::path source_root() { return fs::path(MLMSTEGO_SOURCE_ROOT); }
fs::path models_dir() { return source_root() / "models"; }
fs::path corpus_path() { return source_root() / "data" / "corpus" / "desk50.txt"; }

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

const std::string& desk_corpus() {
    static const std::string text = read_file(corpus_path());
    return text;
}

const mlmstego::WordPieceTokenizer& tokenizer() {
    static const mlmstego::WordPieceTokenizer tok =
        mlmstego::WordPieceTokenizer::load(models_dir() / "tiny-mlm-v1" / "vocab.txt");
    return tok;
}

mlmstego::ModelRegistry registry() { return mlmstego::ModelRegistry{models_dir()}; }

fs::path fresh_temp_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    const fs::path dir = fs::temp_directory_path() /
                         ("mlmstego_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                          std::to_string(counter++));
    fs::create_directories(dir);
    return dir;
}

}  // namespace testutil
