#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace bmq::testing {

inline std::filesystem::path fixture_dir() { return BMQ_FIXTURE_DIR; }

/// Unique scratch directory, removed on destruction.
class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        std::mt19937_64 rng{std::random_device{}()};
        dir_ = base / ("bmq_test_" + std::to_string(rng()));
        std::filesystem::create_directories(dir_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(dir_, ec);
    }
    const std::filesystem::path& path() const { return dir_; }
    std::filesystem::path operator/(const std::string& name) const { return dir_ / name; }

private:
    std::filesystem::path dir_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Random lowercase word from a bounded vocabulary, for corpus generators.
inline std::string vocab_word(std::mt19937& rng, int vocab_size) {
    std::uniform_int_distribution<int> pick(0, vocab_size - 1);
    int v = pick(rng);
    std::string w = "w" + std::to_string(v);
    return w;
}

inline std::vector<std::string> random_tokens(std::mt19937& rng, int max_len, int vocab_size) {
    std::uniform_int_distribution<int> len(1, max_len);
    std::vector<std::string> out;
    const int n = len(rng);
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(vocab_word(rng, vocab_size));
    return out;
}

}  // namespace bmq::testing
