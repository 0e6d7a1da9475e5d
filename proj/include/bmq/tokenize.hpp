#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace bmq {

struct TokenizerOptions {
    bool stem = false;  // Porter stemmer, off by default
};

/// Lowercases and splits on any non-alphanumeric byte; empty tokens are dropped.
/// No stopword removal. "Crohn's Disease" -> ["crohn", "s", "disease"].
std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& opts = {});

/// Classic Porter (1980) stemmer over a lowercase ASCII word.
std::string porter_stem(std::string word);

}  // namespace bmq
