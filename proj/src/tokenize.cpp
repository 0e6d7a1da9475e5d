#include "bmq/tokenize.hpp"

namespace bmq {

namespace {

// Locale-independent on purpose: multi-byte UTF-8 sequences act as delimiters.
inline bool is_ascii_alnum(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

inline char to_lower(unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& opts) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (is_ascii_alnum(c)) {
            current.push_back(to_lower(c));
        } else if (!current.empty()) {
            tokens.push_back(opts.stem ? porter_stem(std::move(current)) : std::move(current));
            current.clear();
        }
    }
    if (!current.empty())
        tokens.push_back(opts.stem ? porter_stem(std::move(current)) : std::move(current));
    return tokens;
}

// ---- Porter stemmer ----
//
// Straight transcription of the 1980 algorithm (steps 1a-5b) over lowercase
// ASCII. Words shorter than 3 characters pass through unchanged.

namespace {

bool is_consonant(const std::string& w, size_t i) {
    char c = w[i];
    if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') return false;
    if (c == 'y') return i == 0 ? true : !is_consonant(w, i - 1);
    return true;
}

// m = number of VC sequences in w[0..end)
int measure(const std::string& w, size_t end) {
    int m = 0;
    size_t i = 0;
    while (i < end && is_consonant(w, i)) ++i;
    while (i < end) {
        while (i < end && !is_consonant(w, i)) ++i;
        if (i >= end) break;
        ++m;
        while (i < end && is_consonant(w, i)) ++i;
    }
    return m;
}

bool has_vowel(const std::string& w, size_t end) {
    for (size_t i = 0; i < end; ++i)
        if (!is_consonant(w, i)) return true;
    return false;
}

bool double_consonant(const std::string& w, size_t end) {
    if (end < 2) return false;
    return w[end - 1] == w[end - 2] && is_consonant(w, end - 1);
}

// consonant-vowel-consonant where the final consonant is not w, x or y
bool cvc(const std::string& w, size_t end) {
    if (end < 3) return false;
    if (!is_consonant(w, end - 1) || is_consonant(w, end - 2) || !is_consonant(w, end - 3))
        return false;
    char c = w[end - 1];
    return c != 'w' && c != 'x' && c != 'y';
}

bool ends_with(const std::string& w, size_t end, std::string_view suffix) {
    return end >= suffix.size() &&
           std::string_view(w).substr(end - suffix.size(), suffix.size()) == suffix;
}

struct Rule {
    std::string_view from, to;
    int min_m;
};

// Applies the first matching rule whose stem measure passes; returns new end.
size_t apply_rules(std::string& w, size_t end, std::initializer_list<Rule> rules) {
    for (const Rule& r : rules) {
        if (!ends_with(w, end, r.from)) continue;
        size_t stem_end = end - r.from.size();
        if (measure(w, stem_end) >= r.min_m) {
            w.resize(stem_end);
            w.append(r.to);
            return stem_end + r.to.size();
        }
        return end;  // suffix matched but condition failed: stop scanning
    }
    return end;
}

}  // namespace

std::string porter_stem(std::string w) {
    if (w.size() < 3) return w;
    size_t end = w.size();

    // Step 1a
    if (ends_with(w, end, "sses")) {
        end -= 2;
    } else if (ends_with(w, end, "ies")) {
        end -= 2;
    } else if (ends_with(w, end, "ss")) {
        // keep
    } else if (ends_with(w, end, "s")) {
        end -= 1;
    }
    w.resize(end);

    // Step 1b
    bool extra_step = false;
    if (ends_with(w, end, "eed")) {
        if (measure(w, end - 3) > 0) {
            end -= 1;
            w.resize(end);
        }
    } else if (ends_with(w, end, "ed") && has_vowel(w, end - 2)) {
        end -= 2;
        w.resize(end);
        extra_step = true;
    } else if (ends_with(w, end, "ing") && has_vowel(w, end - 3)) {
        end -= 3;
        w.resize(end);
        extra_step = true;
    }
    if (extra_step) {
        if (ends_with(w, end, "at") || ends_with(w, end, "bl") || ends_with(w, end, "iz")) {
            w.push_back('e');
            ++end;
        } else if (double_consonant(w, end) && !ends_with(w, end, "l") &&
                   !ends_with(w, end, "s") && !ends_with(w, end, "z")) {
            w.resize(--end);
        } else if (measure(w, end) == 1 && cvc(w, end)) {
            w.push_back('e');
            ++end;
        }
    }

    // Step 1c
    if (ends_with(w, end, "y") && has_vowel(w, end - 1)) w[end - 1] = 'i';

    // Step 2
    end = apply_rules(w, end, {{"ational", "ate", 1}, {"tional", "tion", 1}, {"enci", "ence", 1},
                               {"anci", "ance", 1},   {"izer", "ize", 1},    {"abli", "able", 1},
                               {"alli", "al", 1},     {"entli", "ent", 1},   {"eli", "e", 1},
                               {"ousli", "ous", 1},   {"ization", "ize", 1}, {"ation", "ate", 1},
                               {"ator", "ate", 1},    {"alism", "al", 1},    {"iveness", "ive", 1},
                               {"fulness", "ful", 1}, {"ousness", "ous", 1}, {"aliti", "al", 1},
                               {"iviti", "ive", 1},   {"biliti", "ble", 1}});

    // Step 3
    end = apply_rules(w, end, {{"icate", "ic", 1},
                               {"ative", "", 1},
                               {"alize", "al", 1},
                               {"iciti", "ic", 1},
                               {"ical", "ic", 1},
                               {"ful", "", 1},
                               {"ness", "", 1}});

    // Step 4
    {
        static constexpr std::string_view suffixes[] = {
            "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement", "ment",
            "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize"};
        for (std::string_view s : suffixes) {
            if (!ends_with(w, end, s)) continue;
            size_t stem_end = end - s.size();
            if (s == "ion" && stem_end > 0 && w[stem_end - 1] != 's' && w[stem_end - 1] != 't')
                break;
            if (measure(w, stem_end) > 1) {
                end = stem_end;
                w.resize(end);
            }
            break;
        }
    }

    // Step 5a
    if (ends_with(w, end, "e")) {
        int m = measure(w, end - 1);
        if (m > 1 || (m == 1 && !cvc(w, end - 1))) w.resize(--end);
    }
    // Step 5b
    if (measure(w, end) > 1 && double_consonant(w, end) && ends_with(w, end, "l"))
        w.resize(--end);

    return w;
}

}  // namespace bmq
