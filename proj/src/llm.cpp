#include "bmq/llm.hpp"

#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "bmq/hashutil.hpp"
#include "bmq/ontology.hpp"

namespace bmq {

using nlohmann::json;

std::string prompt_cache_key(const ChatRequest& request) {
    if (request.max_tokens < 1) throw FormatError("max_tokens must be >= 1");
    if (request.temperature < 0) throw FormatError("temperature must be >= 0");
    char temp[32];
    std::snprintf(temp, sizeof(temp), "%.6g", request.temperature);
    std::string material = request.model;
    material += '\n';
    material += temp;
    material += '\n';
    material += std::to_string(request.max_tokens);
    material += '\n';
    material += request.system;
    material += '\n';
    material += request.user;
    return sha256_hex(material);
}

// ---- prompt rendering ----

std::string render_term_extraction_prompt(std::string_view query) {
    std::string p =
        "Your task: Extract key medical terms from the query. If the query lacks significant "
        "medical terms, return an empty list.\n"
        "\n"
        "Query: Dietary Treatment of Crohn's Disease\n"
        "Terms: [Dietary Treatment, Crohn's Disease]\n"
        "\n"
        "Query: Neurobiology of Artificial Sweeteners\n"
        "Terms: [Neurobiology, Artificial Sweeteners]\n"
        "\n"
        "Query: Boosting Good Bacteria in the Colon Without Probiotics\n"
        "Terms: [Good Bacteria, Probiotics]\n"
        "\n"
        "Query: Veggies vs. Cancer\n"
        "Terms: [Cancer]\n"
        "\n"
        "Query: Native Americans\n"
        "Terms: []\n"
        "\n";
    p += kFormatSuffix;
    p += "\n\nQuery: ";
    p += query;
    p += "\nTerms: [...]";
    return p;
}

std::string render_generation_prompt(std::string_view query, const SerializedContext& context,
                                     bool cot) {
    std::string p =
        "Given a query, relevant medical definitions and relationships; write an answer to the "
        "query.\n\nQuery: ";
    p += query;
    p += "\n\nDefinitions: ";
    p += context.definitions_text;
    p += "\n\nRelationships: ";
    p += context.relations_text;
    if (cot) {
        p += "\n\n";
        p += kCotSuffix;
    }
    return p;
}

std::string render_paraphrase_prompt(std::string_view query) {
    std::string p = "Paraphrase the following query.\nQuery: ";
    p += query;
    p += "\nParaphrased query:";
    return p;
}

// ---- parsing ----

TermSet parse_terms_response(std::string_view reply) {
    // Last line containing "Terms:" followed by a bracketed list.
    std::optional<std::string_view> interior;
    size_t pos = 0;
    while (pos <= reply.size()) {
        size_t eol = reply.find('\n', pos);
        std::string_view line = reply.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                                : eol - pos);
        size_t tag = line.find("Terms:");
        if (tag != std::string_view::npos) {
            size_t open = line.find('[', tag);
            size_t close = open == std::string_view::npos ? std::string_view::npos
                                                          : line.find(']', open);
            if (open != std::string_view::npos && close != std::string_view::npos)
                interior = line.substr(open + 1, close - open - 1);
        }
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    if (!interior) throw ParseFailure("no 'Terms: [...]' line in reply");

    TermSet out;
    std::string_view rest = *interior;
    while (!rest.empty()) {
        size_t comma = rest.find(',');
        std::string term = trim(rest.substr(0, comma));
        if (term == "...") term.clear();  // the format template placeholder, not a term
        if (!term.empty()) out.terms.push_back(std::move(term));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
    }
    return out;
}

// ---- operations ----

TermExtraction extract_terms(std::string_view query, LlmBackend& backend,
                             const LlmOptions& opts) {
    ChatRequest req;
    req.model = opts.model;
    req.system = kSystemPrompt;
    req.user = render_term_extraction_prompt(query);
    req.temperature = 0.0;
    req.max_tokens = opts.extraction_max_tokens;

    TermExtraction result;
    for (int attempt = 1; attempt <= 2; ++attempt) {
        result.attempts = attempt;
        ChatReply reply = backend.complete(req);
        try {
            result.terms = parse_terms_response(reply.text);
            return result;
        } catch (const ParseFailure&) {
            if (attempt == 2) break;
            // retry once with the format-enforcement suffix re-appended
            req.user += "\n\n";
            req.user += kFormatSuffix;
        }
    }
    result.terms = TermSet{};
    result.fallback = true;
    return result;
}

PseudoDocument generate_pseudo_document(std::string_view query, const SerializedContext& context,
                                        LlmBackend& backend, bool cot, const LlmOptions& opts) {
    ChatRequest req;
    req.model = opts.model;
    req.system = kSystemPrompt;
    req.user = render_generation_prompt(query, context, cot);
    req.temperature = opts.generation_temperature;
    req.max_tokens = opts.generation_max_tokens;

    ChatReply reply = backend.complete(req);
    if (trim(reply.text).empty()) throw EmptyGeneration();
    return {reply.text, opts.model, reply.prompt_hash, reply.cache_hit};
}

std::string paraphrase_query(std::string_view query, LlmBackend& backend,
                             const LlmOptions& opts) {
    ChatRequest req;
    req.model = opts.model;
    req.system = kSystemPrompt;
    req.user = render_paraphrase_prompt(query);
    req.temperature = 0.0;
    req.max_tokens = opts.extraction_max_tokens;

    ChatReply reply = backend.complete(req);
    std::string text = reply.text;
    const std::string_view prefix = "Paraphrased query:";
    // First non-empty line, with any echoed prefix stripped.
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        std::string candidate = trim(line);
        if (candidate.rfind(prefix, 0) == 0)
            candidate = trim(candidate.substr(prefix.size()));
        if (!candidate.empty()) return candidate;
    }
    throw EmptyGeneration();
}

// ---- cached / replay backends ----

std::filesystem::path CachedLlm::record_path(const std::filesystem::path& cache_dir,
                                             const std::string& hash) {
    return cache_dir / "llm" / hash.substr(0, 2) / (hash + ".json");
}

CachedLlm::CachedLlm(std::shared_ptr<LlmBackend> inner, std::filesystem::path cache_dir)
    : inner_(std::move(inner)), cache_dir_(std::move(cache_dir)) {}

std::string CachedLlm::name() const { return inner_->name() + "+cache"; }

ChatReply CachedLlm::complete(const ChatRequest& request) {
    const std::string hash = prompt_cache_key(request);
    const auto path = record_path(cache_dir_, hash);
    {
        std::ifstream in(path, std::ios::binary);
        if (in) {
            json rec = json::parse(in, nullptr, false);
            if (!rec.is_discarded() && rec.contains("reply"))
                return {rec["reply"].get<std::string>(), true, hash};
        }
    }
    ChatReply fresh = inner_->complete(request);
    json rec{{"request",
              {{"model", request.model},
               {"system", request.system},
               {"user", request.user},
               {"temperature", request.temperature},
               {"max_tokens", request.max_tokens}}},
             {"reply", fresh.text},
             {"timestamp", std::chrono::duration_cast<std::chrono::seconds>(
                               std::chrono::system_clock::now().time_since_epoch())
                               .count()}};
    atomic_write_file(path, rec.dump(2) + "\n");
    return {fresh.text, false, hash};
}

ReplayLlm::ReplayLlm(std::filesystem::path fixture_dir) : dir_(std::move(fixture_dir)) {}

ChatReply ReplayLlm::complete(const ChatRequest& request) {
    const std::string hash = prompt_cache_key(request);
    std::ifstream in(CachedLlm::record_path(dir_, hash), std::ios::binary);
    if (in) {
        json rec = json::parse(in, nullptr, false);
        if (!rec.is_discarded() && rec.contains("reply"))
            return {rec["reply"].get<std::string>(), true, hash};
    }
    throw ReplayMiss(hash);
}

// ---- canned backend ----

namespace {

std::string_view last_query_line(std::string_view user) {
    size_t pos = user.rfind("Query: ");
    if (pos == std::string_view::npos) return user;
    size_t start = pos + 7;
    size_t eol = user.find('\n', start);
    return user.substr(start, eol == std::string_view::npos ? std::string_view::npos
                                                            : eol - start);
}

bool is_small_word(std::string_view w) {
    static const char* kSmall[] = {"The", "A",  "An",  "Of", "In", "On", "And", "Or",
                                   "What", "How", "Why", "Is", "Are", "Does", "Can", "Vs"};
    for (const char* s : kSmall)
        if (w == s) return true;
    return false;
}

// Maximal runs of capitalized words, cleaned of surrounding punctuation.
std::vector<std::string> capitalized_phrases(std::string_view text) {
    std::vector<std::string> words;
    std::string current;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!current.empty()) words.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) words.push_back(current);

    auto clean = [](std::string w) {
        size_t b = 0, e = w.size();
        while (b < e && !std::isalnum(static_cast<unsigned char>(w[b]))) ++b;
        while (e > b && !std::isalnum(static_cast<unsigned char>(w[e - 1]))) --e;
        return w.substr(b, e - b);
    };

    std::vector<std::string> phrases;
    std::string run;
    size_t run_len = 0;
    auto flush = [&] {
        if (!run.empty() && !(run_len == 1 && is_small_word(run))) phrases.push_back(run);
        run.clear();
        run_len = 0;
    };
    for (std::string& raw : words) {
        std::string w = clean(std::move(raw));
        const bool starts_upper = !w.empty() && w[0] >= 'A' && w[0] <= 'Z';
        // digits continue a run ("Type 1 Diabetes") but never start one
        const bool continues = starts_upper ||
                               (!run.empty() && !w.empty() && w[0] >= '0' && w[0] <= '9');
        if (continues) {
            if (!run.empty()) run += " ";
            run += w;
            ++run_len;
        } else {
            flush();
        }
    }
    flush();
    return phrases;
}

std::string canned_terms_reply(std::string_view query) {
    struct Example {
        std::string_view query, reply;
    };
    static constexpr Example kExamples[] = {
        {"Dietary Treatment of Crohn's Disease", "Terms: [Dietary Treatment, Crohn's Disease]"},
        {"Neurobiology of Artificial Sweeteners", "Terms: [Neurobiology, Artificial Sweeteners]"},
        {"Boosting Good Bacteria in the Colon Without Probiotics",
         "Terms: [Good Bacteria, Probiotics]"},
        {"Veggies vs. Cancer", "Terms: [Cancer]"},
        {"Native Americans", "Terms: []"},
    };
    const std::string trimmed = trim(query);
    for (const Example& ex : kExamples)
        if (trimmed == ex.query) return std::string(ex.reply);

    std::string reply = "Terms: [";
    bool first = true;
    for (const std::string& phrase : capitalized_phrases(trimmed)) {
        if (!first) reply += ", ";
        first = false;
        reply += phrase;
    }
    reply += "]";
    return reply;
}

std::string truncate_words(std::string_view text, int max_words) {
    std::istringstream in{std::string(text)};
    std::string word, out;
    int n = 0;
    while (n < max_words && in >> word) {
        if (n > 0) out += " ";
        out += word;
        ++n;
    }
    return out;
}

}  // namespace

ChatReply CannedLlm::complete(const ChatRequest& request) {
    const std::string hash = prompt_cache_key(request);
    const std::string& user = request.user;

    if (user.find("Extract key medical terms") != std::string::npos)
        return {canned_terms_reply(last_query_line(user)), false, hash};

    if (user.rfind("Paraphrase the following query.", 0) == 0)
        return {std::string(last_query_line(user)), false, hash};

    if (user.find("write an answer to the query") != std::string::npos) {
        // Echo the grounded context so ablation modes produce distinct text.
        std::string body = "Answer: ";
        body += last_query_line(user);
        size_t defs = user.find("\n\nDefinitions: ");
        if (defs != std::string::npos) {
            body += " ";
            body += user.substr(defs + 15);
        }
        std::string flat;
        for (char c : body) flat += (c == '\n' ? ' ' : c);
        return {truncate_words(flat, request.max_tokens), false, hash};
    }

    return {request.user, false, hash};
}

}  // namespace bmq
