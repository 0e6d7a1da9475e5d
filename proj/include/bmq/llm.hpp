#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bmq/context.hpp"
#include "bmq/errors.hpp"

namespace bmq {

struct ChatRequest {
    std::string model;
    std::string system;
    std::string user;
    double temperature = 0.0;  // >= 0
    int max_tokens = 512;      // >= 1
};

struct ChatReply {
    std::string text;
    bool cache_hit = false;
    std::string prompt_hash;
};

/// SHA-256 over (model, temperature, max_tokens, system, user).
std::string prompt_cache_key(const ChatRequest& request);

class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    virtual ChatReply complete(const ChatRequest& request) = 0;
    virtual std::string name() const = 0;
};

// ---- prompt rendering (pure; golden-tested) ----

inline constexpr const char* kSystemPrompt = "You are a biomedical information retrieval assistant.";
inline constexpr const char* kFormatSuffix =
    "Strictly follow the output format.\nOutput format:\nTerms: [term1, term2, ...]";
inline constexpr const char* kCotSuffix = "Give the rationale before answering";

std::string render_term_extraction_prompt(std::string_view query);
std::string render_generation_prompt(std::string_view query, const SerializedContext& context,
                                     bool cot);
std::string render_paraphrase_prompt(std::string_view query);

// ---- operations ----

struct TermSet {
    std::vector<std::string> terms;  // trimmed, non-empty entries; the set may be empty
    bool operator==(const TermSet&) const = default;
};

/// Finds the last line of the reply matching "Terms: [ ... ]" and splits the
/// bracket interior on commas. Throws ParseFailure when no such line exists.
TermSet parse_terms_response(std::string_view reply);

struct TermExtraction {
    TermSet terms;
    int attempts = 1;
    bool fallback = false;  // both parses failed; terms is empty
};

struct PseudoDocument {
    std::string text;
    std::string model;
    std::string prompt_hash;
    bool cache_hit = false;
};

struct LlmOptions {
    std::string model = "default";
    double generation_temperature = 1.0;
    int generation_max_tokens = 512;
    int extraction_max_tokens = 256;
};

/// One retry with the format suffix re-appended; second failure degrades to
/// the empty set (the pipeline's empty-term path) with fallback = true.
TermExtraction extract_terms(std::string_view query, LlmBackend& backend,
                             const LlmOptions& opts = {});

PseudoDocument generate_pseudo_document(std::string_view query, const SerializedContext& context,
                                        LlmBackend& backend, bool cot,
                                        const LlmOptions& opts = {});

std::string paraphrase_query(std::string_view query, LlmBackend& backend,
                             const LlmOptions& opts = {});

// ---- backends ----

/// Caches replies under dir/llm/<first2>/<hash>.json (atomic writes); safe
/// under concurrent writers. The stored record is also what replay serves.
class CachedLlm : public LlmBackend {
public:
    CachedLlm(std::shared_ptr<LlmBackend> inner, std::filesystem::path cache_dir);
    ChatReply complete(const ChatRequest& request) override;
    std::string name() const override;

    static std::filesystem::path record_path(const std::filesystem::path& cache_dir,
                                             const std::string& hash);

private:
    std::shared_ptr<LlmBackend> inner_;
    std::filesystem::path cache_dir_;
};

/// Serves recorded cache records only; a miss is a configuration error.
class ReplayLlm : public LlmBackend {
public:
    explicit ReplayLlm(std::filesystem::path fixture_dir);
    ChatReply complete(const ChatRequest& request) override;
    std::string name() const override { return "mock:replay"; }

private:
    std::filesystem::path dir_;
};

/// Deterministic synthetic replies: answers the five in-context term
/// extraction examples per their published mapping, falls back to
/// capitalized-phrase extraction otherwise; echoes query + context for
/// generation; identity paraphrase.
class CannedLlm : public LlmBackend {
public:
    ChatReply complete(const ChatRequest& request) override;
    std::string name() const override { return "mock:canned"; }
};

struct HttpLlmConfig {
    std::string base_url;  // from LLM_API_BASE when empty
    std::string api_key;   // from LLM_API_KEY when empty
    int max_retries = 4;
    int timeout_s = 120;
    int max_in_flight = 4;
};

/// JSON-over-HTTP chat-completion client (POST <base>/chat/completions).
class HttpLlmBackend : public LlmBackend {
public:
    explicit HttpLlmBackend(HttpLlmConfig config);
    ~HttpLlmBackend() override;
    ChatReply complete(const ChatRequest& request) override;
    std::string name() const override { return "http"; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace bmq
