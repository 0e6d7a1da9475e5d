#pragma once

#include <stdexcept>
#include <string>

namespace bmq {

/// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// ---- data ingestion ----

class MalformedJson : public Error {
public:
    MalformedJson(const std::string& path, size_t line, const std::string& detail)
        : Error(path + ":" + std::to_string(line) + ": malformed JSON: " + detail),
          line_(line) {}
    size_t line() const { return line_; }

private:
    size_t line_;
};

class MissingField : public Error {
public:
    MissingField(const std::string& path, size_t line, const std::string& field)
        : Error(path + ":" + std::to_string(line) + ": missing field '" + field + "'"),
          line_(line), field_(field) {}
    size_t line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    size_t line_;
    std::string field_;
};

class DuplicateId : public Error {
public:
    explicit DuplicateId(const std::string& id) : Error("duplicate id '" + id + "'") {}
};

class BadHeader : public Error {
public:
    explicit BadHeader(const std::string& detail) : Error("bad header: " + detail) {}
};

class NonIntegerGrade : public Error {
public:
    NonIntegerGrade(const std::string& path, size_t line, const std::string& value)
        : Error(path + ":" + std::to_string(line) + ": relevance grade '" + value +
                "' is not a non-negative integer") {}
};

class DuplicateJudgment : public Error {
public:
    DuplicateJudgment(const std::string& query_id, const std::string& doc_id)
        : Error("duplicate judgment for (" + query_id + ", " + doc_id + ")") {}
};

// ---- index ----

class EmptyCorpus : public Error {
public:
    EmptyCorpus() : Error("cannot build an index over an empty corpus") {}
};

class OrdinalOutOfRange : public Error {
public:
    OrdinalOutOfRange(size_t ordinal, size_t count)
        : Error("document ordinal " + std::to_string(ordinal) + " out of range (doc_count=" +
                std::to_string(count) + ")") {}
};

class FormatError : public Error {
public:
    explicit FormatError(const std::string& detail) : Error(detail) {}
};

// ---- backends ----

/// Network or auth failure after the retry budget; retryable at a higher level.
class BackendUnavailable : public Error {
public:
    explicit BackendUnavailable(const std::string& detail)
        : Error("backend unavailable: " + detail) {}
};

class RateLimited : public Error {
public:
    explicit RateLimited(double retry_after_s)
        : Error("rate limited (retry after " + std::to_string(retry_after_s) + "s)"),
          retry_after_s_(retry_after_s) {}
    double retry_after_s() const { return retry_after_s_; }

private:
    double retry_after_s_;
};

/// A replay-mode mock was asked for a prompt it has no fixture for.
/// Treated as a configuration error, not a transient failure.
class ReplayMiss : public Error {
public:
    explicit ReplayMiss(const std::string& hash)
        : Error("replay fixture missing: " + hash), hash_(hash) {}
    const std::string& hash() const { return hash_; }

private:
    std::string hash_;
};

// ---- llm ----

class ParseFailure : public Error {
public:
    explicit ParseFailure(const std::string& detail) : Error("parse failure: " + detail) {}
};

class EmptyGeneration : public Error {
public:
    EmptyGeneration() : Error("backend returned an empty generation") {}
};

// ---- context / pipeline / eval ----

class UnknownLabel : public Error {
public:
    explicit UnknownLabel(const std::string& label)
        : Error("relation label '" + label + "' reached serialization but is not whitelisted") {}
};

class InvalidAlpha : public Error {
public:
    InvalidAlpha() : Error("alpha must be >= 1") {}
};

class EmptyIntersection : public Error {
public:
    EmptyIntersection() : Error("run and qrels share no query ids") {}
};

}  // namespace bmq
