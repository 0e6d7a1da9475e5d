#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bmq/errors.hpp"

namespace bmq::cli {

/// Layered key-value config: defaults < file (bmq.toml or JSON) < environment
/// < command-line flags. Every key remembers where its value came from so
/// `config show` can print full provenance.
class LayeredConfig {
public:
    void declare(const std::string& key, const std::string& default_value,
                 const std::string& env_var = "");

    /// TOML-style sections ([bm25] k1 = 0.9) or a JSON object of sections.
    void apply_file(const std::filesystem::path& path);
    void apply_env();
    void apply_flag(const std::string& key, const std::string& value);

    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;

    std::string render_show() const;

private:
    struct Entry {
        std::string value;
        std::string source = "default";
        std::string env_var;
    };
    std::map<std::string, Entry> entries_;

    Entry& require(const std::string& key);
    const Entry& require(const std::string& key) const;
};

}  // namespace bmq::cli
