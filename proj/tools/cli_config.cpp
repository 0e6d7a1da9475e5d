#include "cli_config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bmq/ontology.hpp"  // trim

namespace bmq::cli {

void LayeredConfig::declare(const std::string& key, const std::string& default_value,
                            const std::string& env_var) {
    entries_[key] = Entry{default_value, "default", env_var};
}

LayeredConfig::Entry& LayeredConfig::require(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw Error("unknown config key '" + key + "'");
    return it->second;
}

const LayeredConfig::Entry& LayeredConfig::require(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw Error("unknown config key '" + key + "'");
    return it->second;
}

namespace {

std::string strip_quotes(const std::string& v) {
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') ||
                          (v.front() == '\'' && v.back() == '\'')))
        return v.substr(1, v.size() - 2);
    return v;
}

std::string json_scalar_to_string(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_float()) {
        std::ostringstream out;
        out << v.get<double>();
        return out.str();
    }
    throw Error("config values must be scalars");
}

}  // namespace

void LayeredConfig::apply_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open config file " + path.string());
    const std::string source = "file " + path.string();

    if (path.extension() == ".json") {
        nlohmann::json root = nlohmann::json::parse(in, nullptr, false);
        if (root.is_discarded() || !root.is_object())
            throw Error(path.string() + ": not a JSON object");
        for (const auto& [section, body] : root.items()) {
            if (!body.is_object())
                throw Error(path.string() + ": section '" + section + "' must be an object");
            for (const auto& [key, value] : body.items()) {
                Entry& e = require(section + "." + key);
                e.value = json_scalar_to_string(value);
                e.source = source;
            }
        }
        return;
    }

    // TOML subset: [section] lines, key = value, # comments.
    std::string line, section;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw Error(path.string() + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        auto hash = value.find(" #");
        if (hash != std::string::npos && value.front() != '"') value = trim(value.substr(0, hash));
        const std::string full = section.empty() ? key : section + "." + key;
        Entry& e = require(full);  // unknown keys are hard errors
        e.value = strip_quotes(value);
        e.source = source;
    }
}

void LayeredConfig::apply_env() {
    for (auto& [key, entry] : entries_) {
        if (entry.env_var.empty()) continue;
        if (const char* v = std::getenv(entry.env_var.c_str())) {
            entry.value = v;
            entry.source = "env " + entry.env_var;
        }
    }
}

void LayeredConfig::apply_flag(const std::string& key, const std::string& value) {
    Entry& e = require(key);
    e.value = value;
    e.source = "flag";
}

const std::string& LayeredConfig::get(const std::string& key) const {
    return require(key).value;
}

double LayeredConfig::get_double(const std::string& key) const {
    const Entry& e = require(key);
    try {
        size_t pos = 0;
        double v = std::stod(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw Error("config key '" + key + "': '" + e.value + "' is not a number");
    }
}

int LayeredConfig::get_int(const std::string& key) const {
    const Entry& e = require(key);
    try {
        size_t pos = 0;
        int v = std::stoi(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw Error("config key '" + key + "': '" + e.value + "' is not an integer");
    }
}

bool LayeredConfig::get_bool(const std::string& key) const {
    const Entry& e = require(key);
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no" || e.value.empty()) return false;
    throw Error("config key '" + key + "': '" + e.value + "' is not a boolean");
}

std::string LayeredConfig::render_show() const {
    std::ostringstream out;
    for (const auto& [key, entry] : entries_) {
        std::string shown = entry.value;
        // keep secrets out of terminals and logs
        if (key.find("api_key") != std::string::npos && !shown.empty())
            shown = std::string(4, '*') + shown.substr(shown.size() < 4 ? 0 : shown.size() - 4);
        out << key << " = " << shown << "  (" << entry.source << ")\n";
    }
    return out.str();
}

}  // namespace bmq::cli
