#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <semaphore>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "bmq/hashutil.hpp"
#include "bmq/ontology.hpp"

namespace bmq {

using nlohmann::json;

namespace {

struct ParsedUrl {
    bool https = true;
    std::string host_port;  // "host" or "host:port"
    std::string path_prefix;
};

ParsedUrl parse_base_url(const std::string& base) {
    ParsedUrl u;
    std::string rest = base;
    if (rest.rfind("https://", 0) == 0) {
        rest = rest.substr(8);
    } else if (rest.rfind("http://", 0) == 0) {
        u.https = false;
        rest = rest.substr(7);
    }
    auto slash = rest.find('/');
    u.host_port = rest.substr(0, slash);
    u.path_prefix = slash == std::string::npos ? "" : rest.substr(slash);
    while (!u.path_prefix.empty() && u.path_prefix.back() == '/') u.path_prefix.pop_back();
    return u;
}

std::string url_encode(std::string_view s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
            c == '-' || c == '_' || c == '.' || c == '~')
            out.push_back(static_cast<char>(c));
        else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xf]);
        }
    }
    return out;
}

std::string cui_from_uri(const std::string& uri_or_cui) {
    auto slash = uri_or_cui.rfind('/');
    return slash == std::string::npos ? uri_or_cui : uri_or_cui.substr(slash + 1);
}

}  // namespace

struct UmlsRestClient::Impl {
    UmlsClientConfig config;
    ParsedUrl url;
    std::counting_semaphore<256> in_flight;

    explicit Impl(UmlsClientConfig cfg)
        : config(std::move(cfg)),
          url(parse_base_url(config.base_url)),
          in_flight(std::clamp(config.max_in_flight, 1, 256)) {
        if (config.api_key.empty())
            if (const char* key = std::getenv("UMLS_API_KEY")) config.api_key = key;
    }

    std::filesystem::path cache_path(const std::string& request) const {
        const std::string h = sha256_hex(request);
        return config.cache_dir / "ontology" / h.substr(0, 2) / (h + ".json");
    }

    // GET with retries and optional disk cache. `request` is path + query
    // without the api key, which also serves as the cache key.
    json get_json(const std::string& request) {
        if (!config.cache_dir.empty() && !config.refresh) {
            std::ifstream in(cache_path(request), std::ios::binary);
            if (in) {
                json cached = json::parse(in, nullptr, false);
                if (!cached.is_discarded()) return cached.at("body");
            }
        }

        const std::string sep = request.find('?') == std::string::npos ? "?" : "&";
        const std::string full =
            url.path_prefix + request + sep + "apiKey=" + url_encode(config.api_key);

        std::string last_error = "no attempt made";
        for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
            if (attempt > 0) {
                auto delay = std::chrono::milliseconds(250 * (1 << (attempt - 1)));
                std::this_thread::sleep_for(delay);
            }
            in_flight.acquire();
            httplib::Result res = [&] {
                if (url.https) {
                    httplib::SSLClient client(url.host_port);
                    client.set_read_timeout(config.timeout_s, 0);
                    client.set_connection_timeout(config.timeout_s, 0);
                    return client.Get(full);
                }
                httplib::Client client(url.host_port);
                client.set_read_timeout(config.timeout_s, 0);
                client.set_connection_timeout(config.timeout_s, 0);
                return client.Get(full);
            }();
            in_flight.release();

            if (!res) {
                last_error = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status == 429) {
                double retry_after = 1.0;
                if (res->has_header("Retry-After"))
                    retry_after = std::atof(res->get_header_value("Retry-After").c_str());
                if (attempt == config.max_retries) throw RateLimited(retry_after);
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(static_cast<long>(retry_after * 1000)));
                continue;
            }
            if (res->status == 404) {
                // UMLS returns 404 for concepts with no definitions/relations.
                json empty{{"result", json::array()}};
                store_cache(request, empty);
                return empty;
            }
            if (res->status >= 500) {
                last_error = "server status " + std::to_string(res->status);
                continue;
            }
            if (res->status != 200) {
                throw BackendUnavailable("status " + std::to_string(res->status) + " for " +
                                         request);
            }
            json body = json::parse(res->body, nullptr, false);
            if (body.is_discarded()) {
                last_error = "invalid JSON in response";
                continue;
            }
            store_cache(request, body);
            return body;
        }
        throw BackendUnavailable(last_error + " for " + request);
    }

    void store_cache(const std::string& request, const json& body) {
        if (config.cache_dir.empty()) return;
        json record{{"request", request},
                    {"body", body},
                    {"timestamp", std::chrono::duration_cast<std::chrono::seconds>(
                                      std::chrono::system_clock::now().time_since_epoch())
                                      .count()}};
        atomic_write_file(cache_path(request), record.dump());
    }
};

UmlsRestClient::UmlsRestClient(UmlsClientConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

UmlsRestClient::~UmlsRestClient() = default;

std::optional<std::pair<Cui, std::string>> UmlsRestClient::link_concept(std::string_view term) {
    const std::string trimmed = trim(term);
    if (trimmed.empty()) return std::nullopt;
    json body = impl_->get_json("/search/current?string=" + url_encode(trimmed) +
                                "&searchType=exact&pageNumber=1&pageSize=25");
    const json& results = body.contains("result") && body["result"].contains("results")
                              ? body["result"]["results"]
                              : json::array();
    for (const json& hit : results) {
        const std::string ui = hit.value("ui", "");
        if (ui.empty() || ui == "NONE") continue;  // legacy no-result sentinel
        return std::make_pair(Cui(ui), hit.value("name", ui));
    }
    return std::nullopt;
}

std::vector<DefinitionEntry> UmlsRestClient::fetch_definitions(const Cui& cui) {
    json body =
        impl_->get_json("/content/current/CUI/" + cui.value() + "/definitions?pageSize=200");
    std::vector<DefinitionEntry> out;
    if (!body.contains("result")) return out;
    for (const json& entry : body["result"]) {
        const std::string source = entry.value("rootSource", "");
        if (!is_allowed_vocabulary(source)) continue;
        out.push_back({entry.value("value", ""), source});
    }
    return out;
}

SemanticGraph UmlsRestClient::fetch_neighborhood(const Cui& cui) {
    SemanticGraph g(cui, cui.value());

    // Resolve the center's preferred name.
    json info = impl_->get_json("/content/current/CUI/" + cui.value());
    if (info.contains("result") && info["result"].is_object())
        g.center_name = info["result"].value("name", cui.value());
    g.nodes.push_back({cui, g.center_name});

    std::set<std::string> node_set{cui.value()};
    for (int page = 1; g.edges.size() < impl_->config.max_edges; ++page) {
        json body = impl_->get_json("/content/current/CUI/" + cui.value() +
                                    "/relations?pageNumber=" + std::to_string(page) +
                                    "&pageSize=100");
        if (!body.contains("result") || !body["result"].is_array() || body["result"].empty())
            break;
        for (const json& rel : body["result"]) {
            if (g.edges.size() >= impl_->config.max_edges) break;
            const std::string code = rel.value("relationLabel", "");
            if (code.empty()) continue;
            std::string qualifier = rel.value("additionalRelationLabel", "");
            if (qualifier == "NONE") qualifier.clear();
            const std::string to_cui = cui_from_uri(rel.value("relatedId", ""));
            if (to_cui.size() != 8 || to_cui[0] != 'C') continue;
            Cui to(to_cui);
            g.edges.push_back({cui, to, RelationLabel{code, qualifier}});
            if (node_set.insert(to_cui).second)
                g.nodes.push_back({to, rel.value("relatedIdName", to_cui)});
        }
        const int page_count = body.value("pageCount", 1);
        if (page >= page_count) break;
    }
    return g;
}

}  // namespace bmq
