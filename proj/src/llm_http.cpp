#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <semaphore>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "bmq/llm.hpp"

namespace bmq {

using nlohmann::json;

namespace {

struct Endpoint {
    bool https = true;
    std::string host_port;
    std::string path_prefix;
};

Endpoint parse_endpoint(const std::string& base) {
    Endpoint e;
    std::string rest = base;
    if (rest.rfind("https://", 0) == 0) {
        rest = rest.substr(8);
    } else if (rest.rfind("http://", 0) == 0) {
        e.https = false;
        rest = rest.substr(7);
    }
    auto slash = rest.find('/');
    e.host_port = rest.substr(0, slash);
    e.path_prefix = slash == std::string::npos ? "" : rest.substr(slash);
    while (!e.path_prefix.empty() && e.path_prefix.back() == '/') e.path_prefix.pop_back();
    return e;
}

}  // namespace

struct HttpLlmBackend::Impl {
    HttpLlmConfig config;
    Endpoint endpoint;
    std::counting_semaphore<256> in_flight;

    explicit Impl(HttpLlmConfig cfg)
        : config(std::move(cfg)),
          endpoint(parse_endpoint(config.base_url)),
          in_flight(std::clamp(config.max_in_flight, 1, 256)) {
        if (config.api_key.empty())
            if (const char* key = std::getenv("LLM_API_KEY")) config.api_key = key;
    }
};

HttpLlmBackend::HttpLlmBackend(HttpLlmConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

HttpLlmBackend::~HttpLlmBackend() = default;

ChatReply HttpLlmBackend::complete(const ChatRequest& request) {
    const std::string hash = prompt_cache_key(request);
    json body{{"model", request.model},
              {"messages",
               json::array({{{"role", "system"}, {"content", request.system}},
                            {{"role", "user"}, {"content", request.user}}})},
              {"temperature", request.temperature},
              {"max_tokens", request.max_tokens}};
    const std::string payload = body.dump();
    const std::string path = impl_->endpoint.path_prefix + "/chat/completions";

    httplib::Headers headers;
    if (!impl_->config.api_key.empty())
        headers.emplace("Authorization", "Bearer " + impl_->config.api_key);

    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt <= impl_->config.max_retries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(250 * (1 << (attempt - 1))));

        impl_->in_flight.acquire();
        httplib::Result res = [&] {
            if (impl_->endpoint.https) {
                httplib::SSLClient client(impl_->endpoint.host_port);
                client.set_read_timeout(impl_->config.timeout_s, 0);
                client.set_connection_timeout(impl_->config.timeout_s, 0);
                return client.Post(path, headers, payload, "application/json");
            }
            httplib::Client client(impl_->endpoint.host_port);
            client.set_read_timeout(impl_->config.timeout_s, 0);
            client.set_connection_timeout(impl_->config.timeout_s, 0);
            return client.Post(path, headers, payload, "application/json");
        }();
        impl_->in_flight.release();

        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429) {
            double retry_after = 1.0;
            if (res->has_header("Retry-After"))
                retry_after = std::atof(res->get_header_value("Retry-After").c_str());
            if (attempt == impl_->config.max_retries) throw RateLimited(retry_after);
            std::this_thread::sleep_for(
                std::chrono::milliseconds(static_cast<long>(retry_after * 1000)));
            continue;
        }
        if (res->status >= 500) {
            last_error = "server status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw BackendUnavailable("status " + std::to_string(res->status) + ": " + res->body);

        json reply = json::parse(res->body, nullptr, false);
        if (reply.is_discarded()) {
            last_error = "invalid JSON in response";
            continue;
        }
        try {
            return {reply.at("choices").at(0).at("message").at("content").get<std::string>(),
                    false, hash};
        } catch (const json::exception& e) {
            throw BackendUnavailable(std::string("unexpected response shape: ") + e.what());
        }
    }
    throw BackendUnavailable(last_error);
}

}  // namespace bmq
