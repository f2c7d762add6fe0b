#pragma once

// Live chat-completion backend over HTTP (de-facto JSON schema: messages,
// temperature, image content parts). Exercised only against real endpoints;
// tests use scripted transcripts instead.

#include <httplib.h>
#include <json.hpp>

#include <string>

#include "souschef/gateway.hpp"

namespace souschef {

struct LiveConfig {
    std::string endpoint = "http://localhost:8000/v1/chat/completions";
    std::string model = "gpt-4o-mini";
    double temperature = 0.2;
    std::string api_key;     // from config or SOUSCHEF_API_KEY
    int max_retries = 3;     // transport-level retries
    bool attach_image = true;
    int timeout_seconds = 120;
};

namespace live_detail {

inline std::string base64(const std::string& in) {
    static const char* tbl = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((in.size() + 2) / 3 * 4);
    for (std::size_t i = 0; i < in.size(); i += 3) {
        std::uint32_t n = static_cast<std::uint8_t>(in[i]) << 16;
        if (i + 1 < in.size()) n |= static_cast<std::uint8_t>(in[i + 1]) << 8;
        if (i + 2 < in.size()) n |= static_cast<std::uint8_t>(in[i + 2]);
        out += tbl[(n >> 18) & 63];
        out += tbl[(n >> 12) & 63];
        out += i + 1 < in.size() ? tbl[(n >> 6) & 63] : '=';
        out += i + 2 < in.size() ? tbl[n & 63] : '=';
    }
    return out;
}

inline std::pair<std::string, std::string> split_endpoint(const std::string& url) {
    std::size_t scheme = url.find("://");
    std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
    std::size_t path_start = url.find('/', host_start);
    if (path_start == std::string::npos) return {url, "/v1/chat/completions"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace live_detail

class LiveBackend final : public Backend {
public:
    explicit LiveBackend(LiveConfig config) : config_(std::move(config)) {}

    /// PNG bytes to attach to the next request (rasterized render); set by
    /// the caller before each query, cleared after use.
    void set_image_png(std::string png) { image_png_ = std::move(png); }

    std::string complete(const PromptBundle& bundle) override {
        nlohmann::json messages = nlohmann::json::array();
        for (std::size_t i = 0; i < bundle.messages.size(); ++i) {
            const ChatMessage& m = bundle.messages[i];
            bool attach = config_.attach_image && !image_png_.empty() && m.role == "user" &&
                          i + 1 == bundle.messages.size() && !bundle.image_svg.empty();
            if (attach) {
                nlohmann::json content = nlohmann::json::array();
                content.push_back({{"type", "text"}, {"text", m.content}});
                content.push_back(
                    {{"type", "image_url"},
                     {"image_url",
                      {{"url", "data:image/png;base64," + live_detail::base64(image_png_)}}}});
                messages.push_back({{"role", m.role}, {"content", content}});
            } else {
                messages.push_back({{"role", m.role}, {"content", m.content}});
            }
        }
        nlohmann::json body{{"model", config_.model},
                            {"temperature", config_.temperature},
                            {"messages", messages}};

        auto [base, path] = live_detail::split_endpoint(config_.endpoint);
        std::string last_error;
        for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
            httplib::Client client(base);
            client.set_read_timeout(config_.timeout_seconds, 0);
            client.set_connection_timeout(10, 0);
            httplib::Headers headers;
            if (!config_.api_key.empty())
                headers.emplace("Authorization", "Bearer " + config_.api_key);
            auto res = client.Post(path, headers, body.dump(), "application/json");
            if (!res) {
                last_error = "transport failure (" + httplib::to_string(res.error()) + ")";
                continue;
            }
            if (res->status >= 500) {
                last_error = "server error " + std::to_string(res->status);
                continue;
            }
            if (res->status != 200)
                throw TransportError("chat endpoint returned status " + std::to_string(res->status) +
                                     ": " + res->body);
            nlohmann::json reply = nlohmann::json::parse(res->body);
            image_png_.clear();
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        }
        throw TransportError("chat endpoint unreachable after retries: " + last_error);
    }

private:
    LiveConfig config_;
    std::string image_png_;
};

}  // namespace souschef
