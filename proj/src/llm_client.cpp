#include "kgp/llm_client.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "http.hpp"
#include "kgp/error.hpp"

namespace kgp {

namespace {

void validate(const ChatRequest& r) {
    if (r.model.empty()) throw UsageError("chat request without a model name");
    if (r.max_tokens <= 0) throw UsageError("chat request without a positive max_tokens bound");
    if (r.temperature < 0.0) throw UsageError("chat request temperature must be >= 0");
    if (!(r.top_p > 0.0 && r.top_p <= 1.0)) throw UsageError("chat request top_p must be in (0, 1]");
    bool has_user = std::any_of(r.messages.begin(), r.messages.end(), [](const auto& m) { return m.role == "user"; });
    if (!has_user) throw UsageError("chat request needs at least one user message");
    for (const auto& m : r.messages) {
        if (m.role != "system" && m.role != "user" && m.role != "assistant") {
            throw UsageError("chat request has unknown role '" + m.role + "'");
        }
    }
}

ChatResponse parse_reply(const std::string& body) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedResponseError(std::string("chat completion: invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty()) {
        throw MalformedResponseError("chat completion: missing 'choices'");
    }
    const auto& choice = doc["choices"][0];
    ChatResponse out;
    if (choice.contains("message") && choice["message"].is_object()) {
        const auto& content = choice["message"].value("content", nlohmann::json());
        if (content.is_string()) {
            out.text = content.get<std::string>();
        } else if (!content.is_null()) {
            throw MalformedResponseError("chat completion: non-string message content");
        }
    } else if (choice.contains("text") && choice["text"].is_string()) {
        out.text = choice["text"].get<std::string>();
    } else {
        throw MalformedResponseError("chat completion: choice without message");
    }
    if (doc.contains("usage") && doc["usage"].is_object()) {
        const auto& u = doc["usage"];
        if (u.contains("prompt_tokens") && u["prompt_tokens"].is_number_integer()) out.prompt_tokens = u["prompt_tokens"].get<int>();
        if (u.contains("completion_tokens") && u["completion_tokens"].is_number_integer()) {
            out.completion_tokens = u["completion_tokens"].get<int>();
        }
    }
    return out;
}

}  // namespace

ChatClient::ChatClient(EndpointConfig config)
    : config_(std::move(config)), in_flight_(std::max(1, config_.max_in_flight)) {
    if (config_.base_url.empty()) throw UsageError("chat endpoint: base_url not configured");
    if (config_.max_in_flight < 1) throw UsageError("chat endpoint: max_in_flight must be >= 1");
}

ChatResponse ChatClient::complete(const ChatRequest& request) const {
    validate(request);
    nlohmann::json body = {{"model", request.model},
                           {"temperature", request.temperature},
                           {"top_p", request.top_p},
                           {"max_tokens", request.max_tokens},
                           {"messages", nlohmann::json::array()}};
    for (const auto& m : request.messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    const std::string payload = body.dump();
    detail::HttpTarget target{config_.base_url, detail::credential_from_env(config_.api_key_env), config_.timeout};

    in_flight_.acquire();
    struct Release {
        std::counting_semaphore<>& s;
        ~Release() { s.release(); }
    } release{in_flight_};

    const auto started = std::chrono::steady_clock::now();
    ChatResponse out;
    int attempts = 0;
    detail::with_retries(
        {config_.max_retries, config_.initial_backoff},
        [&] {
            auto reply = detail::post_json(target, "/chat/completions", payload);
            detail::raise_for_status(reply, "chat completion");
            out = parse_reply(reply.body);
        },
        attempts);
    out.attempts = attempts;
    out.latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    return out;
}

ChatRequest make_request(const RoleConfig& role, const std::string& system_prompt, const std::string& user_prompt) {
    ChatRequest r;
    r.model = role.model;
    if (!system_prompt.empty()) r.messages.push_back({"system", system_prompt});
    r.messages.push_back({"user", user_prompt});
    r.temperature = role.decode.temperature;
    r.top_p = role.decode.top_p;
    r.max_tokens = role.decode.max_tokens;
    return r;
}

}  // namespace kgp
