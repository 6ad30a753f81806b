#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <vector>

namespace kgp {

struct ChatMessage {
    std::string role;  // "system", "user" or "assistant"
    std::string content;
};

struct DecodeParams {
    double temperature = 0.6;
    double top_p = 0.85;
    int max_tokens = 50;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 0.6;
    double top_p = 0.85;
    int max_tokens = 50;
};

struct ChatResponse {
    std::string text;
    std::optional<int> prompt_tokens;
    std::optional<int> completion_tokens;
    std::chrono::milliseconds latency{0};
    int attempts = 0;
};

struct EndpointConfig {
    std::string base_url;  // requests go to {base_url}/chat/completions
    std::string api_key_env = "OPENAI_API_KEY";
    std::chrono::milliseconds timeout{60000};
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{500};
    int max_in_flight = 4;
};

/// Endpoint plus model and decode settings for one role (agent, answerer,
/// judge, dataset generator).
struct RoleConfig {
    EndpointConfig endpoint;
    std::string model;
    DecodeParams decode;
};

/// Chat-completions client for any endpoint speaking the common wire shape
///   {model, messages, temperature, top_p, max_tokens} -> {choices: [{message: {content}}]}.
/// Thread-safe; at most `max_in_flight` requests are outstanding at once.
class ChatClient {
public:
    explicit ChatClient(EndpointConfig config);
    ChatClient(const ChatClient&) = delete;
    ChatClient& operator=(const ChatClient&) = delete;

    /// Returns the first choice's content. Throws UsageError for requests
    /// without a model, a max_tokens bound, or a user message.
    ChatResponse complete(const ChatRequest& request) const;

    const EndpointConfig& config() const noexcept { return config_; }

private:
    EndpointConfig config_;
    mutable std::counting_semaphore<> in_flight_;
};

/// Convenience: system + user message with the role's model and decode params.
ChatRequest make_request(const RoleConfig& role, const std::string& system_prompt, const std::string& user_prompt);

}  // namespace kgp
