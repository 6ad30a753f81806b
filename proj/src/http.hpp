#pragma once

// Internal: the only translation unit family that touches cpp-httplib.

#include <chrono>
#include <functional>
#include <string>

namespace kgp::detail {

struct HttpTarget {
    std::string base_url;  // scheme://host[:port][/prefix]
    std::string bearer_token;
    std::chrono::milliseconds timeout{60000};
};

struct HttpReply {
    int status = 0;
    std::string body;
};

/// POSTs a JSON body to {base_url}{path}. Transport failures throw
/// NetworkError (TimeoutError for read/connect timeouts). Any HTTP status is
/// returned to the caller.
HttpReply post_json(const HttpTarget& target, const std::string& path, const std::string& body);

/// Throws AuthError for 401/403, HttpStatusError for other non-2xx.
void raise_for_status(const HttpReply& reply, const std::string& context);

struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{500};
};

/// Runs `attempt` until it succeeds or fails permanently. Transport errors,
/// timeouts and 5xx statuses are retried with doubling backoff; auth errors,
/// other 4xx and malformed responses are not. `attempts` receives the number
/// of calls made.
void with_retries(const RetryPolicy& policy, const std::function<void()>& attempt, int& attempts);

/// Reads the credential from the named environment variable; empty if unset.
std::string credential_from_env(const std::string& var);

}  // namespace kgp::detail
