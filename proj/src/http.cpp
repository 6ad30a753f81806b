#include "http.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "kgp/error.hpp"

namespace kgp::detail {

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // "" or "/v1"
};

SplitUrl split_url(const std::string& base_url) {
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) throw UsageError("endpoint URL lacks a scheme: '" + base_url + "'");
    auto path_start = base_url.find('/', scheme_end + 3);
    SplitUrl out;
    if (path_start == std::string::npos) {
        out.origin = base_url;
    } else {
        out.origin = base_url.substr(0, path_start);
        out.prefix = base_url.substr(path_start);
    }
    while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
    return out;
}

bool retryable(const std::exception_ptr& ep) {
    try {
        std::rethrow_exception(ep);
    } catch (const AuthError&) {
        return false;
    } catch (const HttpStatusError& e) {
        return e.status() >= 500;
    } catch (const MalformedResponseError&) {
        return false;
    } catch (const NetworkError&) {
        return true;
    } catch (...) {
        return false;
    }
}

}  // namespace

HttpReply post_json(const HttpTarget& target, const std::string& path, const std::string& body) {
    auto url = split_url(target.base_url);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (url.origin.rfind("https://", 0) == 0) {
        throw UsageError("https endpoint '" + target.base_url + "' requires a build with OpenSSL support");
    }
#endif
    httplib::Client client(url.origin);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(target.timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(target.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    client.set_keep_alive(false);

    httplib::Headers headers;
    if (!target.bearer_token.empty()) headers.emplace("Authorization", "Bearer " + target.bearer_token);

    auto started = std::chrono::steady_clock::now();
    auto res = client.Post(url.prefix + path, headers, body, "application/json");
    if (!res) {
        auto err = res.error();
        std::string what = "POST " + target.base_url + path + ": " + httplib::to_string(err);
        // httplib reports a read timeout as a plain read error.
        bool timed_out = err == httplib::Error::ConnectionTimeout ||
                         (err == httplib::Error::Read && std::chrono::steady_clock::now() - started >= target.timeout);
        if (timed_out) throw TimeoutError(what + " (timeout after " + std::to_string(target.timeout.count()) + " ms)");
        throw NetworkError(what);
    }
    return {res->status, res->body};
}

void raise_for_status(const HttpReply& reply, const std::string& context) {
    if (reply.status >= 200 && reply.status < 300) return;
    std::string snippet = reply.body.substr(0, 200);
    std::string what = context + ": HTTP " + std::to_string(reply.status) + (snippet.empty() ? "" : " " + snippet);
    if (reply.status == 401 || reply.status == 403) throw AuthError(what);
    throw HttpStatusError(reply.status, what);
}

void with_retries(const RetryPolicy& policy, const std::function<void()>& attempt, int& attempts) {
    attempts = 0;
    auto backoff = policy.initial_backoff;
    for (;;) {
        ++attempts;
        try {
            attempt();
            return;
        } catch (...) {
            auto ep = std::current_exception();
            if (attempts > policy.max_retries || !retryable(ep)) std::rethrow_exception(ep);
        }
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
    }
}

std::string credential_from_env(const std::string& var) {
    if (var.empty()) return {};
    const char* value = std::getenv(var.c_str());
    return value ? std::string(value) : std::string();
}

}  // namespace kgp::detail
