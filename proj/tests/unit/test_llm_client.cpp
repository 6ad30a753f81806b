#include <doctest.h>

#include <future>

#include "kgp/embedding.hpp"
#include "kgp/error.hpp"
#include "kgp/llm_client.hpp"
#include "support/stub_server.hpp"

using namespace kgp;
using kgp::testing::chat_body;
using kgp::testing::StubReply;
using kgp::testing::StubServer;
using nlohmann::json;

namespace {

EndpointConfig endpoint(const StubServer& s) {
    EndpointConfig e;
    e.base_url = s.base_url();
    e.api_key_env = "KGP_TEST_UNSET_KEY";
    e.timeout = std::chrono::milliseconds(2000);
    e.initial_backoff = std::chrono::milliseconds(5);
    return e;
}

RoleConfig role(const StubServer& s) {
    RoleConfig r;
    r.endpoint = endpoint(s);
    r.model = "stub-model";
    return r;
}

}  // namespace

TEST_CASE("stub echo of NA") {
    StubServer s([](const json&, int) { return StubReply{200, chat_body("NA")}; });
    ChatClient c(endpoint(s));
    auto r = c.complete(make_request(role(s), "sys", "user"));
    CHECK(r.text == "NA");
    CHECK(r.attempts == 1);
    CHECK(r.prompt_tokens == 7);
    CHECK(r.completion_tokens == 3);
    auto req = s.requests().at(0);
    CHECK(req["model"] == "stub-model");
    CHECK(req["messages"].size() == 2);
    CHECK(req["messages"][0]["role"] == "system");
    CHECK(req["messages"][1]["content"] == "user");
    CHECK(req["temperature"].get<double>() == doctest::Approx(0.6));
    CHECK(req["top_p"].get<double>() == doctest::Approx(0.85));
    CHECK(req["max_tokens"] == 50);
}

TEST_CASE("two server errors then success takes three attempts") {
    StubServer s([](const json&, int i) { return i < 2 ? StubReply{500, "{}"} : StubReply{200, chat_body("ok")}; });
    ChatClient c(endpoint(s));
    auto r = c.complete(make_request(role(s), "sys", "user"));
    CHECK(r.text == "ok");
    CHECK(r.attempts == 3);
    CHECK(s.chat_calls() == 3);
}

TEST_CASE("persistent server errors exhaust retries") {
    StubServer s([](const json&, int) { return StubReply{503, "{}"}; });
    auto e = endpoint(s);
    e.max_retries = 2;
    ChatClient c(e);
    CHECK_THROWS_AS(c.complete(make_request(role(s), "s", "u")), HttpStatusError);
    CHECK(s.chat_calls() == 3);
}

TEST_CASE("client errors are not retried") {
    StubServer s([](const json&, int) { return StubReply{400, "{\"error\":\"bad\"}"}; });
    ChatClient c(endpoint(s));
    CHECK_THROWS_AS(c.complete(make_request(role(s), "s", "u")), HttpStatusError);
    CHECK(s.chat_calls() == 1);

    StubServer auth([](const json&, int) { return StubReply{401, "{}"}; });
    ChatClient a(endpoint(auth));
    CHECK_THROWS_AS(a.complete(make_request(role(auth), "s", "u")), AuthError);
    CHECK(auth.chat_calls() == 1);
}

TEST_CASE("a slow endpoint times out") {
    // Scaled-down stand-in for a one-minute stall against a shorter deadline.
    StubServer s([](const json&, int) { return StubReply{200, chat_body("late"), std::chrono::milliseconds(1500)}; });
    auto e = endpoint(s);
    e.timeout = std::chrono::milliseconds(300);
    e.max_retries = 0;
    ChatClient c(e);
    CHECK_THROWS_AS(c.complete(make_request(role(s), "s", "u")), TimeoutError);
}

TEST_CASE("malformed replies") {
    for (const char* body : {"not json", "{}", "{\"choices\":[]}", "{\"choices\":[{\"message\":{\"content\":3}}]}"}) {
        std::string b = body;
        StubServer s([b](const json&, int) { return StubReply{200, b}; });
        ChatClient c(endpoint(s));
        CHECK_THROWS_AS(c.complete(make_request(role(s), "s", "u")), MalformedResponseError);
        CHECK(s.chat_calls() == 1);
    }
}

TEST_CASE("unreachable endpoint is a network error") {
    EndpointConfig e;
    e.base_url = "http://127.0.0.1:1/v1";
    e.max_retries = 0;
    e.timeout = std::chrono::milliseconds(500);
    ChatClient c(e);
    RoleConfig r;
    r.model = "m";
    CHECK_THROWS_AS(c.complete(make_request(r, "s", "u")), NetworkError);
}

TEST_CASE("request validation happens before any call") {
    StubServer s([](const json&, int) { return StubReply{200, chat_body("x")}; });
    ChatClient c(endpoint(s));
    ChatRequest r;
    r.model = "m";
    CHECK_THROWS_AS(c.complete(r), UsageError);
    r.messages = {{"user", "hi"}};
    r.max_tokens = 0;
    CHECK_THROWS_AS(c.complete(r), UsageError);
    r.max_tokens = 5;
    r.messages = {{"wizard", "hi"}, {"user", "x"}};
    CHECK_THROWS_AS(c.complete(r), UsageError);
    CHECK(s.chat_calls() == 0);
}

TEST_CASE("concurrent requests get their own responses") {
    StubServer s([](const json& req, int i) {
        auto content = req["messages"].back()["content"].get<std::string>();
        return StubReply{200, chat_body("echo:" + content), std::chrono::milliseconds(5 * (i % 4))};
    });
    auto e = endpoint(s);
    e.max_in_flight = 4;
    ChatClient c(e);
    auto r = role(s);
    std::vector<std::future<std::string>> futures;
    for (int i = 0; i < 24; ++i) {
        futures.push_back(std::async(std::launch::async, [&c, &r, i] {
            return c.complete(make_request(r, "s", "nonce-" + std::to_string(i))).text;
        }));
    }
    for (int i = 0; i < 24; ++i) CHECK(futures[i].get() == "echo:nonce-" + std::to_string(i));
}

TEST_CASE("remote embedder batches and preserves order") {
    StubServer s({}, [](const json& req, int) {
        json data = json::array();
        const auto& input = req["input"];
        // Reverse order on the wire; the client must sort by index.
        for (std::size_t i = input.size(); i-- > 0;) {
            auto text = input[i].get<std::string>();
            data.push_back({{"index", i}, {"embedding", {static_cast<double>(text.size()), 1.0, 0.0}}});
        }
        return StubReply{200, json{{"data", data}}.dump()};
    });
    RemoteEmbedderConfig cfg;
    cfg.base_url = s.base_url();
    cfg.model = "emb";
    cfg.dimension = 3;
    cfg.batch_size = 2;
    cfg.api_key_env = "KGP_TEST_UNSET_KEY";
    cfg.initial_backoff = std::chrono::milliseconds(5);
    RemoteEmbedder r(cfg);
    std::vector<std::string> texts{"a", "bbb", "cc", "dddd", "e"};
    auto vs = r.embed_batch(texts);
    REQUIRE(vs.size() == 5);
    for (std::size_t i = 0; i < texts.size(); ++i) {
        double len = static_cast<double>(texts[i].size());
        CHECK(vs[i][0] == doctest::Approx(len / std::sqrt(len * len + 1)));
        CHECK(vs[i].norm() == doctest::Approx(1.0));
    }
    CHECK(s.embedding_calls() == 3);

    cfg.dimension = 4;
    RemoteEmbedder wrong(cfg);
    CHECK_THROWS_AS(wrong.embed_batch(texts), MalformedResponseError);
}
