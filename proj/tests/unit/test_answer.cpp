#include <doctest.h>

#include <sstream>

#include "kgp/answer.hpp"
#include "kgp/error.hpp"
#include "support/stub_server.hpp"

using namespace kgp;
using kgp::testing::chat_body;
using kgp::testing::StubReply;
using kgp::testing::StubServer;

namespace {

RoleConfig role_for(const StubServer& s) {
    RoleConfig r;
    r.endpoint.base_url = s.base_url();
    r.endpoint.api_key_env = "KGP_TEST_UNSET_KEY";
    r.endpoint.initial_backoff = std::chrono::milliseconds(5);
    r.model = "stub";
    return r;
}

std::vector<Passage> numbered(std::size_t n, std::size_t width = 20) {
    std::vector<Passage> ps;
    for (std::size_t i = 0; i < n; ++i) {
        std::string text = "passage-" + std::to_string(i) + " ";
        text.resize(width, 'x');
        ps.push_back({"p" + std::to_string(i), "T" + std::to_string(i), text});
    }
    return ps;
}

}  // namespace

TEST_CASE("answer prompt holds all passages under budget") {
    auto ps = numbered(30);
    auto prompt = render_answer_prompt("Who?", ps, default_prompts(), kDefaultAnswerBudget);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        CHECK(prompt.find("[" + std::to_string(i + 1) + "] " + ps[i].title + ": " + ps[i].text) != std::string::npos);
    }
    CHECK(prompt.find("Who?") != std::string::npos);
}

TEST_CASE("answer prompt truncation keeps the earliest passages") {
    auto ps = numbered(30, 200);
    const auto& prompts = default_prompts();
    const std::size_t fixed = prompts.answer_system.size() + render_answer_prompt("Q", numbered(1, 1), prompts, 100000).size();
    const std::size_t budget = fixed + 3 * 230;
    auto prompt = render_answer_prompt("Q", ps, prompts, budget);
    CHECK(prompts.answer_system.size() + prompt.size() <= budget);
    CHECK(prompt.find(ps[0].text) != std::string::npos);
    CHECK(prompt.find(ps[1].text) != std::string::npos);
    CHECK(prompt.find(ps[29].text) == std::string::npos);

    CHECK_THROWS_AS(render_answer_prompt("Q", ps, prompts, 10), UsageError);
    CHECK_THROWS_AS(render_answer_prompt("Q", std::vector<Passage>{}, prompts, 100000), UsageError);
    auto tiny = render_answer_prompt("Q", ps, prompts, fixed + 20);
    CHECK(tiny.find("passage-0") != std::string::npos);
}

TEST_CASE("generate_answer returns the endpoint reply") {
    StubServer s([](const nlohmann::json&, int) { return StubReply{200, chat_body("  1844\n")}; });
    auto role = role_for(s);
    ChatClient c(role.endpoint);
    CHECK(generate_answer(c, role, "When?", numbered(3)) == "1844");
}

TEST_CASE("llm judge verdicts fail closed") {
    for (auto [reply, want] : std::vector<std::pair<std::string, Verdict>>{
             {"correct", Verdict::correct},
             {"Correct.", Verdict::correct},
             {"Incorrect.", Verdict::incorrect},
             {"The answer is wrong", Verdict::incorrect},
             {"%%garbage%%", Verdict::incorrect},
             {"", Verdict::incorrect}}) {
        StubServer s([reply](const nlohmann::json&, int) { return StubReply{200, chat_body(reply)}; });
        auto role = role_for(s);
        ChatClient c(role.endpoint);
        CHECK_MESSAGE(judge_llm(c, role, "q", "pred", "gold") == want, reply);
    }
}

TEST_CASE("exact judge normalizes") {
    CHECK(judge_exact("1844", "1844") == Verdict::correct);
    CHECK(judge_exact("Arthur's Magazine", "arthurs magazine") == Verdict::correct);
    CHECK(judge_exact("  The   END. ", "the end") == Verdict::correct);
    CHECK(judge_exact("1989", "1844") == Verdict::incorrect);
    CHECK(normalize_answer("A,  B!") == "a b");
}

TEST_CASE("answer records round trip") {
    AnswerRecord a{"q1", "Who?", {"p1", "p2"}, "Bob", std::string("Bob"), Verdict::correct};
    AnswerRecord b{"q2", "What?", {}, "x", std::nullopt, std::nullopt};
    std::stringstream ss;
    write_answer_record(a, ss);
    write_answer_record(b, ss);
    auto back = read_answer_records(ss);
    REQUIRE(back.size() == 2);
    CHECK(back[0].retrieved == a.retrieved);
    CHECK(back[0].verdict == Verdict::correct);
    CHECK(back[1].gold == std::nullopt);
    CHECK(back[1].verdict == std::nullopt);
}
