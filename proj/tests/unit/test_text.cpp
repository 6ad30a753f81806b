#include <doctest.h>

#include "kgp/rng.hpp"
#include "kgp/text.hpp"

using namespace kgp;

TEST_CASE("tokenize splits on non-alphanumerics and lowercases") {
    CHECK(tokenize("Arthur's Magazine (1844)") == TokenStream{"arthur", "s", "magazine", "1844"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("  ,;  ").empty());
    CHECK(tokenize("Arthur’s") == TokenStream{"arthur", "s"});
    CHECK(tokenize("Zürich ÉCOLE") == TokenStream{"zürich", "école"});
}

TEST_CASE("malformed utf-8 bytes separate tokens") {
    std::string s = "ab";
    s += static_cast<char>(0xFF);
    s += "cd";
    CHECK(tokenize(s) == TokenStream{"ab", "cd"});
}

TEST_CASE("tokenize is idempotent on its joined output") {
    Rng rng(11);
    const std::string alphabet = "abcXYZ019 .,'-_\té";
    for (int round = 0; round < 500; ++round) {
        std::string s;
        std::size_t len = rng.below(40);
        for (std::size_t i = 0; i < len; ++i) s += alphabet[rng.below(alphabet.size())];
        auto once = tokenize(s);
        CHECK(tokenize(join(once, " ")) == once);
    }
}

TEST_CASE("utf8_prefix never splits a code point") {
    std::string s = "aéb";  // a, 2-byte é, b
    CHECK(utf8_prefix(s, 1) == "a");
    CHECK(utf8_prefix(s, 2) == "a");
    CHECK(utf8_prefix(s, 3) == "aé");
    CHECK(utf8_prefix(s, 100) == s);
}

TEST_CASE("render_template substitutes known keys only") {
    CHECK(render_template("Q: {question} {x}", {{"question", "why"}}) == "Q: why {x}");
    CHECK(render_template("{a}{a}", {{"a", "1"}}) == "11");
}

TEST_CASE("trim strips ascii whitespace") {
    CHECK(trim("  a b \n") == "a b");
    CHECK(trim("   ").empty());
}
