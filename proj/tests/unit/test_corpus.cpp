#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kgp/corpus.hpp"
#include "kgp/error.hpp"
#include "kgp/synth.hpp"

using namespace kgp;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "kgp_unit";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("three valid lines load in file order") {
    std::istringstream in(R"({"id":"c","text":"gamma"}
{"id":"a","title":"A","text":"alpha"}

{"id":"b","text":"beta"}
)");
    auto c = parse_corpus_jsonl(in);
    REQUIRE(c.size() == 3);
    CHECK(c[0].id == "c");
    CHECK(c[1].id == "a");
    CHECK(c[1].title == "A");
    CHECK(c[2].id == "b");
    CHECK(c.ordinal_of("c") == 0);
    CHECK(c.get("b").text == "beta");
}

TEST_CASE("duplicate id names its line") {
    std::istringstream in("{\"id\":\"x\",\"text\":\"one\"}\n{\"id\":\"x\",\"text\":\"two\"}\n");
    try {
        parse_corpus_jsonl(in, "dup.jsonl");
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("dup.jsonl:2") != std::string::npos);
    }
}

TEST_CASE("malformed records are rejected") {
    for (const char* bad : {"not json", "{\"id\":\"a\"}", "{\"id\":\"\",\"text\":\"t\"}", "{\"id\":\"a\",\"text\":\"  \"}",
                            "{\"id\":3,\"text\":\"t\"}", "[1,2]"}) {
        std::istringstream in(bad);
        CHECK_THROWS_AS(parse_corpus_jsonl(in), DataError);
    }
}

TEST_CASE("lookups") {
    Corpus c({{"p0", "", "zero"}, {"p1", "", "one"}});
    CHECK(c.get("p1").text == "one");
    CHECK_THROWS_AS(c.get("nope"), NotFoundError);
    CHECK_THROWS_AS(c.at(2), NotFoundError);
    CHECK_FALSE(c.find("nope").has_value());
    CHECK(c.find("p0") == std::optional<std::size_t>(0));
}

TEST_CASE("synthetic corpus round-trips through a file") {
    SynthSpec spec = SynthSpec::from_total(26, 3);
    spec.distractors = 6;
    auto bundle = generate_synthetic(spec);
    REQUIRE(bundle.corpus->size() >= 200);
    auto path = temp_file("roundtrip.jsonl");
    save_corpus(*bundle.corpus, path);
    CHECK(load_corpus(path) == *bundle.corpus);
}

TEST_CASE("missing corpus file") {
    CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.jsonl"), DataError);
}
