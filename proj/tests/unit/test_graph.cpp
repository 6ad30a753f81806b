#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "kgp/error.hpp"
#include "kgp/graph.hpp"
#include "support/oracles.hpp"

using namespace kgp;

namespace {

std::shared_ptr<const Corpus> share(Corpus c) { return std::make_shared<const Corpus>(std::move(c)); }

std::shared_ptr<const Corpus> small_corpus(std::size_t n) {
    Rng rng(n);
    return share(oracle::random_corpus(rng, n, 25));
}

}  // namespace

TEST_CASE("three-node example from a fixed cosine matrix") {
    const double sim[3][3] = {{1.0, 0.9, 0.1}, {0.9, 1.0, 0.2}, {0.1, 0.2, 1.0}};
    auto adj = symmetric_knn(3, 1, [&](std::size_t i, std::size_t j) { return sim[i][j]; });
    CHECK(adj[0] == std::vector<std::uint32_t>{1});
    CHECK(adj[1] == std::vector<std::uint32_t>{0, 2});
    CHECK(adj[2] == std::vector<std::uint32_t>{1});
}

TEST_CASE("k_edges = n - 1 gives the complete graph") {
    auto corpus = small_corpus(7);
    auto g = build_graph(corpus, HashEmbedder(), 6);
    for (std::size_t i = 0; i < 7; ++i) CHECK(g.neighbors(i).size() == 6);
    CHECK(g.edge_count() == 21);
}

TEST_CASE("argument checks") {
    auto corpus = small_corpus(5);
    CHECK_THROWS_AS(build_graph(corpus, HashEmbedder(), 0), UsageError);
    CHECK_THROWS_AS(build_graph(corpus, HashEmbedder(), 5), UsageError);
    CHECK_THROWS_AS(build_graph(share(Corpus({{"a", "", "x"}})), HashEmbedder(), 1), UsageError);
}

TEST_CASE("adjacency equals brute-force kNN with symmetrization") {
    Rng rng(21);
    for (int round = 0; round < 30; ++round) {
        const std::size_t n = 2 + rng.below(49);
        const std::size_t k = 1 + rng.below(std::min<std::size_t>(n - 1, 8));
        auto corpus = share(oracle::random_corpus(rng, n, 40));
        HashEmbedder h(64 + 64 * rng.below(4));
        auto g = build_graph(corpus, h, k, 1 + rng.below(3));
        auto expected = oracle::knn(oracle::cosine_matrix(g.embeddings()), k);
        CHECK(g.adjacency() == expected);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK_FALSE(g.neighbors(i).empty());
            for (auto j : g.neighbors(i)) CHECK(g.has_edge(j, i));
        }
    }
}

TEST_CASE("save and load round trip") {
    auto corpus = small_corpus(30);
    auto g = build_graph(corpus, HashEmbedder(128, 4), 4);
    auto bytes = serialize_graph(g);
    auto back = deserialize_graph(bytes, corpus);
    CHECK(back == g);
    CHECK(back.k_edges() == 4);
    CHECK(back.dimension() == 128);
    CHECK(back.provider_name() == g.provider_name());
    CHECK(serialize_graph(back) == bytes);

    auto path = std::filesystem::temp_directory_path() / "kgp_unit_graph.kgpg";
    save_graph(g, path);
    CHECK(load_graph(path, corpus) == g);
    CHECK_THROWS_AS(load_graph("/nonexistent/graph.kgpg", corpus), DataError);
}

TEST_CASE("loading against a changed corpus is a provenance error") {
    auto corpus = small_corpus(10);
    auto bytes = serialize_graph(build_graph(corpus, HashEmbedder(), 3));
    auto ps = corpus->passages();
    ps[4].id = "renamed";
    CHECK_THROWS_AS(deserialize_graph(bytes, share(Corpus(ps))), ProvenanceError);
    ps = corpus->passages();
    ps.pop_back();
    CHECK_THROWS_AS(deserialize_graph(bytes, share(Corpus(ps))), ProvenanceError);
}

TEST_CASE("every truncation is a corrupt-file error") {
    auto corpus = small_corpus(12);
    auto bytes = serialize_graph(build_graph(corpus, HashEmbedder(32), 2));
    for (std::size_t len = 0; len < bytes.size(); ++len) {
        CHECK_THROWS_AS(deserialize_graph(bytes.substr(0, len), corpus), CorruptFileError);
    }
    Rng rng(2);
    for (int i = 0; i < 200; ++i) {
        auto flipped = bytes;
        auto pos = 12 + rng.below(flipped.size() - 12);
        flipped[pos] = static_cast<char>(flipped[pos] ^ (1 + rng.below(255)));
        CHECK_THROWS_AS(deserialize_graph(flipped, corpus), DataError);
    }
    CHECK_THROWS_AS(deserialize_graph(bytes + "x", corpus), CorruptFileError);
}

TEST_CASE("constructor rejects broken structure") {
    auto corpus = small_corpus(3);
    std::vector<EmbeddingVector> e(3, hash_embed("x", 16));
    CHECK_THROWS_AS(KnowledgeGraph(corpus, e, {{1}, {}, {}}, 1, "t"), CorruptFileError);
    CHECK_THROWS_AS(KnowledgeGraph(corpus, e, {{0}, {}, {}}, 1, "t"), CorruptFileError);
    CHECK_THROWS_AS(KnowledgeGraph(corpus, e, {{2, 1}, {0}, {0}}, 1, "t"), CorruptFileError);
    CHECK_NOTHROW(KnowledgeGraph(corpus, e, {{1, 2}, {0}, {0}}, 1, "t"));
}
