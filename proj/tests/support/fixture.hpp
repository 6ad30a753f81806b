#pragma once

// Synthetic bundle with a hash-embedded graph dense enough that every golden
// chain pair is an edge.

#include <algorithm>

#include "kgp/graph.hpp"
#include "kgp/lexical.hpp"
#include "kgp/synth.hpp"

namespace kgp::testing {

inline constexpr std::size_t kFixtureDimension = 1024;

struct Fixture {
    SyntheticBundle bundle;
    std::shared_ptr<const HashEmbedder> embedder;
    std::shared_ptr<const KnowledgeGraph> graph;
    std::shared_ptr<const TfidfModel> tfidf;
    std::size_t k_edges = 0;
};

inline Fixture make_fixture(const SynthSpec& spec, std::size_t min_k_edges = 10) {
    Fixture f;
    f.bundle = generate_synthetic(spec);
    f.embedder = std::make_shared<const HashEmbedder>(kFixtureDimension);
    std::vector<std::string> texts;
    for (const auto& p : *f.bundle.corpus) texts.push_back(p.text);
    auto embeddings = f.embedder->embed_batch(texts);
    f.k_edges = std::max(min_k_edges, minimum_k_edges(embeddings, *f.bundle.corpus, f.bundle.questions));
    auto adjacency = symmetric_knn(embeddings, f.k_edges);
    f.graph = std::make_shared<const KnowledgeGraph>(f.bundle.corpus, std::move(embeddings), std::move(adjacency),
                                                     f.k_edges, f.embedder->name());
    attach_edge_report(f.bundle.report, *f.graph);
    f.tfidf = std::make_shared<const TfidfModel>(TfidfModel::fit(f.bundle.corpus));
    return f;
}

}  // namespace kgp::testing
