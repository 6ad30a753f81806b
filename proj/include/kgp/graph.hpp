#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kgp/corpus.hpp"
#include "kgp/embedding.hpp"

namespace kgp {

using Adjacency = std::vector<std::vector<std::uint32_t>>;

/// Passage-level knowledge graph: one node per corpus passage, one embedding
/// per node, and an unweighted symmetric neighbor relation.
class KnowledgeGraph {
public:
    /// Checks every structural invariant (sizes, sorted unique neighbor lists,
    /// no self loops, symmetry) and throws CorruptFileError on violation.
    KnowledgeGraph(std::shared_ptr<const Corpus> corpus, std::vector<EmbeddingVector> embeddings,
                   Adjacency adjacency, std::size_t k_edges, std::string provider_name);

    std::size_t size() const noexcept { return adjacency_.size(); }
    std::size_t k_edges() const noexcept { return k_edges_; }
    std::size_t dimension() const noexcept { return dimension_; }
    const std::string& provider_name() const noexcept { return provider_name_; }

    /// Sorted neighbor ordinals. Throws NotFoundError for out-of-range nodes.
    std::span<const std::uint32_t> neighbors(std::size_t node) const;
    const EmbeddingVector& embedding(std::size_t node) const { return embeddings_.at(node); }
    const std::vector<EmbeddingVector>& embeddings() const noexcept { return embeddings_; }
    const Adjacency& adjacency() const noexcept { return adjacency_; }
    std::size_t edge_count() const noexcept;
    bool has_edge(std::size_t a, std::size_t b) const;

    const Corpus& corpus() const noexcept { return *corpus_; }
    const std::shared_ptr<const Corpus>& corpus_ptr() const noexcept { return corpus_; }

    /// Structural equality; the corpus is compared by content.
    bool operator==(const KnowledgeGraph& other) const;

private:
    std::shared_ptr<const Corpus> corpus_;
    std::vector<EmbeddingVector> embeddings_;
    Adjacency adjacency_;
    std::size_t k_edges_;
    std::size_t dimension_;
    std::string provider_name_;
};

/// For each node, directed edges to its k highest-similarity other nodes
/// (compared by rank_key, ties by ascending ordinal), then union-symmetrized
/// and sorted.
/// `similarity(i, j)` must be symmetric for the result to be reproducible.
Adjacency symmetric_knn(std::size_t n, std::size_t k,
                        const std::function<double(std::size_t, std::size_t)>& similarity,
                        std::size_t workers = 1);

Adjacency symmetric_knn(std::span<const EmbeddingVector> embeddings, std::size_t k, std::size_t workers = 1);

/// Embeds every passage text with `provider` and links cosine neighbors.
/// Requires 1 <= k_edges < corpus size.
KnowledgeGraph build_graph(std::shared_ptr<const Corpus> corpus, const EmbeddingProvider& provider,
                           std::size_t k_edges, std::size_t workers = 1);

/// Binary graph file; layout documented in docs/formats.md.
void save_graph(const KnowledgeGraph& graph, const std::filesystem::path& path);
std::string serialize_graph(const KnowledgeGraph& graph);

/// Throws CorruptFileError for truncated/garbled files, ProvenanceError when
/// the stored passage ids differ from `corpus` or the version is unsupported.
KnowledgeGraph load_graph(const std::filesystem::path& path, std::shared_ptr<const Corpus> corpus);
KnowledgeGraph deserialize_graph(const std::string& bytes, std::shared_ptr<const Corpus> corpus);

inline constexpr std::uint32_t kGraphFormatVersion = 1;

}  // namespace kgp
