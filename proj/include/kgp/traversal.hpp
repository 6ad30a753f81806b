#pragma once

#include <chrono>
#include <exception>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kgp/agent.hpp"
#include "kgp/embedding.hpp"
#include "kgp/error.hpp"
#include "kgp/graph.hpp"
#include "kgp/lexical.hpp"

namespace kgp {

struct TraversalConfig {
    std::size_t budget = 30;   // K: passages retrieved in total, seeds included
    std::size_t n_seed = 5;    // TF-IDF seed passages
    std::size_t top_k = 3;     // neighbors selected per expansion
    std::size_t max_hops = 2;  // paths hold at most 1 + max_hops nodes
    bool early_termination = true;

    /// Throws UsageError unless 1 <= n_seed <= budget, top_k >= 1, max_hops >= 1.
    void validate() const;
};

/// Node ordinals in visit order, seed first.
using SearchPath = std::vector<std::size_t>;

struct TraversalResult {
    std::vector<std::string> retrieved;           // unique ids, seeds first, <= budget
    std::vector<std::size_t> retrieved_ordinals;  // same order as `retrieved`
    std::vector<SearchPath> paths;                // every path created, in creation order
    std::size_t iterations = 0;                   // agent decide() calls
    std::size_t nodes_visited = 0;                // == retrieved.size()
    bool terminated_early = false;                // a Stop ended the whole traversal
    bool budget_exhausted = false;
    std::chrono::microseconds wall_time{0};
};

struct ScoredCandidate {
    std::size_t ordinal = 0;
    double score = 0.0;
};

struct Expansion {
    AgentDecision decision = AgentDecision::stop();
    std::vector<ScoredCandidate> selected;  // empty on Stop or when nothing to rank
};

/// One traversal step: ask the agent about `path`, and on a follow-up rank
/// `candidates` by cosine between the follow-up and each candidate's text
/// under `ranker`, returning the best `top_k` (ties by ascending ordinal).
Expansion expand_path(const KnowledgeGraph& graph, const EmbeddingProvider& ranker, const TraversalAgent& agent,
                      const std::string& query, const SearchPath& path, std::span<const std::size_t> candidates,
                      std::size_t top_k);

/// Cosine ranking of `candidates` against `question`; the ranking half of
/// expand_path.
std::vector<ScoredCandidate> rank_candidates(const Corpus& corpus, const EmbeddingProvider& ranker,
                                             const std::string& question, std::span<const std::size_t> candidates,
                                             std::size_t top_k);

struct TraceRecord {
    std::string query_id;
    std::size_t step = 0;
    SearchPath path;
    AgentDecision decision = AgentDecision::stop();
    std::vector<std::size_t> selected;
    std::size_t k = 0;  // retrieved-passage counter after this step
};

using TraceSink = std::function<void(const TraceRecord&)>;

/// Thrown when the agent or ranker fails mid-query; carries what had been
/// retrieved so far and the original exception.
class TraversalFailure : public Error {
public:
    TraversalFailure(const std::string& what, TraversalResult partial, std::exception_ptr cause)
        : Error(what), partial_(std::move(partial)), cause_(std::move(cause)) {}

    const TraversalResult& partial() const noexcept { return partial_; }
    const std::exception_ptr& cause() const noexcept { return cause_; }

private:
    TraversalResult partial_;
    std::exception_ptr cause_;
};

/// Budgeted breadth-first traversal: TF-IDF seeds become unit paths, each
/// dequeued path is expanded by the agent, selected neighbors extend the path
/// and are enqueued with their own neighbors as candidates. A Stop ends the
/// traversal when early termination is on and only retires the path
/// otherwise. The loop also ends once more than `budget` passages have been
/// counted. Visited nodes are never selected again.
TraversalResult traverse(const KnowledgeGraph& graph, const TfidfModel& tfidf, const TraversalAgent& agent,
                         const EmbeddingProvider& ranker, const std::string& query, const TraversalConfig& config,
                         const TraceSink& trace = {}, const std::string& query_id = {});

/// Traversal-free dense baseline: cosine of the embedded query against the
/// graph's stored passage embeddings, top k, ties by ascending ordinal.
std::vector<ScoredPassage> dense_retrieve_baseline(const KnowledgeGraph& graph, const EmbeddingProvider& ranker,
                                                   const std::string& query, std::size_t k);

}  // namespace kgp
