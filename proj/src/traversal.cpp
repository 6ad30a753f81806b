#include "kgp/traversal.hpp"

#include <algorithm>
#include <deque>

namespace kgp {

void TraversalConfig::validate() const {
    if (budget < 1) throw UsageError("traversal: budget must be >= 1");
    if (n_seed < 1 || n_seed > budget) throw UsageError("traversal: n_seed must be in [1, budget]");
    if (top_k < 1) throw UsageError("traversal: top_k must be >= 1");
    if (max_hops < 1) throw UsageError("traversal: max_hops must be >= 1");
}

std::vector<ScoredCandidate> rank_candidates(const Corpus& corpus, const EmbeddingProvider& ranker,
                                             const std::string& question, std::span<const std::size_t> candidates,
                                             std::size_t top_k) {
    if (candidates.empty() || top_k == 0) return {};
    std::vector<std::string> texts;
    texts.reserve(candidates.size() + 1);
    texts.push_back(question);
    for (auto c : candidates) texts.push_back(corpus.at(c).text);
    auto vecs = ranker.embed_batch(texts);

    std::vector<ScoredCandidate> scored;
    scored.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) scored.push_back({candidates[i], cosine(vecs[0], vecs[i + 1])});
    const std::size_t n = std::min(top_k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                      [](const ScoredCandidate& a, const ScoredCandidate& b) {
                          const double ka = rank_key(a.score), kb = rank_key(b.score);
                          if (ka != kb) return ka > kb;
                          return a.ordinal < b.ordinal;
                      });
    scored.resize(n);
    return scored;
}

Expansion expand_path(const KnowledgeGraph& graph, const EmbeddingProvider& ranker, const TraversalAgent& agent,
                      const std::string& query, const SearchPath& path, std::span<const std::size_t> candidates,
                      std::size_t top_k) {
    std::vector<Passage> evidence;
    evidence.reserve(path.size());
    for (auto node : path) evidence.push_back(graph.corpus().at(node));

    Expansion out;
    out.decision = agent.decide(query, evidence);
    if (out.decision.is_stop()) return out;
    out.selected = rank_candidates(graph.corpus(), ranker, out.decision.question(), candidates, top_k);
    return out;
}

TraversalResult traverse(const KnowledgeGraph& graph, const TfidfModel& tfidf, const TraversalAgent& agent,
                         const EmbeddingProvider& ranker, const std::string& query, const TraversalConfig& config,
                         const TraceSink& trace, const std::string& query_id) {
    config.validate();
    if (tfidf.corpus().size() != graph.size()) {
        throw UsageError("traverse: TF-IDF model and graph were built over different corpora");
    }
    const auto started = std::chrono::steady_clock::now();
    const std::size_t n = graph.size();
    const std::size_t max_path_len = 1 + config.max_hops;

    TraversalResult result;
    std::vector<bool> visited(n, false);
    struct Pending {
        SearchPath path;
        std::vector<std::size_t> candidates;
    };
    std::deque<Pending> queue;
    auto neighbor_list = [&](std::size_t node) {
        auto nb = graph.neighbors(node);
        return std::vector<std::size_t>(nb.begin(), nb.end());
    };
    auto finish = [&] {
        if (result.retrieved.size() > config.budget) {
            result.retrieved.resize(config.budget);
            result.retrieved_ordinals.resize(config.budget);
        }
        result.nodes_visited = result.retrieved.size();
        result.wall_time =
            std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - started);
    };

    std::size_t counter = 0;
    std::size_t step = 0;
    try {
        for (const auto& seed : tfidf.top_k(query, config.n_seed)) {
            visited[seed.ordinal] = true;
            result.retrieved.push_back(seed.id);
            result.retrieved_ordinals.push_back(seed.ordinal);
            result.paths.push_back({seed.ordinal});
            if (max_path_len > 1) queue.push_back({{seed.ordinal}, neighbor_list(seed.ordinal)});
            ++counter;
        }

        while (!queue.empty()) {
            Pending item = std::move(queue.front());
            queue.pop_front();
            std::vector<std::size_t> candidates;
            for (auto c : item.candidates) {
                if (!visited[c]) candidates.push_back(c);
            }

            Expansion ex = expand_path(graph, ranker, agent, query, item.path, candidates, config.top_k);
            ++result.iterations;
            ++step;

            bool halt = false;
            std::vector<std::size_t> selected;
            if (ex.decision.is_stop()) {
                if (config.early_termination) {
                    result.terminated_early = true;
                    halt = true;
                }
            } else {
                for (const auto& c : ex.selected) {
                    visited[c.ordinal] = true;
                    selected.push_back(c.ordinal);
                    SearchPath extended = item.path;
                    extended.push_back(c.ordinal);
                    result.paths.push_back(extended);
                    result.retrieved.push_back(graph.corpus()[c.ordinal].id);
                    result.retrieved_ordinals.push_back(c.ordinal);
                    if (extended.size() < max_path_len) queue.push_back({std::move(extended), neighbor_list(c.ordinal)});
                    if (++counter > config.budget) {
                        result.budget_exhausted = true;
                        halt = true;
                        break;
                    }
                }
            }
            if (trace) trace({query_id, step, item.path, ex.decision, selected, counter});
            if (halt) break;
        }
    } catch (const std::exception& e) {
        finish();
        throw TraversalFailure("traversal of '" + query + "' failed after " + std::to_string(result.iterations) +
                                   " iterations: " + e.what(),
                               result, std::current_exception());
    }
    finish();
    return result;
}

std::vector<ScoredPassage> dense_retrieve_baseline(const KnowledgeGraph& graph, const EmbeddingProvider& ranker,
                                                   const std::string& query, std::size_t k) {
    if (k < 1) throw UsageError("dense baseline requires k >= 1");
    const auto q = ranker.embed(query);
    std::vector<double> scores(graph.size());
    for (std::size_t i = 0; i < graph.size(); ++i) scores[i] = cosine(q, graph.embedding(i));
    std::vector<ScoredPassage> out;
    for (auto ord : rank_scores(scores, k)) out.push_back({graph.corpus()[ord].id, ord, scores[ord]});
    return out;
}

}  // namespace kgp
