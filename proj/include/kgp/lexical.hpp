#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kgp/corpus.hpp"
#include "kgp/text.hpp"

namespace kgp {

struct ScoredPassage {
    std::string id;
    std::size_t ordinal = 0;
    double score = 0.0;
};

/// Sparse vector keyed by vocabulary column, sorted by column.
using SparseVector = std::vector<std::pair<std::uint32_t, double>>;

/// TF-IDF with smoothed idf ln((1+N)/(1+df)) + 1 and raw term counts.
/// Document vectors are L2-normalized; scores are cosines.
class TfidfModel {
public:
    static TfidfModel fit(std::shared_ptr<const Corpus> corpus);

    /// Descending by score, ties by ascending ordinal, length min(k, N).
    /// A query with no known terms yields an empty result.
    std::vector<ScoredPassage> top_k(std::string_view query, std::size_t k) const;

    /// Normalized query vector over the fitted vocabulary (unknown terms dropped).
    SparseVector vectorize(std::string_view text) const;

    std::size_t vocabulary_size() const noexcept { return idf_.size(); }
    std::optional<std::uint32_t> column(const std::string& term) const;
    double idf(const std::string& term) const;
    const SparseVector& doc_vector(std::size_t ordinal) const { return doc_vectors_.at(ordinal); }
    const Corpus& corpus() const noexcept { return *corpus_; }
    const std::shared_ptr<const Corpus>& corpus_ptr() const noexcept { return corpus_; }

private:
    struct Posting {
        std::uint32_t doc;
        double weight;
    };

    std::shared_ptr<const Corpus> corpus_;
    std::unordered_map<std::string, std::uint32_t> vocabulary_;
    std::vector<double> idf_;
    std::vector<SparseVector> doc_vectors_;
    std::vector<std::vector<Posting>> postings_;
};

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

/// Okapi BM25 with idf ln(1 + (N - df + 0.5) / (df + 0.5)). Every query token
/// occurrence contributes, so repeated query terms weigh more.
class Bm25Model {
public:
    static Bm25Model fit(std::shared_ptr<const Corpus> corpus, Bm25Params params = {});

    std::vector<ScoredPassage> top_k(std::string_view query, std::size_t k) const;

    const Bm25Params& params() const noexcept { return params_; }
    double average_length() const noexcept { return avg_length_; }
    std::size_t document_length(std::size_t ordinal) const { return doc_lengths_.at(ordinal); }
    std::size_t document_frequency(const std::string& term) const;
    double idf(const std::string& term) const;
    const Corpus& corpus() const noexcept { return *corpus_; }

private:
    struct Posting {
        std::uint32_t doc;
        std::uint32_t tf;
    };

    std::shared_ptr<const Corpus> corpus_;
    Bm25Params params_;
    std::unordered_map<std::string, std::uint32_t> vocabulary_;
    std::vector<std::vector<Posting>> postings_;
    std::vector<std::size_t> doc_lengths_;
    double avg_length_ = 0.0;
};

/// Scores are ordered on a 1e-12 grid so rounding noise between equal scores
/// computed along different paths cannot reorder them; those fall back to
/// ascending ordinal.
inline double rank_key(double score) { return std::nearbyint(score * 1e12); }

/// Sorts ordinals by (rank_key desc, ordinal asc) and keeps the first k.
std::vector<std::size_t> rank_scores(const std::vector<double>& scores, std::size_t k);

}  // namespace kgp
