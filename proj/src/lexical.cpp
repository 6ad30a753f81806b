#include "kgp/lexical.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "kgp/error.hpp"

namespace kgp {

namespace {

void require_k(std::size_t k) {
    if (k < 1) throw UsageError("top_k requires k >= 1");
}

std::vector<ScoredPassage> to_scored(const Corpus& corpus, const std::vector<double>& scores,
                                     std::size_t k) {
    std::vector<ScoredPassage> out;
    for (std::size_t ord : rank_scores(scores, k)) out.push_back({corpus[ord].id, ord, scores[ord]});
    return out;
}

}  // namespace

std::vector<std::size_t> rank_scores(const std::vector<double>& scores, std::size_t k) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t n = std::min(k, order.size());
    std::vector<double> keys(scores.size());
    std::transform(scores.begin(), scores.end(), keys.begin(), rank_key);
    auto better = [&](std::size_t a, std::size_t b) {
        if (keys[a] != keys[b]) return keys[a] > keys[b];
        return a < b;
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(), better);
    order.resize(n);
    return order;
}

TfidfModel TfidfModel::fit(std::shared_ptr<const Corpus> corpus) {
    if (!corpus || corpus->empty()) throw DataError("fit_tfidf: empty corpus");
    TfidfModel m;
    m.corpus_ = std::move(corpus);
    const std::size_t n = m.corpus_->size();

    // Term counts per document, keyed by column.
    std::vector<std::map<std::uint32_t, std::uint32_t>> counts(n);
    std::vector<std::uint32_t> df;
    for (std::size_t d = 0; d < n; ++d) {
        for (auto& tok : tokenize((*m.corpus_)[d].text)) {
            auto [it, inserted] = m.vocabulary_.emplace(std::move(tok), static_cast<std::uint32_t>(df.size()));
            if (inserted) df.push_back(0);
            if (counts[d][it->second]++ == 0) ++df[it->second];
        }
    }

    m.idf_.resize(df.size());
    for (std::size_t t = 0; t < df.size(); ++t) {
        m.idf_[t] = std::log((1.0 + static_cast<double>(n)) / (1.0 + static_cast<double>(df[t]))) + 1.0;
    }

    m.doc_vectors_.resize(n);
    m.postings_.resize(df.size());
    for (std::size_t d = 0; d < n; ++d) {
        SparseVector& v = m.doc_vectors_[d];
        double norm2 = 0.0;
        for (auto [col, tf] : counts[d]) {
            double w = static_cast<double>(tf) * m.idf_[col];
            v.emplace_back(col, w);
            norm2 += w * w;
        }
        if (norm2 > 0.0) {
            double inv = 1.0 / std::sqrt(norm2);
            for (auto& [col, w] : v) {
                w *= inv;
                m.postings_[col].push_back({static_cast<std::uint32_t>(d), w});
            }
        }
    }
    return m;
}

std::optional<std::uint32_t> TfidfModel::column(const std::string& term) const {
    auto it = vocabulary_.find(term);
    if (it == vocabulary_.end()) return std::nullopt;
    return it->second;
}

double TfidfModel::idf(const std::string& term) const {
    auto col = column(term);
    if (!col) throw NotFoundError("term '" + term + "' not in vocabulary");
    return idf_[*col];
}

SparseVector TfidfModel::vectorize(std::string_view text) const {
    std::map<std::uint32_t, std::uint32_t> counts;
    for (const auto& tok : tokenize(text)) {
        if (auto col = column(tok)) ++counts[*col];
    }
    SparseVector v;
    double norm2 = 0.0;
    for (auto [col, tf] : counts) {
        double w = static_cast<double>(tf) * idf_[col];
        v.emplace_back(col, w);
        norm2 += w * w;
    }
    if (norm2 > 0.0) {
        double inv = 1.0 / std::sqrt(norm2);
        for (auto& e : v) e.second *= inv;
    }
    return v;
}

std::vector<ScoredPassage> TfidfModel::top_k(std::string_view query, std::size_t k) const {
    require_k(k);
    SparseVector q = vectorize(query);
    if (q.empty()) return {};
    std::vector<double> scores(corpus_->size(), 0.0);
    for (auto [col, qw] : q) {
        for (const auto& p : postings_[col]) scores[p.doc] += qw * p.weight;
    }
    return to_scored(*corpus_, scores, k);
}

Bm25Model Bm25Model::fit(std::shared_ptr<const Corpus> corpus, Bm25Params params) {
    if (!corpus || corpus->empty()) throw DataError("fit_bm25: empty corpus");
    if (!(params.k1 > 0.0)) throw UsageError("bm25: k1 must be > 0");
    if (!(params.b >= 0.0 && params.b <= 1.0)) throw UsageError("bm25: b must be in [0, 1]");
    Bm25Model m;
    m.corpus_ = std::move(corpus);
    m.params_ = params;
    const std::size_t n = m.corpus_->size();
    m.doc_lengths_.resize(n);
    std::size_t total = 0;
    for (std::size_t d = 0; d < n; ++d) {
        auto tokens = tokenize((*m.corpus_)[d].text);
        m.doc_lengths_[d] = tokens.size();
        total += tokens.size();
        std::map<std::uint32_t, std::uint32_t> counts;
        for (auto& tok : tokens) {
            auto [it, inserted] =
                m.vocabulary_.emplace(std::move(tok), static_cast<std::uint32_t>(m.postings_.size()));
            if (inserted) m.postings_.emplace_back();
            ++counts[it->second];
        }
        for (auto [col, tf] : counts) m.postings_[col].push_back({static_cast<std::uint32_t>(d), tf});
    }
    m.avg_length_ = static_cast<double>(total) / static_cast<double>(n);
    return m;
}

std::size_t Bm25Model::document_frequency(const std::string& term) const {
    auto it = vocabulary_.find(term);
    return it == vocabulary_.end() ? 0 : postings_[it->second].size();
}

double Bm25Model::idf(const std::string& term) const {
    const double n = static_cast<double>(corpus_->size());
    const double df = static_cast<double>(document_frequency(term));
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

std::vector<ScoredPassage> Bm25Model::top_k(std::string_view query, std::size_t k) const {
    require_k(k);
    std::vector<double> scores(corpus_->size(), 0.0);
    bool any_known = false;
    const double n = static_cast<double>(corpus_->size());
    for (const auto& tok : tokenize(query)) {
        auto it = vocabulary_.find(tok);
        if (it == vocabulary_.end()) continue;
        any_known = true;
        const auto& plist = postings_[it->second];
        const double df = static_cast<double>(plist.size());
        const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
        for (const auto& p : plist) {
            const double tf = p.tf;
            const double norm = 1.0 - params_.b + params_.b * static_cast<double>(doc_lengths_[p.doc]) / avg_length_;
            scores[p.doc] += idf * tf * (params_.k1 + 1.0) / (tf + params_.k1 * norm);
        }
    }
    if (!any_known) return {};
    return to_scored(*corpus_, scores, k);
}

}  // namespace kgp
