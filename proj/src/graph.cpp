#include "kgp/graph.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>
#include <thread>

#include "kgp/error.hpp"
#include "kgp/lexical.hpp"

namespace kgp {

namespace {

constexpr char kMagic[8] = {'K', 'G', 'P', 'G', 'R', 'A', 'P', 'H'};

void check_invariants(std::size_t n_corpus, const std::vector<EmbeddingVector>& embeddings, const Adjacency& adj,
                      std::size_t dimension) {
    if (embeddings.size() != n_corpus) throw CorruptFileError("graph: embedding count does not match corpus size");
    if (adj.size() != n_corpus) throw CorruptFileError("graph: adjacency size does not match corpus size");
    for (const auto& e : embeddings) {
        if (e.dimension() != dimension) throw CorruptFileError("graph: inconsistent embedding dimension");
    }
    for (std::size_t i = 0; i < adj.size(); ++i) {
        const auto& row = adj[i];
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (row[j] >= adj.size()) throw CorruptFileError("graph: neighbor ordinal out of range");
            if (row[j] == i) throw CorruptFileError("graph: self loop at node " + std::to_string(i));
            if (j > 0 && row[j] <= row[j - 1]) throw CorruptFileError("graph: neighbor list not sorted/unique");
        }
    }
    for (std::size_t i = 0; i < adj.size(); ++i) {
        for (auto j : adj[i]) {
            if (!std::binary_search(adj[j].begin(), adj[j].end(), static_cast<std::uint32_t>(i))) {
                throw CorruptFileError("graph: adjacency not symmetric at edge " + std::to_string(i) + "-" +
                                       std::to_string(j));
            }
        }
    }
}

// Little-endian byte writer/reader; floats go through their bit pattern.
class Writer {
public:
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        buf_.append(s);
    }
    void raw(const char* p, std::size_t n) { buf_.append(p, n); }
    std::string& buffer() { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    Reader(const std::string& bytes, std::size_t limit) : bytes_(bytes), limit_(limit) {}

    void need(std::size_t n) const {
        if (limit_ - pos_ < n) throw CorruptFileError("graph file truncated at byte " + std::to_string(pos_));
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
    std::string str() {
        auto n = u32();
        need(n);
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::string raw(std::size_t n) {
        need(n);
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t pos() const { return pos_; }

private:
    const std::string& bytes_;
    std::size_t limit_;
    std::size_t pos_ = 0;
};

}  // namespace

KnowledgeGraph::KnowledgeGraph(std::shared_ptr<const Corpus> corpus, std::vector<EmbeddingVector> embeddings,
                               Adjacency adjacency, std::size_t k_edges, std::string provider_name)
    : corpus_(std::move(corpus)),
      embeddings_(std::move(embeddings)),
      adjacency_(std::move(adjacency)),
      k_edges_(k_edges),
      dimension_(embeddings_.empty() ? 0 : embeddings_.front().dimension()),
      provider_name_(std::move(provider_name)) {
    if (!corpus_) throw UsageError("graph: null corpus");
    check_invariants(corpus_->size(), embeddings_, adjacency_, dimension_);
}

std::span<const std::uint32_t> KnowledgeGraph::neighbors(std::size_t node) const {
    if (node >= adjacency_.size()) {
        throw NotFoundError("graph node " + std::to_string(node) + " out of range (size " +
                            std::to_string(adjacency_.size()) + ")");
    }
    return adjacency_[node];
}

std::size_t KnowledgeGraph::edge_count() const noexcept {
    std::size_t total = 0;
    for (const auto& row : adjacency_) total += row.size();
    return total / 2;
}

bool KnowledgeGraph::has_edge(std::size_t a, std::size_t b) const {
    auto row = neighbors(a);
    return std::binary_search(row.begin(), row.end(), static_cast<std::uint32_t>(b));
}

bool KnowledgeGraph::operator==(const KnowledgeGraph& other) const {
    return k_edges_ == other.k_edges_ && dimension_ == other.dimension_ && provider_name_ == other.provider_name_ &&
           adjacency_ == other.adjacency_ && embeddings_ == other.embeddings_ && *corpus_ == *other.corpus_;
}

Adjacency symmetric_knn(std::size_t n, std::size_t k, const std::function<double(std::size_t, std::size_t)>& similarity,
                        std::size_t workers) {
    if (k < 1) throw UsageError("k_edges must be >= 1");
    if (k >= n) throw UsageError("k_edges (" + std::to_string(k) + ") must be smaller than the corpus size (" +
                                 std::to_string(n) + ")");
    std::vector<std::vector<std::uint32_t>> directed(n);
    auto fill_rows = [&](std::size_t begin, std::size_t end) {
        std::vector<std::pair<double, std::uint32_t>> row;
        row.reserve(n);
        for (std::size_t i = begin; i < end; ++i) {
            row.clear();
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) row.emplace_back(rank_key(similarity(i, j)), static_cast<std::uint32_t>(j));
            }
            auto better = [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
            };
            std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k), row.end(), better);
            auto& out = directed[i];
            out.reserve(k);
            for (std::size_t r = 0; r < k; ++r) out.push_back(row[r].second);
        }
    };
    workers = std::clamp<std::size_t>(workers, 1, n);
    if (workers == 1) {
        fill_rows(0, n);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (n + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            if (begin < end) pool.emplace_back(fill_rows, begin, end);
        }
    }

    Adjacency adj(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto j : directed[i]) {
            adj[i].push_back(j);
            adj[j].push_back(static_cast<std::uint32_t>(i));
        }
    }
    for (auto& row : adj) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    return adj;
}

Adjacency symmetric_knn(std::span<const EmbeddingVector> embeddings, std::size_t k, std::size_t workers) {
    return symmetric_knn(
        embeddings.size(), k, [&](std::size_t i, std::size_t j) { return cosine(embeddings[i], embeddings[j]); },
        workers);
}

KnowledgeGraph build_graph(std::shared_ptr<const Corpus> corpus, const EmbeddingProvider& provider,
                           std::size_t k_edges, std::size_t workers) {
    if (!corpus || corpus->size() < 2) throw UsageError("build_graph: corpus needs at least 2 passages");
    if (k_edges < 1 || k_edges >= corpus->size()) {
        throw UsageError("build_graph: k_edges must be in [1, " + std::to_string(corpus->size() - 1) + "], got " +
                         std::to_string(k_edges));
    }
    std::vector<std::string> texts;
    texts.reserve(corpus->size());
    for (const auto& p : *corpus) texts.push_back(p.text);
    auto embeddings = provider.embed_batch(texts);
    if (embeddings.size() != texts.size()) throw DataError("build_graph: provider returned wrong number of vectors");
    for (const auto& e : embeddings) {
        if (e.dimension() != provider.dimension()) {
            throw DataError("build_graph: provider returned dimension " + std::to_string(e.dimension()) +
                            ", declared " + std::to_string(provider.dimension()));
        }
    }
    auto adjacency = symmetric_knn(embeddings, k_edges, workers);
    return KnowledgeGraph(std::move(corpus), std::move(embeddings), std::move(adjacency), k_edges, provider.name());
}

std::string serialize_graph(const KnowledgeGraph& graph) {
    Writer w;
    w.raw(kMagic, sizeof kMagic);
    w.u32(kGraphFormatVersion);
    w.str(graph.provider_name());
    w.u32(static_cast<std::uint32_t>(graph.dimension()));
    w.u32(static_cast<std::uint32_t>(graph.k_edges()));
    w.u64(graph.size());
    for (const auto& p : graph.corpus()) w.str(p.id);
    for (const auto& e : graph.embeddings()) {
        for (float v : e.values()) w.f32(v);
    }
    for (const auto& row : graph.adjacency()) {
        w.u32(static_cast<std::uint32_t>(row.size()));
        for (auto j : row) w.u32(j);
    }
    const std::uint64_t checksum = stable_hash(w.buffer(), 0);
    w.u64(checksum);
    return std::move(w.buffer());
}

void save_graph(const KnowledgeGraph& graph, const std::filesystem::path& path) {
    const std::string bytes = serialize_graph(graph);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write graph file '" + path.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

KnowledgeGraph deserialize_graph(const std::string& bytes, std::shared_ptr<const Corpus> corpus) {
    if (!corpus) throw UsageError("load_graph: null corpus");
    if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
        throw CorruptFileError("not a graph file (bad magic)");
    }
    if (bytes.size() < sizeof kMagic + 4 + 8) throw CorruptFileError("graph file truncated");
    const std::size_t payload = bytes.size() - 8;

    Reader r(bytes, payload);
    r.raw(sizeof kMagic);
    const auto version = r.u32();
    if (version != kGraphFormatVersion) {
        throw ProvenanceError("graph file version " + std::to_string(version) + " unsupported (expected " +
                              std::to_string(kGraphFormatVersion) + ")");
    }
    Reader tail(bytes, bytes.size());
    tail.raw(payload);
    const std::uint64_t stored = tail.u64();
    if (stable_hash(std::string_view(bytes.data(), payload), 0) != stored) {
        throw CorruptFileError("graph file checksum mismatch (truncated or modified)");
    }

    std::string provider = r.str();
    const std::size_t dim = r.u32();
    const std::size_t k_edges = r.u32();
    const std::uint64_t n = r.u64();
    if (n != corpus->size()) {
        throw ProvenanceError("graph has " + std::to_string(n) + " nodes but corpus has " +
                              std::to_string(corpus->size()) + " passages");
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::string id = r.str();
        if (id != (*corpus)[i].id) {
            throw ProvenanceError("graph node " + std::to_string(i) + " is '" + id + "' but corpus has '" +
                                  (*corpus)[i].id + "'");
        }
    }
    r.need(static_cast<std::size_t>(n) * dim * 4);
    std::vector<EmbeddingVector> embeddings;
    embeddings.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<float> v(dim);
        for (auto& x : v) x = r.f32();
        embeddings.emplace_back(std::move(v));
    }
    Adjacency adj(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto deg = r.u32();
        r.need(static_cast<std::size_t>(deg) * 4);
        adj[i].resize(deg);
        for (auto& j : adj[i]) j = r.u32();
    }
    if (r.pos() != payload) throw CorruptFileError("graph file has trailing bytes");
    return KnowledgeGraph(std::move(corpus), std::move(embeddings), std::move(adj), k_edges, std::move(provider));
}

KnowledgeGraph load_graph(const std::filesystem::path& path, std::shared_ptr<const Corpus> corpus) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read graph file '" + path.string() + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_graph(bytes, std::move(corpus));
}

}  // namespace kgp
