#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgp {

/// Dense vector; unit L2 norm, or all zeros for text without tokens.
class EmbeddingVector {
public:
    EmbeddingVector() = default;
    explicit EmbeddingVector(std::vector<float> values) : values_(std::move(values)) {}

    /// Scales to unit length in double precision; zero input stays zero.
    static EmbeddingVector normalized(std::span<const double> raw);
    static EmbeddingVector normalized(std::span<const float> raw);

    std::size_t dimension() const noexcept { return values_.size(); }
    std::span<const float> values() const noexcept { return values_; }
    float operator[](std::size_t i) const { return values_[i]; }
    bool is_zero() const noexcept;
    double norm() const noexcept;

    bool operator==(const EmbeddingVector&) const = default;

private:
    std::vector<float> values_;
};

/// Dot product accumulated in double. Inputs are unit vectors by construction,
/// so this is the cosine; a zero vector yields 0. Throws on dimension mismatch.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    virtual std::string name() const = 0;
    virtual std::size_t dimension() const = 0;
    virtual bool deterministic() const { return false; }

    /// One normalized vector per input, same order. `texts` must be non-empty.
    virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const = 0;

    EmbeddingVector embed(std::string_view text) const;
};

/// Seeded feature hashing over tokenize(): each token adds +-1 to one bucket.
class HashEmbedder final : public EmbeddingProvider {
public:
    static constexpr std::size_t kDefaultDimension = 256;

    explicit HashEmbedder(std::size_t dimension = kDefaultDimension, std::uint64_t seed = 0);

    std::string name() const override;
    std::size_t dimension() const override { return dimension_; }
    bool deterministic() const override { return true; }
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;

    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::size_t dimension_;
    std::uint64_t seed_;
};

EmbeddingVector hash_embed(std::string_view text, std::size_t dimension = HashEmbedder::kDefaultDimension,
                           std::uint64_t seed = 0);

/// Seeded FNV-1a over the bytes with a splitmix64 finalizer. Stable across
/// platforms; exposed for tests and the graph-file checksum.
std::uint64_t stable_hash(std::string_view bytes, std::uint64_t seed);

struct RemoteEmbedderConfig {
    std::string base_url;  // e.g. "https://api.openai.com/v1"; requests go to {base_url}/embeddings
    std::string model;
    std::size_t dimension = 0;  // declared; responses of any other size are rejected
    std::string api_key_env = "OPENAI_API_KEY";
    std::chrono::milliseconds timeout{60000};
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{500};
    std::size_t batch_size = 64;
    int max_in_flight = 4;
};

/// Client for the common embeddings wire shape:
///   POST {base_url}/embeddings  {"model": m, "input": [texts...]}
///   -> {"data": [{"index": i, "embedding": [floats...]}, ...]}
/// Batches run concurrently up to max_in_flight; result order follows input.
class RemoteEmbedder final : public EmbeddingProvider {
public:
    explicit RemoteEmbedder(RemoteEmbedderConfig config);

    std::string name() const override { return "remote:" + config_.model; }
    std::size_t dimension() const override { return config_.dimension; }
    bool deterministic() const override { return false; }
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;

    const RemoteEmbedderConfig& config() const noexcept { return config_; }

private:
    std::vector<EmbeddingVector> embed_range(std::span<const std::string> texts, std::size_t offset) const;

    RemoteEmbedderConfig config_;
};

/// Memoizes another provider by exact text. Useful when a remote ranker sees
/// the same neighbor passages across many expansions.
class CachingEmbedder final : public EmbeddingProvider {
public:
    explicit CachingEmbedder(std::shared_ptr<const EmbeddingProvider> inner) : inner_(std::move(inner)) {}

    std::string name() const override { return inner_->name(); }
    std::size_t dimension() const override { return inner_->dimension(); }
    bool deterministic() const override { return inner_->deterministic(); }
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;

    std::size_t cached() const;

private:
    std::shared_ptr<const EmbeddingProvider> inner_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<std::string, EmbeddingVector> cache_;
};

}  // namespace kgp
