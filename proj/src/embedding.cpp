#include "kgp/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <semaphore>

#include <nlohmann/json.hpp>

#include "http.hpp"
#include "kgp/error.hpp"
#include "kgp/text.hpp"

namespace kgp {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kSignSalt = 0x5BD1E9955BD1E995ULL;

template <typename T>
EmbeddingVector normalize_impl(std::span<const T> raw) {
    double norm2 = 0.0;
    for (T v : raw) norm2 += static_cast<double>(v) * static_cast<double>(v);
    std::vector<float> out(raw.size(), 0.0f);
    if (norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t i = 0; i < raw.size(); ++i) out[i] = static_cast<float>(static_cast<double>(raw[i]) * inv);
    }
    return EmbeddingVector(std::move(out));
}

// Re-throws the in-flight NetworkError with the batch range prefixed,
// preserving its concrete type.
[[noreturn]] void rethrow_with_range(std::size_t begin, std::size_t end) {
    const std::string prefix = "embedding batch [" + std::to_string(begin) + ", " + std::to_string(end) + "): ";
    try {
        throw;
    } catch (const TimeoutError& e) {
        throw TimeoutError(prefix + e.what());
    } catch (const AuthError& e) {
        throw AuthError(prefix + e.what());
    } catch (const HttpStatusError& e) {
        throw HttpStatusError(e.status(), prefix + e.what());
    } catch (const MalformedResponseError& e) {
        throw MalformedResponseError(prefix + e.what());
    } catch (const NetworkError& e) {
        throw NetworkError(prefix + e.what());
    }
}

}  // namespace

EmbeddingVector EmbeddingVector::normalized(std::span<const double> raw) { return normalize_impl(raw); }
EmbeddingVector EmbeddingVector::normalized(std::span<const float> raw) { return normalize_impl(raw); }

bool EmbeddingVector::is_zero() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](float v) { return v == 0.0f; });
}

double EmbeddingVector::norm() const noexcept {
    double s = 0.0;
    for (float v : values_) s += static_cast<double>(v) * v;
    return std::sqrt(s);
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dimension() != b.dimension()) {
        throw UsageError("cosine: dimension mismatch (" + std::to_string(a.dimension()) + " vs " +
                         std::to_string(b.dimension()) + ")");
    }
    auto x = a.values();
    auto y = b.values();
    double dot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) dot += static_cast<double>(x[i]) * static_cast<double>(y[i]);
    return dot;
}

EmbeddingVector EmbeddingProvider::embed(std::string_view text) const {
    std::string owned(text);
    return embed_batch(std::span<const std::string>(&owned, 1)).front();
}

std::uint64_t stable_hash(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t h = 0xCBF29CE484222325ULL ^ splitmix64(seed);
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return splitmix64(h);
}

EmbeddingVector hash_embed(std::string_view text, std::size_t dimension, std::uint64_t seed) {
    if (dimension < 16) throw UsageError("hash_embed: dimension must be >= 16");
    std::vector<double> acc(dimension, 0.0);
    for (const auto& tok : tokenize(text)) {
        const std::size_t bucket = stable_hash(tok, seed) % dimension;
        const bool negative = (stable_hash(tok, seed ^ kSignSalt) >> 63) != 0;
        acc[bucket] += negative ? -1.0 : 1.0;
    }
    return EmbeddingVector::normalized(std::span<const double>(acc));
}

HashEmbedder::HashEmbedder(std::size_t dimension, std::uint64_t seed) : dimension_(dimension), seed_(seed) {
    if (dimension < 16) throw UsageError("hash embedder: dimension must be >= 16");
}

std::string HashEmbedder::name() const { return "hash:seed=" + std::to_string(seed_); }

std::vector<EmbeddingVector> HashEmbedder::embed_batch(std::span<const std::string> texts) const {
    if (texts.empty()) throw UsageError("embed_batch: empty input");
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(hash_embed(t, dimension_, seed_));
    return out;
}

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) throw UsageError("remote embedder: base_url not configured");
    if (config_.model.empty()) throw UsageError("remote embedder: model not configured");
    if (config_.dimension == 0) throw UsageError("remote embedder: declared dimension must be positive");
    if (config_.batch_size == 0) throw UsageError("remote embedder: batch_size must be positive");
    if (config_.max_in_flight < 1) throw UsageError("remote embedder: max_in_flight must be >= 1");
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_range(std::span<const std::string> texts,
                                                         std::size_t offset) const {
    detail::HttpTarget target{config_.base_url, detail::credential_from_env(config_.api_key_env), config_.timeout};
    nlohmann::json req = {{"model", config_.model}, {"input", std::vector<std::string>(texts.begin(), texts.end())}};
    const std::string body = req.dump();
    std::vector<EmbeddingVector> out;
    int attempts = 0;
    try {
        detail::with_retries(
            {config_.max_retries, config_.initial_backoff},
            [&] {
                auto reply = detail::post_json(target, "/embeddings", body);
                detail::raise_for_status(reply, "embeddings");
                nlohmann::json doc;
                try {
                    doc = nlohmann::json::parse(reply.body);
                } catch (const nlohmann::json::exception& e) {
                    throw MalformedResponseError(std::string("embeddings: invalid JSON: ") + e.what());
                }
                if (!doc.contains("data") || !doc["data"].is_array() || doc["data"].size() != texts.size()) {
                    throw MalformedResponseError("embeddings: expected " + std::to_string(texts.size()) +
                                                 " items in 'data'");
                }
                std::vector<EmbeddingVector> batch(texts.size());
                std::vector<bool> seen(texts.size(), false);
                for (std::size_t i = 0; i < doc["data"].size(); ++i) {
                    const auto& item = doc["data"][i];
                    std::size_t idx = i;
                    if (item.contains("index") && item["index"].is_number_unsigned()) idx = item["index"].get<std::size_t>();
                    if (idx >= texts.size() || seen[idx]) throw MalformedResponseError("embeddings: bad item index");
                    if (!item.contains("embedding") || !item["embedding"].is_array()) {
                        throw MalformedResponseError("embeddings: item without 'embedding' array");
                    }
                    std::vector<double> raw;
                    try {
                        raw = item["embedding"].get<std::vector<double>>();
                    } catch (const nlohmann::json::exception&) {
                        throw MalformedResponseError("embeddings: non-numeric embedding values");
                    }
                    if (raw.size() != config_.dimension) {
                        throw MalformedResponseError("embeddings: dimension " + std::to_string(raw.size()) +
                                                     " does not match declared " + std::to_string(config_.dimension));
                    }
                    seen[idx] = true;
                    batch[idx] = EmbeddingVector::normalized(std::span<const double>(raw));
                }
                out = std::move(batch);
            },
            attempts);
    } catch (const NetworkError&) {
        rethrow_with_range(offset, offset + texts.size());
    }
    return out;
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(std::span<const std::string> texts) const {
    if (texts.empty()) throw UsageError("embed_batch: empty input");
    const std::size_t n_batches = (texts.size() + config_.batch_size - 1) / config_.batch_size;
    std::vector<std::vector<EmbeddingVector>> parts(n_batches);
    std::counting_semaphore<> slots(config_.max_in_flight);
    std::vector<std::future<void>> jobs;
    jobs.reserve(n_batches);
    for (std::size_t b = 0; b < n_batches; ++b) {
        const std::size_t begin = b * config_.batch_size;
        const std::size_t len = std::min(config_.batch_size, texts.size() - begin);
        slots.acquire();
        jobs.push_back(std::async(std::launch::async, [&, b, begin, len] {
            struct Release {
                std::counting_semaphore<>& s;
                ~Release() { s.release(); }
            } release{slots};
            parts[b] = embed_range(texts.subspan(begin, len), begin);
        }));
    }
    // Wait for everything before surfacing the first failure in batch order.
    for (auto& j : jobs) j.wait();
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (std::size_t b = 0; b < n_batches; ++b) {
        jobs[b].get();
        for (auto& v : parts[b]) out.push_back(std::move(v));
    }
    return out;
}

std::vector<EmbeddingVector> CachingEmbedder::embed_batch(std::span<const std::string> texts) const {
    if (texts.empty()) throw UsageError("embed_batch: empty input");
    std::vector<std::string> missing;
    {
        std::lock_guard lock(mutex_);
        for (const auto& t : texts) {
            if (!cache_.count(t) && std::find(missing.begin(), missing.end(), t) == missing.end()) missing.push_back(t);
        }
    }
    if (!missing.empty()) {
        auto fresh = inner_->embed_batch(missing);
        std::lock_guard lock(mutex_);
        for (std::size_t i = 0; i < missing.size(); ++i) cache_.emplace(missing[i], std::move(fresh[i]));
    }
    std::lock_guard lock(mutex_);
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(cache_.at(t));
    return out;
}

std::size_t CachingEmbedder::cached() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
}

}  // namespace kgp
