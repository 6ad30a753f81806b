#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "kgp/embedding.hpp"
#include "kgp/llm_client.hpp"
#include "kgp/traversal.hpp"

namespace kgp {

struct EmbeddingRoleConfig {
    std::string provider = "hash";  // "hash" or "remote"
    std::size_t dimension = HashEmbedder::kDefaultDimension;
    std::uint64_t seed = 0;
    RemoteEmbedderConfig remote;  // provider == "remote"
};

/// "hash", "hash:dim=512,seed=3" or "remote" (the remote settings then come
/// from `base`). Throws UsageError on anything else.
EmbeddingRoleConfig parse_provider_spec(const std::string& spec, const EmbeddingRoleConfig& base = {});

std::shared_ptr<const EmbeddingProvider> make_provider(const EmbeddingRoleConfig& config);

struct EngineConfig {
    std::optional<std::filesystem::path> corpus;
    std::optional<std::filesystem::path> graph;
    std::optional<std::filesystem::path> prompts_dir;
    EmbeddingRoleConfig graph_embedding;
    EmbeddingRoleConfig ranker;
    std::optional<RoleConfig> agent;
    std::optional<RoleConfig> answerer;
    std::optional<RoleConfig> judge;
    std::optional<RoleConfig> dataset;
    TraversalConfig traversal;
    std::size_t k_edges = 10;
    double threshold = 0.9;
    std::size_t workers = 1;
    std::uint64_t seed = 0;
    std::size_t evidence_budget = 8000;
    std::size_t answer_budget = 16000;
};

/// Relative paths resolve against `base_dir`. Unknown keys are rejected.
EngineConfig parse_engine_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
EngineConfig load_engine_config(const std::filesystem::path& path);

}  // namespace kgp
