#include "kgp/config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

#include "kgp/error.hpp"

namespace kgp {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    if (!j.is_object()) throw UsageError("config: " + where + " must be an object");
    for (auto& [key, _] : j.items()) {
        if (!known.count(key)) throw UsageError("config: unknown key '" + key + "' in " + where);
    }
}

EmbeddingRoleConfig parse_embedding(const json& j, const std::string& where) {
    reject_unknown(j, {"provider", "dimension", "seed", "base_url", "model", "api_key_env", "timeout_ms",
                       "max_retries", "backoff_ms", "batch_size", "max_in_flight"},
                   where);
    EmbeddingRoleConfig c;
    c.provider = j.value("provider", c.provider);
    c.dimension = j.value("dimension", c.dimension);
    c.seed = j.value("seed", c.seed);
    auto& r = c.remote;
    r.base_url = j.value("base_url", r.base_url);
    r.model = j.value("model", r.model);
    r.dimension = c.dimension;
    r.api_key_env = j.value("api_key_env", r.api_key_env);
    r.timeout = std::chrono::milliseconds(j.value("timeout_ms", r.timeout.count()));
    r.max_retries = j.value("max_retries", r.max_retries);
    r.initial_backoff = std::chrono::milliseconds(j.value("backoff_ms", r.initial_backoff.count()));
    r.batch_size = j.value("batch_size", r.batch_size);
    r.max_in_flight = j.value("max_in_flight", r.max_in_flight);
    if (c.provider != "hash" && c.provider != "remote") {
        throw UsageError("config: " + where + ".provider must be \"hash\" or \"remote\"");
    }
    return c;
}

RoleConfig parse_role(const json& j, const std::string& where) {
    reject_unknown(j, {"base_url", "model", "api_key_env", "timeout_ms", "max_retries", "backoff_ms", "max_in_flight",
                       "temperature", "top_p", "max_tokens"},
                   where);
    RoleConfig r;
    auto& e = r.endpoint;
    e.base_url = j.value("base_url", e.base_url);
    e.api_key_env = j.value("api_key_env", e.api_key_env);
    e.timeout = std::chrono::milliseconds(j.value("timeout_ms", e.timeout.count()));
    e.max_retries = j.value("max_retries", e.max_retries);
    e.initial_backoff = std::chrono::milliseconds(j.value("backoff_ms", e.initial_backoff.count()));
    e.max_in_flight = j.value("max_in_flight", e.max_in_flight);
    r.model = j.value("model", r.model);
    r.decode.temperature = j.value("temperature", r.decode.temperature);
    r.decode.top_p = j.value("top_p", r.decode.top_p);
    r.decode.max_tokens = j.value("max_tokens", r.decode.max_tokens);
    if (e.base_url.empty()) throw UsageError("config: " + where + ".base_url is required");
    if (r.model.empty()) throw UsageError("config: " + where + ".model is required");
    return r;
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        auto v = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("provider spec: bad " + what + " '" + s + "'");
    }
}

}  // namespace

EmbeddingRoleConfig parse_provider_spec(const std::string& spec, const EmbeddingRoleConfig& base) {
    if (spec == "remote") {
        auto c = base;
        c.provider = "remote";
        return c;
    }
    if (spec.rfind("hash", 0) != 0) throw UsageError("unknown embedding provider '" + spec + "'");
    EmbeddingRoleConfig c;
    c.provider = "hash";
    if (spec.size() == 4) return c;
    if (spec[4] != ':') throw UsageError("unknown embedding provider '" + spec + "'");
    std::string rest = spec.substr(5);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
        auto comma = rest.find(',', pos);
        auto item = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("provider spec: expected key=value, got '" + item + "'");
        auto key = item.substr(0, eq);
        auto value = item.substr(eq + 1);
        if (key == "dim" || key == "dimension") c.dimension = parse_u64(value, "dimension");
        else if (key == "seed") c.seed = parse_u64(value, "seed");
        else throw UsageError("provider spec: unknown key '" + key + "'");
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return c;
}

std::shared_ptr<const EmbeddingProvider> make_provider(const EmbeddingRoleConfig& c) {
    if (c.provider == "hash") return std::make_shared<HashEmbedder>(c.dimension, c.seed);
    if (c.provider == "remote") {
        auto remote = c.remote;
        if (remote.dimension == 0) remote.dimension = c.dimension;
        return std::make_shared<CachingEmbedder>(std::make_shared<RemoteEmbedder>(remote));
    }
    throw UsageError("unknown embedding provider '" + c.provider + "'");
}

EngineConfig parse_engine_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    reject_unknown(j, {"corpus", "graph", "prompts_dir", "embedding", "llm", "traversal", "k_edges", "eval", "seed",
                       "evidence_budget", "answer_budget"},
                   "config");
    EngineConfig c;
    try {
        auto path = [&](const char* key) -> std::optional<std::filesystem::path> {
            if (!j.contains(key)) return std::nullopt;
            std::filesystem::path p = j[key].get<std::string>();
            return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
        };
        c.corpus = path("corpus");
        c.graph = path("graph");
        c.prompts_dir = path("prompts_dir");
        if (j.contains("embedding")) {
            const auto& e = j["embedding"];
            reject_unknown(e, {"graph", "ranker"}, "embedding");
            if (e.contains("graph")) c.graph_embedding = parse_embedding(e["graph"], "embedding.graph");
            c.ranker = e.contains("ranker") ? parse_embedding(e["ranker"], "embedding.ranker") : c.graph_embedding;
        }
        if (j.contains("llm")) {
            const auto& l = j["llm"];
            reject_unknown(l, {"agent", "answerer", "judge", "dataset"}, "llm");
            if (l.contains("agent")) c.agent = parse_role(l["agent"], "llm.agent");
            if (l.contains("answerer")) c.answerer = parse_role(l["answerer"], "llm.answerer");
            if (l.contains("judge")) c.judge = parse_role(l["judge"], "llm.judge");
            if (l.contains("dataset")) c.dataset = parse_role(l["dataset"], "llm.dataset");
        }
        if (j.contains("traversal")) {
            const auto& t = j["traversal"];
            reject_unknown(t, {"budget", "n_seed", "top_k", "max_hops", "early_termination"}, "traversal");
            c.traversal.budget = t.value("budget", c.traversal.budget);
            c.traversal.n_seed = t.value("n_seed", c.traversal.n_seed);
            c.traversal.top_k = t.value("top_k", c.traversal.top_k);
            c.traversal.max_hops = t.value("max_hops", c.traversal.max_hops);
            c.traversal.early_termination = t.value("early_termination", c.traversal.early_termination);
            c.traversal.validate();
        }
        if (j.contains("eval")) {
            const auto& e = j["eval"];
            reject_unknown(e, {"threshold", "workers"}, "eval");
            c.threshold = e.value("threshold", c.threshold);
            c.workers = e.value("workers", c.workers);
        }
        c.k_edges = j.value("k_edges", c.k_edges);
        c.seed = j.value("seed", c.seed);
        c.evidence_budget = j.value("evidence_budget", c.evidence_budget);
        c.answer_budget = j.value("answer_budget", c.answer_budget);
    } catch (const json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    if (c.workers == 0) throw UsageError("config: eval.workers must be >= 1");
    return c;
}

EngineConfig load_engine_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("cannot open config file '" + path.string() + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_engine_config(text, path.parent_path());
}

}  // namespace kgp
