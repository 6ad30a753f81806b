#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgp/corpus.hpp"
#include "kgp/llm_client.hpp"
#include "kgp/prompts.hpp"

namespace kgp {

/// Either a follow-up question or the stop signal ("NA").
class AgentDecision {
public:
    enum class Kind { FollowUp, Stop };

    static AgentDecision stop() { return AgentDecision(Kind::Stop, {}); }
    /// Throws UsageError when `question` is blank.
    static AgentDecision follow_up(std::string question);

    Kind kind() const noexcept { return kind_; }
    bool is_stop() const noexcept { return kind_ == Kind::Stop; }
    const std::string& question() const noexcept { return question_; }

    bool operator==(const AgentDecision&) const = default;

private:
    AgentDecision(Kind kind, std::string question) : kind_(kind), question_(std::move(question)) {}

    Kind kind_;
    std::string question_;
};

const char* to_string(AgentDecision::Kind kind);

/// Interprets raw model output. Whitespace and surrounding quotes are
/// stripped, as is a leading "Follow-up question:" label. Only the first line
/// is considered. It is a Stop when that line is empty, is "NA"/"N/A" in any
/// case, or starts with "NA" followed by whitespace or punctuation. Anything
/// else is a FollowUp carrying the line.
AgentDecision parse_decision(std::string_view raw);

/// Traversal agent: given the user query and the passages along one search
/// path (seed first), either asks for what is missing or stops.
class TraversalAgent {
public:
    virtual ~TraversalAgent() = default;
    virtual std::string name() const = 0;
    virtual AgentDecision decide(const std::string& query, std::span<const Passage> path) const = 0;
};

/// Path evidence in visit order, one passage per line, "title: text" when a
/// title is present. When over `char_budget` bytes the oldest passages are
/// dropped first; a lone newest passage that still does not fit is cut.
std::string concatenate_evidence(std::span<const Passage> path, std::size_t char_budget);

/// Prompts a chat model with the query and the path evidence.
class LlmAgent final : public TraversalAgent {
public:
    static constexpr std::size_t kDefaultEvidenceBudget = 8000;

    LlmAgent(std::shared_ptr<const ChatClient> client, RoleConfig role, PromptSet prompts = default_prompts(),
             std::size_t evidence_budget = kDefaultEvidenceBudget);

    std::string name() const override { return "llm:" + role_.model; }
    AgentDecision decide(const std::string& query, std::span<const Passage> path) const override;

    std::string render_user_prompt(const std::string& query, std::span<const Passage> path) const;
    const RoleConfig& role() const noexcept { return role_; }

private:
    std::shared_ptr<const ChatClient> client_;
    RoleConfig role_;
    PromptSet prompts_;
    std::size_t evidence_budget_;
};

/// Golden reasoning chains keyed by question text.
struct OracleKnowledge {
    std::unordered_map<std::string, std::vector<std::string>> chains;

    void add(const std::string& question, std::vector<std::string> golden_ids) {
        chains[question] = std::move(golden_ids);
    }
};

/// Test oracle: stops once the path holds the whole golden chain, otherwise
/// asks with the full text of the earliest missing golden passage.
class OracleAgent final : public TraversalAgent {
public:
    /// Throws NotFoundError if any chain references an id outside `corpus`.
    OracleAgent(std::shared_ptr<const Corpus> corpus, OracleKnowledge knowledge);

    std::string name() const override { return "oracle"; }
    AgentDecision decide(const std::string& query, std::span<const Passage> path) const override;

private:
    std::shared_ptr<const Corpus> corpus_;
    OracleKnowledge knowledge_;
};

/// Stops when every query token occurs somewhere on the path; otherwise asks
/// with the missing query tokens (first occurrence order, deduplicated).
class KeywordDiffAgent final : public TraversalAgent {
public:
    std::string name() const override { return "keyword"; }
    AgentDecision decide(const std::string& query, std::span<const Passage> path) const override;
};

/// Always stops; reduces traversal to its seeds.
class StopAgent final : public TraversalAgent {
public:
    std::string name() const override { return "stop"; }
    AgentDecision decide(const std::string&, std::span<const Passage>) const override { return AgentDecision::stop(); }
};

}  // namespace kgp
