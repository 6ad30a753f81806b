#pragma once

#include <chrono>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgp/agent.hpp"
#include "kgp/answer.hpp"
#include "kgp/embedding.hpp"
#include "kgp/graph.hpp"
#include "kgp/lexical.hpp"
#include "kgp/traversal.hpp"

namespace kgp {

enum class QuestionType { bridge, comparison, single };

const char* to_string(QuestionType t);
QuestionType parse_question_type(std::string_view s);

struct GoldenRecord {
    std::string id;
    std::string question;
    std::string answer;
    std::vector<std::string> golden_ids;  // reasoning order
    QuestionType type = QuestionType::single;

    /// bridge/comparison need >= 2 golden ids, single exactly 1.
    void validate() const;
    bool operator==(const GoldenRecord&) const = default;
};

void write_golden_record(const GoldenRecord& r, std::ostream& out);
std::vector<GoldenRecord> read_golden_records(std::istream& in, const std::string& source_name = "<stream>");
std::vector<GoldenRecord> load_golden_records(const std::filesystem::path& path);
void save_golden_records(const std::vector<GoldenRecord>& records, const std::filesystem::path& path);

inline constexpr double kDefaultMatchThreshold = 0.9;

/// Fraction of golden vectors whose best cosine against any retrieved vector
/// reaches `threshold`. Throws UsageError when `golden` is empty.
double exact_match(std::span<const EmbeddingVector> retrieved, std::span<const EmbeddingVector> golden,
                   double threshold = kDefaultMatchThreshold, std::size_t* matched = nullptr);

/// Text form: embeds both sides with `provider` first.
double exact_match(const std::vector<std::string>& retrieved_texts, const std::vector<std::string>& golden_texts,
                   const EmbeddingProvider& provider, double threshold = kDefaultMatchThreshold);

/// Unigram F1 with clipped counts over tokenize() output; 0 if either side is empty.
double rouge1_f(std::string_view candidate, std::string_view reference);
/// LCS-based F1 over tokenize() output; 0 if either side is empty.
double rougeL_f(std::string_view candidate, std::string_view reference);
std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// One Follow-upQA example. `target` is a follow-up question or "NA".
struct FollowUpSample {
    std::string question;
    std::string given;
    std::string target;

    bool is_stop() const { return target == "NA"; }
    bool operator==(const FollowUpSample&) const = default;
};

void write_followup_sample(const FollowUpSample& s, std::ostream& out);
std::vector<FollowUpSample> read_followup_samples(std::istream& in, const std::string& source_name = "<stream>");

struct Histogram {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<std::size_t> counts;  // right-closed last bin
};

Histogram histogram(const std::vector<double>& values, std::size_t bins = 10, double lo = 0.0, double hi = 1.0);

struct BenchmarkRow {
    std::size_t index = 0;
    bool gold_stop = false;
    std::string generated;  // follow-up text, or "NA" for a Stop
    bool predicted_stop = false;
    double rouge1 = 0.0;  // follow-up golds only
    double rougeL = 0.0;
    double cosine = 0.0;
    std::optional<std::string> error;
};

struct BenchmarkReport {
    std::string agent;
    std::vector<BenchmarkRow> rows;
    std::size_t followup_count = 0;  // scored follow-up rows
    std::size_t stop_count = 0;      // scored NA rows
    std::size_t stop_correct = 0;
    std::size_t errors = 0;
    double mean_rouge1 = 0.0;
    double mean_rougeL = 0.0;
    double mean_cosine = 0.0;
    double stop_accuracy = 0.0;  // stop_correct / stop_count, 0 when no NA rows
};

/// Runs `agent` on each sample with the given passage as a one-node path.
/// Follow-up golds are scored by ROUGE-1, ROUGE-L and cosine under `provider`
/// (a Stop prediction scores 0 on all three). NA golds contribute to
/// stop-accuracy. Agent failures are kept as rows with `error` set and left
/// out of every aggregate.
BenchmarkReport benchmark_agent(const TraversalAgent& agent, const std::vector<FollowUpSample>& samples,
                                const EmbeddingProvider& provider);

/// Recomputes the aggregates from `report.rows`.
BenchmarkReport summarize_benchmark(std::string agent, std::vector<BenchmarkRow> rows);

void write_benchmark_rows(const BenchmarkReport& report, std::ostream& out);
void write_benchmark_summary(const BenchmarkReport& report, std::ostream& out);
/// Tab-separated "metric bin_lo bin_hi count" lines for rouge1, rougeL, cosine.
void write_benchmark_histograms(const BenchmarkReport& report, std::ostream& out, std::size_t bins = 10);

struct NamedAgent {
    std::string name;
    std::shared_ptr<const TraversalAgent> agent;
};

enum class JudgeMode { none, exact, llm };

struct AnsweringConfig {
    std::shared_ptr<const ChatClient> answer_client;
    RoleConfig answer_role;
    JudgeMode judge = JudgeMode::exact;
    std::shared_ptr<const ChatClient> judge_client;  // JudgeMode::llm only
    RoleConfig judge_role;
    PromptSet prompts = default_prompts();
    std::size_t char_budget = kDefaultAnswerBudget;
};

struct EvalConfig {
    TraversalConfig traversal;
    double threshold = kDefaultMatchThreshold;
    std::size_t workers = 1;
    std::optional<AnsweringConfig> answering;
};

struct EvalRow {
    std::string agent;
    std::string question_id;
    QuestionType type = QuestionType::single;
    double em = 0.0;
    std::size_t matched = 0;
    std::size_t golden = 0;
    std::size_t iterations = 0;
    std::size_t nodes_visited = 0;
    bool terminated_early = false;
    bool budget_exhausted = false;
    std::vector<std::string> retrieved;
    std::optional<std::string> answer;
    std::optional<Verdict> verdict;
    std::optional<std::string> error;
    std::chrono::microseconds wall_time{0};
};

struct AgentSummary {
    std::string agent;
    std::size_t questions = 0;
    std::size_t errors = 0;
    double mean_em = 0.0;
    std::optional<double> accuracy_pct;  // only when answers were judged
    double mean_iterations = 0.0;
    double mean_nodes_visited = 0.0;
    double mean_runtime_ms = 0.0;
    std::size_t terminated_early = 0;
};

struct EvalReport {
    std::vector<EvalRow> rows;  // grouped by agent in input order, then question id
    std::vector<AgentSummary> summaries;
};

/// Aggregates over rows without an error, one summary per distinct agent in
/// order of first appearance.
std::vector<AgentSummary> summarize_eval(const std::vector<EvalRow>& rows);

/// For every agent and question: traverse, score EM against the golden ids
/// using the graph's stored embeddings, optionally answer and judge. Per
/// question failures are recorded in the row and the run continues.
/// Throws DataError up front if a golden id is missing from the graph corpus.
EvalReport run_eval(const KnowledgeGraph& graph, const TfidfModel& tfidf, const std::vector<NamedAgent>& agents,
                    const EmbeddingProvider& ranker, const std::vector<GoldenRecord>& questions,
                    const EvalConfig& config);

/// Traversal-free dense retrieval scored the same way, rows tagged "dense".
EvalReport run_dense_eval(const KnowledgeGraph& graph, const EmbeddingProvider& ranker,
                          const std::vector<GoldenRecord>& questions, std::size_t k,
                          double threshold = kDefaultMatchThreshold, std::size_t workers = 1);

/// One JSON object per row. Timing lives only in "wall_time_ms".
void write_eval_rows(const EvalReport& report, std::ostream& out);
/// One JSON object per agent. Timing lives only in "mean_runtime_ms".
void write_eval_summary(const EvalReport& report, std::ostream& out);
/// Histograms of EM and iterations per agent, tab separated.
void write_eval_histograms(const EvalReport& report, std::ostream& out, std::size_t bins = 10);

}  // namespace kgp
