#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kgp/agent.hpp"
#include "kgp/corpus.hpp"
#include "kgp/eval.hpp"
#include "kgp/graph.hpp"
#include "kgp/llm_client.hpp"
#include "kgp/prompts.hpp"

namespace kgp {

struct TypeProportions {
    double bridge = 0.595;
    double comparison = 0.26;
    double single = 0.145;
};

struct SynthSpec {
    std::uint64_t seed = 0;
    std::size_t bridge = 119;
    std::size_t comparison = 52;
    std::size_t single = 29;
    std::size_t distractors = 6;          // per question
    std::size_t entity_vocab = 20000;     // distinct entity name words available
    std::size_t attribute_vocab = 40;     // words per relation/attribute/category/region/group list
    std::size_t min_shared_tokens = 3;    // m in the construction report
    TypeProportions proportions;

    /// Splits `total` questions by `proportions` (largest remainder).
    static SynthSpec from_total(std::size_t total, std::uint64_t seed = 0, TypeProportions p = {});

    std::size_t total_questions() const { return bridge + comparison + single; }
    /// Throws UsageError if proportions do not sum to 1 within 1e-9 or sizes are degenerate.
    void validate() const;
};

SynthSpec parse_synth_spec(const std::string& json_text);
SynthSpec load_synth_spec(const std::filesystem::path& path);

/// Lexical-link check for one golden chain.
struct ChainReport {
    std::string question_id;
    QuestionType type = QuestionType::single;
    std::vector<std::string> chain;
    std::vector<std::size_t> shared_tokens;  // per consecutive pair, template words excluded
    bool linked = true;                      // every pair shares >= m tokens
    std::optional<bool> edges_present;       // filled by attach_edge_report
};

struct ConstructionReport {
    std::size_t min_shared_tokens = 3;
    std::vector<ChainReport> chains;

    bool all_linked() const;
    /// True when every chain has been checked against a graph and all edges exist.
    bool all_edges_present() const;
};

struct SyntheticBundle {
    std::shared_ptr<const Corpus> corpus;
    std::vector<GoldenRecord> questions;
    OracleKnowledge knowledge;
    ConstructionReport report;
};

/// Deterministic templated corpus. In a bridge chain the second passage
/// describes the entity named at the end of the first and shares its category
/// and region; comparison pairs share category, group and region words;
/// single-hop questions have one passage. Each question brings `distractors`
/// hard negatives built from the same templates and vocabulary lists with
/// fresh entity words. Throws UsageError when entity_vocab is too small.
SyntheticBundle generate_synthetic(const SynthSpec& spec);

/// Words the templates contribute to every passage; excluded from link counts.
const std::vector<std::string>& template_words();
std::size_t shared_content_tokens(const std::string& a, const std::string& b);

OracleKnowledge knowledge_from(const std::vector<GoldenRecord>& questions);

/// Smallest k_edges for which every consecutive golden pair is an edge of the
/// union-symmetrized kNN graph over `embeddings`.
std::size_t minimum_k_edges(const std::vector<EmbeddingVector>& embeddings, const Corpus& corpus,
                            const std::vector<GoldenRecord>& questions);

/// Fills edges_present for every chain from `graph`.
void attach_edge_report(ConstructionReport& report, const KnowledgeGraph& graph);

void write_construction_report(const ConstructionReport& report, std::ostream& out);
ConstructionReport read_construction_report(std::istream& in, const std::string& source_name = "<stream>");

/// corpus.jsonl, questions.jsonl, report.jsonl under `dir`.
void save_bundle(const SyntheticBundle& bundle, const std::filesystem::path& dir);
SyntheticBundle load_bundle(const std::filesystem::path& dir);

/// A HotpotQA-style input record: supporting passages in reasoning order.
struct HotpotRecord {
    std::string id;
    std::string question;
    std::string answer;
    QuestionType type = QuestionType::single;
    std::vector<Passage> supporting;
};

std::vector<HotpotRecord> read_hotpot_records(std::istream& in, const std::string& source_name = "<stream>");
void write_hotpot_record(const HotpotRecord& r, std::ostream& out);
/// Synthetic questions rendered as HotpotQA-style records.
std::vector<HotpotRecord> hotpot_records_from(const SyntheticBundle& bundle);

enum class FollowUpMode { oracle, llm };

struct FollowUpConfig {
    FollowUpMode mode = FollowUpMode::oracle;
    std::uint64_t seed = 0;
    std::size_t budget = 0;  // 0 = every record
    std::size_t workers = 1;
    std::shared_ptr<const ChatClient> client;  // llm mode
    RoleConfig role;
    PromptSet prompts = default_prompts();
};

struct FollowUpBuild {
    std::vector<FollowUpSample> samples;
    std::size_t considered = 0;
    std::size_t skipped = 0;
    std::vector<std::string> skip_reasons;
};

/// Records are sampled without replacement (seeded) up to the budget. Single
/// hop → target "NA" with its passage as given. Bridge → given is the first
/// passage, the second is dropped. Comparison → one of the two passages is
/// dropped at random. The target of a multi-hop sample is the dropped text in
/// oracle mode and a generated follow-up in llm mode; llm failures and NA
/// replies skip the sample.
FollowUpBuild build_followupqa(const std::vector<HotpotRecord>& records, const FollowUpConfig& config);

struct Ratios {
    double train = 0.90;
    double val = 0.05;
    double test = 0.05;
};

struct Splits {
    std::vector<FollowUpSample> train, val, test;
};

/// Seeded shuffle then contiguous cut with largest-remainder sizes.
Splits split_dataset(const std::vector<FollowUpSample>& samples, Ratios ratios = {}, std::uint64_t seed = 0);

}  // namespace kgp
