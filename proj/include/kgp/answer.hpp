#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgp/corpus.hpp"
#include "kgp/llm_client.hpp"
#include "kgp/prompts.hpp"

namespace kgp {

enum class Verdict { correct, incorrect };

const char* to_string(Verdict v);

struct AnswerRecord {
    std::string question_id;
    std::string question;
    std::vector<std::string> retrieved;
    std::string answer;
    std::optional<std::string> gold;
    std::optional<Verdict> verdict;
};

/// Default byte budget for system prompt + user prompt of an answer request.
inline constexpr std::size_t kDefaultAnswerBudget = 16000;

/// Renders the answer user prompt with numbered passages ("[i] title: text").
/// Passages are taken in order while system + user prompt stay within
/// `char_budget` bytes; when not even the first fits whole, a prefix of it is
/// used. Throws UsageError if the prompt without passages already exceeds the
/// budget, or if `passages` is empty.
std::string render_answer_prompt(const std::string& question, std::span<const Passage> passages,
                                 const PromptSet& prompts, std::size_t char_budget);

std::string generate_answer(const ChatClient& client, const RoleConfig& role, const std::string& question,
                            std::span<const Passage> passages, const PromptSet& prompts = default_prompts(),
                            std::size_t char_budget = kDefaultAnswerBudget);

/// Case-insensitive "correct" or "yes" as the first word → correct; anything
/// else (including "Incorrect." and garbage) → incorrect.
Verdict parse_verdict(std::string_view raw);

Verdict judge_llm(const ChatClient& client, const RoleConfig& role, const std::string& question,
                  const std::string& predicted, const std::string& gold, const PromptSet& prompts = default_prompts());

/// Lowercase, drop ASCII punctuation, collapse whitespace.
std::string normalize_answer(std::string_view s);

Verdict judge_exact(std::string_view predicted, std::string_view gold);

void write_answer_record(const AnswerRecord& record, std::ostream& out);
std::vector<AnswerRecord> read_answer_records(std::istream& in, const std::string& source_name = "<stream>");

}  // namespace kgp
