#pragma once

#include <filesystem>
#include <string>

namespace kgp {

/// Prompt templates with `{placeholder}` slots. Defaults are compiled in from
/// the files under prompts/ in the source tree.
struct PromptSet {
    std::string agent_system;
    std::string agent_user;        // {question} {passages}
    std::string answer_system;
    std::string answer_user;       // {question} {passages}
    std::string judge_system;
    std::string judge_user;        // {question} {gold} {predicted}
    std::string followup_system;
    std::string followup_user;     // {question} {passage}
};

const PromptSet& default_prompts();

/// Starts from the defaults and replaces every template for which
/// `<dir>/<name>.txt` exists (names as in prompts/, e.g. agent_user.txt).
PromptSet load_prompts(const std::filesystem::path& dir);

}  // namespace kgp
