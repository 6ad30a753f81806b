#include "kgp/prompts.hpp"

#include <fstream>
#include <iterator>

#include "kgp/error.hpp"
#include "prompts_embedded.hpp"  // generated from prompts/*.txt

namespace kgp {

const PromptSet& default_prompts() {
    static const PromptSet prompts{
        embedded::agent_system,    embedded::agent_user,    embedded::answer_system,   embedded::answer_user,
        embedded::judge_system,    embedded::judge_user,    embedded::followup_system, embedded::followup_user,
    };
    return prompts;
}

PromptSet load_prompts(const std::filesystem::path& dir) {
    PromptSet p = default_prompts();
    auto maybe = [&](const char* name, std::string& slot) {
        auto path = dir / (std::string(name) + ".txt");
        if (!std::filesystem::exists(path)) return;
        std::ifstream in(path, std::ios::binary);
        if (!in) throw DataError("cannot read prompt template '" + path.string() + "'");
        slot.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
        if (!slot.empty() && slot.back() == '\n') slot.pop_back();
    };
    if (!std::filesystem::is_directory(dir)) throw DataError("prompt directory '" + dir.string() + "' not found");
    maybe("agent_system", p.agent_system);
    maybe("agent_user", p.agent_user);
    maybe("answer_system", p.answer_system);
    maybe("answer_user", p.answer_user);
    maybe("judge_system", p.judge_system);
    maybe("judge_user", p.judge_user);
    maybe("followup_system", p.followup_system);
    maybe("followup_user", p.followup_user);
    return p;
}

}  // namespace kgp
