#include "kgp/answer.hpp"

#include <cctype>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>

#include "kgp/error.hpp"
#include "kgp/text.hpp"

namespace kgp {

const char* to_string(Verdict v) { return v == Verdict::correct ? "correct" : "incorrect"; }

namespace {

std::string numbered(std::size_t i, const Passage& p) {
    std::string s = "[" + std::to_string(i + 1) + "] ";
    if (!p.title.empty()) s += p.title + ": ";
    return s + p.text;
}

}  // namespace

std::string render_answer_prompt(const std::string& question, std::span<const Passage> passages,
                                 const PromptSet& prompts, std::size_t char_budget) {
    if (passages.empty()) throw UsageError("generate_answer: no passages");
    auto render = [&](const std::string& block) {
        return render_template(prompts.answer_user, {{"question", question}, {"passages", block}});
    };
    const std::size_t fixed = prompts.answer_system.size() + render("").size();
    if (fixed > char_budget) {
        throw UsageError("answer prompt needs " + std::to_string(fixed) + " bytes before any passage; budget is " +
                         std::to_string(char_budget));
    }
    const std::size_t room = char_budget - fixed;
    std::string block;
    for (std::size_t i = 0; i < passages.size(); ++i) {
        std::string line = numbered(i, passages[i]);
        std::size_t extra = line.size() + (block.empty() ? 0 : 1);
        if (block.size() + extra > room) {
            if (block.empty()) block = std::string(utf8_prefix(line, room));
            break;
        }
        if (!block.empty()) block += '\n';
        block += line;
    }
    return render(block);
}

std::string generate_answer(const ChatClient& client, const RoleConfig& role, const std::string& question,
                            std::span<const Passage> passages, const PromptSet& prompts, std::size_t char_budget) {
    auto user = render_answer_prompt(question, passages, prompts, char_budget);
    auto response = client.complete(make_request(role, prompts.answer_system, user));
    return std::string(trim(response.text));
}

Verdict parse_verdict(std::string_view raw) {
    auto tokens = tokenize(raw);
    if (tokens.empty()) return Verdict::incorrect;
    return tokens.front() == "correct" || tokens.front() == "yes" ? Verdict::correct : Verdict::incorrect;
}

Verdict judge_llm(const ChatClient& client, const RoleConfig& role, const std::string& question,
                  const std::string& predicted, const std::string& gold, const PromptSet& prompts) {
    auto user =
        render_template(prompts.judge_user, {{"question", question}, {"gold", gold}, {"predicted", predicted}});
    return parse_verdict(client.complete(make_request(role, prompts.judge_system, user)).text);
}

std::string normalize_answer(std::string_view s) {
    std::string out;
    bool pending_space = false;
    for (char ch : s) {
        auto c = static_cast<unsigned char>(ch);
        if (c < 0x80 && std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (c < 0x80 && std::ispunct(c)) continue;
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
    }
    return out;
}

Verdict judge_exact(std::string_view predicted, std::string_view gold) {
    return normalize_answer(predicted) == normalize_answer(gold) ? Verdict::correct : Verdict::incorrect;
}

void write_answer_record(const AnswerRecord& r, std::ostream& out) {
    nlohmann::ordered_json j;
    j["question_id"] = r.question_id;
    j["question"] = r.question;
    j["retrieved"] = r.retrieved;
    j["answer"] = r.answer;
    if (r.gold) j["gold"] = *r.gold;
    if (r.verdict) j["verdict"] = to_string(*r.verdict);
    out << j.dump() << '\n';
}

std::vector<AnswerRecord> read_answer_records(std::istream& in, const std::string& source_name) {
    std::vector<AnswerRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            AnswerRecord r;
            r.question_id = j.at("question_id").get<std::string>();
            r.question = j.at("question").get<std::string>();
            r.retrieved = j.at("retrieved").get<std::vector<std::string>>();
            r.answer = j.at("answer").get<std::string>();
            if (j.contains("gold") && !j["gold"].is_null()) r.gold = j["gold"].get<std::string>();
            if (j.contains("verdict") && !j["verdict"].is_null()) {
                auto v = j["verdict"].get<std::string>();
                if (v != "correct" && v != "incorrect") throw DataError("unknown verdict '" + v + "'");
                r.verdict = v == "correct" ? Verdict::correct : Verdict::incorrect;
            }
            records.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw DataError(source_name + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(source_name + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return records;
}

}  // namespace kgp
