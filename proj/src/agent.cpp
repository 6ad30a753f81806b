#include "kgp/agent.hpp"

#include <algorithm>
#include <unordered_set>

#include "kgp/error.hpp"
#include "kgp/text.hpp"

namespace kgp {

namespace {

bool iequals_ascii(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        char x = a[i], y = b[i];
        if (x >= 'A' && x <= 'Z') x = static_cast<char>(x - 'A' + 'a');
        if (y >= 'A' && y <= 'Z') y = static_cast<char>(y - 'A' + 'a');
        if (x != y) return false;
    }
    return true;
}

bool starts_with_icase(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && iequals_ascii(s.substr(0, prefix.size()), prefix);
}

// Removes one layer of matching quotes (ASCII or typographic) at a time.
std::string_view strip_quotes(std::string_view s) {
    static constexpr std::pair<std::string_view, std::string_view> kPairs[] = {
        {"\"", "\""}, {"'", "'"}, {"`", "`"}, {"“", "”"}, {"‘", "’"}};
    bool changed = true;
    while (changed) {
        changed = false;
        s = trim(s);
        for (auto [open, close] : kPairs) {
            if (s.size() >= open.size() + close.size() && s.substr(0, open.size()) == open &&
                s.substr(s.size() - close.size()) == close) {
                s = s.substr(open.size(), s.size() - open.size() - close.size());
                changed = true;
                break;
            }
        }
    }
    return s;
}

// Drops a single leading quote character that has no partner on the line.
std::string_view strip_leading_quote(std::string_view s) {
    for (std::string_view q : {"\"", "'", "`", "“", "‘"}) {
        if (s.substr(0, q.size()) == q) return trim(s.substr(q.size()));
    }
    return s;
}

bool is_stop_token(std::string_view line) {
    if (iequals_ascii(line, "na") || iequals_ascii(line, "n/a")) return true;
    if (starts_with_icase(line, "n/a")) line = line.substr(3);
    else if (starts_with_icase(line, "na")) line = line.substr(2);
    else return false;
    unsigned char next = static_cast<unsigned char>(line.front());
    // "NA" must be followed by ASCII whitespace or punctuation, not a letter.
    bool alnum = (next >= 'a' && next <= 'z') || (next >= 'A' && next <= 'Z') || (next >= '0' && next <= '9');
    return !alnum && next < 0x80;
}

}  // namespace

AgentDecision AgentDecision::follow_up(std::string question) {
    if (trim(question).empty()) throw UsageError("follow-up question must be non-empty");
    return AgentDecision(Kind::FollowUp, std::move(question));
}

const char* to_string(AgentDecision::Kind kind) { return kind == AgentDecision::Kind::Stop ? "stop" : "follow_up"; }

AgentDecision parse_decision(std::string_view raw) {
    std::string_view s = strip_quotes(raw);
    for (std::string_view label : {"follow-up question:", "follow up question:", "followup question:"}) {
        if (starts_with_icase(s, label)) {
            s = strip_quotes(s.substr(label.size()));
            break;
        }
    }
    auto nl = s.find_first_of("\r\n");
    std::string_view line = strip_quotes(s.substr(0, nl));
    if (nl != std::string_view::npos) line = strip_leading_quote(line);
    if (line.empty() || is_stop_token(line)) return AgentDecision::stop();
    return AgentDecision::follow_up(std::string(line));
}

std::string concatenate_evidence(std::span<const Passage> path, std::size_t char_budget) {
    std::vector<std::string> pieces;
    pieces.reserve(path.size());
    for (const auto& p : path) pieces.push_back(p.title.empty() ? p.text : p.title + ": " + p.text);

    std::size_t first = pieces.size();
    std::size_t used = 0;
    while (first > 0) {
        std::size_t extra = pieces[first - 1].size() + (first == pieces.size() ? 0 : 1);
        if (used + extra > char_budget) break;
        used += extra;
        --first;
    }
    if (first == pieces.size()) {
        if (pieces.empty()) return {};
        return std::string(utf8_prefix(pieces.back(), char_budget));
    }
    std::vector<std::string> kept(pieces.begin() + static_cast<std::ptrdiff_t>(first), pieces.end());
    return join(kept, "\n");
}

LlmAgent::LlmAgent(std::shared_ptr<const ChatClient> client, RoleConfig role, PromptSet prompts,
                   std::size_t evidence_budget)
    : client_(std::move(client)), role_(std::move(role)), prompts_(std::move(prompts)), evidence_budget_(evidence_budget) {
    if (!client_) throw UsageError("llm agent: null client");
    if (role_.model.empty()) throw UsageError("llm agent: model not configured");
}

std::string LlmAgent::render_user_prompt(const std::string& query, std::span<const Passage> path) const {
    return render_template(prompts_.agent_user,
                           {{"question", query}, {"passages", concatenate_evidence(path, evidence_budget_)}});
}

AgentDecision LlmAgent::decide(const std::string& query, std::span<const Passage> path) const {
    auto response = client_->complete(make_request(role_, prompts_.agent_system, render_user_prompt(query, path)));
    return parse_decision(response.text);
}

OracleAgent::OracleAgent(std::shared_ptr<const Corpus> corpus, OracleKnowledge knowledge)
    : corpus_(std::move(corpus)), knowledge_(std::move(knowledge)) {
    if (!corpus_) throw UsageError("oracle agent: null corpus");
    for (const auto& [question, ids] : knowledge_.chains) {
        for (const auto& id : ids) {
            if (!corpus_->contains(id)) {
                throw NotFoundError("oracle chain for '" + question + "' references unknown id '" + id + "'");
            }
        }
    }
}

AgentDecision OracleAgent::decide(const std::string& query, std::span<const Passage> path) const {
    auto it = knowledge_.chains.find(query);
    if (it == knowledge_.chains.end()) throw NotFoundError("oracle agent has no golden chain for query '" + query + "'");
    for (const auto& id : it->second) {
        bool present = std::any_of(path.begin(), path.end(), [&](const Passage& p) { return p.id == id; });
        if (!present) return AgentDecision::follow_up(corpus_->get(id).text);
    }
    return AgentDecision::stop();
}

AgentDecision KeywordDiffAgent::decide(const std::string& query, std::span<const Passage> path) const {
    std::unordered_set<std::string> seen;
    for (const auto& p : path) {
        for (auto& t : tokenize(p.text)) seen.insert(std::move(t));
    }
    std::vector<std::string> missing;
    std::unordered_set<std::string> emitted;
    for (auto& t : tokenize(query)) {
        if (!seen.count(t) && emitted.insert(t).second) missing.push_back(std::move(t));
    }
    if (missing.empty()) return AgentDecision::stop();
    return AgentDecision::follow_up(join(missing, " "));
}

}  // namespace kgp
