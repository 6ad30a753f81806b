#include "kgp/synth.hpp"

#include "kgp/lexical.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <thread>
#include <unordered_set>

#include "kgp/error.hpp"
#include "kgp/rng.hpp"
#include "kgp/text.hpp"

namespace kgp {

using ojson = nlohmann::ordered_json;

namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";

constexpr const char* kSingleTmpl = "{e} is a {cat} from {region}. The {attr} of {e} is {a}.";
constexpr const char* kBridgeFirstTmpl = "{e} is a {cat} from {region}. The {rel} of {e} is {b}.";
constexpr const char* kBridgeSecondTmpl = "{b} is a {cat} from {region}. The {attr} of {b} is {a}.";
constexpr const char* kComparisonIntroTmpl = "{e} is a {cat} of the {group} from {region}. ";

struct Measure {
    const char* fact;      // appended to the comparison intro
    const char* question;  // {cat} {a} {b}
    int lo, hi;
    bool smaller_wins;
};

constexpr Measure kMeasures[] = {
    {"{e} was founded in {n}.", "Which {cat} was founded first, {a} or {b}?", 1700, 2020, true},
    {"{e} is {n} metres tall.", "Which {cat} is taller, {a} or {b}?", 40, 900, false},
    {"{e} has a population of {n}.", "Which {cat} has the larger population, {a} or {b}?", 1000, 999999, false},
};

std::string syllables(std::uint64_t index, int count) {
    const std::size_t base = kConsonants.size() * kVowels.size();
    std::string w;
    for (int i = 0; i < count; ++i) {
        std::size_t s = index % base;
        index /= base;
        w.push_back(kConsonants[s / kVowels.size()]);
        w.push_back(kVowels[s % kVowels.size()]);
    }
    return w;
}

std::string capitalized(std::string w) {
    if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
    return w;
}

std::uint64_t pow_u64(std::uint64_t b, int e) {
    std::uint64_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

// Distinct pseudo-words of `syl` syllables, drawn without replacement.
std::vector<std::string> draw_words(Rng& rng, std::size_t count, int syl) {
    const std::uint64_t space = pow_u64(kConsonants.size() * kVowels.size(), syl);
    if (count > space / 2) throw UsageError("word space too small for " + std::to_string(count) + " words");
    std::unordered_set<std::uint64_t> seen;
    std::vector<std::string> out;
    out.reserve(count);
    while (out.size() < count) {
        auto idx = rng.below(space);
        if (seen.insert(idx).second) out.push_back(syllables(idx, syl));
    }
    return out;
}

class EntitySource {
public:
    explicit EntitySource(std::vector<std::string> words) : words_(std::move(words)) {}
    std::string take() { return capitalized(words_.at(next_++)); }

private:
    std::vector<std::string> words_;
    std::size_t next_ = 0;
};

struct Vocabulary {
    std::vector<std::string> rel, attr, cat, region, group;
};

std::vector<std::size_t> largest_remainder(std::size_t total, const std::vector<double>& ratios) {
    std::vector<std::size_t> out(ratios.size());
    std::vector<std::pair<double, std::size_t>> frac;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        double quota = ratios[i] * static_cast<double>(total);
        // Round away float noise before flooring (200 * 0.145 is 28.999999999999996).
        double snapped = std::round(quota * 1e9) / 1e9;
        out[i] = static_cast<std::size_t>(std::floor(snapped));
        assigned += out[i];
        frac.push_back({snapped - std::floor(snapped), i});
    }
    std::stable_sort(frac.begin(), frac.end(), [](auto& a, auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < total && i < frac.size(); ++i, ++assigned) ++out[frac[i].second];
    return out;
}

void check_ratios(const std::vector<double>& r, const char* what) {
    double sum = 0;
    for (double x : r) {
        if (!(x >= 0.0)) throw UsageError(std::string(what) + " must be non-negative");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw UsageError(std::string(what) + " must sum to 1");
}

}  // namespace

SynthSpec SynthSpec::from_total(std::size_t total, std::uint64_t seed, TypeProportions p) {
    std::vector<double> r{p.bridge, p.comparison, p.single};
    check_ratios(r, "question type proportions");
    auto counts = largest_remainder(total, r);
    SynthSpec s;
    s.seed = seed;
    s.proportions = p;
    s.bridge = counts[0];
    s.comparison = counts[1];
    s.single = counts[2];
    return s;
}

void SynthSpec::validate() const {
    check_ratios({proportions.bridge, proportions.comparison, proportions.single}, "question type proportions");
    if (total_questions() == 0) throw UsageError("synth spec asks for zero questions");
    if (attribute_vocab < 2) throw UsageError("attribute_vocab must be >= 2");
    if (min_shared_tokens < 1) throw UsageError("min_shared_tokens must be >= 1");
}

SynthSpec parse_synth_spec(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("synth spec: ") + e.what());
    }
    if (!j.is_object()) throw UsageError("synth spec must be a JSON object");
    static const std::set<std::string> known{"seed",        "total",          "bridge",          "comparison",
                                             "single",      "distractors",    "entity_vocab",    "attribute_vocab",
                                             "min_shared_tokens", "proportions"};
    for (auto& [key, _] : j.items()) {
        if (!known.count(key)) throw UsageError("synth spec: unknown key '" + key + "'");
    }
    try {
        TypeProportions p;
        if (j.contains("proportions")) {
            const auto& pj = j["proportions"];
            p.bridge = pj.value("bridge", p.bridge);
            p.comparison = pj.value("comparison", p.comparison);
            p.single = pj.value("single", p.single);
        }
        const auto seed = j.value("seed", std::uint64_t{0});
        SynthSpec s;
        if (j.contains("total")) {
            if (j.contains("bridge") || j.contains("comparison") || j.contains("single")) {
                throw UsageError("synth spec: give either total or per-type counts");
            }
            s = SynthSpec::from_total(j["total"].get<std::size_t>(), seed, p);
        } else {
            s.seed = seed;
            s.proportions = p;
            s.bridge = j.value("bridge", s.bridge);
            s.comparison = j.value("comparison", s.comparison);
            s.single = j.value("single", s.single);
        }
        s.distractors = j.value("distractors", s.distractors);
        s.entity_vocab = j.value("entity_vocab", s.entity_vocab);
        s.attribute_vocab = j.value("attribute_vocab", s.attribute_vocab);
        s.min_shared_tokens = j.value("min_shared_tokens", s.min_shared_tokens);
        s.validate();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("synth spec: ") + e.what());
    }
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("cannot open synth spec '" + path.string() + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_synth_spec(text);
}

const std::vector<std::string>& template_words() {
    static const std::vector<std::string> words = [] {
        std::set<std::string> s;
        auto add = [&](std::string_view tmpl) {
            std::string stripped;
            bool in_var = false;
            for (char c : tmpl) {
                if (c == '{') in_var = true;
                if (!in_var) stripped.push_back(c);
                if (c == '}') {
                    in_var = false;
                    stripped.push_back(' ');
                }
            }
            for (auto& t : tokenize(stripped)) s.insert(t);
        };
        add(kSingleTmpl);
        add(kBridgeFirstTmpl);
        add(kBridgeSecondTmpl);
        add(kComparisonIntroTmpl);
        for (const auto& m : kMeasures) add(m.fact);
        return std::vector<std::string>(s.begin(), s.end());
    }();
    return words;
}

std::size_t shared_content_tokens(const std::string& a, const std::string& b) {
    const auto& skip = template_words();
    std::set<std::string> ta;
    for (auto& t : tokenize(a)) {
        if (!std::binary_search(skip.begin(), skip.end(), t)) ta.insert(std::move(t));
    }
    std::set<std::string> tb;
    for (auto& t : tokenize(b)) {
        if (ta.count(t)) tb.insert(std::move(t));
    }
    return tb.size();
}

bool ConstructionReport::all_linked() const {
    return std::all_of(chains.begin(), chains.end(), [](const ChainReport& c) { return c.linked; });
}

bool ConstructionReport::all_edges_present() const {
    return std::all_of(chains.begin(), chains.end(),
                       [](const ChainReport& c) { return c.edges_present.has_value() && *c.edges_present; });
}

OracleKnowledge knowledge_from(const std::vector<GoldenRecord>& questions) {
    OracleKnowledge k;
    for (const auto& q : questions) k.add(q.question, q.golden_ids);
    return k;
}

SyntheticBundle generate_synthetic(const SynthSpec& spec) {
    spec.validate();
    const std::size_t nq = spec.total_questions();
    const std::size_t needed = spec.bridge * 3 + spec.comparison * 2 + spec.single * 2 + nq * spec.distractors * 2;
    if (needed > spec.entity_vocab) {
        throw UsageError("entity_vocab " + std::to_string(spec.entity_vocab) + " is too small: this spec needs " +
                         std::to_string(needed) + " distinct entity words");
    }
    if (spec.attribute_vocab * 5 > 2000) throw UsageError("attribute_vocab is too large (max 400)");

    Rng rng(spec.seed);
    auto list_words = draw_words(rng, spec.attribute_vocab * 5, 2);
    Vocabulary v;
    auto slice = [&](std::size_t i) {
        return std::vector<std::string>(list_words.begin() + static_cast<std::ptrdiff_t>(i * spec.attribute_vocab),
                                        list_words.begin() + static_cast<std::ptrdiff_t>((i + 1) * spec.attribute_vocab));
    };
    v.rel = slice(0);
    v.attr = slice(1);
    v.cat = slice(2);
    v.region = slice(3);
    v.group = slice(4);
    EntitySource names(draw_words(rng, needed, 3));

    std::vector<QuestionType> types;
    types.insert(types.end(), spec.bridge, QuestionType::bridge);
    types.insert(types.end(), spec.comparison, QuestionType::comparison);
    types.insert(types.end(), spec.single, QuestionType::single);
    rng.shuffle(types);

    std::vector<Passage> passages;
    SyntheticBundle bundle;
    bundle.report.min_shared_tokens = spec.min_shared_tokens;
    const int id_width = std::max<int>(4, static_cast<int>(std::to_string(nq).size()));

    for (std::size_t qi = 0; qi < nq; ++qi) {
        std::string qid = std::to_string(qi);
        qid = "q" + std::string(static_cast<std::size_t>(id_width) - qid.size(), '0') + qid;
        GoldenRecord rec;
        rec.id = qid;
        rec.type = types[qi];
        std::vector<Passage> golden;
        std::string hard_word;  // relation/attribute word reused by hard negatives
        std::string hard_cat;

        if (rec.type == QuestionType::single) {
            std::map<std::string, std::string> f{{"e", names.take()}, {"cat", rng.pick(v.cat)},
                                                 {"region", rng.pick(v.region)}, {"attr", rng.pick(v.attr)},
                                                 {"a", names.take()}};
            golden.push_back({qid + "-g1", f["e"], render_template(kSingleTmpl, f)});
            rec.question = render_template("What is the {attr} of {e}?", f);
            rec.answer = f["a"];
            hard_word = f["attr"];
            hard_cat = f["cat"];
        } else if (rec.type == QuestionType::bridge) {
            const std::string e = names.take();
            const std::string b = names.take();
            const std::string a = names.take();
            std::map<std::string, std::string> f{{"e", e},
                                                 {"b", b},
                                                 {"a", a},
                                                 {"cat", rng.pick(v.cat)},
                                                 {"region", rng.pick(v.region)},
                                                 {"rel", rng.pick(v.rel)},
                                                 {"attr", rng.pick(v.attr)}};
            golden.push_back({qid + "-g1", e, render_template(kBridgeFirstTmpl, f)});
            golden.push_back({qid + "-g2", b, render_template(kBridgeSecondTmpl, f)});
            rec.question = render_template("What is the {attr} of the {rel} of {e}?", f);
            rec.answer = a;
            hard_word = rng.coin() ? f["rel"] : f["attr"];
            hard_cat = f["cat"];
        } else {
            const Measure& m = kMeasures[rng.below(std::size(kMeasures))];
            std::map<std::string, std::string> shared{{"cat", rng.pick(v.cat)}, {"group", rng.pick(v.group)},
                                                      {"region", rng.pick(v.region)}};
            const auto span = static_cast<std::uint64_t>(m.hi - m.lo + 1);
            const int n1 = m.lo + static_cast<int>(rng.below(span));
            int n2 = n1;
            while (n2 == n1) n2 = m.lo + static_cast<int>(rng.below(span));
            const std::string a = names.take();
            const std::string b = names.take();
            std::string tmpl = std::string(kComparisonIntroTmpl) + m.fact;
            auto fa = shared, fb = shared;
            fa["e"] = a;
            fa["n"] = std::to_string(n1);
            fb["e"] = b;
            fb["n"] = std::to_string(n2);
            golden.push_back({qid + "-g1", a, render_template(tmpl, fa)});
            golden.push_back({qid + "-g2", b, render_template(tmpl, fb)});
            rec.question = render_template(m.question, {{"cat", shared["cat"]}, {"a", a}, {"b", b}});
            const bool a_wins = m.smaller_wins ? n1 < n2 : n1 > n2;
            rec.answer = a_wins ? a : b;
            hard_cat = shared["cat"];
        }

        for (const auto& p : golden) rec.golden_ids.push_back(p.id);
        ChainReport cr{qid, rec.type, rec.golden_ids, {}, true, std::nullopt};
        for (std::size_t i = 0; i + 1 < golden.size(); ++i) {
            auto shared = shared_content_tokens(golden[i].text, golden[i + 1].text);
            cr.shared_tokens.push_back(shared);
            if (shared < spec.min_shared_tokens) cr.linked = false;
        }
        bundle.report.chains.push_back(std::move(cr));
        for (auto& p : golden) passages.push_back(std::move(p));

        for (std::size_t d = 0; d < spec.distractors; ++d) {
            const std::string x = names.take();
            const std::string y = names.take();
            Passage p{qid + "-d" + std::to_string(d + 1), x, {}};
            if (rec.type == QuestionType::comparison) {
                const Measure& m = kMeasures[rng.below(std::size(kMeasures))];
                std::map<std::string, std::string> f{
                    {"e", x},
                    {"cat", rng.coin() ? hard_cat : rng.pick(v.cat)},
                    {"group", rng.pick(v.group)},
                    {"region", rng.pick(v.region)},
                    {"n", std::to_string(m.lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(m.hi - m.lo + 1))))}};
                p.text = render_template(std::string(kComparisonIntroTmpl) + m.fact, f);
            } else {
                std::string word = rng.coin() ? hard_word : (rng.coin() ? rng.pick(v.rel) : rng.pick(v.attr));
                std::map<std::string, std::string> f{{"e", x},
                                                     {"cat", rng.coin() ? hard_cat : rng.pick(v.cat)},
                                                     {"region", rng.pick(v.region)},
                                                     {"attr", word},
                                                     {"a", y}};
                p.text = render_template(kSingleTmpl, f);
            }
            passages.push_back(std::move(p));
        }
        rec.validate();
        bundle.questions.push_back(std::move(rec));
    }

    rng.shuffle(passages);
    bundle.corpus = std::make_shared<const Corpus>(std::move(passages));
    bundle.knowledge = knowledge_from(bundle.questions);
    return bundle;
}

std::size_t minimum_k_edges(const std::vector<EmbeddingVector>& embeddings, const Corpus& corpus,
                            const std::vector<GoldenRecord>& questions) {
    if (embeddings.size() != corpus.size()) throw UsageError("minimum_k_edges: embedding count != corpus size");
    // Position of j in i's neighbor order (similarity desc, ordinal asc).
    auto rank = [&](std::size_t i, std::size_t j) {
        const double target = rank_key(cosine(embeddings[i], embeddings[j]));
        std::size_t r = 0;
        for (std::size_t l = 0; l < embeddings.size(); ++l) {
            if (l == i || l == j) continue;
            const double s = rank_key(cosine(embeddings[i], embeddings[l]));
            if (s > target || (s == target && l < j)) ++r;
        }
        return r;
    };
    std::size_t need = 1;
    for (const auto& q : questions) {
        for (std::size_t p = 0; p + 1 < q.golden_ids.size(); ++p) {
            const auto a = corpus.ordinal_of(q.golden_ids[p]);
            const auto b = corpus.ordinal_of(q.golden_ids[p + 1]);
            need = std::max(need, std::min(rank(a, b), rank(b, a)) + 1);
        }
    }
    return need;
}

void attach_edge_report(ConstructionReport& report, const KnowledgeGraph& graph) {
    const auto& corpus = graph.corpus();
    for (auto& c : report.chains) {
        bool ok = true;
        for (std::size_t p = 0; p + 1 < c.chain.size(); ++p) {
            auto a = corpus.find(c.chain[p]);
            auto b = corpus.find(c.chain[p + 1]);
            if (!a || !b || !graph.has_edge(*a, *b)) ok = false;
        }
        c.edges_present = ok;
    }
}

void write_construction_report(const ConstructionReport& report, std::ostream& out) {
    for (const auto& c : report.chains) {
        ojson j;
        j["question_id"] = c.question_id;
        j["type"] = to_string(c.type);
        j["chain"] = c.chain;
        j["shared_tokens"] = c.shared_tokens;
        j["min_shared_tokens"] = report.min_shared_tokens;
        j["linked"] = c.linked;
        j["edges_present"] = c.edges_present ? ojson(*c.edges_present) : ojson(nullptr);
        out << j.dump() << '\n';
    }
}

ConstructionReport read_construction_report(std::istream& in, const std::string& source_name) {
    ConstructionReport report;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            ChainReport c;
            c.question_id = j.at("question_id").get<std::string>();
            c.type = parse_question_type(j.at("type").get<std::string>());
            c.chain = j.at("chain").get<std::vector<std::string>>();
            c.shared_tokens = j.at("shared_tokens").get<std::vector<std::size_t>>();
            c.linked = j.at("linked").get<bool>();
            if (!j.at("edges_present").is_null()) c.edges_present = j["edges_present"].get<bool>();
            report.min_shared_tokens = j.at("min_shared_tokens").get<std::size_t>();
            report.chains.push_back(std::move(c));
        } catch (const nlohmann::json::exception& e) {
            throw DataError(source_name + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return report;
}

void save_bundle(const SyntheticBundle& bundle, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    save_corpus(*bundle.corpus, dir / "corpus.jsonl");
    save_golden_records(bundle.questions, dir / "questions.jsonl");
    std::ofstream out(dir / "report.jsonl", std::ios::binary);
    if (!out) throw DataError("cannot write '" + (dir / "report.jsonl").string() + "'");
    write_construction_report(bundle.report, out);
}

SyntheticBundle load_bundle(const std::filesystem::path& dir) {
    SyntheticBundle b;
    b.corpus = std::make_shared<const Corpus>(load_corpus(dir / "corpus.jsonl"));
    b.questions = load_golden_records(dir / "questions.jsonl");
    auto report_path = dir / "report.jsonl";
    std::ifstream in(report_path);
    if (!in) throw NotFoundError("cannot open '" + report_path.string() + "'");
    b.report = read_construction_report(in, report_path.string());
    b.knowledge = knowledge_from(b.questions);
    return b;
}

std::vector<HotpotRecord> read_hotpot_records(std::istream& in, const std::string& source_name) {
    std::vector<HotpotRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto where = source_name + ":" + std::to_string(lineno) + ": ";
        try {
            auto j = nlohmann::json::parse(line);
            HotpotRecord r;
            r.id = j.contains("_id") ? j["_id"].get<std::string>() : j.at("id").get<std::string>();
            r.question = j.at("question").get<std::string>();
            r.answer = j.value("answer", std::string());
            r.type = parse_question_type(j.at("type").get<std::string>());
            for (const auto& s : j.at("supporting")) {
                Passage p;
                p.title = s.value("title", std::string());
                p.text = s.at("text").get<std::string>();
                p.id = s.value("id", r.id + "#" + std::to_string(r.supporting.size()));
                r.supporting.push_back(std::move(p));
            }
            if (trim(r.question).empty()) throw DataError("empty question");
            const std::size_t need = r.type == QuestionType::single ? 1 : 2;
            if (r.supporting.size() < need) {
                throw DataError(std::string(to_string(r.type)) + " record needs " + std::to_string(need) +
                                " supporting passages");
            }
            for (const auto& p : r.supporting) {
                if (trim(p.text).empty()) throw DataError("supporting passage with empty text");
            }
            out.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw DataError(where + e.what());
        } catch (const DataError& e) {
            throw DataError(where + e.what());
        }
    }
    return out;
}

void write_hotpot_record(const HotpotRecord& r, std::ostream& out) {
    ojson j;
    j["id"] = r.id;
    j["question"] = r.question;
    j["answer"] = r.answer;
    j["type"] = to_string(r.type);
    j["supporting"] = ojson::array();
    for (const auto& p : r.supporting) j["supporting"].push_back(ojson{{"id", p.id}, {"title", p.title}, {"text", p.text}});
    out << j.dump() << '\n';
}

std::vector<HotpotRecord> hotpot_records_from(const SyntheticBundle& bundle) {
    std::vector<HotpotRecord> out;
    for (const auto& q : bundle.questions) {
        HotpotRecord r{q.id, q.question, q.answer, q.type, {}};
        for (const auto& id : q.golden_ids) r.supporting.push_back(bundle.corpus->get(id));
        out.push_back(std::move(r));
    }
    return out;
}

FollowUpBuild build_followupqa(const std::vector<HotpotRecord>& records, const FollowUpConfig& config) {
    if (config.mode == FollowUpMode::llm && !config.client) throw UsageError("llm mode needs a dataset endpoint");
    Rng rng(config.seed);
    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    if (config.budget > 0 && order.size() > config.budget) order.resize(config.budget);

    struct Plan {
        const HotpotRecord* record;
        std::size_t keep = 0;                  // index of the given passage
        std::optional<std::size_t> dropped;    // none for single hop
    };
    std::vector<Plan> plans;
    for (auto idx : order) {
        const auto& r = records[idx];
        Plan p{&r, 0, std::nullopt};
        if (r.supporting.empty()) throw DataError("record '" + r.id + "' has no supporting passages");
        if (r.type == QuestionType::comparison) {
            if (r.supporting.size() < 2) throw DataError("comparison record '" + r.id + "' needs two passages");
            p.dropped = rng.coin() ? 1 : 0;
            p.keep = 1 - *p.dropped;
        } else if (r.type == QuestionType::bridge) {
            if (r.supporting.size() < 2) throw DataError("bridge record '" + r.id + "' needs two passages");
            p.dropped = 1;
        }
        plans.push_back(p);
    }

    FollowUpBuild out;
    out.considered = plans.size();
    std::vector<std::optional<FollowUpSample>> slots(plans.size());
    std::vector<std::string> reasons(plans.size());
    auto run = [&](std::size_t i) {
        const auto& plan = plans[i];
        const auto& r = *plan.record;
        FollowUpSample s{r.question, r.supporting[plan.keep].text, "NA"};
        if (plan.dropped) {
            if (config.mode == FollowUpMode::oracle) {
                s.target = r.supporting[*plan.dropped].text;
            } else {
                try {
                    auto user = render_template(config.prompts.followup_user,
                                                {{"question", r.question}, {"passage", s.given}});
                    auto reply = config.client->complete(make_request(config.role, config.prompts.followup_system, user));
                    auto d = parse_decision(reply.text);
                    if (d.is_stop()) {
                        reasons[i] = r.id + ": model replied NA for a multi-hop question";
                        return;
                    }
                    s.target = d.question();
                } catch (const Error& e) {
                    reasons[i] = r.id + ": " + e.what();
                    return;
                }
            }
        }
        slots[i] = std::move(s);
    };
    const std::size_t workers = config.mode == FollowUpMode::llm ? std::max<std::size_t>(1, config.workers) : 1;
    if (workers == 1) {
        for (std::size_t i = 0; i < plans.size(); ++i) run(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < std::min(workers, plans.size()); ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < plans.size(); i = next++) run(i);
            });
        }
    }
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i]) {
            out.samples.push_back(std::move(*slots[i]));
        } else {
            ++out.skipped;
            out.skip_reasons.push_back(reasons[i]);
        }
    }
    return out;
}

Splits split_dataset(const std::vector<FollowUpSample>& samples, Ratios ratios, std::uint64_t seed) {
    if (samples.empty()) throw DataError("split_dataset: no samples");
    check_ratios({ratios.train, ratios.val, ratios.test}, "split ratios");
    auto shuffled = samples;
    Rng rng(seed);
    rng.shuffle(shuffled);
    auto sizes = largest_remainder(shuffled.size(), {ratios.train, ratios.val, ratios.test});
    Splits s;
    auto it = shuffled.begin();
    auto cut = [&](std::vector<FollowUpSample>& dst, std::size_t n) {
        dst.assign(std::make_move_iterator(it), std::make_move_iterator(it + static_cast<std::ptrdiff_t>(n)));
        it += static_cast<std::ptrdiff_t>(n);
    };
    cut(s.train, sizes[0]);
    cut(s.val, sizes[1]);
    cut(s.test, sizes[2]);
    return s;
}

}  // namespace kgp
